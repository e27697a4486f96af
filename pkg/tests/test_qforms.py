import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgraphs.ffield import field_for_order, make_field
from ffgraphs.qforms import (
    FormError,
    bilinear,
    eval_form,
    form_from_terms,
    forms_for_dim,
    gram_bilinear,
    gram_matrix,
    is_nondegenerate,
    make_form,
    predicted_sphere_size,
    sphere_size,
    sphere_table,
    valency_set,
)

F3 = make_field(3)


def test_make_form_examples():
    assert make_form(F3, "plus_even", 2).terms == ((0, 1, 2),)
    minus = make_form(F3, "minus_even", 2)
    assert minus.param == 2
    assert eval_form(minus, (1, 0)) == 1 and eval_form(minus, (0, 1)) == F3.neg(2)
    odd = make_form(make_field(5), "odd_std", 3)
    assert sorted(odd.terms) == [(0, 1, 2), (2, 2, 1)]


def test_eval_examples():
    assert eval_form(make_form(F3, "plus_even", 2), (1, 2)) == 1
    assert eval_form(make_form(F3, "minus_even", 2), (1, 1)) == 2
    for Q in forms_for_dim(F3, 3):
        assert eval_form(Q, (0, 0, 0)) == 0
    with pytest.raises(FormError):
        eval_form(make_form(F3, "plus_even", 2), (1, 2, 0))


def test_gram_examples():
    assert gram_matrix(make_form(F3, "plus_even", 2)).tolist() == [[0, 1], [1, 0]]
    assert gram_matrix(make_form(F3, "minus_even", 2)).tolist() == [[1, 0], [0, 1]]


def test_bilinear_examples():
    Q = make_form(F3, "plus_even", 2)
    assert bilinear(Q, (1, 0), (0, 1)) == 2
    for x in itertools.product(range(3), repeat=2):
        assert bilinear(Q, x, x) == F3.mul(2, eval_form(Q, x))
        for y in itertools.product(range(3), repeat=2):
            assert bilinear(Q, x, y) == bilinear(Q, y, x)


def test_sphere_size_examples():
    assert sphere_size(make_form(F3, "plus_even", 2), 1)["count"] == 2
    assert sphere_size(make_form(F3, "minus_even", 2), 1)["count"] == 4


def test_degenerate_forms_detected():
    assert not is_nondegenerate(form_from_terms(F3, 2, []))
    assert not is_nondegenerate(form_from_terms(F3, 2, [(0, 0, 1)]))


@pytest.mark.parametrize("q", [3, 5, 7, 9, 11])
@pytest.mark.parametrize("dim", [2, 3, 4])
def test_catalogue_nondegenerate_and_sphere_formula(q, dim):
    F = field_for_order(q)
    for Q in forms_for_dim(F, dim):
        assert is_nondegenerate(Q)
        tab = sphere_table(Q)
        assert tab.sum() == q**dim
        for a in range(q):
            assert predicted_sphere_size(Q, a) == tab[a]
        for a in range(1, q):
            assert tab[a] in valency_set(q, dim)


@pytest.mark.parametrize("q", [4, 8])
def test_even_characteristic_sphere_formula(q):
    F = field_for_order(q)
    for dim in (2, 3, 4):
        for Q in forms_for_dim(F, dim):
            tab = sphere_table(Q)
            assert [predicted_sphere_size(Q, a) for a in range(q)] == tab.tolist()


def test_odd_dimension_forms_are_inequivalent():
    # the two odd-dim forms split the nonzero values into opposite sphere sizes
    F = field_for_order(7)
    std, prime = forms_for_dim(F, 3)
    a, b = sphere_table(std), sphere_table(prime)
    assert all(a[t] != b[t] for t in range(1, 7))


@settings(max_examples=100, deadline=None)
@given(st.sampled_from([3, 5, 7, 9, 13]), st.integers(2, 4), st.data())
def test_gram_represents_form(q, dim, data):
    F = field_for_order(q)
    Q = data.draw(st.sampled_from(forms_for_dim(F, dim)))
    x = np.array(data.draw(st.lists(st.integers(0, q - 1), min_size=dim, max_size=dim)))
    y = np.array(data.draw(st.lists(st.integers(0, q - 1), min_size=dim, max_size=dim)))
    assert gram_bilinear(Q, x, x) == eval_form(Q, x)
    assert F.mul(2, gram_bilinear(Q, x, y)) == bilinear(Q, x, y)
    t = data.draw(st.integers(0, q - 1))
    assert eval_form(Q, F.mul(t, x)) == F.mul(F.mul(t, t), eval_form(Q, x))
