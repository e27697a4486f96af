import itertools
import math
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgraphs.combinat import (
    CombinatError,
    RamseyError,
    SearchBudget,
    chromatic_bruteforce,
    chromatic_exact,
    count_triangles,
    explicit_bounds,
    growth_exponent,
    hoffman_bound,
    independence_bruteforce,
    independence_exact,
    ramsey_witness,
    spectral_bounds,
    toughness_bruteforce,
    toughness_exact,
    triangle_free_scan,
)
from ffgraphs.ffield import make_field
from ffgraphs.graphs import Graph, build_code_graph, build_euclidean, build_halfplane, halfplane_ext
from ffgraphs.qforms import make_form
from ffgraphs.spectral import certify, spectrum_dense


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def complete(n):
    return Graph.from_dense(~np.eye(n, dtype=bool))


def triangles_triple_loop(G):
    A = G.dense()
    return sum(1 for a, b, c in itertools.combinations(range(G.n), 3) if A[a, b] and A[b, c] and A[a, c])


@st.composite
def small_graphs(draw, max_n=10):
    n = draw(st.integers(1, max_n))
    pairs = list(itertools.combinations(range(n), 2))
    keep = draw(st.lists(st.booleans(), min_size=len(pairs), max_size=len(pairs)))
    return Graph.from_edges(n, [e for e, k in zip(pairs, keep) if k])


# --- triangles ---------------------------------------------------------------


def test_triangle_examples():
    assert count_triangles(complete(3)) == 1
    F5 = make_field(5)
    for a in range(1, 5):
        assert count_triangles(build_euclidean(make_form(F5, "plus_even", 2), a)) == 0


def test_minus_form_q11_has_triangles():
    # the classification statement lists E_11(2, Q-, a) as triangle-free; measured otherwise
    G = build_euclidean(make_form(make_field(11), "minus_even", 2), 1)
    assert count_triangles(G) > 0
    assert count_triangles(G) == triangles_triple_loop(G)


@settings(max_examples=80, deadline=None)
@given(small_graphs(max_n=14))
def test_triangles_match_triple_loop(G):
    assert count_triangles(G) == triangles_triple_loop(G)


@pytest.mark.parametrize("q", [5, 7, 11, 13])
def test_minus_three_rule_predicts_triangle_freeness(q):
    scan = triangle_free_scan(q)
    assert scan["matches_minus_three_rule"]
    assert scan["positive_nonlisted"]
    assert scan["h3_triangle_free_exists"]


# --- independence ------------------------------------------------------------


def test_independence_examples():
    assert tuple(independence_exact(cycle(5))) == (2, "exact")
    matching = Graph.from_edges(8, [(0, 1), (2, 3), (4, 5), (6, 7)])
    assert independence_exact(matching).value == 4
    G = build_euclidean(make_form(make_field(3), "minus_even", 2), 1)
    assert independence_exact(G).value == independence_bruteforce(G)


@settings(max_examples=80, deadline=None)
@given(small_graphs(max_n=12))
def test_independence_matches_bruteforce(G):
    assert independence_exact(G).value == independence_bruteforce(G)


def test_independence_budget_reports_bounds():
    G = build_euclidean(make_form(make_field(7), "minus_even", 2), 1)
    res = independence_exact(G, SearchBudget(node_limit=5))
    assert res.outcome == "lower_bound_only"
    assert res.value <= independence_exact(G).value <= res.upper


def test_hoffman_bound_holds():
    G = build_halfplane(halfplane_ext(5), 1)
    alpha = independence_exact(G).value
    assert alpha <= hoffman_bound(spectrum_dense(G), G.valency()) + 1e-9


# --- chromatic number --------------------------------------------------------


def test_chromatic_examples():
    assert chromatic_exact(cycle(6)).value == 2
    assert chromatic_exact(Graph.from_edges(5, [(0, 3), (1, 3), (2, 4)])).value == 2
    assert chromatic_exact(cycle(5)).value == 3
    assert chromatic_exact(complete(6)).value == 6


def test_chromatic_q5_witness():
    G = build_euclidean(make_form(make_field(5), "plus_even", 2), 1)
    cert = certify(G)
    chi = chromatic_exact(G)
    assert chi.exact and chi.value >= cert.d / cert.lam - 1e-9
    assert chi.value >= G.n / independence_exact(G).value - 1e-9
    assert chi.value == 3


@settings(max_examples=60, deadline=None)
@given(small_graphs(max_n=10))
def test_chromatic_matches_bruteforce(G):
    assert chromatic_exact(G).value == chromatic_bruteforce(G)


def test_chromatic_bruteforce_oracle_sanity():
    # Petersen graph: chromatic number 3
    outer = [(i, (i + 1) % 5) for i in range(5)]
    inner = [(5 + i, 5 + (i + 2) % 5) for i in range(5)]
    spokes = [(i, i + 5) for i in range(5)]
    P = Graph.from_edges(10, outer + inner + spokes)
    assert chromatic_bruteforce(P) == 3 and chromatic_bruteforce(complete(7)) == 7


# --- toughness ---------------------------------------------------------------


def test_toughness_examples():
    assert toughness_exact(cycle(6)).value == 1
    assert toughness_exact(Graph.from_edges(4, [(0, 1), (2, 3)])).value == 0
    assert toughness_exact(complete(4)).value == math.inf
    G = build_halfplane(halfplane_ext(3), 1)
    t = toughness_exact(G)
    assert t.exact and float(t.value) >= spectral_bounds(certify(G)).toughness_bound


@settings(max_examples=40, deadline=None)
@given(small_graphs(max_n=9))
def test_toughness_matches_bruteforce(G):
    assert toughness_exact(G).value == toughness_bruteforce(G)


def test_toughness_star():
    star = Graph.from_edges(5, [(0, i) for i in range(1, 5)])
    assert toughness_exact(star).value == Fraction(1, 4)


def test_toughness_large_graph_needs_certificate():
    G = build_halfplane(halfplane_ext(7), 1)
    with pytest.raises(CombinatError):
        toughness_exact(G)
    res = toughness_exact(G, cert=certify(G))
    assert res.outcome == "lower_bound_only"


# --- bounds ------------------------------------------------------------------


def test_spectral_bounds_examples():
    G = build_halfplane(halfplane_ext(5), 1)
    cert = certify(G)
    b = spectral_bounds(cert)
    assert b.alpha_bound == pytest.approx(20 * cert.lambda_second / 6)
    with pytest.raises(CombinatError):
        spectral_bounds(certify(Graph.from_edges(4, [(0, 1), (2, 3)])))


def test_alpha_within_spectral_bound():
    for G in [build_halfplane(halfplane_ext(5), 2), build_euclidean(make_form(make_field(5), "minus_even", 2), 1)]:
        cert = certify(G)
        assert independence_exact(G).value <= spectral_bounds(cert).alpha_bound + 1e-9


def test_explicit_bounds_reported():
    G = build_euclidean(make_form(make_field(7), "minus_even", 2), 1)
    cert = certify(G)
    rep = explicit_bounds(cert, growth_exponent(G.family_tag))
    assert rep["exponent"] == 2
    assert rep["alpha_o1"] == pytest.approx(rep["alpha_constant"] - 4)
    assert growth_exponent(build_code_graph(2).family_tag) is None


# --- Ramsey ------------------------------------------------------------------


def test_ramsey_q5():
    w = ramsey_witness(5)
    assert w.graph.n == 25 and w.valid and w.triangle_count == 0
    assert w.alpha_kind == "exact" and w.alpha_value == 10
    assert w.ramsey_statement == "R(3,11) > 25"


def test_ramsey_q17_uses_spectral_bound():
    w = ramsey_witness(17)
    assert w.graph.n == 289 and w.cert.d == 16 and w.valid
    assert w.cert.lam <= 2 * math.sqrt(17) + 1e-6
    assert w.alpha_kind == "spectral_upper" and w.alpha_bound <= 149
    assert set(w.to_dict()) >= {"q", "n", "d", "lambda", "alpha_kind", "alpha_value", "chi_lower", "ramsey_statement"}


def test_ramsey_q7_reports_triangles():
    # 7 = 12 - 5 passes the congruence but -3 is a square mod 7
    w = ramsey_witness(7, exact_alpha=False)
    assert not w.valid and w.triangle_count > 0 and w.ramsey_statement is None


@pytest.mark.parametrize("q", [13, 11, 9, 25])
def test_ramsey_rejects_bad_q(q):
    with pytest.raises(RamseyError):
        ramsey_witness(q)
