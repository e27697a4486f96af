import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgraphs.ffield import ext_field, field_for_order, make_field
from ffgraphs.graphs import Graph, build_code_graph, build_euclidean, build_halfplane, halfplane_ext
from ffgraphs.qforms import forms_for_dim, make_form
from ffgraphs.spectral import (
    SpectralError,
    certify,
    edge_bound_check,
    jacobi_eigenvalues,
    mixing_audit,
    mixing_check,
    ordered_edge_count,
    spectrum_charsum,
    spectrum_dense,
)


def complete(n):
    return Graph.from_dense(~np.eye(n, dtype=bool))


def cycle(n):
    return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])


def test_small_spectra():
    assert np.allclose(spectrum_dense(complete(3)).eigenvalues, [2, -1, -1])
    assert np.allclose(spectrum_dense(cycle(4)).eigenvalues, [2, 0, 0, -2], atol=1e-9)


def test_cycle_spectrum_closed_form():
    n = 11
    want = sorted((2 * math.cos(2 * math.pi * k / n) for k in range(n)), reverse=True)
    assert np.allclose(spectrum_dense(cycle(n)).eigenvalues, want, atol=1e-9)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 30), st.integers(0, 2**32 - 1))
def test_jacobi_agrees_with_lapack(n, seed):
    rng = np.random.default_rng(seed)
    M = rng.normal(size=(n, n))
    M = M + M.T
    ev = jacobi_eigenvalues(M)
    assert np.allclose(np.sort(ev), np.linalg.eigvalsh(M), atol=1e-8)


def test_asymmetric_adjacency_rejected():
    bits = np.zeros((2, 1), dtype=np.uint8)
    bits[0, 0] = 2
    G = Graph(bits, [(0,), (1,)], check=False)
    with pytest.raises(SpectralError):
        spectrum_dense(G)


def test_irregular_certify_rejected():
    with pytest.raises(SpectralError):
        certify(Graph.from_edges(3, [(0, 1)]))


@pytest.mark.parametrize("q", [3, 5, 7])
def test_charsum_matches_dense(q):
    F = field_for_order(q)
    for Q in forms_for_dim(F, 2):
        for a in range(q):
            cs = spectrum_charsum(Q, a)
            G = build_euclidean(Q, a)
            assert cs.matches(spectrum_dense(G))
            assert cs.eigenvalues[0] == pytest.approx(G.valency())


@pytest.mark.parametrize("q", [9, 4])
def test_charsum_matches_dense_prime_powers(q):
    F = field_for_order(q)
    for Q in forms_for_dim(F, 2):
        assert spectrum_charsum(Q, 1).matches(spectrum_dense(build_euclidean(Q, 1)))


def test_trace_identities():
    for G in [build_euclidean(make_form(make_field(5), "minus_even", 2), 2), build_halfplane(halfplane_ext(5), 1),
              build_code_graph(2)]:
        s1, s2 = spectrum_dense(G).trace_moments()
        assert abs(s1) < 1e-6 * G.n
        assert abs(s2 - G.valency() * G.n) < 1e-6 * G.n


def test_certificate_examples():
    F3 = make_field(3)
    cert = certify(build_euclidean(make_form(F3, "minus_even", 2), 1))
    assert cert.lam <= 2 * math.sqrt(3) + 1e-6 and cert.passed
    disc = certify(build_euclidean(make_form(F3, "plus_even", 2), 1))
    assert not disc.connected and disc.d_multiplicity == 3
    F5 = make_field(5)
    cs = spectrum_charsum(make_form(F5, "plus_even", 2), 1)
    assert max(abs(v) for v in cs.eigenvalues[1:]) <= 2 * math.sqrt(5) + 1e-9
    V5 = certify(build_halfplane(halfplane_ext(5), 1))
    assert (V5.n, V5.d) == (20, 6) and V5.lam <= 2 * math.sqrt(5) + 1e-6 and V5.passed
    code = certify(build_code_graph(2))
    assert code.d == 3 and code.bound is None and code.passed is None


def test_certificate_json_keys():
    d = certify(build_halfplane(halfplane_ext(3), 1)).to_dict()
    assert {"n", "d", "lambda", "bound", "pass", "connected"} <= set(d)


def test_mixing_examples():
    G = build_halfplane(halfplane_ext(7), 1)
    cert = certify(G)
    full = mixing_check(G, range(G.n), range(G.n), cert)
    assert full.edges == cert.d * G.n and full.deviation == 0
    for u, v in [(0, 1), (3, 17), (5, 5)]:
        r = mixing_check(G, [u], [v], cert)
        assert abs(r.edges - cert.d / G.n) <= cert.lam + 1e-12
    assert edge_bound_check(G, range(G.n), cert).edges == cert.d * G.n // 2
    audit = mixing_audit(G, cert, trials=1000, seed=1)
    assert audit["pair_failures"] == 0 and audit["internal_failures"] == 0


def test_independent_set_forces_alpha_bound():
    G = build_euclidean(make_form(make_field(5), "minus_even", 2), 1)
    cert = certify(G)
    # greedy independent set; e(B) = 0 so |B| <= n lambda / d
    B = []
    for v in range(G.n):
        if all(not G.has_edge(v, u) for u in B):
            B.append(v)
    assert edge_bound_check(G, B, cert).edges == 0
    assert len(B) <= G.n * cert.lambda_second / cert.d
    audit = mixing_audit(G, cert, trials=300, seed=2)
    assert audit["internal_failures"] == 0


@settings(max_examples=60, deadline=None)
@given(st.data())
def test_ordered_edge_count_matches_dense(data):
    G = build_halfplane(halfplane_ext(5), 2)
    A = G.dense()
    B = data.draw(st.lists(st.integers(0, G.n - 1), unique=True))
    C = data.draw(st.lists(st.integers(0, G.n - 1), unique=True))
    assert ordered_edge_count(G, B, C) == int(A[np.ix_(B, C)].sum()) if B and C else ordered_edge_count(G, B, C) == 0
