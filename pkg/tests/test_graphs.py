import itertools
import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgraphs.combinat import count_triangles
from ffgraphs.ffield import ext_field, field_for_order, make_field
from ffgraphs.graphs import (
    Graph,
    GraphError,
    build_alon_graph,
    build_code_graph,
    build_euclidean,
    build_halfplane,
    build_orthogonal,
    compare_theta_halfplane,
    halfplane_ext,
    halfplane_points,
    nonisotropic_points,
    orthogonal_valencies,
)
from ffgraphs.qforms import eval_form, forms_for_dim, make_form, sphere_table


def euclid_oracle(Q, a):
    """Adjacency by direct pairwise evaluation of Q(x - y)."""
    F, q, d = Q.ctx, Q.q, Q.dim
    V = list(itertools.product(range(q), repeat=d))
    n = len(V)
    A = np.zeros((n, n), dtype=bool)
    for i, x in enumerate(V):
        for j, y in enumerate(V):
            if i != j and eval_form(Q, F.sub(np.array(x), np.array(y))) == a:
                A[i, j] = True
    return A


# --- Graph container ---------------------------------------------------------


def test_graph_roundtrips():
    G = Graph.from_edges(5, [(0, 1), (1, 2), (2, 3), (3, 4), (4, 0)], family_tag={"family": "test"})
    assert G.valency() == 2 and G.n_edges == 5
    H = Graph.from_json(G.to_json())
    assert np.array_equal(H.dense(), G.dense()) and H.family_tag == G.family_tag
    K = Graph.from_adjlist(G.to_adjlist())
    assert np.array_equal(K.dense(), G.dense())
    json.loads(G.to_json())


def test_graph_rejects_loops_and_asymmetry():
    A = np.zeros((3, 3), dtype=bool)
    A[0, 1] = True
    with pytest.raises(GraphError):
        Graph.from_dense(A)
    B = np.eye(3, dtype=bool)
    with pytest.raises(GraphError):
        Graph.from_dense(B)


@settings(max_examples=50, deadline=None)
@given(st.integers(1, 40), st.data())
def test_graph_bitsets_match_dense(n, data):
    edges = data.draw(st.lists(st.tuples(st.integers(0, n - 1), st.integers(0, n - 1)), max_size=80))
    edges = [(u, v) for u, v in edges if u != v]
    G = Graph.from_edges(n, edges)
    A = np.zeros((n, n), dtype=bool)
    for u, v in edges:
        A[u, v] = A[v, u] = True
    assert np.array_equal(G.dense(), A)
    assert np.array_equal(G.degrees(), A.sum(1))
    assert {tuple(e) for e in G.edges()} == {(u, v) for u in range(n) for v in range(u + 1, n) if A[u, v]}


# --- Euclidean ---------------------------------------------------------------


def test_euclidean_examples():
    F = make_field(3)
    G = build_euclidean(make_form(F, "plus_even", 2), 1)
    assert G.n == 9 and G.valency() == 2 and count_triangles(G) == 3
    assert build_euclidean(make_form(F, "minus_even", 2), 1).valency() == 4


@pytest.mark.parametrize("q,d", [(3, 2), (5, 2), (3, 3), (4, 2), (9, 2)])
def test_euclidean_matches_pairwise_oracle(q, d):
    F = field_for_order(q)
    for Q in forms_for_dim(F, d):
        tab = sphere_table(Q)
        for a in range(q):
            G = build_euclidean(Q, a)
            assert np.array_equal(G.dense(), euclid_oracle(Q, a))
            assert G.valency() == tab[a] - (1 if a == 0 else 0)


def test_euclidean_ceiling():
    with pytest.raises(GraphError):
        build_euclidean(make_form(field_for_order(17), "plus_even", 4), 1)


# --- half-plane --------------------------------------------------------------


def halfplane_oracle(ext, a):
    P = [tuple(p) for p in halfplane_points(ext)]
    n = len(P)
    A = np.zeros((n, n), dtype=bool)
    for i in range(n):
        for j in range(n):
            A[i, j] = i != j and ext.poincare_distance(P[i], P[j]) == a
    return A


def test_halfplane_q3_example():
    ext = ext_field(make_field(3), 2)
    G = build_halfplane(ext, 1)
    assert G.n == 6 and G.valency() == 4
    assert np.array_equal(G.dense(), halfplane_oracle(ext, 1))


@pytest.mark.parametrize("q", [3, 5, 7, 9])
def test_halfplane_valencies(q):
    ext = halfplane_ext(q)
    F = ext.base
    four_sigma = F.mul(4 % F.p, ext.sigma)
    assert build_halfplane(ext, 0).n_edges == 0
    for a in range(1, q):
        G = build_halfplane(ext, a)
        if a == four_sigma:
            assert G.n_edges == (q * q - q) // 2 and G.valency() == 1
        else:
            assert G.valency() == q + 1


@pytest.mark.parametrize("q", [5, 7])
def test_poincare_distance_invariant_under_affine_maps(q):
    ext = halfplane_ext(q)
    F = ext.base
    rng = np.random.default_rng(q)
    P = [tuple(int(t) for t in p) for p in halfplane_points(ext)]
    for _ in range(100):
        z, w = (P[i] for i in rng.integers(0, len(P), 2))
        c = int(rng.integers(0, q))
        s = int(rng.integers(1, q))
        shift = lambda u: (F.add(u[0], c), u[1])
        scale = lambda u: (F.mul(s, u[0]), F.mul(s, u[1]))
        d0 = ext.poincare_distance(z, w)
        assert ext.poincare_distance(shift(z), shift(w)) == d0
        assert ext.poincare_distance(scale(z), scale(w)) == d0


# --- orthogonal families -----------------------------------------------------


def test_class_size_examples():
    F3 = make_field(3)
    assert sorted(nonisotropic_points(make_form(F3, "odd_std", 3)).sizes().values()) == [3, 6]
    assert nonisotropic_points(make_form(F3, "plus_even", 4)).sizes() == {"square": 12, "nonsquare": 12}


@pytest.mark.parametrize("q", [3, 5, 7])
def test_nonisotropic_points_are_nonisotropic(q):
    Q = make_form(field_for_order(q), "odd_std", 3)
    cls = nonisotropic_points(Q)
    for pts in (cls.square, cls.nonsquare):
        assert np.all(eval_form(Q, pts) != 0)


def test_orthogonal_m1_q5_vertex_counts():
    Q = make_form(make_field(5), "odd_std", 3)
    assert build_orthogonal("odd_theta", Q, 1).n == 10
    assert build_orthogonal("odd_omega", Q, 1).n == 15


@pytest.mark.parametrize("q", [3, 5])
def test_orthogonal_tag_reports_audit_honestly(q):
    F = field_for_order(q)
    for fam, kind, dim in [("odd_theta", "odd_std", 3), ("odd_omega", "odd_std", 3), ("even_plus", "plus_even", 2),
                           ("even_minus", "minus_even", 2), ("even_plus", "plus_even", 4)]:
        Q = make_form(F, kind, dim)
        for i in range(1, (q + 1) // 2 + 1):
            G = build_orthogonal(fam, Q, i)
            val = G.valency()
            tag = G.family_tag
            assert tag["valency_ok"] == (val is not None and val in orthogonal_valencies(fam, q, dim // 2, i))
            assert (tag["mismatch"] is None) == tag["valency_ok"]


def test_orthogonal_rejects_bad_input():
    Q = make_form(make_field(5), "odd_std", 3)
    with pytest.raises(GraphError):
        build_orthogonal("odd_theta", Q, 0)
    with pytest.raises(GraphError):
        build_orthogonal("even_plus", Q, 1)


def test_theta_halfplane_comparison_is_reported():
    rep = compare_theta_halfplane(5)
    assert rep["q"] == 5 and any(r["graph"].startswith("halfplane") for r in rep["rows"])


# --- binary code graphs ------------------------------------------------------


def test_code_graph_examples():
    G2 = build_code_graph(2)
    assert G2.n == 16 and G2.valency() == 3 and count_triangles(G2) == 0
    G4 = build_code_graph(4)
    assert G4.n == 256 and G4.valency() == 15 and count_triangles(G4) == 0


def test_alon_graph_small():
    G = build_alon_graph(2)
    assert G.n == 64 and G.valency() == 2
    assert G.family_tag["W0_size"] == 1 and G.family_tag["W1_size"] == 2
    with pytest.raises(GraphError):
        build_alon_graph(3)


def test_alon_graph_k4():
    G = build_alon_graph(4)
    assert G.n == 4096 and G.valency() == 56 and count_triangles(G) == 0
