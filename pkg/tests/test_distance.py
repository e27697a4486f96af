import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from ffgraphs.distance import (
    CSV_COLUMNS,
    DistanceError,
    EuclideanSpace,
    ExperimentConfig,
    HalfPlaneSpace,
    PointSet,
    distance_set,
    distance_set_halfplane,
    distance_set_pair,
    exhaustive_table,
    matching_extremal_set,
    run_experiment,
    theorem_threshold,
    trial_seed,
    verify_lemma_mechanisms,
)
from ffgraphs.ffield import field_for_order, make_field
from ffgraphs.graphs import halfplane_ext
from ffgraphs.qforms import eval_form, forms_for_dim, make_form


def delta_oracle(Q, pts):
    F = Q.ctx
    return sorted({int(eval_form(Q, F.sub(np.array(x), np.array(y)))) for x in pts for y in pts})


def test_singleton_and_full_space():
    for Q in forms_for_dim(make_field(3), 2):
        space = EuclideanSpace(Q)
        assert distance_set(Q, PointSet(space, [4])).distance_set == [0]
        assert distance_set(Q, PointSet(space, range(9))).distance_set == [0, 1, 2]


@pytest.mark.parametrize("q", [3, 5, 7])
def test_isotropic_line_has_only_zero(q):
    Q = make_form(field_for_order(q), "plus_even", 2)
    space = EuclideanSpace(Q)
    line = [t * q for t in range(q)]  # points (t, 0)
    assert all(tuple(space.points[i]) == (t, 0) for t, i in enumerate(line))
    rep = distance_set(Q, PointSet(space, line))
    assert rep.distance_set == [0] and rep.size_e == q


@settings(max_examples=60, deadline=None)
@given(st.sampled_from([3, 5, 7]), st.data())
def test_distance_set_matches_oracle(q, data):
    Q = data.draw(st.sampled_from(forms_for_dim(field_for_order(q), 2)))
    space = EuclideanSpace(Q)
    members = data.draw(st.lists(st.integers(0, q * q - 1), min_size=1, max_size=12, unique=True))
    rep = distance_set(Q, PointSet(space, members))
    assert rep.distance_set == delta_oracle(Q, [space.points[i] for i in members])
    assert 0 in rep.distance_set
    F = PointSet(space, members)
    assert distance_set_pair(space, F, F).distance_set == rep.distance_set


def test_pair_singletons():
    Q = make_form(make_field(5), "minus_even", 2)
    space = EuclideanSpace(Q)
    x, y = space.points[7], space.points[13]
    rep = distance_set_pair(space, PointSet(space, [7]), PointSet(space, [13]))
    assert rep.distance_set == [int(eval_form(Q, Q.ctx.sub(x, y)))]


def test_space_mismatch_rejected():
    Q = make_form(make_field(5), "plus_even", 2)
    E = PointSet(EuclideanSpace(Q), [0, 1])
    with pytest.raises(DistanceError):
        distance_set(make_form(make_field(5), "minus_even", 2), E)
    with pytest.raises(DistanceError):
        distance_set_pair(EuclideanSpace(Q), E, E)
    with pytest.raises(DistanceError):
        PointSet(EuclideanSpace(Q), [25])


def test_halfplane_census_q3():
    ext = halfplane_ext(3)
    space = HalfPlaneSpace(ext)
    rep = distance_set_halfplane(ext, PointSet(space, range(6)))
    D = [[ext.poincare_distance(tuple(z), tuple(w)) for w in space.points] for z in space.points]
    assert rep.distance_set == sorted({v for row in D for v in row})
    assert distance_set_halfplane(ext, PointSet(space, [2])).distance_set == [0]


@pytest.mark.parametrize("q", [3, 5])
def test_matching_extremal_set(q):
    ext = halfplane_ext(q)
    E = matching_extremal_set(ext)
    assert len(E) == (q * q - q) // 2
    rep = distance_set_halfplane(ext, E)
    assert E.space.four_sigma not in rep.distance_set


def test_thresholds():
    space = EuclideanSpace(make_form(make_field(5), "plus_even", 2))
    t = theorem_threshold(space, 25)
    assert t["threshold"] == pytest.approx(min(25 / (3 * 5**0.5), 5))
    tp = theorem_threshold(space, 10, 20, epsilon=0.5)
    assert tp["hypothesis"] == pytest.approx(9 * 5**1.5)


def test_pair_audit_q5():
    cfg = ExperimentConfig(space="euclidean", q=5, d=2, sizes=[15, 20, 25], trials=50, seed=3, pair=True, epsilon=0.5)
    rep = run_experiment(cfg)
    assert rep.violations == 0
    assert sum(s["hypothesis_met"] for s in rep.summary) > 0


def test_experiment_is_deterministic_and_csv_shaped():
    cfg = ExperimentConfig(space="halfplane", q=5, sizes=[5, 10], trials=5, seed=42, mode="adversarial-line")
    a, b = run_experiment(cfg), run_experiment(cfg)
    assert a.to_dict() == b.to_dict()
    header = a.to_csv().splitlines()[0].split(",")
    assert header == list(CSV_COLUMNS)
    assert trial_seed(42, 5, 0) == a.rows[0]["seed"]


@pytest.mark.parametrize("mode", ["uniform", "adversarial-line", "adversarial-ball"])
def test_sampling_modes_give_valid_sets(mode):
    rep = run_experiment(ExperimentConfig(space="euclidean", q=7, sizes=[10], trials=3, mode=mode))
    assert all(r["size"] == 10 for r in rep.rows)


def test_config_validation():
    with pytest.raises(DistanceError):
        ExperimentConfig.from_dict({"space": "euclidean", "bogus": 1})
    with pytest.raises(DistanceError):
        run_experiment(ExperimentConfig(q=3, sizes=[10]))
    with pytest.raises(DistanceError):
        run_experiment(ExperimentConfig(q=3, sizes=[2], mode="nope"))


def test_exhaustive_table_small():
    space = EuclideanSpace(make_form(make_field(3), "minus_even", 2))
    rows = exhaustive_table(space, 3)
    assert [r["subsets"] for r in rows] == [9, 36, 84]
    assert rows[0]["min_delta"] == rows[0]["max_delta"] == 1
    # brute-force check of size 2
    D = [len({0, int(eval_form(space.Q, space.Q.ctx.sub(space.points[i], space.points[j])))})
         for i, j in itertools.combinations(range(9), 2)]
    assert rows[1]["min_delta"] == min(D) and rows[1]["max_delta"] == max(D)


def test_lemma_mechanisms_q5():
    out = verify_lemma_mechanisms(5, 2, samples=100, seed=1)
    assert out["all_hold"]
    out = verify_lemma_mechanisms(5, "halfplane", samples=100, seed=1)
    assert out["all_hold"]
