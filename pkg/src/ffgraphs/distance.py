"""Distance sets in GF(q)^d and the finite upper half-plane, and seeded audits.

Distances are quadratic-form values Q(x - y) in the Euclidean case and
Poincare distances N(z - w) / (Im z Im w) on H_q.  Single-set distance sets
range over all ordered pairs, so 0 is always present.
"""

from __future__ import annotations

import csv
import io
import itertools
import math
from dataclasses import asdict, dataclass, field

import numpy as np

from .combinat import SearchBudget, independence_exact, spectral_bounds
from .ffield import ExtCtx, field_for_order
from .graphs import build_euclidean, build_halfplane, halfplane_ext, halfplane_points, poincare_matrix
from .qforms import QuadraticForm, all_vectors, bilinear, eval_form, forms_for_dim, make_form
from .spectral import certify, ordered_edge_count

DEFAULT_EPSILON = 0.1
CSV_COLUMNS = ("space", "q", "d", "size", "trial", "seed", "delta_size", "threshold", "satisfied")


class DistanceError(ValueError):
    pass


# ---------------------------------------------------------------------------
# spaces and point sets


class EuclideanSpace:
    kind = "euclidean"

    def __init__(self, Q: QuadraticForm):
        self.Q = Q
        self.q = Q.ctx.q
        self.d = Q.dim
        self.points = all_vectors(Q.ctx, Q.dim)

    @property
    def size(self) -> int:
        return len(self.points)

    def key(self):
        return ("euclidean", self.q, self.d, self.Q.kind)

    def distances(self, I, J, bilinear_variant: bool = False) -> np.ndarray:
        X, Y = self.points[I], self.points[J]
        F = self.Q.ctx
        if bilinear_variant:
            return bilinear(self.Q, X[:, None, :], Y[None, :, :])
        return eval_form(self.Q, F.sub(X[:, None, :], Y[None, :, :]))


class HalfPlaneSpace:
    kind = "halfplane"

    def __init__(self, ext: ExtCtx):
        self.ext = ext
        self.q = ext.base.q
        self.d = 2
        self.points = halfplane_points(ext)
        self.four_sigma = int(ext.base.mul(4 % ext.base.p, ext.sigma))

    @property
    def size(self) -> int:
        return len(self.points)

    def key(self):
        return ("halfplane", self.q, self.ext.sigma)

    def distances(self, I, J, bilinear_variant: bool = False) -> np.ndarray:
        if bilinear_variant:
            raise DistanceError("the bilinear variant only applies to Euclidean spaces")
        F = self.ext.base
        P, R = self.points[I], self.points[J]
        dx = F.sub(P[:, None, 0], R[None, :, 0])
        dy = F.sub(P[:, None, 1], R[None, :, 1])
        iy = F.mul(F.inv(P[:, None, 1]), F.inv(R[None, :, 1]))
        return F.mul(self.ext.norm((dx, dy)), iy)


@dataclass(frozen=True)
class PointSet:
    space: object
    members: tuple[int, ...]

    def __post_init__(self):
        m = tuple(sorted(set(int(v) for v in self.members)))
        if m and (m[0] < 0 or m[-1] >= self.space.size):
            raise DistanceError("point index outside the space")
        object.__setattr__(self, "members", m)

    def __len__(self):
        return len(self.members)

    @property
    def index(self) -> np.ndarray:
        return np.asarray(self.members, dtype=np.int64)


# ---------------------------------------------------------------------------
# thresholds


def theorem_threshold(space, size_e: int, size_f: int | None = None, epsilon: float = DEFAULT_EPSILON) -> dict:
    """Hypothesis size and claimed lower bound for the matching distance theorem."""
    q = space.q
    if space.kind == "euclidean":
        d = space.d
        if size_f is None:
            return {
                "theorem": "single_euclidean",
                "hypothesis": 3 * q ** (d / 2 + epsilon),
                "hypothesis_formula": "|E| >= 3*q**(d/2+eps)",
                "threshold": min(size_e / (3 * q ** ((d - 1) / 2)), q),
                "threshold_formula": "min(|E|/(3*q**((d-1)/2)), q)",
                "measure": size_e,
            }
        prod = size_e * size_f
        return {
            "theorem": "pair_euclidean",
            "hypothesis": 9 * q ** ((d - 1) + epsilon),
            "hypothesis_formula": "|E|*|F| >= 9*q**((d-1)+eps)",
            "threshold": min(math.sqrt(prod) / (3 * q ** ((d - 1) / 2)), q),
            "threshold_formula": "min(sqrt(|E|*|F|)/(3*q**((d-1)/2)), q)",
            "measure": prod,
        }
    if size_f is None:
        return {
            "theorem": "single_halfplane",
            "hypothesis": 3 * q ** (0.5 + epsilon),
            "hypothesis_formula": "|E| >= 3*q**(1/2+eps)",
            "threshold": min(size_e / (3 * math.sqrt(q)), q - 1),
            "threshold_formula": "min(|E|/(3*q**(1/2)), q-1)",
            "measure": size_e,
        }
    prod = size_e * size_f
    return {
        "theorem": "pair_halfplane",
        "hypothesis": 9 * q ** (1 + 2 * epsilon),
        "hypothesis_formula": "|E|*|F| >= 9*q**(1+2*eps)",
        "threshold": min(math.sqrt(prod) / (3 * math.sqrt(q)), q - 1),
        "threshold_formula": "min(sqrt(|E|*|F|)/(3*q**(1/2)), q-1)",
        "measure": prod,
    }


@dataclass
class DistanceReport:
    space: str
    q: int
    d: int
    size_e: int
    size_f: int | None
    distance_set: list[int]
    delta_size: int
    theorem: str
    threshold: float
    threshold_formula: str
    hypothesis_met: bool
    vacuous: bool
    satisfied: bool
    restricted_size: int | None = None
    bilinear_variant: bool = False

    def to_dict(self) -> dict:
        out = asdict(self)
        out["threshold"] = round(self.threshold, 9)
        return out


def _report(space, I, J, vals, epsilon, bilinear_variant=False) -> DistanceReport:
    delta = sorted(int(v) for v in np.unique(vals))
    size_f = None if J is None else len(J)
    th = theorem_threshold(space, len(I), size_f, epsilon)
    universe = space.size if size_f is None else space.size**2
    restricted = None
    if space.kind == "halfplane":
        restricted = len([v for v in delta if v not in (0, space.four_sigma)])
    return DistanceReport(
        space=space.kind,
        q=space.q,
        d=space.d,
        size_e=len(I),
        size_f=size_f,
        distance_set=delta,
        delta_size=len(delta),
        theorem=th["theorem"],
        threshold=th["threshold"],
        threshold_formula=th["threshold_formula"],
        hypothesis_met=bool(th["measure"] >= th["hypothesis"]),
        vacuous=bool(th["hypothesis"] > universe),
        satisfied=bool(len(delta) >= th["threshold"] - 1e-12),
        restricted_size=restricted,
        bilinear_variant=bilinear_variant,
    )


def distance_set(Q: QuadraticForm, E: PointSet, epsilon: float = DEFAULT_EPSILON) -> DistanceReport:
    """Delta_Q(E) = {Q(x - y) : x, y in E}."""
    if E.space.kind != "euclidean" or E.space.Q is not Q and E.space.Q != Q:
        raise DistanceError("point set does not live in this Euclidean space")
    I = E.index
    return _report(E.space, I, None, E.space.distances(I, I) if len(I) else np.zeros(0), epsilon)


def distance_set_halfplane(ext: ExtCtx, E: PointSet, epsilon: float = DEFAULT_EPSILON) -> DistanceReport:
    """Delta_H(E) = {d(z, w) : z, w in E}; also counts values outside {0, 4 sigma}."""
    if E.space.kind != "halfplane" or E.space.ext.sigma != ext.sigma or E.space.q != ext.base.q:
        raise DistanceError("point set does not live in this half-plane")
    I = E.index
    return _report(E.space, I, None, E.space.distances(I, I) if len(I) else np.zeros(0), epsilon)


def distance_set_pair(space, E: PointSet, F: PointSet, bilinear_variant: bool = False,
                      epsilon: float = DEFAULT_EPSILON) -> DistanceReport:
    """Delta(E, F) over x in E, y in F; Q(x - y) by default, <x, y> if requested."""
    if E.space is not space or F.space is not space:
        raise DistanceError("both sets must live in the given space")
    I, J = E.index, F.index
    vals = space.distances(I, J, bilinear_variant) if len(I) and len(J) else np.zeros(0)
    return _report(space, I, J, vals, epsilon, bilinear_variant)


def matching_extremal_set(ext: ExtCtx) -> PointSet:
    """One endpoint (the smaller index) of every edge of the 4 sigma matching."""
    space = HalfPlaneSpace(ext)
    four_sigma = space.four_sigma
    D = poincare_matrix(ext, space.points)
    n = space.size
    pick = [u for u in range(n) for v in range(u + 1, n) if D[u, v] == four_sigma]
    return PointSet(space, pick)


# ---------------------------------------------------------------------------
# experiments


@dataclass
class ExperimentConfig:
    space: str = "euclidean"
    q: int = 5
    d: int = 2
    kind: str | None = None
    sizes: list[int] = field(default_factory=list)
    trials: int = 100
    seed: int = 0
    mode: str = "uniform"
    pair: bool = False
    epsilon: float = DEFAULT_EPSILON
    exhaustive: bool = False
    max_size: int = 5

    MODES = ("uniform", "adversarial-line", "adversarial-ball")

    def validate(self):
        if self.space not in ("euclidean", "halfplane"):
            raise DistanceError(f"unknown space {self.space!r}")
        if self.mode not in self.MODES:
            raise DistanceError(f"unknown sampling mode {self.mode!r}")
        if self.trials < 1:
            raise DistanceError("trials must be >= 1")
        universe = self.build_space().size
        if any(s < 1 or s > universe for s in self.sizes):
            raise DistanceError(f"sizes must lie in 1..{universe}")
        return self

    def build_space(self):
        if self.space == "halfplane":
            return HalfPlaneSpace(halfplane_ext(self.q))
        F = field_for_order(self.q)
        kind = self.kind or ("plus_even" if self.d % 2 == 0 else "odd_std")
        return EuclideanSpace(make_form(F, kind, self.d))

    @classmethod
    def from_dict(cls, data: dict) -> "ExperimentConfig":
        known = {k: data[k] for k in data if k in cls.__dataclass_fields__}
        unknown = set(data) - set(known)
        if unknown:
            raise DistanceError(f"unknown config keys: {sorted(unknown)}")
        return cls(**known)

    def to_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


def trial_seed(master: int, size: int, trial: int) -> int:
    """64-bit seed for one trial, derived with numpy's SeedSequence."""
    return int(np.random.SeedSequence([master, size, trial]).generate_state(1, np.uint64)[0])


def _line_order(space) -> np.ndarray:
    """Points along lines through the origin, then their translates."""
    if space.kind == "euclidean":
        F = space.Q.ctx
        direction = np.zeros(space.d, dtype=np.int64)
        direction[0] = 1
        pw = F.q ** np.arange(space.d - 1, -1, -1)
        order = []
        for shift in space.points:
            for t in range(F.q):
                order.append(int(F.add(F.mul(t, direction), shift) @ pw))
        _, first = np.unique(order, return_index=True)
        return np.asarray(order)[np.sort(first)]
    # vertical lines x = const
    return np.lexsort((space.points[:, 1], space.points[:, 0]))


def _ball_order(space) -> np.ndarray:
    """Points sorted by their distance value to a base point (a sphere-by-sphere fill)."""
    base = 0
    dist = space.distances(np.array([base]), np.arange(space.size))[0]
    return np.lexsort((np.arange(space.size), dist))


def sample_set(space, size: int, rng: np.random.Generator, mode: str = "uniform") -> np.ndarray:
    n = space.size
    if mode == "uniform":
        return np.sort(rng.choice(n, size=size, replace=False))
    order = _line_order(space) if mode == "adversarial-line" else _ball_order(space)
    # random translate of a structured prefix keeps trials distinct
    start = int(rng.integers(0, n))
    return np.sort(np.roll(order, -start)[:size]) if mode == "adversarial-ball" else np.sort(order[:size])


@dataclass
class ExperimentReport:
    config: dict
    rows: list[dict]
    summary: list[dict]
    exhaustive: list[dict] | None = None

    def to_dict(self) -> dict:
        return {"config": self.config, "rows": self.rows, "summary": self.summary, "exhaustive": self.exhaustive}

    def to_csv(self) -> str:
        buf = io.StringIO()
        if self.exhaustive is not None:
            cols = list(self.exhaustive[0].keys()) if self.exhaustive else []
            w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
            w.writeheader()
            w.writerows(self.exhaustive)
            return buf.getvalue()
        w = csv.DictWriter(buf, fieldnames=CSV_COLUMNS, lineterminator="\n", extrasaction="ignore")
        w.writeheader()
        w.writerows(self.rows)
        return buf.getvalue()

    @property
    def violations(self) -> int:
        return sum(1 for r in self.rows if r["hypothesis_met"] and not r["satisfied"])


def exhaustive_table(space, max_size: int) -> list[dict]:
    """min / max |Delta(E)| over every subset of each size up to max_size."""
    n = space.size
    D = space.distances(np.arange(n), np.arange(n))
    out = []
    for s in range(1, max_size + 1):
        lo, hi, hits, total = None, 0, 0, 0
        for E in itertools.combinations(range(n), s):
            idx = np.asarray(E)
            k = len(np.unique(D[np.ix_(idx, idx)]))
            total += 1
            hi = max(hi, k)
            if lo is None or k < lo:
                lo, hits = k, 1
            elif k == lo:
                hits += 1
        row = {"space": space.kind, "q": space.q, "d": space.d}
        if space.kind == "euclidean":
            row["kind"] = space.Q.kind
        row.update({"size": s, "subsets": total, "min_delta": lo, "max_delta": hi, "argmin_count": hits})
        out.append(row)
    return out


def run_experiment(cfg: ExperimentConfig) -> ExperimentReport:
    """Seeded distance-set census; deterministic for a fixed master seed."""
    cfg.validate()
    space = cfg.build_space()
    if cfg.exhaustive:
        return ExperimentReport(cfg.to_dict(), [], [], exhaustive_table(space, cfg.max_size))
    rows, summary = [], []
    for size in cfg.sizes:
        deltas, sat, met = [], 0, 0
        for trial in range(cfg.trials):
            seed = trial_seed(cfg.seed, size, trial)
            rng = np.random.default_rng(seed)
            E = PointSet(space, sample_set(space, size, rng, cfg.mode))
            if cfg.pair:
                F = PointSet(space, sample_set(space, size, rng, cfg.mode))
                rep = distance_set_pair(space, E, F, epsilon=cfg.epsilon)
            elif space.kind == "euclidean":
                rep = distance_set(space.Q, E, cfg.epsilon)
            else:
                rep = distance_set_halfplane(space.ext, E, cfg.epsilon)
            rows.append({
                "space": space.kind,
                "q": space.q,
                "d": space.d,
                "size": size,
                "trial": trial,
                "seed": seed,
                "delta_size": rep.delta_size,
                "restricted_size": rep.restricted_size,
                "threshold": round(rep.threshold, 9),
                "hypothesis_met": rep.hypothesis_met,
                "satisfied": rep.satisfied,
            })
            deltas.append(rep.delta_size)
            if rep.hypothesis_met:
                met += 1
                sat += rep.satisfied
        th = theorem_threshold(space, size, size if cfg.pair else None, cfg.epsilon)
        summary.append({
            "size": size,
            "min_delta": min(deltas),
            "mean_delta": round(float(np.mean(deltas)), 9),
            "max_delta": max(deltas),
            "hypothesis_met": met,
            "satisfied_fraction": None if met == 0 else round(sat / met, 9),
            "vacuous": bool(th["hypothesis"] > (space.size if not cfg.pair else space.size**2)),
            "theorem": th["theorem"],
            "threshold_formula": th["threshold_formula"],
            "hypothesis_formula": th["hypothesis_formula"],
        })
    return ExperimentReport(cfg.to_dict(), rows, summary)


# ---------------------------------------------------------------------------
# lemma mechanisms


def _single_rhs(space, size: int) -> float:
    q = space.q
    if space.kind == "euclidean":
        d = space.d
        return (q ** (d - 1) + q ** ((d - 1) / 2)) / (2 * q**d) * size**2 + q ** ((d - 1) / 2) * size
    return (q + 1) / (2 * (q * q - q)) * size**2 + math.sqrt(q) * size


def _pair_rhs(space, se: int, sf: int) -> float:
    q = space.q
    if space.kind == "euclidean":
        d = space.d
        return (q ** (d - 1) + q ** ((d - 1) / 2)) / q**d * se * sf + 2 * q ** ((d - 1) / 2) * math.sqrt(se * sf)
    return (q + 1) / (q * q - q) * se * sf + 2 * math.sqrt(q) * math.sqrt(se * sf)


INEQUALITY_FORMULAS = {
    "single_euclidean": "e(E) <= (q**(d-1)+q**((d-1)/2))/(2*q**d)*|E|**2 + q**((d-1)/2)*|E|",
    "single_halfplane": "e(E) <= (q+1)/(2*(q**2-q))*|E|**2 + q**(1/2)*|E|",
    "pair_euclidean": "e(E,F) <= (q**(d-1)+q**((d-1)/2))/q**d*|E|*|F| + 2*q**((d-1)/2)*sqrt(|E|*|F|)",
    "pair_halfplane": "e(E,F) <= (q+1)/(q**2-q)*|E|*|F| + 2*q**(1/2)*sqrt(|E|*|F|)",
}


def _graphs_for(q: int, d: int | str):
    """(label, space, graph) for every a outside the excluded values."""
    if d == "halfplane":
        ext = halfplane_ext(q)
        space = HalfPlaneSpace(ext)
        for a in range(1, q):
            if a != space.four_sigma:
                yield f"V(a={a})", space, build_halfplane(ext, a)
        return
    F = field_for_order(q)
    for Q in forms_for_dim(F, int(d)):
        space = EuclideanSpace(Q)
        for a in range(1, q):
            yield f"E({Q.kind},a={a})", space, build_euclidean(Q, a)


def verify_lemma_mechanisms(q: int, d: int | str = 2, samples: int = 500, seed: int = 0,
                            exact_alpha_limit: int = 64) -> dict:
    """Independence-number and edge-count inequalities behind the distance lemmas.

    Per graph: measured alpha (exact when n <= exact_alpha_limit, else the
    spectral bound) against 3q^{(d+1)/2} (Euclidean) or 2q^{3/2} (half-plane),
    the alpha_2 bound against 9q^{d+1}, and the single / pair edge-count
    inequalities on ``samples`` random sets.
    """
    rows = []
    for label, space, G in _graphs_for(q, d):
        cert = certify(G)
        bounds = spectral_bounds(cert)
        n = G.n
        if n <= exact_alpha_limit:
            res = independence_exact(G, SearchBudget(wall_limit_seconds=60))
            alpha, alpha_kind = (res.value, "exact") if res.exact else (res.upper, "clique_cover_upper")
        else:
            alpha, alpha_kind = bounds.alpha_bound, "spectral_upper"
        if space.kind == "euclidean":
            dd = space.d
            alpha_lemma = 3 * q ** ((dd + 1) / 2)
            alpha_formula = "3*q**((d+1)/2)"
            alpha2_lemma = 9 * q ** (dd + 1)
            single, pair = "single_euclidean", "pair_euclidean"
        else:
            alpha_lemma = 2 * q**1.5
            alpha_formula = "2*q**(3/2)"
            alpha2_lemma = None
            single, pair = "single_halfplane", "pair_halfplane"
        rng = np.random.default_rng([seed, q, n, cert.d, len(rows)])
        single_fail = pair_fail = 0
        worst_single = worst_pair = 0.0
        for _ in range(samples):
            E = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
            F = np.sort(rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False))
            e_in = ordered_edge_count(G, E, E) // 2
            rhs = _single_rhs(space, len(E))
            single_fail += e_in > rhs + 1e-9
            worst_single = max(worst_single, e_in / rhs)
            e_pair = ordered_edge_count(G, E, F)
            rhs = _pair_rhs(space, len(E), len(F))
            pair_fail += e_pair > rhs + 1e-9
            worst_pair = max(worst_pair, e_pair / rhs)
        rows.append({
            "graph": label,
            "n": n,
            "d": cert.d,
            "lambda": round(cert.lam, 9),
            "alpha": alpha if isinstance(alpha, int) else round(float(alpha), 9),
            "alpha_kind": alpha_kind,
            "alpha_lemma_bound": round(alpha_lemma, 9),
            "alpha_lemma_formula": alpha_formula,
            "alpha_ok": bool(alpha <= alpha_lemma + 1e-9),
            "alpha_vacuous": bool(alpha_lemma >= n),
            "alpha2_spectral": round(bounds.alpha2_bound, 9),
            "alpha2_lemma_bound": None if alpha2_lemma is None else round(alpha2_lemma, 9),
            "alpha2_ok": None if alpha2_lemma is None else bool(bounds.alpha2_bound <= alpha2_lemma + 1e-9),
            "alpha2_vacuous": None if alpha2_lemma is None else bool(alpha2_lemma >= n * n),
            single: {"samples": samples, "failures": int(single_fail), "worst_ratio": round(worst_single, 9)},
            pair: {"samples": samples, "failures": int(pair_fail), "worst_ratio": round(worst_pair, 9)},
        })
    ok = all(
        r["alpha_ok"] and r["alpha2_ok"] is not False
        and all(r[k]["failures"] == 0 for k in r if isinstance(r.get(k), dict))
        for r in rows
    )
    return {"q": q, "d": d, "samples": samples, "seed": seed, "formulas": INEQUALITY_FORMULAS,
            "rows": rows, "all_hold": ok}
