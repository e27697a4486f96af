"""Exact small-scale combinatorics and the spectral bounds built on (n, d, lambda).

Searches work on Python-int bitsets (``Graph.rows()``) and are deterministic:
vertices are ordered by degree (descending) with ties broken by index.
"""

from __future__ import annotations

import itertools
import math
import sys
import time
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .ffield import field_for_order, is_prime
from .graphs import Graph, build_euclidean, build_orthogonal
from .qforms import make_form
from .spectral import NDLCertificate, Spectrum, certify, spectrum_dense

TOUGHNESS_EXACT_LIMIT = 24


class CombinatError(ValueError):
    pass


class BudgetExceeded(Exception):
    pass


@dataclass
class SearchBudget:
    node_limit: int = 10**8
    wall_limit_seconds: float = 300.0
    nodes: int = 0
    _start: float = field(default=0.0, repr=False)

    def start(self):
        self.nodes = 0
        self._start = time.monotonic()
        return self

    def tick(self):
        self.nodes += 1
        if self.nodes > self.node_limit:
            raise BudgetExceeded
        if self.nodes & 1023 == 0 and time.monotonic() - self._start > self.wall_limit_seconds:
            raise BudgetExceeded


@dataclass
class SearchResult:
    """Outcome of an exact search.

    ``outcome`` is 'exact' or 'lower_bound_only'; in the latter case ``value``
    is the best proven lower bound and ``upper`` the best proven upper bound.
    Iterating yields (value, outcome).
    """

    value: int | Fraction | float | None
    outcome: str
    upper: int | float | None = None
    nodes: int = 0

    def __iter__(self):
        yield self.value
        yield self.outcome

    @property
    def exact(self) -> bool:
        return self.outcome == "exact"


def _bits(vs) -> int:
    out = 0
    for v in vs:
        out |= 1 << int(v)
    return out


def _iter_bits(x: int):
    while x:
        low = x & -x
        yield low.bit_length() - 1
        x ^= low


def _popcount(x: int) -> int:
    return x.bit_count()


# ---------------------------------------------------------------------------
# triangles


def count_triangles(G: Graph, chunk: int = 4096) -> int:
    """Exact triangle count: sum over edges of common neighbours, divided by 3."""
    E = G.edges()
    total = 0
    for start in range(0, len(E), chunk):
        e = E[start : start + chunk]
        total += int(np.bitwise_count(G.bits[e[:, 0]] & G.bits[e[:, 1]]).sum())
    return total // 3


# ---------------------------------------------------------------------------
# independence number


def _clique_cover(rows: list[int], P: int) -> int:
    """Greedy partition of P into cliques; bounds any independent subset of P."""
    count = 0
    while P:
        low = P & -P
        P ^= low
        cand = P & rows[low.bit_length() - 1]
        while cand:
            u = cand & -cand
            P ^= u
            cand &= rows[u.bit_length() - 1] & ~u
        count += 1
    return count


def _greedy_independent(rows: list[int], P: int) -> int:
    """Min-degree greedy independent set size (a lower bound)."""
    size = 0
    while P:
        v = min(_iter_bits(P), key=lambda u: (_popcount(rows[u] & P), u))
        P &= ~(rows[v] | (1 << v))
        size += 1
    return size


def independence_exact(G: Graph, budget: SearchBudget | None = None) -> SearchResult:
    """Maximum independent set size by branch and bound.

    Branches on a vertex of maximum degree in the candidate set (ties by
    index): include it, or discard it.  Prunes with a greedy clique cover.
    """
    budget = (budget or SearchBudget()).start()
    rows = G.rows()
    full = (1 << G.n) - 1
    best = _greedy_independent(rows, full)
    root_upper = _clique_cover(rows, full)

    def rec(P: int, size: int):
        nonlocal best
        budget.tick()
        # vertices with no neighbour in P belong to some maximum set
        iso = 0
        for v in _iter_bits(P):
            if not rows[v] & P:
                iso |= 1 << v
        if iso:
            P &= ~iso
            size += _popcount(iso)
        if not P:
            best = max(best, size)
            return
        if size + _clique_cover(rows, P) <= best:
            return
        v = max(_iter_bits(P), key=lambda u: (_popcount(rows[u] & P), -u))
        rec(P & ~(rows[v] | (1 << v)), size + 1)
        rec(P & ~(1 << v), size)

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * G.n + 1000))
    try:
        rec(full, 0)
    except BudgetExceeded:
        return SearchResult(best, "lower_bound_only", root_upper, budget.nodes)
    finally:
        sys.setrecursionlimit(old)
    return SearchResult(best, "exact", best, budget.nodes)


def independence_bruteforce(G: Graph) -> int:
    """Exhaustive oracle for tiny graphs."""
    rows = G.rows()
    best = 0
    for mask in range(1 << G.n):
        if _popcount(mask) <= best:
            continue
        if all(not (rows[v] & mask) for v in _iter_bits(mask)):
            best = _popcount(mask)
    return best


def hoffman_bound(spectrum: Spectrum, d: int) -> float:
    """Ratio bound alpha <= n (-ev_min) / (d - ev_min) for d-regular graphs."""
    ev_min = float(spectrum.eigenvalues[-1])
    if d - ev_min <= 0:
        return float(spectrum.n)
    return spectrum.n * (-ev_min) / (d - ev_min)


# ---------------------------------------------------------------------------
# chromatic number


def _greedy_clique(rows: list[int], n: int) -> int:
    best = 1 if n else 0
    for v in range(n):
        cand, size = rows[v], 1
        while cand:
            u = max(_iter_bits(cand), key=lambda w: (_popcount(rows[w] & cand), -w))
            cand &= rows[u]
            size += 1
        best = max(best, size)
    return best


def _dsatur_greedy(rows: list[int], n: int) -> int:
    colour = [-1] * n
    classes: list[int] = []
    for _ in range(n):
        v = max(
            (u for u in range(n) if colour[u] < 0),
            key=lambda u: (sum(1 for c in classes if c & rows[u]), _popcount(rows[u]), -u),
        )
        for c, cls in enumerate(classes):
            if not cls & rows[v]:
                classes[c] |= 1 << v
                colour[v] = c
                break
        else:
            classes.append(1 << v)
            colour[v] = len(classes) - 1
    return len(classes)


def _colourable(rows: list[int], n: int, k: int, budget: SearchBudget) -> bool:
    """k-colourability by DSATUR-ordered backtracking."""
    classes = [0] * k
    uncoloured = (1 << n) - 1
    deg = [_popcount(r) for r in rows]

    def rec(used: int) -> bool:
        nonlocal uncoloured
        budget.tick()
        if not uncoloured:
            return True
        best_v, best_key = -1, None
        for u in _iter_bits(uncoloured):
            sat = sum(1 for c in range(used) if classes[c] & rows[u])
            key = (sat, deg[u], -u)
            if best_key is None or key > best_key:
                best_v, best_key = u, key
        v = best_v
        if best_key[0] == k:
            return False
        bit = 1 << v
        uncoloured ^= bit
        # colours beyond the first unused one are symmetric
        for c in range(min(used + 1, k)):
            if classes[c] & rows[v]:
                continue
            classes[c] |= bit
            if rec(max(used, c + 1)):
                return True
            classes[c] ^= bit
        uncoloured |= bit
        return False

    old = sys.getrecursionlimit()
    sys.setrecursionlimit(max(old, 4 * n + 1000))
    try:
        return rec(0)
    finally:
        sys.setrecursionlimit(old)


def chromatic_exact(G: Graph, budget: SearchBudget | None = None) -> SearchResult:
    """Chromatic number: raise k from a clique lower bound until colourable."""
    budget = (budget or SearchBudget()).start()
    n = G.n
    if n == 0:
        return SearchResult(0, "exact", 0)
    rows = G.rows()
    lower = _greedy_clique(rows, n)
    upper = _dsatur_greedy(rows, n)
    try:
        for k in range(lower, upper):
            if _colourable(rows, n, k, budget):
                return SearchResult(k, "exact", k, budget.nodes)
            lower = k + 1
    except BudgetExceeded:
        return SearchResult(lower, "lower_bound_only", upper, budget.nodes)
    return SearchResult(upper, "exact", upper, budget.nodes)


def chromatic_bruteforce(G: Graph) -> int:
    """Independent oracle via inclusion-exclusion.

    With i(S) the number of independent subsets of S (empty set included),
    the graph is k-colourable iff sum_S (-1)^(n-|S|) i(S)^k > 0.
    Exponential in n; meant for n <= 16.
    """
    n = G.n
    if n == 0:
        return 0
    if n > 20:
        raise CombinatError("chromatic_bruteforce is limited to n <= 20")
    rows = G.rows()
    N = 1 << n
    # ind[S] = 1 if S independent; i(S) by subset-sum (zeta transform)
    ind = np.zeros(N, dtype=np.int64)
    ind[0] = 1
    for S in range(1, N):
        v = (S & -S).bit_length() - 1
        rest = S & (S - 1)
        ind[S] = ind[rest] and not (rows[v] & rest)
    cnt = ind.copy()
    for b in range(n):
        bit = 1 << b
        idx = np.arange(N)
        sel = idx[(idx & bit) != 0]
        cnt[sel] += cnt[sel ^ bit]
    pop = np.array([bin(S).count("1") for S in range(N)])
    sign = [1 if (n - c) % 2 == 0 else -1 for c in pop]
    vals = [int(x) for x in cnt]
    for k in range(1, n + 1):
        if sum(sg * v**k for sg, v in zip(sign, vals)) > 0:
            return k
    return n


# ---------------------------------------------------------------------------
# toughness


def _components(rows: list[int], mask: int) -> int:
    comps = 0
    while mask:
        frontier = mask & -mask
        seen = frontier
        while frontier:
            nxt = 0
            for v in _iter_bits(frontier):
                nxt |= rows[v]
            nxt &= mask & ~seen
            seen |= nxt
            frontier = nxt
        mask &= ~seen
        comps += 1
    return comps


def toughness_exact(G: Graph, budget: SearchBudget | None = None, cert: NDLCertificate | None = None) -> SearchResult:
    """min |S| / c(G - S) over cutsets S with c(G - S) >= 2.

    Exact rational for n <= 24.  Disconnected graphs have toughness 0 and
    complete graphs (no cutset) infinity.  Larger graphs fall back to the
    spectral lower bound when a certificate is supplied.
    """
    n = G.n
    rows = G.rows()
    full = (1 << n) - 1
    if n > TOUGHNESS_EXACT_LIMIT:
        if cert is None:
            raise CombinatError(f"exact toughness needs n <= {TOUGHNESS_EXACT_LIMIT}")
        return SearchResult(spectral_bounds(cert).toughness_bound, "lower_bound_only", None)
    budget = (budget or SearchBudget()).start()
    if n and _components(rows, full) >= 2:
        return SearchResult(Fraction(0), "exact", 0)
    alpha = independence_exact(G).value
    best: Fraction | float = math.inf
    try:
        for s in range(1, n - 1):
            cap = min(n - s, alpha)
            if cap < 2 or Fraction(s, cap) >= best:
                # s / cap grows with s, so no larger cutset can improve
                if cap >= 2 or s > n - 2:
                    break
                continue
            for S in itertools.combinations(range(n), s):
                budget.tick()
                c = _components(rows, full & ~_bits(S))
                if c >= 2 and Fraction(s, c) < best:
                    best = Fraction(s, c)
    except BudgetExceeded:
        return SearchResult(None, "lower_bound_only", best, budget.nodes)
    return SearchResult(best, "exact", best, budget.nodes)


def toughness_bruteforce(G: Graph) -> Fraction | float:
    n = G.n
    rows = G.rows()
    full = (1 << n) - 1
    best: Fraction | float = math.inf
    for mask in range(1 << n):
        c = _components(rows, full & ~mask)
        if c >= 2:
            best = min(best, Fraction(_popcount(mask), c))
    return best


# ---------------------------------------------------------------------------
# spectral bounds


@dataclass
class BoundsReport:
    n: int
    d: int
    lam: float
    alpha_bound: float
    alpha2_bound: float
    chi_bound: float
    toughness_bound: float

    FORMULAS = {
        "alpha_bound": "n*lambda/d",
        "alpha2_bound": "lambda**2*n**2/d**2",
        "chi_bound": "d/lambda",
        "toughness_bound": "(d**2/(lambda*d+lambda**2)-1)/3",
    }

    def to_dict(self) -> dict:
        return {
            "n": self.n,
            "d": self.d,
            "lambda": self.lam,
            "alpha_bound": self.alpha_bound,
            "alpha2_bound": self.alpha2_bound,
            "chi_bound": self.chi_bound,
            "toughness_bound": self.toughness_bound,
            "formulas": dict(self.FORMULAS),
        }


def spectral_bounds(cert: NDLCertificate) -> BoundsReport:
    """The four bounds from (n, d, lambda), with lambda the second eigenvalue magnitude."""
    n, d, lam = cert.n, cert.d, cert.lambda_second
    if lam >= d - 1e-9:
        raise CombinatError("degenerate certificate: lambda >= d")
    return BoundsReport(
        n=n,
        d=d,
        lam=lam,
        alpha_bound=n * lam / d,
        alpha2_bound=lam**2 * n**2 / d**2,
        chi_bound=d / lam if lam > 0 else math.inf,
        toughness_bound=(d**2 / (lam * d + lam**2) - 1) / 3 if lam > 0 else math.inf,
    )


def growth_exponent(tag: dict) -> int | None:
    """The exponent e with |V| ~ c q^e for the families of the explicit-bounds theorem."""
    fam = tag.get("family")
    if fam == "euclidean":
        return tag["d"]
    if fam == "halfplane":
        return 2
    if fam == "orthogonal":
        m = tag["m"]
        return 2 * m if tag["orth_family"].startswith("odd") else 2 * m - 1
    return None


def explicit_bounds(cert: NDLCertificate, exponent: int) -> dict:
    """Instance constants for alpha <= C1 |V|^{(e+1)/2e}, chi >= |V|^{(e-1)/2e}/C2, t >= |V|^{(e-1)/2e}/C3.

    The asserted constants are 4 + o(1), 4 + o(1) and 12 + o(1); the o(1) is
    reported as measured constant minus the leading constant.
    """
    b = spectral_bounds(cert)
    N, e = cert.n, exponent
    up = N ** ((e + 1) / (2 * e))
    down = N ** ((e - 1) / (2 * e))
    c_alpha = b.alpha_bound / up
    c_chi = down / b.chi_bound
    c_tough = down / b.toughness_bound if b.toughness_bound > 0 else math.inf
    return {
        "exponent": e,
        "alpha_constant": c_alpha,
        "alpha_o1": c_alpha - 4,
        "chi_constant": c_chi,
        "chi_o1": c_chi - 4,
        "toughness_constant": c_tough,
        "toughness_o1": c_tough - 12,
        "formulas": {
            "alpha": "alpha <= (4+o(1))*N**((e+1)/(2*e))",
            "chi": "chi >= N**((e-1)/(2*e))/(4+o(1))",
            "toughness": "t >= N**((e-1)/(2*e))/(12+o(1))",
        },
    }


# ---------------------------------------------------------------------------
# Ramsey witnesses and the triangle-free scan


class RamseyError(ValueError):
    pass


@dataclass
class RamseyWitness:
    q: int
    a: int
    graph: Graph
    cert: NDLCertificate
    triangle_count: int
    alpha_kind: str
    alpha_value: int
    alpha_bound: float
    chi_lower: float
    chi_exact: int | None = None

    @property
    def valid(self) -> bool:
        return self.triangle_count == 0

    @property
    def ramsey_statement(self) -> str | None:
        if not self.valid:
            return None
        return f"R(3,{self.alpha_value + 1}) > {self.graph.n}"

    def to_dict(self) -> dict:
        n = self.graph.n
        return {
            "q": self.q,
            "a": self.a,
            "n": n,
            "d": self.cert.d,
            "lambda": round(self.cert.lam, 9),
            "triangle_count": self.triangle_count,
            "valid": self.valid,
            "alpha_kind": self.alpha_kind,
            "alpha_value": self.alpha_value,
            "alpha_spectral_bound": round(self.alpha_bound, 9),
            "chi_lower": round(self.chi_lower, 9),
            "chi_exact": self.chi_exact,
            "chi_vs_quarter_power": {
                "d/lambda": round(self.chi_lower, 9),
                "0.5*n**(1/4)": round(0.5 * n**0.25, 9),
                "exceeds": bool(self.chi_lower > 0.5 * n**0.25),
            },
            "ramsey_statement": self.ramsey_statement,
        }


def ramsey_witness(
    q: int, a: int = 1, exact_alpha: bool | None = None, budget: SearchBudget | None = None
) -> RamseyWitness:
    """Triangle-free witness from E_q(2, Q+, a) for primes q = 12k +- 5.

    The triangle count is measured, not assumed: a witness with triangles is
    returned with ``valid`` false.
    """
    if not is_prime(q) or q % 12 not in (5, 7):
        raise RamseyError(f"q = {q} is not a prime of the form 12k +- 5")
    if a % q == 0:
        raise RamseyError("a must be non-zero")
    F = field_for_order(q)
    G = build_euclidean(make_form(F, "plus_even", 2), a % q)
    cert = certify(G)
    tri = count_triangles(G)
    bounds = spectral_bounds(cert)
    if exact_alpha is None:
        exact_alpha = G.n <= 64
    alpha_kind, alpha_value, chi = "spectral_upper", int(math.floor(bounds.alpha_bound + 1e-9)), None
    if exact_alpha:
        res = independence_exact(G, budget)
        if res.exact:
            alpha_kind, alpha_value = "exact", int(res.value)
        cres = chromatic_exact(G, budget)
        chi = int(cres.value) if cres.exact else None
    return RamseyWitness(q, a % q, G, cert, tri, alpha_kind, alpha_value, bounds.alpha_bound, bounds.chi_bound, chi)


def triangle_free_scan(q: int) -> dict:
    """Triangle counts for the planar Euclidean graphs, a non-listed family and H_q(3, .).

    ``listed`` follows the classification statement literally (3 square /
    non-square); ``minus_three_rule`` is the discriminant rule with -3.
    """
    F = field_for_order(q)
    three_sq = bool(F.is_square(3 % F.p))
    m3_sq = bool(F.is_square(F.neg(3 % F.p)))
    rows = []
    for kind in ("plus_even", "minus_even"):
        Q = make_form(F, kind, 2)
        listed = (kind == "minus_even") == three_sq
        by_rule = (kind == "minus_even") == m3_sq
        for a in range(1, q):
            t = count_triangles(build_euclidean(Q, a))
            rows.append(
                {"graph": f"E({kind},d=2,a={a})", "triangles": t, "listed": listed, "minus_three_rule": by_rule}
            )
    nonlisted = []
    for kind in ("odd_std", "odd_prime"):
        Q = make_form(F, kind, 3)
        for a in range(1, q):
            nonlisted.append({"graph": f"E({kind},d=3,a={a})", "triangles": count_triangles(build_euclidean(Q, a))})
    h3 = []
    Q3 = make_form(F, "odd_std", 3)
    for fam in ("odd_theta", "odd_omega"):
        for i in range(1, (q + 1) // 2 + 1):
            g = build_orthogonal(fam, Q3, i)
            h3.append({"graph": f"H({fam},i={i})", "triangles": count_triangles(g), "edges": g.n_edges})
    matches = all((r["triangles"] == 0) == r["listed"] for r in rows)
    matches_rule = all((r["triangles"] == 0) == r["minus_three_rule"] for r in rows)
    return {
        "q": q,
        "three_is_square": three_sq,
        "minus_three_is_square": m3_sq,
        "planar": rows,
        "nonlisted": nonlisted,
        "h3": h3,
        "matches_statement": matches,
        "matches_minus_three_rule": matches_rule,
        "positive_nonlisted": any(r["triangles"] > 0 for r in nonlisted),
        "h3_triangle_free_exists": any(r["triangles"] == 0 and r["edges"] > 0 for r in h3),
    }
