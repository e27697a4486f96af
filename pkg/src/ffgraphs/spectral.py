"""Spectra, (n, d, lambda) certificates and expander-mixing checks.

Two independent routes to a spectrum:

* ``spectrum_dense`` diagonalises the 0/1 adjacency matrix (cyclic Jacobi for
  small n, LAPACK above ``JACOBI_LIMIT``);
* ``spectrum_charsum`` evaluates additive character sums over the connection
  set of a Euclidean Cayley graph.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graphs import Graph, orthogonal_bound
from .qforms import QuadraticForm, all_vectors

DENSE_CEILING = 4096
JACOBI_LIMIT = 256
CHARSUM_CEILING = 2**20
JACOBI_TOL = 1e-9
GROUP_TOL = 1e-6
CERT_TOL = 1e-6


class SpectralError(ValueError):
    pass


# ---------------------------------------------------------------------------
# Jacobi eigensolver


def _round_robin(n: int) -> list[tuple[np.ndarray, np.ndarray]]:
    """Circle-method schedule: n - 1 rounds of n/2 disjoint pairs (n even)."""
    others = list(range(1, n))
    rounds = []
    for _ in range(n - 1):
        ring = [0] + others
        p = np.array(ring[: n // 2])
        q = np.array(ring[n // 2 :][::-1])
        rounds.append((np.minimum(p, q), np.maximum(p, q)))
        others = others[-1:] + others[:-1]
    return rounds


def off_norm(A: np.ndarray) -> float:
    """Frobenius norm of the off-diagonal part."""
    off = A - np.diag(np.diag(A))
    return float(np.sqrt(np.sum(off * off)))


def jacobi_eigenvalues(A, tol: float = JACOBI_TOL, max_sweeps: int = 60) -> np.ndarray:
    """Eigenvalues of a real symmetric matrix by cyclic Jacobi rotations.

    Each round rotates n/2 disjoint pivot pairs at once, so a sweep costs
    n - 1 vectorised updates.  Stops once the off-diagonal Frobenius norm is
    below ``tol``.  Returns eigenvalues sorted descending.
    """
    A = np.array(A, dtype=np.float64)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise SpectralError("matrix must be square")
    if not np.allclose(A, A.T, atol=0, rtol=0):
        raise SpectralError("matrix is not symmetric")
    n0 = A.shape[0]
    if n0 <= 1:
        return np.sort(np.diag(A))[::-1].copy()
    n = n0 + (n0 % 2)
    if n != n0:
        # a decoupled zero row never picks up off-diagonal mass
        A = np.pad(A, ((0, 1), (0, 1)))
    schedule = _round_robin(n)
    for _ in range(max_sweeps):
        if off_norm(A) < tol:
            break
        for p, q in schedule:
            apq = A[p, q]
            live = np.abs(apq) > 1e-300
            if not live.any():
                continue
            p, q, apq = p[live], q[live], apq[live]
            theta = (A[q, q] - A[p, p]) / (2.0 * apq)
            t = np.sign(theta) / (np.abs(theta) + np.hypot(theta, 1.0))
            t[theta == 0] = 1.0
            c = 1.0 / np.sqrt(t * t + 1.0)
            s = t * c
            Ap, Aq = A[p, :], A[q, :]
            A[p, :] = c[:, None] * Ap - s[:, None] * Aq
            A[q, :] = s[:, None] * Ap + c[:, None] * Aq
            Ap, Aq = A[:, p], A[:, q]
            A[:, p] = Ap * c - Aq * s
            A[:, q] = Ap * s + Aq * c
    else:
        if off_norm(A) >= tol:
            raise SpectralError("Jacobi iteration did not converge")
    ev = np.diag(A)[:n0]
    return np.sort(ev)[::-1].copy()


# ---------------------------------------------------------------------------
# spectra


@dataclass(frozen=True)
class Spectrum:
    eigenvalues: np.ndarray
    source: str

    @property
    def n(self) -> int:
        return len(self.eigenvalues)

    def groups(self, tol: float = GROUP_TOL) -> list[tuple[float, int]]:
        """(value, multiplicity) pairs, descending; values within tol merge."""
        out: list[list] = []
        for ev in self.eigenvalues:
            if out and abs(out[-1][2] - ev) <= tol:
                out[-1][1] += 1
                out[-1][2] = ev
            else:
                out.append([float(ev), 1, ev])
        return [(v, m) for v, m, _ in out]

    def multiplicity(self, value: float, tol: float = GROUP_TOL) -> int:
        return int(np.sum(np.abs(self.eigenvalues - value) <= tol))

    def trace_moments(self) -> tuple[float, float]:
        return float(self.eigenvalues.sum()), float((self.eigenvalues**2).sum())

    def matches(self, other: "Spectrum", tol: float = GROUP_TOL) -> bool:
        if self.n != other.n:
            return False
        return bool(np.max(np.abs(self.eigenvalues - other.eigenvalues), initial=0.0) <= tol)

    def to_dict(self) -> dict:
        return {
            "source": self.source,
            "groups": [[round(v, 9), m] for v, m in self.groups()],
        }


def spectrum_dense(
    G: Graph, method: str = "auto", ceiling: int = DENSE_CEILING, jacobi_limit: int = JACOBI_LIMIT
) -> Spectrum:
    """Adjacency spectrum.  ``method`` is 'jacobi', 'lapack' or 'auto'."""
    if G.n > ceiling:
        raise SpectralError(f"{G.n} vertices exceeds the dense ceiling {ceiling}")
    if not G.is_symmetric():
        raise SpectralError("adjacency is not symmetric")
    A = G.dense().astype(np.float64)
    if method == "auto":
        method = "jacobi" if G.n <= jacobi_limit else "lapack"
    if method == "jacobi":
        ev = jacobi_eigenvalues(A)
    elif method == "lapack":
        ev = np.linalg.eigvalsh(A)[::-1].copy()
    else:
        raise SpectralError(f"unknown method {method!r}")
    return Spectrum(ev, f"dense:{method}")


def _trace_table(F) -> np.ndarray:
    return np.asarray(F.trace(np.arange(F.q)), dtype=np.int64)


def spectrum_charsum(Q: QuadraticForm, a: int, ceiling: int = CHARSUM_CEILING, chunk: int = 256) -> Spectrum:
    """Eigenvalues of E_q(d, Q, a) as character sums.

    lambda_m = sum over s != 0 with Q(s) = a of exp(2 pi i Tr(m . s) / p),
    one value per m in GF(q)^d.
    """
    from .graphs import connection_set

    F, d = Q.ctx, Q.dim
    n = F.q**d
    if n > ceiling:
        raise SpectralError(f"{n} characters exceeds the ceiling {ceiling}")
    S = connection_set(Q, int(a))
    M = all_vectors(F, d)
    tr = _trace_table(F)
    omega = np.exp(2j * np.pi * np.arange(F.p) / F.p)
    vals = np.empty(n, dtype=np.complex128)
    for start in range(0, n, chunk):
        m = M[start : start + chunk]
        dot = np.zeros((len(m), len(S)), dtype=np.int64)
        for j in range(d):
            dot = F.add(dot, F.mul(m[:, j, None], S[None, :, j]))
        vals[start : start + len(m)] = omega[tr[dot]].sum(axis=1)
    resid = float(np.max(np.abs(vals.imag), initial=0.0))
    if resid > JACOBI_TOL:
        raise SpectralError(f"character sums have imaginary residue {resid:.3g}")
    return Spectrum(np.sort(vals.real)[::-1].copy(), "charsum")


# ---------------------------------------------------------------------------
# certificates


def family_bound(tag: dict) -> tuple[float | None, str | None]:
    """The family's asserted eigenvalue bound, with its formula, or (None, None)."""
    fam = tag.get("family")
    q = tag.get("q")
    if fam == "euclidean" and q % 2 == 1 and tag.get("a", 0) != 0:
        d = tag["d"]
        return 2.0 * q ** ((d - 1) / 2), "2*q**((d-1)/2)"
    if fam == "halfplane" and tag.get("special") is None:
        return 2.0 * math.sqrt(q), "2*q**(1/2)"
    if fam == "orthogonal":
        m = tag["m"]
        formula = "2*q**((2m-1)/2)" if tag["orth_family"].startswith("odd") else "2*q**((2m-2)/2)"
        return orthogonal_bound(tag["orth_family"], q, m), formula
    return None, None


@dataclass
class NDLCertificate:
    n: int
    d: int
    lam: float
    bound: float | None
    passed: bool | None
    connected: bool
    d_multiplicity: int
    lambda_second: float
    bound_formula: str | None = None
    family: str | None = None
    source: str = ""
    extra: dict = field(default_factory=dict)

    @property
    def meaningful(self) -> bool:
        return self.lam < self.d - CERT_TOL

    def to_dict(self) -> dict:
        out = {
            "n": self.n,
            "d": self.d,
            "lambda": round(self.lam, 9),
            "lambda_second": round(self.lambda_second, 9),
            "bound": None if self.bound is None else round(self.bound, 9),
            "bound_formula": self.bound_formula,
            "pass": self.passed,
            "connected": self.connected,
            "d_multiplicity": self.d_multiplicity,
            "family": self.family,
            "source": self.source,
        }
        out.update(self.extra)
        return out


def certify(G: Graph, spectrum: Spectrum | None = None, tol: float = CERT_TOL, **kw) -> NDLCertificate:
    """Measure (n, d, lambda) and compare lambda with the family's bound.

    ``lambda`` is the largest |eigenvalue| among eigenvalues different from d.
    ``lambda_second`` drops a single copy of d instead, which is the quantity
    the mixing inequalities need when d has multiplicity > 1.
    """
    d = G.valency()
    if d is None:
        raise SpectralError("certify needs a regular graph")
    if spectrum is None:
        spectrum = spectrum_dense(G, **kw)
    ev = spectrum.eigenvalues
    is_d = np.abs(ev - d) <= tol
    mult = int(is_d.sum())
    rest = ev[~is_d]
    lam = float(np.max(np.abs(rest), initial=0.0))
    second = float(np.max(np.abs(ev[1:]), initial=0.0))
    bound, formula = family_bound(G.family_tag)
    passed = None if bound is None else bool(lam <= bound + tol)
    return NDLCertificate(
        n=G.n,
        d=d,
        lam=lam,
        bound=bound,
        passed=passed,
        connected=mult == 1,
        d_multiplicity=mult,
        lambda_second=second,
        bound_formula=formula,
        family=G.family_tag.get("family"),
        source=spectrum.source,
    )


# ---------------------------------------------------------------------------
# mixing


@dataclass
class MixingReport:
    size_b: int
    size_c: int
    edges: int
    expected: float
    bound: float
    deviation: float
    holds: bool
    kind: str = "pair"

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "|B|": self.size_b,
            "|C|": self.size_c,
            "e": self.edges,
            "expected": self.expected,
            "bound": self.bound,
            "deviation": self.deviation,
            "holds": self.holds,
        }


def _mask(n: int, vs: np.ndarray) -> np.ndarray:
    m = np.zeros(n, dtype=bool)
    m[vs] = True
    return np.packbits(m, bitorder="little")


def _vertex_array(G: Graph, B) -> np.ndarray:
    B = np.unique(np.asarray(list(B), dtype=np.int64))
    if B.size and (B.min() < 0 or B.max() >= G.n):
        raise SpectralError("vertex id out of range")
    return B


def ordered_edge_count(G: Graph, B, C) -> int:
    """Ordered pairs (u, v), u in B, v in C, u ~ v."""
    B, C = _vertex_array(G, B), _vertex_array(G, C)
    if not B.size or not C.size:
        return 0
    return int(np.bitwise_count(G.bits[B] & _mask(G.n, C)).sum())


def mixing_check(G: Graph, B, C, cert: NDLCertificate, tol: float = 1e-9) -> MixingReport:
    """|e(B, C) - d|B||C|/n| <= lambda sqrt(|B||C|)."""
    B, C = _vertex_array(G, B), _vertex_array(G, C)
    e = ordered_edge_count(G, B, C)
    nb, nc = len(B), len(C)
    expected = cert.d * nb * nc / G.n
    bound = cert.lambda_second * math.sqrt(nb * nc)
    dev = abs(e - expected)
    return MixingReport(nb, nc, e, expected, bound, dev, dev <= bound + tol * max(1.0, bound), "pair")


def edge_bound_check(G: Graph, B, cert: NDLCertificate, tol: float = 1e-9) -> MixingReport:
    """|e(B) - d|B|^2/(2n)| <= lambda |B| / 2 for the induced edge count e(B)."""
    B = _vertex_array(G, B)
    e = ordered_edge_count(G, B, B) // 2
    nb = len(B)
    expected = cert.d * nb * nb / (2 * G.n)
    bound = cert.lambda_second * nb / 2
    dev = abs(e - expected)
    return MixingReport(nb, nb, e, expected, bound, dev, dev <= bound + tol * max(1.0, bound), "internal")


def random_subset(rng: np.random.Generator, n: int) -> np.ndarray:
    size = int(rng.integers(1, n + 1))
    return np.sort(rng.choice(n, size=size, replace=False))


def mixing_audit(G: Graph, cert: NDLCertificate, trials: int = 1000, seed: int = 0) -> dict:
    """Random (B, C) pairs and random B; counts failures of both inequalities."""
    rng = np.random.default_rng([seed, G.n, cert.d])
    pair_fail = internal_fail = 0
    worst = 0.0
    for _ in range(trials):
        B, C = random_subset(rng, G.n), random_subset(rng, G.n)
        r = mixing_check(G, B, C, cert)
        pair_fail += not r.holds
        if r.bound > 0:
            worst = max(worst, r.deviation / r.bound)
        r = edge_bound_check(G, random_subset(rng, G.n), cert)
        internal_fail += not r.holds
    full = mixing_check(G, range(G.n), range(G.n), cert)
    full_int = edge_bound_check(G, range(G.n), cert)
    return {
        "trials": trials,
        "seed": seed,
        "pair_failures": pair_fail,
        "internal_failures": internal_fail,
        "worst_ratio": round(worst, 9),
        "full_pair_exact": full.edges == cert.d * G.n and full.deviation == 0,
        "full_internal_exact": 2 * full_int.edges == cert.d * G.n,
    }
