"""Non-degenerate quadratic forms over GF(q) from the standard catalog.

A form is stored as a list of monomials ``(i, j, c)`` meaning ``c * x_i * x_j``
(``i <= j``).  Evaluation is vectorized: ``x`` may be a single vector or an
array whose last axis has length ``dim``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field

import numpy as np

from .ffield import FieldCtx, FieldError

KINDS = (
    "plus_even",
    "minus_even",
    "odd_std",
    "odd_prime",
    "even_char_plus",
    "even_char_minus",
    "even_char_odd_dim",
)
_ODD_Q_KINDS = {"plus_even", "minus_even", "odd_std", "odd_prime"}
_EVEN_DIM_KINDS = {"plus_even", "minus_even", "even_char_plus", "even_char_minus"}

SPHERE_ENUM_CEILING = 2**24


class FormError(ValueError):
    pass


@dataclass(frozen=True)
class QuadraticForm:
    ctx: FieldCtx
    dim: int
    kind: str
    terms: tuple = ()
    param: int | None = None
    _cache: dict = field(default_factory=dict, compare=False, hash=False, repr=False)

    def __repr__(self):
        return f"QuadraticForm(q={self.ctx.q}, dim={self.dim}, kind={self.kind!r}, param={self.param})"

    def __call__(self, x):
        return eval_form(self, x)

    @property
    def q(self) -> int:
        return self.ctx.q

    def describe(self) -> str:
        parts = []
        for i, j, c in self.terms:
            mono = f"x{i + 1}^2" if i == j else f"x{i + 1}*x{j + 1}"
            parts.append(mono if c == 1 else f"{c}*{mono}")
        return " + ".join(parts) or "0"


def _pair_terms(ctx, npairs, coef):
    return [(2 * k, 2 * k + 1, coef) for k in range(npairs)]


def _beta(ctx: FieldCtx) -> int:
    """Smallest beta with t^2 + t + beta irreducible over GF(q) (q even)."""
    F = ctx
    elems = F.elements()
    vals = F.add(F.mul(elems, elems), elems)  # t^2 + t
    hit = set(int(v) for v in vals)
    for b in range(F.q):
        if F.neg(b) not in hit:  # no root of t^2 + t + b
            return b
    raise FormError("no irreducible t^2 + t + beta")  # unreachable


def make_form(ctx: FieldCtx, kind: str, dim: int) -> QuadraticForm:
    """Build one of the catalogued non-degenerate forms."""
    if kind not in KINDS:
        raise FormError(f"unknown kind {kind!r}; choose from {KINDS}")
    dim = int(dim)
    if dim < 2:
        raise FormError("dimension must be >= 2")
    even_dim = dim % 2 == 0
    if (kind in _EVEN_DIM_KINDS) != even_dim:
        raise FormError(f"kind {kind!r} does not match dimension parity (dim={dim})")
    odd_q = ctx.p != 2
    if (kind in _ODD_Q_KINDS) != odd_q:
        raise FormError(f"kind {kind!r} requires {'odd' if kind in _ODD_Q_KINDS else 'even'} q")

    m = dim // 2
    param = None
    if kind == "plus_even":
        terms = _pair_terms(ctx, m, 2 % ctx.p)
    elif kind == "minus_even":
        param = ctx.smallest_nonsquare()
        terms = _pair_terms(ctx, m - 1, 2 % ctx.p)
        terms += [(dim - 2, dim - 2, 1), (dim - 1, dim - 1, ctx.neg(param))]
    elif kind == "odd_std":
        terms = _pair_terms(ctx, m, 2 % ctx.p) + [(dim - 1, dim - 1, 1)]
    elif kind == "odd_prime":
        # the non-square coefficient sits on the unpaired last coordinate
        param = ctx.smallest_nonsquare()
        terms = _pair_terms(ctx, m, 2 % ctx.p) + [(dim - 1, dim - 1, param)]
    elif kind == "even_char_plus":
        terms = _pair_terms(ctx, m, 1)
    elif kind == "even_char_minus":
        param = _beta(ctx)
        terms = _pair_terms(ctx, m - 1, 1)
        terms += [(dim - 2, dim - 2, 1), (dim - 2, dim - 1, 1)]
        if param:
            terms.append((dim - 1, dim - 1, param))
    else:  # even_char_odd_dim
        terms = _pair_terms(ctx, m, 1) + [(dim - 1, dim - 1, 1)]
    terms = tuple(t for t in terms if t[2] != 0)
    return QuadraticForm(ctx, dim, kind, terms, param)


def form_from_terms(ctx: FieldCtx, dim: int, terms) -> QuadraticForm:
    """Hand-built form, e.g. for degenerate examples.  Not checked."""
    clean = []
    for i, j, c in terms:
        i, j = min(i, j), max(i, j)
        if not (0 <= i < dim and 0 <= j < dim):
            raise FormError("monomial index out of range")
        clean.append((i, j, int(c)))
    return QuadraticForm(ctx, dim, "custom", tuple(clean))


def _check_dim(Q, x):
    if x.shape[-1] != Q.dim:
        raise FormError(f"vector length {x.shape[-1]} != form dimension {Q.dim}")


def eval_form(Q: QuadraticForm, x):
    F = Q.ctx
    x = np.asarray(x, dtype=np.int64)
    _check_dim(Q, x)
    out = np.zeros(x.shape[:-1], dtype=np.int64)
    for i, j, c in Q.terms:
        term = F.mul(x[..., i], x[..., j])
        if c != 1:
            term = F.mul(c, term)
        out = F.add(out, term)
    out = np.asarray(out)
    return int(out) if out.ndim == 0 else out


def bilinear(Q: QuadraticForm, x, y):
    """Associated bilinear form Q(x+y) - Q(x) - Q(y)."""
    F = Q.ctx
    x = np.asarray(x, dtype=np.int64)
    y = np.asarray(y, dtype=np.int64)
    _check_dim(Q, x)
    _check_dim(Q, y)
    s = F.add(x, y)
    out = F.sub(F.sub(eval_form(Q, s), eval_form(Q, x)), eval_form(Q, y))
    return int(out) if np.ndim(out) == 0 else out


def gram_matrix(Q: QuadraticForm) -> np.ndarray:
    """Symmetric S over GF(q) with x S x^t = Q(x) (q odd)."""
    F = Q.ctx
    if F.p == 2:
        raise FormError("no symmetric Gram matrix convention in characteristic 2")
    half = F.inv(2)
    S = np.zeros((Q.dim, Q.dim), dtype=np.int64)
    for i, j, c in Q.terms:
        if i == j:
            S[i, i] = F.add(S[i, i], c)
        else:
            h = F.mul(c, half)
            S[i, j] = F.add(S[i, j], h)
            S[j, i] = F.add(S[j, i], h)
    return S


def gram_bilinear(Q: QuadraticForm, X, Y):
    """x S y^t for the Gram matrix, vectorized over leading axes of X and Y.

    Equals half the associated bilinear value.  X and Y broadcast against
    each other (e.g. shapes (n, 1, dim) and (1, n, dim)).
    """
    F = Q.ctx
    S = Q._cache.get("gram")
    if S is None:
        S = Q._cache.setdefault("gram", gram_matrix(Q))
    X = np.asarray(X, dtype=np.int64)
    Y = np.asarray(Y, dtype=np.int64)
    out = None
    for i in range(Q.dim):
        for j in range(Q.dim):
            if S[i, j] == 0:
                continue
            term = F.mul(int(S[i, j]), F.mul(X[..., i], Y[..., j]))
            out = term if out is None else F.add(out, term)
    if out is None:
        out = np.zeros(np.broadcast_shapes(X.shape[:-1], Y.shape[:-1]), dtype=np.int64)
    return out


def matrix_rank(ctx: FieldCtx, M) -> int:
    """Rank over GF(q) by Gaussian elimination."""
    F = ctx
    A = [list(map(int, row)) for row in np.asarray(M)]
    rows = len(A)
    cols = len(A[0]) if rows else 0
    rank = 0
    for c in range(cols):
        piv = next((r for r in range(rank, rows) if A[r][c] != 0), None)
        if piv is None:
            continue
        A[rank], A[piv] = A[piv], A[rank]
        inv = F.inv(A[rank][c])
        A[rank] = [F.mul(v, inv) for v in A[rank]]
        for r in range(rows):
            if r != rank and A[r][c] != 0:
                f = A[r][c]
                A[r] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[r], A[rank])]
        rank += 1
    return rank


def determinant(ctx: FieldCtx, M) -> int:
    F = ctx
    A = [list(map(int, row)) for row in np.asarray(M)]
    n = len(A)
    det = 1
    for c in range(n):
        piv = next((r for r in range(c, n) if A[r][c] != 0), None)
        if piv is None:
            return 0
        if piv != c:
            A[c], A[piv] = A[piv], A[c]
            det = F.neg(det)
        det = F.mul(det, A[c][c])
        inv = F.inv(A[c][c])
        for r in range(c + 1, n):
            if A[r][c]:
                f = F.mul(A[r][c], inv)
                A[r] = [F.sub(a, F.mul(f, b)) for a, b in zip(A[r], A[c])]
    return det


def is_nondegenerate(Q: QuadraticForm) -> bool:
    return matrix_rank(Q.ctx, gram_matrix(Q)) == Q.dim


def all_vectors(ctx: FieldCtx, dim: int) -> np.ndarray:
    """Every vector of GF(q)^dim in lexicographic order (first coordinate slowest)."""
    q = ctx.q
    idx = np.arange(q**dim, dtype=np.int64)
    pw = q ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    return (idx[:, None] // pw[None, :]) % q


def sphere_table(Q: QuadraticForm) -> np.ndarray:
    """Counts |{x : Q(x) = a}| for every a, by exhaustive enumeration."""
    n_vec = Q.q**Q.dim
    if n_vec > SPHERE_ENUM_CEILING:
        raise FormError(f"q^dim = {n_vec} exceeds enumeration ceiling {SPHERE_ENUM_CEILING}")
    counts = np.zeros(Q.q, dtype=np.int64)
    chunk = 1 << 18
    q, dim = Q.q, Q.dim
    pw = q ** np.arange(dim - 1, -1, -1, dtype=np.int64)
    for start in range(0, n_vec, chunk):
        idx = np.arange(start, min(n_vec, start + chunk), dtype=np.int64)
        X = (idx[:, None] // pw[None, :]) % q
        counts += np.bincount(eval_form(Q, X), minlength=q)
    return counts


def predicted_sphere_size(Q: QuadraticForm, a: int) -> int | None:
    """Closed-form count of solutions of Q(x) = a, or None if not catalogued.

    Even dimension 2m:  q^{2m-1} + e * v(a) * q^{m-1}, with e = +1/-1 for the
    plus/minus type and v(0) = q - 1, v(a) = -1 otherwise.
    Odd dimension 2m+1 (odd q): q^{2m} + q^m * eta((-1)^m * a * det S) for
    a != 0 and q^{2m} for a = 0.  Even q, odd dimension: q^{2m} for all a.
    """
    F, q, n = Q.ctx, Q.q, Q.dim
    m = n // 2
    a = int(a)
    if Q.kind in ("plus_even", "minus_even", "even_char_plus", "even_char_minus"):
        e = 1 if Q.kind in ("plus_even", "even_char_plus") else -1
        v = q - 1 if a == 0 else -1
        return q ** (2 * m - 1) + e * v * q ** (m - 1)
    if Q.kind == "even_char_odd_dim":
        return q ** (2 * m)
    if Q.kind in ("odd_std", "odd_prime"):
        if a == 0:
            return q ** (2 * m)
        det = determinant(F, gram_matrix(Q))
        sign = 1 if m % 2 == 0 else F.neg(1)
        val = F.mul(F.mul(sign, a), det)
        eta = 1 if F.is_square(val) else -1
        return q ** (2 * m) + eta * q**m
    return None


def sphere_size(Q: QuadraticForm, a: int) -> dict:
    """Exhaustive count for Q(x) = a with the closed-form prediction alongside."""
    count = int(sphere_table(Q)[int(a)])
    pred = predicted_sphere_size(Q, a)
    return {"a": int(a), "count": count, "predicted": pred, "agrees": pred is None or pred == count}


def valency_set(q: int, dim: int) -> tuple[int, int]:
    """The two admissible Euclidean valencies q^{d-1} -+ q^{floor((d-1)/2)}."""
    return (q ** (dim - 1) - q ** ((dim - 1) // 2), q ** (dim - 1) + q ** ((dim - 1) // 2))


def sign_table(Q: QuadraticForm) -> list[dict]:
    """Observed sphere sizes per non-zero a, tagged with the quadratic character of a."""
    F = Q.ctx
    tab = sphere_table(Q)
    base = Q.q ** (Q.dim - 1)
    rows = []
    for a in range(1, Q.q):
        cnt = int(tab[a])
        rows.append(
            {
                "a": a,
                "a_is_square": bool(F.is_square(a)),
                "valency": cnt,
                "sign": "+" if cnt > base else ("-" if cnt < base else "0"),
            }
        )
    return rows


def form_summary(Q: QuadraticForm) -> dict:
    F = Q.ctx
    tab = sphere_table(Q)
    out = {
        "q": Q.q,
        "dim": Q.dim,
        "kind": Q.kind,
        "param": Q.param,
        "expression": Q.describe(),
        "sphere_sizes": [
            {"a": a, "count": int(tab[a]), "predicted": predicted_sphere_size(Q, a)}
            for a in range(Q.q)
        ],
    }
    if F.p != 2:
        out["gram_matrix"] = gram_matrix(Q).tolist()
        out["nondegenerate"] = is_nondegenerate(Q)
    return out


def forms_for_dim(ctx: FieldCtx, dim: int) -> list[QuadraticForm]:
    """All catalogued forms of a given dimension over ctx."""
    if ctx.p == 2:
        kinds = ["even_char_plus", "even_char_minus"] if dim % 2 == 0 else ["even_char_odd_dim"]
    else:
        kinds = ["plus_even", "minus_even"] if dim % 2 == 0 else ["odd_std", "odd_prime"]
    return [make_form(ctx, k, dim) for k in kinds]


def iter_vectors(ctx: FieldCtx, dim: int):
    return itertools.product(range(ctx.q), repeat=dim)
