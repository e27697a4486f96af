"""Graph container and the finite Euclidean / non-Euclidean / code-graph builders.

Adjacency is kept as packed bitsets: row ``v`` is a little-endian bit array of
length n stored in ``np.uint8`` bytes, so bit ``u`` of row ``v`` is set iff
``u ~ v``.  Rows convert to Python ints for the combinatorial searches.
"""

from __future__ import annotations

import json
import math

import numpy as np

from .ffield import ExtCtx, FieldCtx, ext_field, make_field
from .qforms import (
    QuadraticForm,
    all_vectors,
    bilinear,
    eval_form,
    gram_bilinear,
)

DEFAULT_VERTEX_CEILING = 2**16
_DENSE_SYMMETRY_LIMIT = 8192


class GraphError(ValueError):
    pass


class Graph:
    """Immutable vertex-labelled simple graph."""

    def __init__(self, bits: np.ndarray, labels, family_tag: dict | None = None, check: bool = True):
        bits = np.ascontiguousarray(bits, dtype=np.uint8)
        n = bits.shape[0]
        if bits.ndim != 2 or bits.shape[1] != (n + 7) // 8:
            raise GraphError("bitset array has the wrong shape")
        bits.setflags(write=False)
        self.n = n
        self.bits = bits
        self.labels = tuple(tuple(int(c) for c in lab) for lab in labels)
        if len(self.labels) != n:
            raise GraphError("label count differs from vertex count")
        self.family_tag = dict(family_tag or {})
        self._rows = None
        if check:
            self.check_invariants()

    # -- constructors -------------------------------------------------------

    @classmethod
    def from_dense(cls, A, labels=None, family_tag=None, check=True) -> "Graph":
        A = np.asarray(A, dtype=bool)
        n = A.shape[0]
        labels = labels if labels is not None else [(v,) for v in range(n)]
        return cls(np.packbits(A, axis=1, bitorder="little"), labels, family_tag, check)

    @classmethod
    def from_edges(cls, n: int, edges, labels=None, family_tag=None, check=True) -> "Graph":
        A = np.zeros((n, n), dtype=bool)
        for u, v in edges:
            A[u, v] = A[v, u] = True
        return cls.from_dense(A, labels, family_tag, check)

    # -- queries ------------------------------------------------------------

    def __repr__(self):
        fam = self.family_tag.get("family", "graph")
        return f"Graph({fam}, n={self.n}, edges={self.n_edges})"

    def degrees(self) -> np.ndarray:
        return np.bitwise_count(self.bits).sum(axis=1, dtype=np.int64)

    @property
    def n_edges(self) -> int:
        return int(self.degrees().sum()) // 2

    def is_regular(self) -> bool:
        deg = self.degrees()
        return bool(self.n == 0 or deg.min() == deg.max())

    def valency(self) -> int | None:
        deg = self.degrees()
        if self.n == 0 or deg.min() != deg.max():
            return None
        return int(deg[0])

    def has_edge(self, u: int, v: int) -> bool:
        return bool((self.bits[u, v >> 3] >> (v & 7)) & 1)

    def neighbors(self, v: int) -> np.ndarray:
        return np.flatnonzero(np.unpackbits(self.bits[v], bitorder="little", count=self.n))

    def rows(self) -> list[int]:
        """Adjacency rows as Python int bitsets (cached)."""
        if self._rows is None:
            self._rows = [int.from_bytes(r.tobytes(), "little") for r in self.bits]
        return self._rows

    def dense(self) -> np.ndarray:
        return np.unpackbits(self.bits, axis=1, bitorder="little", count=self.n).astype(bool)

    def edges(self) -> np.ndarray:
        """Sorted (u, v) pairs with u < v."""
        out = []
        for u in range(self.n):
            nb = self.neighbors(u)
            nb = nb[nb > u]
            if nb.size:
                out.append(np.column_stack([np.full(nb.size, u), nb]))
        if not out:
            return np.zeros((0, 2), dtype=np.int64)
        return np.concatenate(out).astype(np.int64)

    def induced(self, vertices) -> "Graph":
        vs = np.asarray(sorted(set(int(v) for v in vertices)), dtype=np.int64)
        A = self.dense()[np.ix_(vs, vs)]
        return Graph.from_dense(A, [self.labels[v] for v in vs], {"family": "induced"})

    def check_invariants(self):
        n = self.n
        if n and (self.bits[np.arange(n), np.arange(n) >> 3] >> (np.arange(n) & 7) & 1).any():
            raise GraphError("adjacency has a self-loop")
        if len(set(self.labels)) != n:
            raise GraphError("duplicate vertex labels")
        if n % 8 and n:
            pad = self.bits[:, -1] >> (n % 8)
            if pad.any():
                raise GraphError("padding bits set")
        if not self.is_symmetric():
            raise GraphError("adjacency is not symmetric")

    def is_symmetric(self) -> bool:
        n = self.n
        if n <= _DENSE_SYMMETRY_LIMIT:
            A = self.dense()
            return bool((A == A.T).all())
        block = 4096
        for i0 in range(0, n, block):
            i1 = min(n, i0 + block)
            for j0 in range(i0, n, block):
                j1 = min(n, j0 + block)
                Aij = np.unpackbits(self.bits[i0:i1], axis=1, bitorder="little", count=n)[:, j0:j1]
                Aji = np.unpackbits(self.bits[j0:j1], axis=1, bitorder="little", count=n)[:, i0:i1]
                if not (Aij == Aji.T).all():
                    return False
        return True

    # -- serialization --------------------------------------------------------

    def to_dict(self) -> dict:
        return {
            "family_tag": self.family_tag,
            "n": self.n,
            "labels": [list(lab) for lab in self.labels],
            "edges": self.edges().tolist(),
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), sort_keys=True, separators=(",", ":"))

    @classmethod
    def from_json(cls, text: str) -> "Graph":
        d = json.loads(text)
        return cls.from_edges(d["n"], d["edges"], d["labels"], d["family_tag"])

    def to_adjlist(self) -> str:
        lines = []
        for v in range(self.n):
            nb = " ".join(str(u) for u in self.neighbors(v))
            lines.append(f"{v}: {nb}".rstrip())
        return "\n".join(lines) + "\n"

    @classmethod
    def from_adjlist(cls, text: str, labels=None, family_tag=None) -> "Graph":
        rows = [ln for ln in text.splitlines() if ln.strip()]
        n = len(rows)
        A = np.zeros((n, n), dtype=bool)
        for ln in rows:
            head, _, tail = ln.partition(":")
            v = int(head)
            for u in tail.split():
                A[v, int(u)] = True
        return cls.from_dense(A, labels, family_tag)


def _check_ceiling(n, ceiling):
    if n > ceiling:
        raise GraphError(f"{n} vertices exceeds vertex ceiling {ceiling}")


def _bits_from_neighbor_fn(n: int, nbr_fn, chunk: int = 64) -> np.ndarray:
    """Pack rows given ``nbr_fn(rows) -> (len(rows), k)`` neighbour index arrays.

    Small chunks keep the scratch block cache-resident, which matters more
    than per-chunk overhead.
    """
    nbytes = (n + 7) // 8
    bits = np.zeros((n, nbytes), dtype=np.uint8)
    for start in range(0, n, chunk):
        rows = np.arange(start, min(n, start + chunk))
        nb = nbr_fn(rows)
        block = np.zeros((rows.size, n), dtype=bool)
        if nb.size:
            block[np.arange(rows.size)[:, None], nb] = True
        block[np.arange(rows.size), rows] = False
        bits[start : start + rows.size] = np.packbits(block, axis=1, bitorder="little")
    return bits


# ---------------------------------------------------------------------------
# Euclidean graphs


def connection_set(Q: QuadraticForm, a: int) -> np.ndarray:
    """Non-zero vectors s with Q(s) = a (rows in lexicographic order)."""
    V = all_vectors(Q.ctx, Q.dim)
    vals = eval_form(Q, V)
    mask = vals == int(a)
    mask[0] = False
    return V[mask]


def build_euclidean(Q: QuadraticForm, a: int, ceiling: int = DEFAULT_VERTEX_CEILING, check: bool | None = None) -> Graph:
    """Cayley graph on GF(q)^d with x ~ y iff x != y and Q(x - y) = a."""
    F, d = Q.ctx, Q.dim
    n = F.q**d
    _check_ceiling(n, ceiling)
    a = int(a)
    V = all_vectors(F, d)
    S = connection_set(Q, a)
    negS = F.neg(S)
    pw = F.q ** np.arange(d - 1, -1, -1, dtype=np.int64)
    # S = -S makes the Cayley graph undirected
    if set((S @ pw).tolist()) != set((negS @ pw).tolist()):
        raise GraphError("connection set is not symmetric")

    # per-coordinate tables: U[j][x_j, k] = index contribution of x_j + S[k, j]
    idx_t = np.int32 if n < 2**31 else np.int64
    U = [
        (F.add(np.arange(F.q)[:, None], S[None, :, j]) * int(pw[j])).astype(idx_t)
        for j in range(d)
    ]
    Vt = V.astype(np.intp)

    def nbrs(rows):
        out = U[0][Vt[rows, 0]]
        for j in range(1, d):
            out += U[j][Vt[rows, j]]
        return out

    bits = _bits_from_neighbor_fn(n, nbrs)
    tag = {
        "family": "euclidean",
        "q": F.q,
        "d": d,
        "kind": Q.kind,
        "a": a,
        "connection_set_size": int(len(S)),
    }
    if check is None:
        check = n <= _DENSE_SYMMETRY_LIMIT
    g = Graph(bits, [tuple(v) for v in V], tag, check=check)
    deg = g.degrees()
    g.family_tag["regular"] = bool(deg.min() == deg.max())
    g.family_tag["valency"] = int(deg[0]) if g.family_tag["regular"] else None
    if not g.family_tag["regular"]:
        raise GraphError("Cayley graph came out irregular")
    return g


# ---------------------------------------------------------------------------
# upper half-plane graphs


def halfplane_points(ext: ExtCtx) -> np.ndarray:
    q = ext.base.q
    pts = [(x, y) for x in range(q) for y in range(1, q)]
    return np.array(pts, dtype=np.int64)


def poincare_matrix(ext: ExtCtx, P=None) -> np.ndarray:
    """All pairwise distances d(z, w) = N(z - w) / (Im z Im w) on H_q."""
    F = ext.base
    if P is None:
        P = halfplane_points(ext)
    x, y = P[:, 0], P[:, 1]
    dx = F.sub(x[:, None], x[None, :])
    dy = F.sub(y[:, None], y[None, :])
    nrm = ext.norm((dx, dy))
    iy = F.inv(y)
    return F.mul(nrm, F.mul(iy[:, None], iy[None, :]))


def build_halfplane(ext: ExtCtx, a: int, ceiling: int = DEFAULT_VERTEX_CEILING) -> Graph:
    """Finite upper half-plane graph: z ~ w iff z != w and d(z, w) = a."""
    F = ext.base
    q = F.q
    n = q * (q - 1)
    _check_ceiling(n, ceiling)
    a = int(a)
    P = halfplane_points(ext)
    D = poincare_matrix(ext, P)
    A = D == a
    np.fill_diagonal(A, False)
    four_sigma = F.mul(4 % F.p, ext.sigma)
    tag = {
        "family": "halfplane",
        "q": q,
        "sigma": ext.sigma,
        "a": a,
        "special": "zero" if a == 0 else ("four_sigma" if a == four_sigma else None),
    }
    g = Graph.from_dense(A, [tuple(p) for p in P], tag)
    g.family_tag["regular"] = g.is_regular()
    g.family_tag["valency"] = g.valency()
    return g


def halfplane_ext(q: int) -> ExtCtx:
    """Extension used for half-plane graphs: sigma = canonical primitive element."""
    from .ffield import field_for_order

    return ext_field(field_for_order(q))


# ---------------------------------------------------------------------------
# non-isotropic projective points and the orthogonal families


def projective_points(ctx: FieldCtx, dim: int) -> np.ndarray:
    """Canonical representatives (first non-zero coordinate 1), lexicographic."""
    V = all_vectors(ctx, dim)
    nz = V != 0
    first = np.argmax(nz, axis=1)
    lead = V[np.arange(len(V)), first]
    keep = nz.any(axis=1) & (lead == 1)
    return V[keep]


class PointClasses:
    """Non-isotropic projective points split by the quadratic character of Q."""

    def __init__(self, Q: QuadraticForm, square: np.ndarray, nonsquare: np.ndarray, expected: dict):
        self.form = Q
        self.square = square
        self.nonsquare = nonsquare
        self.expected = expected

    def sizes(self) -> dict:
        return {"square": len(self.square), "nonsquare": len(self.nonsquare)}

    def __repr__(self):
        return f"PointClasses({self.sizes()})"


def expected_class_sizes(Q: QuadraticForm) -> dict:
    """Class sizes asserted for the orthogonal families, keyed by family name."""
    q, n = Q.q, Q.dim
    m = n // 2
    if Q.kind == "odd_std":
        return {
            "theta": (q ** (2 * m) - q**m) // 2,
            "omega": (q ** (2 * m) + q**m) // 2,
        }
    if Q.kind == "plus_even":
        s = (q ** (2 * m - 1) - q ** (m - 1)) // 2
        return {"omega_1": s, "omega_2": s}
    if Q.kind == "minus_even":
        s = (q ** (2 * m - 1) + q ** (m - 1)) // 2
        return {"theta_1": s, "theta_2": s}
    raise GraphError(f"no orthogonal family for kind {Q.kind!r}")


def nonisotropic_points(Q: QuadraticForm) -> PointClasses:
    F = Q.ctx
    if F.p == 2:
        raise GraphError("point typing needs odd q")
    P = projective_points(F, Q.dim)
    vals = eval_form(Q, P)
    P = P[vals != 0]
    vals = vals[vals != 0]
    sq = F.is_square(vals)
    cls = PointClasses(Q, P[sq], P[~sq], expected_class_sizes(Q))
    got = sorted(cls.sizes().values())
    want = sorted(cls.expected.values())
    if got != want:
        raise GraphError(f"class sizes {cls.sizes()} do not match expected {cls.expected}")
    return cls


ORTHOGONAL_FAMILIES = ("odd_theta", "odd_omega", "even_plus", "even_minus")
_FAMILY_KIND = {
    "odd_theta": "odd_std",
    "odd_omega": "odd_std",
    "even_plus": "plus_even",
    "even_minus": "minus_even",
}


def orthogonal_valencies(family: str, q: int, m: int, i: int) -> tuple[int, ...]:
    """Valency set claimed for relation i (halved for the last relation)."""
    if family.startswith("odd"):
        base, off = q ** (2 * m - 1), q ** (m - 1)
    else:
        base, off = q ** (2 * m - 2), q ** (m - 1)
    vals = (base - off, base + off)
    if i == (q + 1) // 2:
        return tuple(sorted({v // 2 for v in vals if v % 2 == 0}))
    return vals


def orthogonal_bound(family: str, q: int, m: int) -> float:
    if family.startswith("odd"):
        return 2 * q ** ((2 * m - 1) / 2)
    return 2 * q ** ((2 * m - 2) / 2)


def _relation_target(family, F, i):
    """The constant(s) the relation i compares against."""
    q = F.q
    nu = F.primitive_element()
    last = (q + 1) // 2
    if family == "odd_theta":
        if i == 1:
            return (nu, 1, F.inv(nu))
        if i == last:
            return (nu, 0, nu)
        return (nu, 1, F.pow(nu, 2 * i - 3))
    if family == "odd_omega":
        two = 2 % F.p
        if i == 1:
            return 0
        if i == last:
            return two
        return F.add(two, F.mul(two, F.pow(nu, -(i - 1))))
    # even families: <x, y> = nu^i / 2, or 0 for the last relation
    if i == last:
        return 0
    return F.mul(F.inv(2), F.pow(nu, i))


def _class_for_family(family, classes: PointClasses):
    """Vertex class and its quadratic-character label for a family."""
    if family in ("odd_theta", "odd_omega"):
        want = classes.expected["theta" if family == "odd_theta" else "omega"]
        for label in ("square", "nonsquare"):
            pts = getattr(classes, label)
            if len(pts) == want:
                return pts, label
        raise GraphError("no class of the required size")  # guarded by nonisotropic_points
    # even families: normalisation Q(x) = 1 needs square type
    return classes.square, "square"


def orthogonal_adjacency(family: str, Q: QuadraticForm, i: int, pts: np.ndarray) -> np.ndarray:
    """Boolean adjacency on ``pts`` under existential scaling of representatives.

    ([x], [y]) is an edge iff some x' = t x, y' = s y (t, s != 0) satisfy the
    relation's condition exactly; when the condition fixes Q(x') (the diagonal
    Gram entries, or the Q = 1 normalisation) only such scalings are tried.
    """
    F = Q.ctx
    sqrt = F.sqrt_table()
    qx = eval_form(Q, pts)
    target = _relation_target(family, F, i)
    n = len(pts)

    if family == "odd_theta":
        m11, m12, m22 = target
        t0 = sqrt[F.mul(m11, F.inv(qx))]  # t^2 Q(x) = m11
        s0 = sqrt[F.mul(m22, F.inv(qx))]  # s^2 Q(y) = m22
        B = gram_bilinear(Q, pts[:, None, :], pts[None, :, :])
        ok = (t0 >= 0)[:, None] & (s0 >= 0)[None, :]
        ts = F.mul(np.maximum(t0, 0)[:, None], np.maximum(s0, 0)[None, :])
        val = F.mul(ts, B)
        A = ok & ((val == m12) | (val == F.neg(m12)))
    else:
        c = target
        t0 = sqrt[F.inv(qx)]  # scaling to Q(x') = 1
        ok = t0 >= 0
        X = F.mul(np.maximum(t0, 0)[:, None], pts)
        A = np.zeros((n, n), dtype=bool)
        chunk = max(1, 2**20 // max(n, 1))
        for start in range(0, n, chunk):
            xs = X[start : start + chunk][:, None, :]
            for sign in (1, F.neg(1)):
                ys = F.mul(sign, X)[None, :, :]
                if family == "odd_omega":
                    val = eval_form(Q, F.add(xs, ys))
                else:
                    val = bilinear(Q, xs, ys)
                A[start : start + chunk] |= val == c
        A &= ok[:, None] & ok[None, :]
    np.fill_diagonal(A, False)
    return A


def build_orthogonal(family: str, Q: QuadraticForm, i: int, ceiling: int = DEFAULT_VERTEX_CEILING) -> Graph:
    """Orthogonal-group graph on a class of non-isotropic points, relation i.

    The degree audit never raises: a valency outside the claimed set is
    recorded in ``family_tag['valency_ok']`` and ``family_tag['mismatch']``.
    """
    if family not in ORTHOGONAL_FAMILIES:
        raise GraphError(f"unknown family {family!r}")
    if Q.kind != _FAMILY_KIND[family]:
        raise GraphError(f"family {family!r} needs a {_FAMILY_KIND[family]} form, got {Q.kind!r}")
    F = Q.ctx
    q = F.q
    last = (q + 1) // 2
    if not 1 <= i <= last:
        raise GraphError(f"relation index must be in 1..{last}")
    m = Q.dim // 2
    classes = nonisotropic_points(Q)
    pts, label = _class_for_family(family, classes)
    if len(pts) == 0:
        raise GraphError("empty vertex class")
    _check_ceiling(len(pts), ceiling)
    A = orthogonal_adjacency(family, Q, i, pts)
    if not (A == A.T).all():
        raise GraphError("orthogonal relation came out asymmetric")
    expected = orthogonal_valencies(family, q, m, i)
    tag = {
        "family": "orthogonal",
        "orth_family": family,
        "q": q,
        "m": m,
        "dim": Q.dim,
        "i": i,
        "vertex_class": label,
        "class_size": int(len(pts)),
        "expected_valencies": list(expected),
        "gram_convention": "x S x^t = Q(x)",
    }
    g = Graph.from_dense(A, [tuple(p) for p in pts], tag)
    val = g.valency()
    g.family_tag["regular"] = val is not None
    g.family_tag["valency"] = val
    g.family_tag["valency_ok"] = val is not None and val in expected
    g.family_tag["mismatch"] = None if g.family_tag["valency_ok"] else (
        "irregular" if val is None else f"valency {val} not in {list(expected)}"
    )
    return g


def compare_theta_halfplane(q: int) -> dict:
    """Side-by-side numbers for the m = 1 theta graphs and the half-plane graphs."""
    from .qforms import make_form
    from .ffield import field_for_order

    F = field_for_order(q)
    Q = make_form(F, "odd_std", 3)
    ext = ext_field(F)
    rows = []
    for i in range(1, (q + 1) // 2 + 1):
        g = build_orthogonal("odd_theta", Q, i)
        rows.append({"graph": f"theta_{i}", "n": g.n, "edges": g.n_edges, "valency": g.valency()})
    four_sigma = F.mul(4 % F.p, ext.sigma)
    for a in range(1, q):
        if a == four_sigma:
            continue
        g = build_halfplane(ext, a)
        rows.append({"graph": f"halfplane_{a}", "n": g.n, "edges": g.n_edges, "valency": g.valency()})
    return {"q": q, "rows": rows}


# ---------------------------------------------------------------------------
# binary code graphs


def _bits_label(v: int, width: int) -> tuple[int, ...]:
    return tuple((v >> (width - 1 - b)) & 1 for b in range(width))


def _xor_cayley(n_bits: int, conn: np.ndarray, tag: dict, ceiling: int) -> Graph:
    n = 1 << n_bits
    _check_ceiling(n, ceiling)
    if np.any(conn == 0):
        raise GraphError("connection set contains 0")

    def nbrs(rows):
        return rows[:, None] ^ conn[None, :]

    bits = _bits_from_neighbor_fn(n, nbrs)
    labels = [_bits_label(v, n_bits) for v in range(n)]
    g = Graph(bits, labels, tag, check=n <= _DENSE_SYMMETRY_LIMIT)
    g.family_tag["regular"] = g.is_regular()
    g.family_tag["valency"] = g.valency()
    return g


def build_code_graph(k: int, ceiling: int = DEFAULT_VERTEX_CEILING) -> Graph:
    """Dual-BCH graph: 2k-bit vectors, u ~ v iff u + v = (z, z^3), z != 0."""
    if k < 2:
        raise GraphError("k must be >= 2")
    _check_ceiling(1 << (2 * k), ceiling)
    F = make_field(2, k)
    z = np.arange(1, F.q)
    conn = (z << k) | F.pow(z, 3)
    tag = {"family": "bch", "k": k, "modulus": list(F.modulus)}
    return _xor_cayley(2 * k, np.unique(conn), tag, ceiling)


def alon_split(k: int) -> tuple[np.ndarray, np.ndarray]:
    """W0 / W1: non-zero a whose a^7 has top polynomial coefficient 0 / 1."""
    F = make_field(2, k)
    a = np.arange(1, F.q)
    top = (F.pow(a, 7) >> (k - 1)) & 1
    return a[top == 0], a[top == 1]


def build_alon_graph(k: int, ceiling: int = DEFAULT_VERTEX_CEILING) -> Graph:
    """3k-bit graph with u + v = (w0, w0^3, w0^5) + (w1, w1^3, w1^5)."""
    if k < 2:
        raise GraphError("k must be >= 2")
    if k % 3 == 0:
        raise GraphError("k must not be divisible by 3")
    _check_ceiling(1 << (3 * k), ceiling)
    F = make_field(2, k)
    W0, W1 = alon_split(k)
    if len(W0) != 2 ** (k - 1) - 1 or len(W1) != 2 ** (k - 1):
        raise GraphError(f"unexpected split sizes |W0|={len(W0)}, |W1|={len(W1)}")

    def code(w):
        return (w << (2 * k)) | (F.pow(w, 3) << k) | F.pow(w, 5)

    sums = (code(W0)[:, None] ^ code(W1)[None, :]).ravel()
    conn = np.unique(sums)
    tag = {
        "family": "alon",
        "k": k,
        "modulus": list(F.modulus),
        "W0_size": int(len(W0)),
        "W1_size": int(len(W1)),
        "distinct_sums": int(len(conn)),
    }
    return _xor_cayley(3 * k, conn, tag, ceiling)
