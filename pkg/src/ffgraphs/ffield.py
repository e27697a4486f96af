"""Finite fields GF(p^r) and the quadratic extension GF(q)(sqrt(sigma)).

Elements are plain integers in ``[0, q)``: the coefficient vector
``(c_0, ..., c_{r-1})`` of the polynomial representative is read as the
base-p integer ``c_0 + c_1 p + ... + c_{r-1} p^{r-1}``.  So 0 and 1 keep their
usual meaning and, for prime fields, arithmetic is ordinary arithmetic mod p.

Every arithmetic method accepts Python ints or integer numpy arrays and
broadcasts like numpy does.
"""

from __future__ import annotations

import itertools
import math
from functools import cached_property

import numpy as np

DEFAULT_FIELD_CEILING = 2**20
# full q x q addition table is only materialized below this size
_TABLE_LIMIT = 1024


class FieldError(ValueError):
    pass


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for f in range(3, math.isqrt(n) + 1, 2):
        if n % f == 0:
            return False
    return True


def prime_factors(n: int) -> list[int]:
    out, f = [], 2
    while f * f <= n:
        if n % f == 0:
            out.append(f)
            while n % f == 0:
                n //= f
        f += 1
    if n > 1:
        out.append(n)
    return out


def _poly_mulmod(a, b, modulus, p):
    """Multiply coefficient lists (low degree first) modulo a monic polynomial."""
    r = len(modulus) - 1
    prod = [0] * (2 * r - 1) if r > 0 else [0]
    for i, ai in enumerate(a):
        if ai:
            for j, bj in enumerate(b):
                prod[i + j] = (prod[i + j] + ai * bj) % p
    for deg in range(len(prod) - 1, r - 1, -1):
        c = prod[deg]
        if c:
            for j in range(r + 1):
                prod[deg - r + j] = (prod[deg - r + j] - c * modulus[j]) % p
    return prod[:r]


def _has_root_or_factor(poly, p):
    """True if the monic ``poly`` (low degree first) is reducible over GF(p).

    Brute-force trial division by every monic polynomial of degree <= r/2.
    Degrees here are tiny (r <= 20), so this is cheap enough.
    """
    r = len(poly) - 1
    for deg in range(1, r // 2 + 1):
        for low in itertools.product(range(p), repeat=deg):
            div = list(low) + [1]
            rem = list(poly)
            for top in range(r, deg - 1, -1):
                c = rem[top]
                if c:
                    for j in range(deg + 1):
                        rem[top - deg + j] = (rem[top - deg + j] - c * div[j]) % p
            if not any(rem[:deg]):
                return True
    return False


def smallest_irreducible(p: int, r: int) -> tuple[int, ...]:
    """Lexicographically smallest monic irreducible of degree r over GF(p).

    Candidates are compared as coefficient tuples ``(c_0, ..., c_{r-1})``,
    low degree first.  Returned with the leading 1 appended.
    """
    if r == 1:
        return (0, 1)
    for low in itertools.product(range(p), repeat=r):
        if low[0] == 0:
            continue  # divisible by t
        poly = list(low) + [1]
        if not _has_root_or_factor(poly, p):
            return tuple(poly)
    raise FieldError(f"no irreducible polynomial of degree {r} over GF({p})")


class FieldCtx:
    """Arithmetic context for GF(p^r)."""

    def __init__(self, p: int, r: int = 1, ceiling: int = DEFAULT_FIELD_CEILING):
        p, r = int(p), int(r)
        if not is_prime(p):
            raise FieldError(f"p not prime: {p}")
        if r < 1:
            raise FieldError(f"degree must be >= 1, got {r}")
        if p**r > ceiling:
            raise FieldError(f"q = {p}^{r} exceeds field ceiling {ceiling}")
        self.p = p
        self.r = r
        self.q = p**r
        self.modulus = smallest_irreducible(p, r)
        self._pows = p ** np.arange(r, dtype=np.int64)
        self._build_log_tables()

    def __repr__(self):
        return f"FieldCtx(p={self.p}, r={self.r})"

    def __eq__(self, other):
        return isinstance(other, FieldCtx) and (self.p, self.r) == (other.p, other.r)

    def __hash__(self):
        return hash((self.p, self.r))

    # -- representation ---------------------------------------------------

    def digits(self, a: int) -> tuple[int, ...]:
        """Coefficient vector of element ``a`` (low degree first)."""
        a = int(a)
        return tuple((a // self.p**i) % self.p for i in range(self.r))

    def from_digits(self, coeffs) -> int:
        return int(sum(int(c) % self.p * self.p**i for i, c in enumerate(coeffs)))

    def poly_str(self, a: int) -> str:
        terms = []
        for i, c in reversed(list(enumerate(self.digits(a)))):
            if not c:
                continue
            mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
            coef = "" if (c == 1 and i > 0) else str(c)
            terms.append(coef + mono)
        return " + ".join(terms) or "0"

    @cached_property
    def digit_table(self) -> np.ndarray:
        idx = np.arange(self.q, dtype=np.int64)
        return (idx[:, None] // self._pows[None, :]) % self.p

    @cached_property
    def add_table(self) -> np.ndarray | None:
        if self.r == 1 or self.q > _TABLE_LIMIT:
            return None
        dig = self.digit_table
        return ((dig[:, None, :] + dig[None, :, :]) % self.p) @ self._pows

    def _build_log_tables(self):
        q, p = self.q, self.p
        if self.r == 1:
            # prime field: find a generator by order test, then tabulate powers
            self._slow_mul = lambda a, b: (a * b) % p
        else:
            mod = self.modulus
            self._slow_mul = lambda a, b: self.from_digits(
                _poly_mulmod(self.digits(a), self.digits(b), mod, p)
            )
        g = self._find_primitive()
        exp = np.empty(2 * (q - 1), dtype=np.int64)
        log = np.full(q, -1, dtype=np.int64)
        x = 1
        if self.r == 1:
            for k in range(q - 1):
                exp[k] = x
                log[x] = k
                x = (x * g) % p
        else:
            # multiply by g via a shift-and-reduce on digit vectors
            for k in range(q - 1):
                exp[k] = x
                log[x] = k
                x = self._slow_mul(x, g)
        exp[q - 1 :] = exp[: q - 1]
        self._exp = exp
        self._log = log
        self._primitive = g

    def _slow_pow(self, a, e):
        result, base = 1, a
        while e:
            if e & 1:
                result = self._slow_mul(result, base)
            base = self._slow_mul(base, base)
            e >>= 1
        return result

    def _find_primitive(self) -> int:
        q = self.q
        if q == 2:
            return 1
        factors = prime_factors(q - 1)
        for g in range(2, q):
            if all(self._slow_pow(g, (q - 1) // f) != 1 for f in factors):
                return g
        raise FieldError("no primitive element found")  # unreachable for a field

    # -- arithmetic ---------------------------------------------------------

    def add(self, a, b):
        if self.r == 1:
            return (a + b) % self.p
        tab = self.add_table
        if tab is not None:
            out = tab[a, b]
            return int(out) if np.ndim(out) == 0 else out
        da = self.digit_table[a]
        db = self.digit_table[b]
        out = ((da + db) % self.p) @ self._pows
        return int(out) if np.ndim(out) == 0 else out

    def neg(self, a):
        if self.r == 1:
            return (-a) % self.p
        out = ((-self.digit_table[a]) % self.p) @ self._pows
        return int(out) if np.ndim(out) == 0 else out

    def sub(self, a, b):
        return self.add(a, self.neg(b))

    def mul(self, a, b):
        if self.r == 1:
            return (a * b) % self.p
        la, lb = self._log[a], self._log[b]
        out = np.where((la < 0) | (lb < 0), 0, self._exp[(la + lb) % (self.q - 1)])
        return int(out) if np.ndim(out) == 0 else out

    def inv(self, a):
        if np.any(np.asarray(a) == 0):
            raise ZeroDivisionError("inverse of zero in GF(%d)" % self.q)
        out = self._exp[(-self._log[a]) % (self.q - 1)]
        return int(out) if np.ndim(out) == 0 else out

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, e: int):
        """``a**e``; negative exponents need a != 0, and 0**0 == 1."""
        e = int(e)
        la = self._log[a]
        if e < 0 and np.any(la < 0):
            raise ZeroDivisionError("negative power of zero")
        if e == 0:
            out = np.ones_like(la)
        else:
            out = np.where(la < 0, 0, self._exp[(la * e) % (self.q - 1)])
        return int(out) if np.ndim(out) == 0 else out

    def arith(self, op: str, a, b=None):
        """Dispatch by name: add, sub, mul, inv, pow, neg."""
        if op in ("inv", "neg"):
            return getattr(self, op)(a)
        if op not in ("add", "sub", "mul", "pow"):
            raise FieldError(f"unknown op {op!r}")
        return getattr(self, op)(a, b)

    # -- structure ----------------------------------------------------------

    def is_square(self, a):
        """Quadratic character test by Euler's criterion (``0`` counts as a square)."""
        if self.p == 2:
            return np.ones_like(np.asarray(a), dtype=bool) if np.ndim(a) else True
        out = (np.asarray(a) == 0) | (self.pow(a, (self.q - 1) // 2) == 1)
        return bool(out) if np.ndim(out) == 0 else out

    def sqrt_table(self) -> np.ndarray:
        """``tab[a]`` = smallest t with t*t == a, or -1 if a is a non-square."""
        tab = np.full(self.q, -1, dtype=np.int64)
        sq = self.mul(np.arange(self.q), np.arange(self.q))
        for t in range(self.q - 1, -1, -1):
            tab[sq[t]] = t
        return tab

    def primitive_element(self) -> int:
        return self._primitive

    def order(self, a: int) -> int:
        if a == 0:
            raise FieldError("zero has no multiplicative order")
        return (self.q - 1) // math.gcd(int(self._log[a]), self.q - 1)

    def log(self, a):
        """Discrete log base the canonical primitive element (tables already exist)."""
        return self._log[a]

    def exp(self, k):
        return self._exp[np.asarray(k) % (self.q - 1)]

    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    def nonzero_squares(self) -> np.ndarray:
        nz = np.arange(1, self.q)
        return nz[self.is_square(nz)]

    def smallest_nonsquare(self) -> int:
        if self.p == 2:
            raise FieldError("every element is a square in characteristic 2")
        for a in range(1, self.q):
            if not self.is_square(a):
                return a
        raise FieldError("no non-square")  # unreachable

    def trace(self, a):
        """Absolute trace GF(q) -> GF(p), as an integer in [0, p)."""
        out = a
        x = a
        for _ in range(self.r - 1):
            x = self.pow(x, self.p)
            out = self.add(out, x)
        return out

    def summary(self) -> dict:
        return {
            "p": self.p,
            "r": self.r,
            "q": self.q,
            "modulus": list(self.modulus),
            "modulus_str": _poly_text(self.modulus),
            "primitive_element": self._primitive,
            "smallest_nonsquare": None if self.p == 2 else self.smallest_nonsquare(),
        }


def _poly_text(coeffs) -> str:
    terms = []
    for i in range(len(coeffs) - 1, -1, -1):
        c = coeffs[i]
        if not c:
            continue
        mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
        terms.append(mono if (c == 1 and i > 0) else f"{c}{mono}")
    return " + ".join(terms)


_CACHE: dict[tuple[int, int], FieldCtx] = {}


def make_field(p: int, r: int = 1, ceiling: int = DEFAULT_FIELD_CEILING) -> FieldCtx:
    """Return the (cached) context for GF(p^r)."""
    key = (int(p), int(r))
    ctx = _CACHE.get(key)
    if ctx is None:
        ctx = FieldCtx(p, r, ceiling=ceiling)
        _CACHE[key] = ctx
    elif ctx.q > ceiling:
        raise FieldError(f"q = {ctx.q} exceeds field ceiling {ceiling}")
    return ctx


def field_for_order(q: int, ceiling: int = DEFAULT_FIELD_CEILING) -> FieldCtx:
    """Context for a prime power q given as a single number."""
    q = int(q)
    if q < 2:
        raise FieldError(f"not a prime power: {q}")
    facs = prime_factors(q)
    if len(facs) != 1:
        raise FieldError(f"not a prime power: {q}")
    p = facs[0]
    r = round(math.log(q, p))
    if p**r != q:
        raise FieldError(f"not a prime power: {q}")
    return make_field(p, r, ceiling=ceiling)


class ExtCtx:
    """GF(q^2) realised as pairs (x, y) meaning x + y*sqrt(sigma).

    Components may be ints or equally shaped integer arrays.
    """

    def __init__(self, base: FieldCtx, sigma: int):
        if base.p == 2:
            raise FieldError("quadratic extension by sqrt(sigma) needs odd q")
        sigma = int(sigma)
        if sigma == 0 or base.is_square(sigma):
            raise FieldError(f"sigma = {sigma} is a square in GF({base.q})")
        self.base = base
        self.sigma = sigma

    def __repr__(self):
        return f"ExtCtx(q={self.base.q}, sigma={self.sigma})"

    def add(self, z, w):
        F = self.base
        return F.add(z[0], w[0]), F.add(z[1], w[1])

    def sub(self, z, w):
        F = self.base
        return F.sub(z[0], w[0]), F.sub(z[1], w[1])

    def mul(self, z, w):
        F = self.base
        x = F.add(F.mul(z[0], w[0]), F.mul(self.sigma, F.mul(z[1], w[1])))
        y = F.add(F.mul(z[0], w[1]), F.mul(z[1], w[0]))
        return x, y

    def conj(self, z):
        return z[0], self.base.neg(z[1])

    def norm(self, z):
        F = self.base
        return F.sub(F.mul(z[0], z[0]), F.mul(self.sigma, F.mul(z[1], z[1])))

    def re(self, z):
        return z[0]

    def im(self, z):
        return z[1]

    def inv(self, z):
        n = self.norm(z)
        ninv = self.base.inv(n)
        c = self.conj(z)
        return self.base.mul(c[0], ninv), self.base.mul(c[1], ninv)

    def pow(self, z, e: int):
        result = (1, 0)
        base = z
        e = int(e)
        if e < 0:
            base, e = self.inv(z), -e
        while e:
            if e & 1:
                result = self.mul(result, base)
            base = self.mul(base, base)
            e >>= 1
        return result

    def elements(self):
        q = self.base.q
        return [(x, y) for x in range(q) for y in range(q)]

    def poincare_distance(self, z, w):
        """N(z - w) / (Im z * Im w); both imaginary parts must be non-zero."""
        F = self.base
        return F.mul(self.norm(self.sub(z, w)), F.inv(F.mul(z[1], w[1])))


def ext_field(ctx: FieldCtx, sigma: int | None = None) -> ExtCtx:
    """Extension by sqrt(sigma); sigma defaults to the canonical primitive element."""
    if sigma is None:
        sigma = ctx.primitive_element()
    return ExtCtx(ctx, sigma)
