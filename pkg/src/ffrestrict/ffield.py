"""Exact arithmetic in GF(p^k) for odd p.

Elements are integers in ``[0, q)``. The base-p digits of an element are the
coefficients (low degree first) of its polynomial residue modulo the field's
modulus, so ``0`` is the additive identity and ``1`` the multiplicative one.

All arithmetic methods accept Python ints or integer numpy arrays and
broadcast like numpy ufuncs. Multiplication goes through discrete log/exp
tables built once per field; a slow schoolbook polynomial path is kept as an
independent oracle (:meth:`FieldCtx.mul_slow`).
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

__all__ = [
    "FieldCtx",
    "FieldError",
    "Subfield",
    "DEFAULT_MODULI",
    "MAX_ORDER",
    "get_field",
    "is_prime",
    "parse_field",
]

MAX_ORDER = 3**10

# First irreducible monic polynomial in lexicographic order of the lower
# coefficients (read as a base-p integer). Coefficients low degree first.
DEFAULT_MODULI: dict[tuple[int, int], tuple[int, ...]] = {
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (3, 4): (2, 1, 0, 0, 1),
    (3, 5): (1, 2, 0, 0, 0, 1),
    (3, 6): (2, 1, 0, 0, 0, 0, 1),
    (5, 2): (2, 0, 1),
    (5, 3): (1, 1, 0, 1),
    (5, 4): (2, 0, 0, 0, 1),
    (7, 2): (1, 0, 1),
    (7, 3): (2, 0, 0, 1),
    (11, 2): (1, 0, 1),
    (13, 2): (2, 0, 1),
    (17, 2): (3, 0, 1),
    (19, 2): (1, 0, 1),
    (23, 2): (1, 0, 1),
}


class FieldError(ValueError):
    """Invalid field description or modulus."""


def is_prime(n: int) -> bool:
    if n < 2:
        return False
    d = 2
    while d * d <= n:
        if n % d == 0:
            return False
        d += 1
    return True


def _prime_factors(n: int) -> list[int]:
    out = []
    d = 2
    while d * d <= n:
        if n % d == 0:
            out.append(d)
            while n % d == 0:
                n //= d
        d += 1
    if n > 1:
        out.append(n)
    return out


def _poly_rem(a: list[int], m: list[int], p: int) -> list[int]:
    """Remainder of ``a`` modulo monic ``m`` over GF(p)."""
    a = list(a)
    dm = len(m) - 1
    while len(a) - 1 >= dm and a:
        c = a[-1] % p
        if c:
            s = len(a) - 1 - dm
            for i, mi in enumerate(m):
                a[s + i] = (a[s + i] - c * mi) % p
        a.pop()
    return a


def _is_irreducible(modulus: tuple[int, ...], p: int) -> bool:
    """Trial division by every monic polynomial of degree 1..k//2."""
    k = len(modulus) - 1
    m = list(modulus)
    for d in range(1, k // 2 + 1):
        for low in itertools.product(range(p), repeat=d):
            rem = _poly_rem(m, list(low) + [1], p)
            if not any(rem):
                return False
    return True


def _first_irreducible(p: int, k: int) -> tuple[int, ...]:
    for v in range(p**k):
        low = tuple((v // p**i) % p for i in range(k))
        if _is_irreducible(low + (1,), p):
            return low + (1,)
    raise FieldError(f"no irreducible polynomial of degree {k} over GF({p})")  # pragma: no cover


@dataclass(frozen=True)
class Subfield:
    """The subfield of order ``p**degree`` inside a larger field."""

    degree: int
    order: int
    elements: np.ndarray = field(repr=False, compare=False)

    def __contains__(self, a) -> bool:
        return int(a) in set(self.elements.tolist())


class FieldCtx:
    """The finite field GF(p^k) with a fixed modulus.

    Parameters
    ----------
    p : int
        Odd prime characteristic.
    k : int
        Extension degree, ``k >= 1``.
    modulus : sequence of int, optional
        ``k + 1`` coefficients (low degree first) of a monic irreducible
        polynomial. Defaults to the built-in table, or the first irreducible
        polynomial found by search when the table has no entry.
    """

    def __init__(self, p: int, k: int = 1, modulus=None):
        if not is_prime(p):
            raise FieldError("p not prime")
        if p == 2:
            raise FieldError("characteristic 2 is not supported")
        if k < 1:
            raise FieldError("k must be >= 1")
        if p**k > MAX_ORDER:
            raise FieldError(f"field order {p}^{k} exceeds the supported maximum 3^10")
        if modulus is None:
            if k == 1:
                modulus = (0, 1)
            else:
                modulus = DEFAULT_MODULI.get((p, k)) or _first_irreducible(p, k)
        modulus = tuple(int(c) for c in modulus)
        if len(modulus) != k + 1:
            raise FieldError(f"modulus must have {k + 1} coefficients, got {len(modulus)}")
        if modulus[-1] != 1:
            raise FieldError("modulus must be monic")
        if any(not 0 <= c < p for c in modulus):
            raise FieldError(f"modulus coefficients must lie in [0, {p})")
        if not _is_irreducible(modulus, p):
            raise FieldError(f"modulus {modulus} is reducible over GF({p})")
        self.p = p
        self.k = k
        self.q = p**k
        self.modulus = modulus
        self._pows = np.array([p**i for i in range(k)], dtype=np.int64)

    # ------------------------------------------------------------------
    # description / equality
    # ------------------------------------------------------------------
    def describe(self) -> str:
        """Serialized form ``"p^k/c_0,...,c_k"``."""
        return f"{self.p}^{self.k}/" + ",".join(str(c) for c in self.modulus)

    def __repr__(self) -> str:
        return f"FieldCtx({self.describe()!r})"

    def __eq__(self, other) -> bool:
        return isinstance(other, FieldCtx) and (self.p, self.k, self.modulus) == (
            other.p,
            other.k,
            other.modulus,
        )

    def __hash__(self) -> int:
        return hash((self.p, self.k, self.modulus))

    @property
    def elements(self) -> np.ndarray:
        return np.arange(self.q, dtype=np.int64)

    # ------------------------------------------------------------------
    # encoding helpers
    # ------------------------------------------------------------------
    def digits(self, a) -> np.ndarray:
        """Coefficient vectors, shape ``a.shape + (k,)``."""
        a = np.asarray(a, dtype=np.int64)
        return (a[..., None] // self._pows) % self.p

    def from_digits(self, d) -> np.ndarray:
        d = np.asarray(d, dtype=np.int64) % self.p
        return d @ self._pows

    def element(self, coeffs) -> int:
        """Encode a coefficient list (low degree first)."""
        coeffs = list(coeffs) + [0] * (self.k - len(coeffs))
        return int(sum((c % self.p) * self.p**i for i, c in enumerate(coeffs[: self.k])))

    # ------------------------------------------------------------------
    # scalar polynomial arithmetic (oracle path, also used to build tables)
    # ------------------------------------------------------------------
    def mul_slow(self, a: int, b: int) -> int:
        """Schoolbook product of two elements reduced modulo the modulus."""
        da = [(int(a) // self.p**i) % self.p for i in range(self.k)]
        db = [(int(b) // self.p**i) % self.p for i in range(self.k)]
        prod = [0] * (2 * self.k - 1)
        for i, x in enumerate(da):
            if x:
                for j, y in enumerate(db):
                    prod[i + j] += x * y
        rem = _poly_rem(prod, list(self.modulus), self.p)
        return self.element(rem)

    def _pow_slow(self, a: int, n: int) -> int:
        r, b = 1, int(a)
        while n:
            if n & 1:
                r = self.mul_slow(r, b)
            b = self.mul_slow(b, b)
            n >>= 1
        return r

    @cached_property
    def generator(self) -> int:
        """Smallest primitive element (generator of the multiplicative group)."""
        if self.q == 3:
            return 2
        n = self.q - 1
        factors = _prime_factors(n)
        for g in range(2, self.q):
            if all(self._pow_slow(g, n // r) != 1 for r in factors):
                return g
        raise FieldError("no primitive element found")  # pragma: no cover

    @cached_property
    def _tables(self) -> tuple[np.ndarray, np.ndarray]:
        n = self.q - 1
        exp = np.zeros(2 * n, dtype=np.int64)
        log = np.zeros(self.q, dtype=np.int64)
        g = self.generator
        if self.k == 1:
            v = 1
            for i in range(n):
                exp[i] = v
                log[v] = i
                v = (v * g) % self.p
        else:
            # multiply-by-g as a k x k matrix acting on coefficient vectors
            cols = [self.digits(self.mul_slow(g, self.p**i)) for i in range(self.k)]
            M = np.stack(cols, axis=1)
            v = np.zeros(self.k, dtype=np.int64)
            v[0] = 1
            for i in range(n):
                e = int(v @ self._pows)
                exp[i] = e
                log[e] = i
                v = (M @ v) % self.p
        exp[n:] = exp[:n]
        return exp, log

    # ------------------------------------------------------------------
    # vectorized arithmetic
    # ------------------------------------------------------------------
    def _ret(self, out, *inputs):
        if all(np.ndim(x) == 0 for x in inputs):
            return int(out)
        return out

    def add(self, a, b):
        if self.k == 1:
            out = (np.asarray(a, dtype=np.int64) + np.asarray(b, dtype=np.int64)) % self.p
        else:
            out = self.from_digits(self.digits(a) + self.digits(b))
        return self._ret(out, a, b)

    def neg(self, a):
        if self.k == 1:
            out = (-np.asarray(a, dtype=np.int64)) % self.p
        else:
            out = self.from_digits(-self.digits(a))
        return self._ret(out, a)

    def sub(self, a, b):
        if self.k == 1:
            out = (np.asarray(a, dtype=np.int64) - np.asarray(b, dtype=np.int64)) % self.p
        else:
            out = self.from_digits(self.digits(a) - self.digits(b))
        return self._ret(out, a, b)

    def mul(self, a, b):
        if self.k == 1:
            out = (np.asarray(a, dtype=np.int64) * np.asarray(b, dtype=np.int64)) % self.p
            return self._ret(out, a, b)
        exp, log = self._tables
        a_ = np.asarray(a, dtype=np.int64)
        b_ = np.asarray(b, dtype=np.int64)
        out = np.where((a_ == 0) | (b_ == 0), 0, exp[(log[a_] + log[b_]) % (self.q - 1)])
        return self._ret(out, a, b)

    def inv(self, a):
        a_ = np.asarray(a, dtype=np.int64)
        if np.any(a_ == 0):
            raise ZeroDivisionError("inverse of zero in " + self.describe())
        exp, log = self._tables
        out = exp[(-log[a_]) % (self.q - 1)]
        return self._ret(out, a)

    def div(self, a, b):
        return self.mul(a, self.inv(b))

    def pow(self, a, n: int):
        a_ = np.asarray(a, dtype=np.int64)
        n = int(n)
        if n < 0:
            return self.pow(self.inv(a), -n)
        exp, log = self._tables
        if n == 0:
            out = np.ones_like(a_)
        else:
            out = np.where(a_ == 0, 0, exp[(log[a_] * (n % (self.q - 1))) % (self.q - 1)])
        return self._ret(out, a)

    def scalar(self, n: int) -> int:
        """Image of the integer ``n`` in the prime subfield."""
        return int(n) % self.p

    def dot(self, x, y):
        """Field dot product along the last axis."""
        x = np.asarray(x, dtype=np.int64)
        y = np.asarray(y, dtype=np.int64)
        prods = self.mul(x, y)
        prods = np.asarray(prods)
        acc = prods[..., 0]
        for i in range(1, prods.shape[-1]):
            acc = self.add(acc, prods[..., i])
        return acc if np.ndim(acc) else int(acc)

    # ------------------------------------------------------------------
    # tables for the whole field
    # ------------------------------------------------------------------
    @cached_property
    def mul_table(self) -> np.ndarray:
        """``q x q`` multiplication table (only for moderate q)."""
        e = self.elements
        return np.asarray(self.mul(e[:, None], e[None, :]))

    @cached_property
    def add_table(self) -> np.ndarray:
        e = self.elements
        return np.asarray(self.add(e[:, None], e[None, :]))

    @cached_property
    def neg_table(self) -> np.ndarray:
        return np.asarray(self.neg(self.elements))

    @cached_property
    def square_table(self) -> np.ndarray:
        e = self.elements
        return np.asarray(self.mul(e, e))

    @cached_property
    def trace_table(self) -> np.ndarray:
        """``Tr(a) = sum_{i<k} a^(p^i)`` for every element; values lie in [0, p)."""
        e = self.elements
        tr = np.zeros(self.q, dtype=np.int64)
        for i in range(self.k):
            tr = np.asarray(self.add(tr, self.pow(e, self.p**i)))
        if np.any(tr >= self.p):  # pragma: no cover - would mean a broken table
            raise FieldError("trace left the prime subfield")
        return tr

    @cached_property
    def char_table(self) -> np.ndarray:
        """Canonical additive character ``e(a) = exp(2 pi i Tr(a) / p)``."""
        return np.exp(2j * np.pi * self.trace_table / self.p)

    @cached_property
    def char_matrix(self) -> np.ndarray:
        """``C[a, b] = e(a * b)``, the size-q Fourier kernel."""
        return self.char_table[self.mul_table]

    def trace(self, a):
        return self._ret(self.trace_table[np.asarray(a, dtype=np.int64)], a)

    def character(self, a):
        out = self.char_table[np.asarray(a, dtype=np.int64)]
        return complex(out) if np.ndim(a) == 0 else out

    # ------------------------------------------------------------------
    # squares and subfields
    # ------------------------------------------------------------------
    def is_square(self, a):
        a_ = np.asarray(a, dtype=np.int64)
        out = (a_ == 0) | (np.asarray(self.pow(a_, (self.q - 1) // 2)) == 1)
        return bool(out) if np.ndim(a) == 0 else out

    def squares(self) -> np.ndarray:
        """The set of squares by enumeration (oracle for :meth:`is_square`)."""
        return np.unique(self.square_table)

    def minus_one_is_square(self) -> bool:
        return self.is_square(self.neg(1))

    def sqrt_minus_one(self) -> int:
        """An element i with i*i = -1; raises if none exists."""
        m1 = self.neg(1)
        hits = np.nonzero(self.square_table == m1)[0]
        if hits.size == 0:
            raise FieldError(f"-1 is not a square in {self.describe()}")
        return int(hits[0])

    def subfields(self) -> list[Subfield]:
        """One entry per divisor j of k: the fixed set of ``x -> x^(p^j)``."""
        e = self.elements
        out = []
        for j in range(1, self.k + 1):
            if self.k % j:
                continue
            fixed = e[np.asarray(self.pow(e, self.p**j)) == e]
            out.append(Subfield(degree=j, order=self.p**j, elements=fixed))
        return out


def parse_field(desc: str) -> FieldCtx:
    """Parse ``"p^k"`` or ``"p^k/c_0,...,c_k"`` (also accepts a bare ``"p"``)."""
    desc = desc.strip()
    head, _, mod = desc.partition("/")
    base, _, exp = head.partition("^")
    try:
        p = int(base)
        k = int(exp) if exp else 1
        modulus = tuple(int(c) for c in mod.split(",")) if mod else None
    except ValueError as err:
        raise FieldError(f"malformed field description {desc!r}") from err
    return FieldCtx(p, k, modulus)


_CACHE: dict[tuple, FieldCtx] = {}


def get_field(p: int, k: int = 1, modulus=None) -> FieldCtx:
    """Cached constructor; tables are shared between callers."""
    key = (p, k, None if modulus is None else tuple(modulus))
    if key not in _CACHE:
        _CACHE[key] = FieldCtx(p, k, modulus)
    return _CACHE[key]
