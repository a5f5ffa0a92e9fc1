"""Dense functions on F^n, the Fourier transform, and L^p norms.

Index convention (frozen, used by every serialized count and witness): the
point ``(x_1, ..., x_n)`` sits at flat index ``sum_i x_i * q**(i-1)``, so
``x_1`` varies fastest. :meth:`GridFn.as_array` exposes the values as an
n-dimensional array indexed ``[x_1, ..., x_n]``.

Two measures are supported. ``"counting"`` gives every point mass 1 (the
physical space ``dx``); ``"normalized"`` gives every point mass ``q**-n`` (the
frequency space ``d xi``). The transform maps the first to the second.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ffrestrict.ffield import FieldCtx, parse_field

__all__ = [
    "GridFn",
    "MEASURES",
    "grid_coords",
    "grid_index",
    "fourier_transform",
    "inner",
    "lp_norm",
    "plancherel_check",
    "reflect",
    "translate",
]

MEASURES = ("counting", "normalized")


@dataclass(frozen=True, eq=False)
class GridFn:
    """Complex-valued function on F^n stored densely in index order."""

    ctx: FieldCtx
    n: int
    values: np.ndarray
    measure: str = "counting"

    def __post_init__(self):
        if not 1 <= self.n <= 3:
            raise ValueError("dimension must be 1, 2 or 3")
        if self.measure not in MEASURES:
            raise ValueError(f"measure must be one of {MEASURES}")
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != self.ctx.q**self.n:
            raise ValueError(f"expected {self.ctx.q ** self.n} values, got {vals.size}")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @classmethod
    def from_array(cls, ctx: FieldCtx, arr, measure: str = "counting") -> "GridFn":
        arr = np.asarray(arr)
        return cls(ctx, arr.ndim, arr.reshape(-1, order="F"), measure)

    @classmethod
    def zeros(cls, ctx: FieldCtx, n: int, measure: str = "counting") -> "GridFn":
        return cls(ctx, n, np.zeros(ctx.q**n), measure)

    @classmethod
    def delta(cls, ctx: FieldCtx, n: int, point=None, measure: str = "counting") -> "GridFn":
        vals = np.zeros(ctx.q**n, dtype=np.complex128)
        vals[grid_index(ctx, point if point is not None else (0,) * n)] = 1
        return cls(ctx, n, vals, measure)

    def as_array(self) -> np.ndarray:
        return self.values.reshape((self.ctx.q,) * self.n, order="F")

    def with_values(self, values, measure: str | None = None) -> "GridFn":
        return GridFn(self.ctx, self.n, values, measure or self.measure)

    @property
    def point_mass(self) -> float:
        return 1.0 if self.measure == "counting" else float(self.ctx.q) ** (-self.n)

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, GridFn)
            and self.ctx == other.ctx
            and self.n == other.n
            and self.measure == other.measure
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None

    def to_json(self) -> dict:
        return {
            "field": self.ctx.describe(),
            "n": self.n,
            "measure": self.measure,
            "values": [[float(v.real), float(v.imag)] for v in self.values],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "GridFn":
        ctx = parse_field(obj["field"])
        vals = np.array([complex(re, im) for re, im in obj["values"]])
        return cls(ctx, int(obj["n"]), vals, obj["measure"])


def grid_coords(ctx: FieldCtx, n: int) -> np.ndarray:
    """All points of F^n as an ``(q**n, n)`` array, in index order."""
    idx = np.arange(ctx.q**n, dtype=np.int64)
    return np.stack([(idx // ctx.q**i) % ctx.q for i in range(n)], axis=1)


def grid_index(ctx: FieldCtx, point) -> np.ndarray | int:
    pt = np.asarray(point, dtype=np.int64)
    pows = ctx.q ** np.arange(pt.shape[-1], dtype=np.int64)
    out = pt @ pows
    return int(out) if np.ndim(out) == 0 else out


def _transform_fast(ctx: FieldCtx, arr: np.ndarray, sign: int) -> np.ndarray:
    kern = ctx.char_matrix if sign > 0 else ctx.char_matrix.conj()
    out = arr
    for axis in range(arr.ndim):
        out = np.moveaxis(np.tensordot(kern, out, axes=([1], [axis])), 0, axis)
    return out


def _transform_direct(ctx: FieldCtx, n: int, values: np.ndarray, sign: int) -> np.ndarray:
    # one field dot product per (x, xi) pair, evaluated in the field itself
    pts = grid_coords(ctx, n)
    out = np.empty(len(pts), dtype=np.complex128)
    for j, xi in enumerate(pts):
        dots = ctx.dot(pts, np.broadcast_to(xi, pts.shape))
        if sign < 0:
            dots = ctx.neg(dots)
        out[j] = np.sum(values * ctx.char_table[dots])
    return out


def fourier_transform(f: GridFn, method: str = "fast") -> GridFn:
    """``f^(xi) = sum_x f(x) e(-x . xi)``; counting measure in, normalized out.

    ``method="direct"`` sums one term per (x, xi) pair and serves as the
    oracle for the default tensorized path.
    """
    if f.measure != "counting":
        raise ValueError("fourier_transform expects a counting-measure function")
    if method == "fast":
        vals = _transform_fast(f.ctx, f.as_array(), -1).reshape(-1, order="F")
    elif method == "direct":
        vals = _transform_direct(f.ctx, f.n, f.values, -1)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFn(f.ctx, f.n, vals, "normalized")


def reflect(f: GridFn) -> GridFn:
    """``x -> f(-x)``."""
    ctx = f.ctx
    idx = grid_index(ctx, ctx.neg(grid_coords(ctx, f.n)))
    return f.with_values(f.values[idx])


def translate(f: GridFn, a) -> GridFn:
    """``x -> f(x - a)``."""
    ctx = f.ctx
    pts = grid_coords(ctx, f.n)
    src = grid_index(ctx, ctx.sub(pts, np.asarray(a, dtype=np.int64)))
    return f.with_values(f.values[src])


def lp_norm(f: GridFn, exponent) -> float:
    """L^p norm under the function's own measure; ``exponent`` may be ``inf``.

    Functions with values in {0, +1, -1} and even integer exponents are
    summed exactly in integers; everything else uses ``math.fsum``.
    """
    absf = np.abs(f.values)
    if exponent == math.inf or exponent == "inf":
        return float(absf.max(initial=0.0))
    e = float(exponent)
    if e <= 0:
        raise ValueError("exponent must be positive")
    mass = f.point_mass
    re, im = f.values.real, f.values.imag
    if e.is_integer() and int(e) % 2 == 0 and np.all(im == 0) and np.all(np.isin(re, (-1.0, 0.0, 1.0))):
        total = int(np.count_nonzero(re))
        return (mass * total) ** (1.0 / e)
    total = math.fsum((absf**e).tolist())
    return (mass * total) ** (1.0 / e)


def inner(f: GridFn, g: GridFn) -> complex:
    """``<f, g> = sum f * conj(g)`` under the (shared) measure."""
    if f.measure != g.measure:
        raise ValueError("inner product of functions with different measures")
    return complex(np.vdot(g.values, f.values) * f.point_mass)


def plancherel_check(f: GridFn) -> tuple[float, float, float]:
    """``(||f^||_{L^2(d xi)}, ||f||_{L^2(dx)}, relative error)``."""
    lhs = lp_norm(fourier_transform(f), 2)
    rhs = lp_norm(f, 2)
    scale = max(abs(lhs), abs(rhs))
    rel = 0.0 if scale == 0 else abs(lhs - rhs) / scale
    return lhs, rhs, rel
