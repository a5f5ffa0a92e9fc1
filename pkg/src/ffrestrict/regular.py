"""Dyadic level sets and regular slice decompositions of functions on F^3.

A set ``A`` in F^3 is ``(gamma, s, t)``-regular when its nonempty horizontal
slices ``A_z = {x in A : x_3 = z}`` number ``q**t`` and all have sizes between
``q**s`` and ``2 q**s``. Exponents are never stored as floats; pieces keep the
integer counts and derive the logarithms on demand.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from ffrestrict.ffield import FieldCtx
from ffrestrict.fourier import GridFn

__all__ = [
    "LevelPiece",
    "RegularPiece",
    "RegularityError",
    "decompose",
    "dyadic_levels",
    "level_count_bound",
    "pieces_per_level_bound",
    "regularity_stats",
    "slice_regular_decompose",
]

TAIL_POWER = 10


class RegularityError(ValueError):
    """A piece fails the regularity invariants."""


def level_count_bound(q: int) -> int:
    """Most level pieces :func:`dyadic_levels` can return for field size ``q``."""
    return math.ceil(TAIL_POWER * math.log2(q)) + 1


def pieces_per_level_bound(q: int) -> int:
    """Most regular pieces one level can split into (slice sizes lie in [1, q^2])."""
    return math.floor(2 * math.log2(q)) + 1


def _level_index(a: np.ndarray) -> np.ndarray:
    """``i`` with ``2**(i-1) < a <= 2**i`` for positive ``a``."""
    m, e = np.frexp(a)
    return np.where(m == 0.5, e - 1, e)


@dataclass(frozen=True, eq=False)
class LevelPiece:
    """``f`` restricted to one dyadic level, stored as ``factor * values``.

    ``factor`` is a power of two, so recombination is exact in floating point.
    """

    ctx: FieldCtx
    level: int
    support: np.ndarray  # flat indices into F^3
    values: np.ndarray  # 1/2 < |values| <= 1
    factor: float

    def to_gridfn(self) -> GridFn:
        out = np.zeros(self.ctx.q**3, dtype=np.complex128)
        out[self.support] = self.values * self.factor
        return GridFn(self.ctx, 3, out)


def dyadic_levels(f: GridFn) -> tuple[list[LevelPiece], GridFn]:
    """Split ``f`` into dyadic level pieces plus a tail.

    ``f`` is first scaled by a power of two so that ``max |f|`` lies in
    ``(1/2, 1]``. Level ``i <= 0`` then collects the points with
    ``2**(i-1) < |f| <= 2**i``, and the tail holds the points with
    ``0 < |f| <= q**-10`` in the scaled units.
    """
    if f.n != 3:
        raise ValueError("dyadic_levels works on F^3")
    ctx = f.ctx
    vals = np.asarray(f.values)
    absf = np.abs(vals)
    tail = np.zeros_like(vals)
    top = float(absf.max(initial=0.0))
    if top == 0.0:
        return [], GridFn(ctx, 3, tail)
    shift = int(_level_index(np.array([top]))[0])  # 2**(shift-1) < top <= 2**shift
    scaled = np.ldexp(absf, -shift)
    nz = scaled > 0
    small = nz & (scaled <= float(ctx.q) ** (-TAIL_POWER))
    tail[small] = vals[small]
    keep = nz & ~small
    idx = np.nonzero(keep)[0]
    levels = _level_index(scaled[idx])
    pieces = []
    for i in sorted(set(levels.tolist()), reverse=True):
        sel = idx[levels == i]
        factor = math.ldexp(1.0, shift + i)
        pieces.append(LevelPiece(ctx, int(i), sel, vals[sel] / factor, factor))
    return pieces, GridFn(ctx, 3, tail)


@dataclass(frozen=True, eq=False)
class RegularPiece:
    """A piece whose support is ``(gamma, s, t)``-regular.

    ``gamma = log_q(support_size)``, ``t = log_q(slice_count)`` and
    ``s = log_q(min_slice)``; only the integer counts are stored.
    """

    ctx: FieldCtx
    support: np.ndarray
    values: np.ndarray
    factor: float = 1.0
    dyadic_class: int = 0

    @property
    def support_size(self) -> int:
        return int(len(self.support))

    def _slice_sizes(self) -> np.ndarray:
        z = self.support // self.ctx.q**2
        return np.bincount(z, minlength=self.ctx.q)

    @property
    def slice_count(self) -> int:
        return int(np.count_nonzero(self._slice_sizes()))

    @property
    def min_slice(self) -> int:
        sizes = self._slice_sizes()
        return int(sizes[sizes > 0].min()) if self.support_size else 0

    @property
    def max_slice(self) -> int:
        return int(self._slice_sizes().max(initial=0))

    def _log(self, n: int) -> float:
        return math.log(n) / math.log(self.ctx.q) if n > 0 else 0.0

    @property
    def gamma(self) -> float:
        return self._log(self.support_size)

    @property
    def s(self) -> float:
        return self._log(self.min_slice)

    @property
    def t(self) -> float:
        return self._log(self.slice_count)

    def to_gridfn(self) -> GridFn:
        out = np.zeros(self.ctx.q**3, dtype=np.complex128)
        out[self.support] = self.values * self.factor
        return GridFn(self.ctx, 3, out)

    def to_json(self) -> dict:
        return {
            "field": self.ctx.describe(),
            "support_size": self.support_size,
            "slice_count": self.slice_count,
            "min_slice": self.min_slice,
            "max_slice": self.max_slice,
            "dyadic_class": self.dyadic_class,
            "factor": self.factor,
        }


def slice_regular_decompose(g: LevelPiece | GridFn) -> list[RegularPiece]:
    """Group the z-slices of a level piece by dyadic size class.

    Slices with ``2**j <= |A_z| < 2**(j+1)`` form one piece, so within a piece
    the largest slice is below twice the smallest.
    """
    if isinstance(g, GridFn):
        support = np.nonzero(g.values)[0]
        values, factor, ctx = g.values[support], 1.0, g.ctx
    else:
        support, values, factor, ctx = g.support, g.values, g.factor, g.ctx
    mags = np.abs(values)
    if len(mags) and (mags.min() <= 0.5 or mags.max() > 1.0):
        raise RegularityError("level piece values must satisfy 1/2 < |g| <= 1")
    order = np.argsort(support, kind="stable")
    support, values = support[order], values[order]
    z = support // ctx.q**2
    sizes = np.bincount(z, minlength=ctx.q)
    cls = np.full(ctx.q, -1)
    nz = sizes > 0
    cls[nz] = np.floor(np.log2(sizes[nz])).astype(int)
    # guard against log2 rounding at exact powers of two
    cls[nz] = np.where(2 ** (cls[nz] + 1) <= sizes[nz], cls[nz] + 1, cls[nz])
    cls[nz] = np.where(2 ** cls[nz] > sizes[nz], cls[nz] - 1, cls[nz])
    point_cls = cls[z]
    pieces = []
    for j in sorted(set(point_cls.tolist())):
        sel = point_cls == j
        pieces.append(RegularPiece(ctx, support[sel], values[sel], factor, int(j)))
    return pieces


def regularity_stats(piece: RegularPiece) -> dict:
    """Recompute ``(gamma, s, t)`` and the slice ratio; raise if not regular."""
    sizes = piece._slice_sizes()
    nz = np.nonzero(sizes)[0]
    if len(nz) == 0:
        raise RegularityError("empty piece")
    lo = int(sizes[nz].min())
    for z in nz.tolist():
        if sizes[z] > 2 * lo:
            raise RegularityError(f"slice z={z} has {int(sizes[z])} points, more than twice the minimum {lo}")
    mags = np.abs(piece.values)
    if mags.min() < 0.5 or mags.max() > 1.0:
        raise RegularityError("values outside [1/2, 1]")
    count = len(nz)
    if not lo * count <= piece.support_size <= 2 * lo * count:
        raise RegularityError("support size inconsistent with slice counts")  # pragma: no cover
    return {
        "gamma": piece.gamma,
        "s": piece.s,
        "t": piece.t,
        "ratio": int(sizes[nz].max()) / lo,
        "support_size": piece.support_size,
        "slice_count": count,
        "min_slice": lo,
        "max_slice": int(sizes[nz].max()),
    }


def decompose(f: GridFn) -> tuple[list[RegularPiece], GridFn]:
    """Full decomposition: every level piece split into regular pieces, plus the tail."""
    levels, tail = dyadic_levels(f)
    pieces = []
    for lp in levels:
        pieces.extend(slice_regular_decompose(lp))
    return pieces, tail
