"""The paraboloid P = {(w, w.w)} in F^3, its extension operator and kernel.

Points of P are ranked by their base point: ``w = (w1, w2)`` has rank
``w1 + q * w2``, which is also the flat index of ``w`` in F^2. Surface
functions are therefore plain length-``q**2`` arrays, and a function on a
horizontal slice of F^3 converts to a surface function without reindexing.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np

from ffrestrict.ffield import FieldCtx
from ffrestrict.fourier import GridFn, grid_coords, grid_index

__all__ = [
    "ParaboloidCtx",
    "SurfaceFn",
    "PseudoConformalResult",
    "bochner_riesz_kernel",
    "convolve_slice",
    "extension",
    "fourier_dimension_report",
    "galilean",
    "gauss_sum",
    "kernel_closed_form",
    "kernel_formula_check",
    "pseudo_conformal_identity",
    "slice_to_surface",
    "surface_norm",
]


class ParaboloidCtx:
    """The point set P with rank/index maps.

    ``points[r]`` is the triple for rank ``r``; ``index[i]`` maps the flat
    F^3 index ``i`` to a rank, or ``-1`` when the point is not on P.
    """

    def __init__(self, ctx: FieldCtx):
        self.ctx = ctx
        q = ctx.q
        base = grid_coords(ctx, 2)
        tau = np.asarray(ctx.add(ctx.square_table[base[:, 0]], ctx.square_table[base[:, 1]]))
        self.base = base
        self.tau = tau
        self.points = np.column_stack([base, tau])
        index = np.full(q**3, -1, dtype=np.int64)
        index[grid_index(ctx, self.points)] = np.arange(q * q)
        self.index = index

    @property
    def size(self) -> int:
        return self.ctx.q ** 2

    def contains(self, pts) -> np.ndarray | bool:
        """Membership test for triples; ``c == a*a + b*b``."""
        pts = np.asarray(pts, dtype=np.int64)
        sq = self.ctx.square_table
        out = self.ctx.add(sq[pts[..., 0]], sq[pts[..., 1]]) == pts[..., 2]
        return bool(out) if np.ndim(out) == 0 else out

    def rank(self, pts) -> np.ndarray | int:
        """Rank of points on P; raises for points off P."""
        pts = np.asarray(pts, dtype=np.int64)
        r = self.index[grid_index(self.ctx, pts)]
        if np.any(r < 0):
            raise ValueError("point not on the paraboloid")
        return int(r) if np.ndim(r) == 0 else r

    @cached_property
    def flat_points(self) -> np.ndarray:
        return np.asarray(grid_index(self.ctx, self.points))


@dataclass(frozen=True, eq=False)
class SurfaceFn:
    """A function on P, aligned with ``pctx.points``."""

    pctx: ParaboloidCtx
    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.complex128).reshape(-1)
        if vals.size != self.pctx.size:
            raise ValueError(f"expected {self.pctx.size} values, got {vals.size}")
        object.__setattr__(self, "values", vals)

    @classmethod
    def indicator(cls, pctx: ParaboloidCtx, ranks) -> "SurfaceFn":
        vals = np.zeros(pctx.size, dtype=np.complex128)
        vals[np.asarray(ranks, dtype=np.int64)] = 1
        return cls(pctx, vals)

    @classmethod
    def ones(cls, pctx: ParaboloidCtx) -> "SurfaceFn":
        return cls(pctx, np.ones(pctx.size))

    @property
    def support(self) -> np.ndarray:
        return np.nonzero(self.values)[0]


def surface_norm(g: SurfaceFn, exponent) -> float:
    """``||g||_{L^p(P, d sigma)}``, each point of P carrying mass ``1/|P|``."""
    absg = np.abs(g.values)
    if exponent == math.inf:
        return float(absg.max(initial=0.0))
    e = float(exponent)
    return (math.fsum((absg**e).tolist()) / g.pctx.size) ** (1.0 / e)


def _extension_fast(g: SurfaceFn) -> np.ndarray:
    pctx = g.pctx
    ctx = pctx.ctx
    q = ctx.q
    C = ctx.char_matrix
    gw = g.values.reshape(q, q, order="F")
    tau = pctx.tau.reshape(q, q, order="F")
    H = gw[None, :, :] * C[:, tau]  # [x3, w1, w2]
    out = np.einsum("ia,jb,kab->ijk", C, C, H, optimize=True)
    return out / pctx.size


def _extension_direct(g: SurfaceFn) -> np.ndarray:
    pctx = g.pctx
    ctx = pctx.ctx
    pts = grid_coords(ctx, 3)
    supp = g.support
    out = np.zeros(len(pts), dtype=np.complex128)
    for r in supp:
        dots = ctx.dot(pts, np.broadcast_to(pctx.points[r], pts.shape))
        out += g.values[r] * ctx.char_table[dots]
    return out / pctx.size


def extension(g: SurfaceFn, method: str = "fast") -> GridFn:
    """``(g d sigma)^v(x) = |P|^-1 sum_{xi in P} g(xi) e(x . xi)`` on all of F^3.

    The fast path factors the character over coordinates; ``"direct"`` sums
    term by term and is the oracle.
    """
    if method == "fast":
        vals = _extension_fast(g).reshape(-1, order="F")
    elif method == "direct":
        vals = _extension_direct(g)
    else:
        raise ValueError(f"unknown method {method!r}")
    return GridFn(g.pctx.ctx, 3, vals, "counting")


def fourier_dimension_report(pctx: ParaboloidCtx) -> dict:
    """Exhaustive maximum of ``|(d sigma)^v(x)|`` over ``x != 0``.

    Also reports the maximum over the punctured plane ``x3 = 0`` and the
    largest deviation from ``q**-1`` over ``x3 != 0``.
    """
    q = pctx.ctx.q
    vals = np.abs(extension(SurfaceFn.ones(pctx)).as_array())
    at_zero = float(vals[0, 0, 0])
    vals[0, 0, 0] = -1.0
    flat = int(np.argmax(vals.reshape(-1, order="F")))
    best = float(vals.reshape(-1, order="F")[flat])
    plane = vals[:, :, 0].copy()
    plane[0, 0] = 0.0
    off_plane = vals[:, :, 1:]
    return {
        "max": best,
        "argmax": [int(c) for c in grid_coords(pctx.ctx, 3)[flat]],
        "value_at_zero": at_zero,
        "max_on_x3_zero": float(plane.max()),
        "max_deviation_off_plane": float(np.abs(off_plane - 1.0 / q).max()) if q > 1 else 0.0,
        "inverse_field_size": 1.0 / q,
    }


def gauss_sum(ctx: FieldCtx, a) -> complex:
    """``S(a) = sum_{xi in F} e(a xi^2)``."""
    return complex(np.sum(ctx.char_table[ctx.mul(int(a), ctx.square_table)]))


def bochner_riesz_kernel(pctx: ParaboloidCtx) -> GridFn:
    """``K = (d sigma)^v - delta_0``."""
    ds = extension(SurfaceFn.ones(pctx))
    vals = ds.values.copy()
    vals[0] -= 1.0
    return ds.with_values(vals)


def kernel_closed_form(pctx: ParaboloidCtx, sign: int = -1) -> GridFn:
    """Gauss-sum form ``|F|^-2 S(x3)^2 e(sign * xbar.xbar / 4 x3)`` for ``x3 != 0``.

    ``sign=-1`` is the form that matches the definition of ``K`` under the
    ``e(+x . xi)`` extension convention; ``sign=+1`` is its conjugate. Both
    vanish on the plane ``x3 = 0``. ``1/4`` is the field inverse of ``4``.
    """
    ctx = pctx.ctx
    q = ctx.q
    pts = grid_coords(ctx, 3)
    x3 = pts[:, 2]
    nz = x3 != 0
    out = np.zeros(q**3, dtype=np.complex128)
    S = np.array([gauss_sum(ctx, a) for a in range(q)])
    xx = ctx.add(ctx.square_table[pts[nz, 0]], ctx.square_table[pts[nz, 1]])
    four_x3 = ctx.mul(ctx.scalar(4), x3[nz])
    phase = ctx.div(xx, four_x3)
    if sign < 0:
        phase = ctx.neg(phase)
    out[nz] = S[x3[nz]] ** 2 * ctx.char_table[phase] / q**2
    return GridFn(ctx, 3, out, "counting")


def kernel_formula_check(pctx: ParaboloidCtx, sign: int = -1) -> float:
    """Max deviation between the definition of ``K`` and its closed form."""
    if pctx.ctx.p == 2:  # pragma: no cover - excluded at field construction
        raise ValueError("closed form needs odd characteristic")
    return float(np.abs(bochner_riesz_kernel(pctx).values - kernel_closed_form(pctx, sign).values).max())


def galilean(pctx: ParaboloidCtx, delta, point) -> tuple[int, int, int]:
    """``(g, t) -> (g + d, t + 2 g.d + d.d)``; a bijection of P for fixed ``d``."""
    ctx = pctx.ctx
    point = np.asarray(point, dtype=np.int64)
    if not pctx.contains(point):
        raise ValueError("galilean transform applied to a point off the paraboloid")
    d = np.asarray(delta, dtype=np.int64)
    g = point[:2]
    t = point[2]
    two_gd = ctx.mul(ctx.scalar(2), ctx.dot(g, d))
    new_t = ctx.add(ctx.add(t, two_gd), ctx.dot(d, d))
    new_g = ctx.add(g, d)
    return int(new_g[0]), int(new_g[1]), int(new_t)


def galilean_ranks(pctx: ParaboloidCtx, delta, ranks) -> np.ndarray:
    """Vectorized :func:`galilean` acting on ranks of points of P."""
    ctx = pctx.ctx
    ranks = np.asarray(ranks, dtype=np.int64)
    d = np.asarray(delta, dtype=np.int64)
    pts = pctx.points[ranks]
    g = pts[:, :2]
    two_gd = ctx.mul(ctx.scalar(2), ctx.dot(g, np.broadcast_to(d, g.shape)))
    new_t = ctx.add(ctx.add(pts[:, 2], two_gd), ctx.dot(d, d))
    new_pts = np.column_stack([ctx.add(g, d), new_t])
    return np.asarray(pctx.rank(new_pts), dtype=np.int64).reshape(-1)


def slice_to_surface(pctx: ParaboloidCtx, h0) -> SurfaceFn:
    """Lift a function on F^2 (flat or ``q x q`` ``[x1, x2]``) to P via ``w -> (w, w.w)``."""
    h0 = np.asarray(h0)
    if h0.ndim == 2:
        h0 = h0.reshape(-1, order="F")
    return SurfaceFn(pctx, h0)


def convolve_slice(pctx: ParaboloidCtx, h0, kernel: GridFn, z: int = 0) -> GridFn:
    """``(h_z * kernel)(x) = sum_y h0(y) kernel(x - (y, z))`` by direct summation."""
    ctx = pctx.ctx
    h0 = np.asarray(h0)
    if h0.ndim == 2:
        h0 = h0.reshape(-1, order="F")
    pts = grid_coords(ctx, 3)
    base = grid_coords(ctx, 2)
    out = np.zeros(ctx.q**3, dtype=np.complex128)
    for r in np.nonzero(h0)[0]:
        shift = np.array([base[r, 0], base[r, 1], z])
        out += h0[r] * kernel.values[grid_index(ctx, ctx.sub(pts, shift))]
    return GridFn(ctx, 3, out, "counting")


@dataclass(frozen=True)
class PseudoConformalResult:
    lhs: float
    rhs: float
    rel_err: float
    rhs_all_t: float


def pseudo_conformal_identity(pctx: ParaboloidCtx, h0, z: int = 0) -> PseudoConformalResult:
    """Single-slice identity behind the kernel estimate.

    For a function ``h0`` on the plane ``x3 = z``, the substitution
    ``t = -1/(4 x3)``, ``zbar = xbar/(2 x3)`` turns ``h0 * K`` into ``q`` times
    the extension of ``h0`` lifted to P, giving the exact identity

        ||h0 * K||_{L^4(x3 != z)} = q * ||(h0 d sigma)^v||_{L^4(t != 0)}.

    ``rhs_all_t`` is the same right side summed over every ``t``, which only
    bounds the left side from above.
    """
    ctx = pctx.ctx
    q = ctx.q
    K = bochner_riesz_kernel(pctx)
    conv = convolve_slice(pctx, h0, K, z=z).as_array()
    x3 = ctx.sub(np.arange(q), z)
    lhs4 = math.fsum((np.abs(conv[:, :, x3 != 0]) ** 4).ravel().tolist())
    ext = np.abs(extension(slice_to_surface(pctx, h0)).as_array())
    rhs4 = math.fsum((ext[:, :, 1:] ** 4).ravel().tolist())
    all4 = math.fsum((ext**4).ravel().tolist())
    lhs = lhs4**0.25
    rhs = q * rhs4**0.25
    scale = max(lhs, rhs)
    rel = 0.0 if scale == 0 else abs(lhs - rhs) / scale
    return PseudoConformalResult(lhs, rhs, rel, q * all4**0.25)
