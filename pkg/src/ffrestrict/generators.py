"""Planted and random instances shared by tests, demos and the CLI.

Every generator is deterministic given its arguments and returns a JSON-ready
dict that records how it was built (``kind``, ``field``, ``params``,
``seed``) next to the data itself.
"""

from __future__ import annotations

import numpy as np

from ffrestrict.ffield import FieldCtx
from ffrestrict.fourier import GridFn
from ffrestrict.incidence import PointLineConfig, line_from_y_chart
from ffrestrict.paraboloid import ParaboloidCtx

__all__ = [
    "GENERATORS",
    "generate",
    "random_points",
    "regular_gridfn",
    "regular_set",
    "subfield_grid",
    "subspace",
]


def _subfield(ctx: FieldCtx, order: int):
    for G in ctx.subfields():
        if G.order == order:
            return G
    raise ValueError(f"{ctx.describe()} has no subfield of order {order}")


def subfield_grid(ctx: FieldCtx, g_order: int, x: int = 2, tau: int = 5, x2: int = 7, tau2: int = 11, seed: int = 0) -> dict:
    """``(x G + tau) x (x2 G + tau2)`` with the ``|G|^2`` lines ``y = m x + c`` of the grid.

    The lines are the images of ``{v = m u + c : m, c in G}`` under the affine
    map ``(u, v) -> (x u + tau, x2 v + tau2)``, so each holds ``|G|`` grid
    points. Scales and shifts are reduced into the field; a zero scale is
    replaced by 1.
    """
    q = ctx.q
    x, tau, x2, tau2 = x % q or 1, tau % q, x2 % q or 1, tau2 % q
    G = np.asarray(_subfield(ctx, g_order).elements)
    X = np.asarray(ctx.add(ctx.mul(x, G), tau))
    Y = np.asarray(ctx.add(ctx.mul(x2, G), tau2))
    pts = np.array([(a, b) for b in Y.tolist() for a in X.tolist()], dtype=np.int64)
    lines = []
    for m in G.tolist():
        slope = ctx.mul(x2, ctx.div(m, x))
        for c in G.tolist():
            icpt = ctx.add(ctx.sub(ctx.mul(x2, c), ctx.mul(slope, tau)), tau2)
            lines.append(line_from_y_chart(ctx, int(slope), int(icpt)))
    cfg = PointLineConfig(ctx, pts, np.array(lines, dtype=np.int64))
    return {
        "kind": "subfield-grid",
        "field": ctx.describe(),
        "params": {"g_order": g_order, "x": x, "tau": tau, "x2": x2, "tau2": tau2},
        "seed": seed,
        "config": cfg.to_json(),
    }


def regular_set(ctx: FieldCtx, slice_count: int, slice_size: int, seed: int = 0) -> dict:
    """Indicator of a set with ``slice_count`` horizontal slices of ``slice_size`` points each."""
    q = ctx.q
    if not 0 <= slice_count <= q or not 0 <= slice_size <= q * q:
        raise ValueError("slice_count must be in [0, q] and slice_size in [0, q^2]")
    rng = np.random.default_rng(seed)
    zs = np.sort(rng.choice(q, size=slice_count, replace=False))
    support = []
    for z in zs.tolist():
        cells = np.sort(rng.choice(q * q, size=slice_size, replace=False))
        support.extend((cells + z * q * q).tolist())
    return {
        "kind": "regular-set",
        "field": ctx.describe(),
        "params": {"slice_count": slice_count, "slice_size": slice_size},
        "seed": seed,
        "support": support,
    }


def regular_gridfn(obj: dict) -> GridFn:
    """Rebuild the indicator produced by :func:`regular_set`."""
    from ffrestrict.ffield import parse_field

    ctx = parse_field(obj["field"])
    vals = np.zeros(ctx.q**3)
    vals[np.asarray(obj["support"], dtype=np.int64)] = 1.0
    return GridFn(ctx, 3, vals)


def random_points(ctx: FieldCtx, n_points: int, n_lines: int | None = None, seed: int = 0) -> dict:
    """Uniformly random distinct points and lines (slope form, plus verticals)."""
    q = ctx.q
    n_lines = n_points if n_lines is None else n_lines
    rng = np.random.default_rng(seed)
    idx = rng.choice(q * q, size=min(n_points, q * q), replace=False)
    pts = np.column_stack([idx % q, idx // q]) if n_points else np.zeros((0, 2), dtype=np.int64)
    # q^2 non-vertical lines, then q vertical ones
    lidx = rng.choice(q * q + q, size=min(n_lines, q * q + q), replace=False)
    lines = []
    for v in lidx.tolist():
        if v < q * q:
            lines.append(line_from_y_chart(ctx, v % q, v // q))
        else:
            lines.append((1, 0, v - q * q))
    cfg = PointLineConfig(ctx, pts, np.array(lines, dtype=np.int64).reshape(-1, 3))
    return {
        "kind": "random-points",
        "field": ctx.describe(),
        "params": {"n_points": n_points, "n_lines": n_lines},
        "seed": seed,
        "config": cfg.to_json(),
    }


def subspace(ctx: FieldCtx, seed: int = 0) -> dict:
    """Ranks of the isotropic line ``{(xi, i xi)}`` on the paraboloid (needs ``-1 = i^2``)."""
    from ffrestrict.estimator import _subspace_ranks

    if not ctx.minus_one_is_square():
        raise ValueError("-1 is not a square in this field")
    ranks = _subspace_ranks(ParaboloidCtx(ctx))
    return {
        "kind": "subspace",
        "field": ctx.describe(),
        "params": {"i": int(ctx.sqrt_minus_one())},
        "seed": seed,
        "ranks": sorted(int(r) for r in ranks),
    }


GENERATORS = {
    "subfield-grid": subfield_grid,
    "regular-set": regular_set,
    "random-points": random_points,
    "subspace": subspace,
}


def generate(kind: str, ctx: FieldCtx, seed: int = 0, **params) -> dict:
    if kind not in GENERATORS:
        raise ValueError(f"unknown generator {kind!r}; choose from {sorted(GENERATORS)}")
    return GENERATORS[kind](ctx, seed=seed, **params)
