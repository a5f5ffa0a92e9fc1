"""Point-line incidences in F^2 and the L^4 / additive-quadruple reduction.

Lines are stored as normalized projective triples ``[a:b:c]`` meaning
``a x + b y = c``, scaled so that the first nonzero entry of ``(a, b)`` is 1.
Two lines are equal exactly when their triples are equal.

Subsets ``E`` of the paraboloid are given as arrays of ranks (see
:class:`ffrestrict.paraboloid.ParaboloidCtx`).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np

from ffrestrict.ffield import FieldCtx, parse_field
from ffrestrict.fourier import grid_index, lp_norm
from ffrestrict.paraboloid import ParaboloidCtx, SurfaceFn, extension, galilean_ranks

__all__ = [
    "IncidenceParams",
    "PointLineConfig",
    "ReductionResult",
    "TrivialBound",
    "additive_quadruples",
    "count_incidences",
    "energy_chain",
    "galilean_reduction_check",
    "incidence_from_energy",
    "incidence_pairs",
    "l4_identity_check",
    "line_from_dot_form",
    "line_from_x_chart",
    "line_from_y_chart",
    "line_map",
    "line_map_injectivity",
    "measured_exponent",
    "normalize_line",
    "points_on_line",
    "trivial_bound",
]


# ----------------------------------------------------------------------
# lines
# ----------------------------------------------------------------------
def normalize_line(ctx: FieldCtx, line) -> tuple[int, int, int]:
    a, b, c = (int(v) for v in line)
    if a:
        s = ctx.inv(a)
    elif b:
        s = ctx.inv(b)
    else:
        raise ValueError("line needs (a, b) != (0, 0)")
    return ctx.mul(a, s), ctx.mul(b, s), ctx.mul(c, s)


def _normalize_lines(ctx: FieldCtx, lines: np.ndarray) -> np.ndarray:
    lines = np.asarray(lines, dtype=np.int64).reshape(-1, 3)
    if lines.size == 0:
        return lines
    a, b = lines[:, 0], lines[:, 1]
    if np.any((a == 0) & (b == 0)):
        raise ValueError("line needs (a, b) != (0, 0)")
    lead = np.where(a != 0, a, b)
    s = np.asarray(ctx.inv(lead)).reshape(-1, 1)
    return np.asarray(ctx.mul(lines, s))


def line_from_y_chart(ctx: FieldCtx, slope: int, intercept: int):
    """``y = slope * x + intercept``."""
    return normalize_line(ctx, (ctx.neg(slope), 1, intercept))


def line_from_x_chart(ctx: FieldCtx, c: int, d: int):
    """``x = c * y + d``."""
    return normalize_line(ctx, (1, ctx.neg(c), d))


def line_from_dot_form(ctx: FieldCtx, y, rhs: int):
    """``y . x = rhs``."""
    return normalize_line(ctx, (y[0], y[1], rhs))


def points_on_line(ctx: FieldCtx, line) -> np.ndarray:
    """All q points of a line, as an ``(q, 2)`` array."""
    a, b, c = normalize_line(ctx, line)
    t = ctx.elements
    if a:
        return np.column_stack([ctx.sub(c, ctx.mul(b, t)), t])
    return np.column_stack([t, np.full(ctx.q, c)])


def line_map(ctx: FieldCtx, y) -> tuple[int, int, int]:
    """``l(y) = {x : y . x = y . y}`` for ``y != 0``."""
    y = np.asarray(y, dtype=np.int64)
    if not np.any(y):
        raise ValueError("line_map needs y != 0")
    return line_from_dot_form(ctx, y, ctx.dot(y, y))


def _line_map_many(ctx: FieldCtx, ys: np.ndarray) -> np.ndarray:
    ys = np.asarray(ys, dtype=np.int64).reshape(-1, 2)
    if len(ys) == 0:
        return np.zeros((0, 3), dtype=np.int64)
    yy = ctx.dot(ys, ys)
    return _normalize_lines(ctx, np.column_stack([ys, np.atleast_1d(yy)]))


def line_map_injectivity(ctx: FieldCtx):
    """Whether ``y -> l(y)`` is injective on ``F^2 - {0}``.

    Returns ``(True, None)`` or ``(False, (y, y2))`` with ``y != y2`` and
    ``l(y) == l(y2)``.
    """
    q = ctx.q
    idx = np.arange(1, q * q)
    ys = np.column_stack([idx % q, idx // q])
    lines = _line_map_many(ctx, ys)
    keys = grid_index(ctx, lines)
    order = np.argsort(keys, kind="stable")
    sk = keys[order]
    dup = np.nonzero(sk[1:] == sk[:-1])[0]
    if dup.size == 0:
        return True, None
    i, j = order[dup[0]], order[dup[0] + 1]
    return False, (tuple(int(v) for v in ys[i]), tuple(int(v) for v in ys[j]))


# ----------------------------------------------------------------------
# configurations
# ----------------------------------------------------------------------
@dataclass(frozen=True)
class IncidenceParams:
    """Loss factor and exponents for the claim I(alpha, beta)."""

    K: float = 1.0
    alpha: float = 1.5
    beta: float = 1.0
    N: int = 0


@dataclass(frozen=True, eq=False)
class PointLineConfig:
    """Points and lines in F^2, deduplicated and canonically ordered."""

    ctx: FieldCtx
    points: np.ndarray
    lines: np.ndarray = field(default_factory=lambda: np.zeros((0, 3), dtype=np.int64))

    def __post_init__(self):
        q = self.ctx.q
        pts = np.asarray(self.points, dtype=np.int64).reshape(-1, 2)
        if pts.size and (pts.min() < 0 or pts.max() >= q):
            raise ValueError("point coordinates must be field elements")
        pts = np.unique(pts, axis=0) if len(pts) else pts
        keys = pts[:, 0] + q * pts[:, 1] if len(pts) else np.zeros(0, dtype=np.int64)
        pts = pts[np.argsort(keys)]
        lines = _normalize_lines(self.ctx, self.lines)
        lines = np.unique(lines, axis=0) if len(lines) else lines.reshape(0, 3)
        pts.setflags(write=False)
        lines.setflags(write=False)
        object.__setattr__(self, "points", pts)
        object.__setattr__(self, "lines", lines)

    @property
    def n_points(self) -> int:
        return len(self.points)

    @property
    def n_lines(self) -> int:
        return len(self.lines)

    @cached_property
    def point_position(self) -> np.ndarray:
        """Flat F^2 index -> position in ``points`` (or -1)."""
        q = self.ctx.q
        pos = np.full(q * q, -1, dtype=np.int64)
        if self.n_points:
            pos[self.points[:, 0] + q * self.points[:, 1]] = np.arange(self.n_points)
        return pos

    @cached_property
    def pairs(self) -> tuple[np.ndarray, np.ndarray]:
        return incidence_pairs(self)

    @cached_property
    def line_counts(self) -> np.ndarray:
        return np.bincount(self.pairs[0], minlength=self.n_lines)

    @cached_property
    def point_degrees(self) -> np.ndarray:
        return np.bincount(self.pairs[1], minlength=self.n_points)

    def subset(self, point_mask=None, line_mask=None) -> "PointLineConfig":
        pts = self.points if point_mask is None else self.points[point_mask]
        lns = self.lines if line_mask is None else self.lines[line_mask]
        return PointLineConfig(self.ctx, pts, lns)

    def to_json(self) -> dict:
        return {
            "field": self.ctx.describe(),
            "points": self.points.tolist(),
            "lines": self.lines.tolist(),
        }

    @classmethod
    def from_json(cls, obj: dict, ctx: FieldCtx | None = None) -> "PointLineConfig":
        ctx = ctx or parse_field(obj["field"])
        return cls(ctx, np.array(obj.get("points", []), dtype=np.int64), np.array(obj.get("lines", []), dtype=np.int64))


def incidence_pairs(cfg: PointLineConfig) -> tuple[np.ndarray, np.ndarray]:
    """``(line_idx, point_idx)`` for every incident pair, via per-line hashing."""
    ctx = cfg.ctx
    q = ctx.q
    if cfg.n_lines == 0 or cfg.n_points == 0:
        return np.zeros(0, dtype=np.int64), np.zeros(0, dtype=np.int64)
    a, b, c = cfg.lines[:, 0:1], cfg.lines[:, 1:2], cfg.lines[:, 2:3]
    t = ctx.elements[None, :]
    xs = np.where(a == 1, ctx.sub(c, ctx.mul(b, t)), t)
    ys = np.where(a == 1, t, c)
    pos = cfg.point_position[xs + q * ys]
    li, _ = np.nonzero(pos >= 0)
    return li, pos[pos >= 0]


def count_incidences(cfg: PointLineConfig, method: str = "hash") -> int:
    """``|I(P, L)|``; ``method="naive"`` is the scalar double-loop oracle."""
    if method == "hash":
        return int(len(cfg.pairs[0]))
    if method == "naive":
        ctx = cfg.ctx
        total = 0
        for a, b, c in cfg.lines.tolist():
            for x, y in cfg.points.tolist():
                if ctx.add(ctx.mul(a, x), ctx.mul(b, y)) == c:
                    total += 1
        return total
    raise ValueError(f"unknown method {method!r}")


@dataclass(frozen=True)
class TrivialBound:
    bound: float
    count: int
    holds: bool


def _le_sqrt_form(count: int, lin: int, coef: int, rad: int) -> bool:
    """Exact test of ``count <= coef * sqrt(rad) + lin``."""
    d = count - lin
    return d <= 0 or d * d <= coef * coef * rad


def trivial_bound(cfg: PointLineConfig) -> TrivialBound:
    """``min(|P|^(1/2)|L| + |P|, |P||L|^(1/2) + |L|)`` and an exact comparison."""
    P, L = cfg.n_points, cfg.n_lines
    count = count_incidences(cfg)
    bound = min(math.sqrt(P) * L + P, P * math.sqrt(L) + L)
    holds = _le_sqrt_form(count, P, L, P) or _le_sqrt_form(count, L, P, L)
    return TrivialBound(bound, count, holds)


def measured_exponent(incidences: int, n: int) -> float:
    """``log(max(I, 1)) / log(N)``; 1.0 when ``N < 2``."""
    if n < 2:
        return 1.0
    return math.log(max(incidences, 1)) / math.log(n)


# ----------------------------------------------------------------------
# additive quadruples on the paraboloid
# ----------------------------------------------------------------------
def _as_ranks(pctx: ParaboloidCtx, E) -> np.ndarray:
    E = np.asarray(E, dtype=np.int64).reshape(-1)
    if E.size and (E.min() < 0 or E.max() >= pctx.size):
        raise ValueError("E must be a subset of the paraboloid (ranks in [0, q^2))")
    if len(np.unique(E)) != len(E):
        raise ValueError("E has repeated points")
    return E


def _points_of(pctx: ParaboloidCtx, E) -> np.ndarray:
    return pctx.points[_as_ranks(pctx, E)]


def additive_quadruples(pctx: ParaboloidCtx, E, method: str = "hash") -> int:
    """``#{(a, b, c, d) in E^4 : a + b = c + d}``, exactly.

    ``"hash"`` counts pair sums (``sum r(s)^2``); ``"cubic"`` solves for ``d``
    given ``(a, b, c)`` and tests membership, an independent route.
    """
    ctx = pctx.ctx
    pts = _points_of(pctx, E)
    if len(pts) == 0:
        return 0
    if method == "hash":
        sums = ctx.add(pts[:, None, :], pts[None, :, :]).reshape(-1, 3)
        _, counts = np.unique(grid_index(ctx, sums), return_counts=True)
        return int(sum(int(c) * int(c) for c in counts))
    if method == "cubic":
        member = np.zeros(ctx.q**3, dtype=bool)
        member[grid_index(ctx, pts)] = True
        total = 0
        ab = ctx.add(pts[:, None, :], pts[None, :, :]).reshape(-1, 3)
        for c in pts:
            d = ctx.sub(ab, c)
            total += int(np.count_nonzero(member[grid_index(ctx, d)]))
        return total
    raise ValueError(f"unknown method {method!r}")


def l4_identity_check(pctx: ParaboloidCtx, E, method: str = "fast") -> tuple[float, float, float]:
    """``(q^3 Lambda(E) / q^8, ||(1_E d sigma)^v||_4^4, relative error)``."""
    E = _as_ranks(pctx, E)
    q = pctx.ctx.q
    lam = additive_quadruples(pctx, E)
    analytic = q**3 * lam / q**8
    direct = lp_norm(extension(SurfaceFn.indicator(pctx, E), method=method), 4) ** 4
    scale = max(analytic, direct)
    rel = 0.0 if scale == 0 else abs(analytic - direct) / scale
    return analytic, direct, rel


def _check_b(pctx: ParaboloidCtx, b) -> np.ndarray:
    b = np.asarray(b, dtype=np.int64)
    if b.shape != (3,) or not pctx.contains(b):
        raise ValueError("b must be a point of the paraboloid")
    return b


def _pair_count_in_P(pctx: ParaboloidCtx, A: np.ndarray, D: np.ndarray, shift=None) -> int:
    """``#{(a, d) in A x D : a - d (+ shift) in P}``."""
    ctx = pctx.ctx
    if len(A) == 0 or len(D) == 0:
        return 0
    diff = ctx.sub(A[:, None, :], D[None, :, :]).reshape(-1, 3)
    if shift is not None:
        diff = ctx.add(diff, shift)
    return int(np.count_nonzero(pctx.contains(diff)))


def galilean_reduction_check(pctx: ParaboloidCtx, E, b):
    """Both sides of the Galilean claim, counted independently.

    ``lhs = #{(a, d, c) in E x E x P : a - d = c - b}`` and
    ``rhs = #{(a', d') in E' x E' : a' - d' in P}`` with ``E' = g_{-nu}(E)``.
    """
    ctx = pctx.ctx
    b = _check_b(pctx, b)
    pts = _points_of(pctx, E)
    # lhs: for every (a, d), how many c in P equal a - d + b
    member = np.zeros(ctx.q**3, dtype=bool)
    member[pctx.flat_points] = True
    lhs = 0
    if len(pts):
        c = ctx.add(ctx.sub(pts[:, None, :], pts[None, :, :]), b).reshape(-1, 3)
        lhs = int(np.count_nonzero(member[grid_index(ctx, c)]))
    nu = b[:2]
    Ep = pctx.points[galilean_ranks(pctx, ctx.neg(nu), _as_ranks(pctx, E))]
    rhs = _pair_count_in_P(pctx, Ep, Ep)
    return lhs, rhs, lhs == rhs


@dataclass
class ReductionResult:
    """Materialized reduction from shifted quadruples to incidences."""

    b: tuple[int, int, int]
    E_size: int
    transported: np.ndarray  # E' as triples
    X: np.ndarray  # base points of E' - {0}
    lines: np.ndarray  # l(y) for y in X
    incidences: int
    shifted_count: int  # a', d' in E' - {0}
    inner_count: int  # a', d' in E'
    d_zero_terms: int
    a_zero_terms: int
    lines_distinct: bool
    counts_equal: bool
    ctx: FieldCtx

    @property
    def config(self) -> PointLineConfig:
        return PointLineConfig(self.ctx, self.X, self.lines)

    def to_json(self) -> dict:
        return {
            "b": list(self.b),
            "E_size": self.E_size,
            "X_size": int(len(self.X)),
            "lines": int(len(self.lines)),
            "incidences": self.incidences,
            "shifted_count": self.shifted_count,
            "inner_count": self.inner_count,
            "d_zero_terms": self.d_zero_terms,
            "a_zero_terms": self.a_zero_terms,
            "lines_distinct": self.lines_distinct,
            "counts_equal": self.counts_equal,
        }


def _require_minus_one_nonsquare(ctx: FieldCtx):
    if ctx.minus_one_is_square():
        ok, witness = line_map_injectivity(ctx)
        raise ValueError(
            f"-1 is a square in {ctx.describe()}; l(y) is not injective, e.g. l{witness[0]} == l{witness[1]}"
        )


def incidence_from_energy(pctx: ParaboloidCtx, E, b) -> ReductionResult:
    """Build ``X_{E'}`` and ``L_{E'}`` for a fixed ``b`` and compare the counts."""
    ctx = pctx.ctx
    _require_minus_one_nonsquare(ctx)
    b = _check_b(pctx, b)
    E = _as_ranks(pctx, E)
    Ep = pctx.points[galilean_ranks(pctx, ctx.neg(b[:2]), E)]
    nonzero = np.any(Ep != 0, axis=1)
    Enz = Ep[nonzero]
    zero = Ep[~nonzero]
    X = Enz[:, :2]
    lines = _line_map_many(ctx, X)
    cfg = PointLineConfig(ctx, X, lines)
    incid = count_incidences(cfg)
    shifted = _pair_count_in_P(pctx, Enz, Enz)
    inner = _pair_count_in_P(pctx, Ep, Ep)
    d_zero = _pair_count_in_P(pctx, Ep, zero)
    a_zero = _pair_count_in_P(pctx, zero, Enz)
    return ReductionResult(
        b=tuple(int(v) for v in b),
        E_size=len(E),
        transported=Ep,
        X=X,
        lines=lines,
        incidences=incid,
        shifted_count=shifted,
        inner_count=inner,
        d_zero_terms=d_zero,
        a_zero_terms=a_zero,
        lines_distinct=cfg.n_lines == len(X),
        counts_equal=incid == shifted,
        ctx=ctx,
    )


def _inner_counts_all_b(pctx: ParaboloidCtx, pts: np.ndarray) -> np.ndarray:
    """``#{(a, d) in E^2 : a - d + b in P}`` for every ``b`` in P (by rank)."""
    ctx = pctx.ctx
    out = np.zeros(pctx.size, dtype=np.int64)
    if len(pts) == 0:
        return out
    diff = ctx.sub(pts[:, None, :], pts[None, :, :]).reshape(-1, 3)
    for r in range(pctx.size):
        out[r] = np.count_nonzero(pctx.contains(ctx.add(diff, pctx.points[r])))
    return out


def energy_chain(pctx: ParaboloidCtx, E) -> dict:
    """The full integer chain bounding ``Lambda(E)`` by incidences.

    Picks the ``b`` in P maximizing the inner count, then checks
    ``Lambda <= |E| * inner(b) <= |E| (|E| + I(E', L_E'))`` and the final
    ``||(1_E d sigma)^v||_4^4 <= 2 q^3 q^-8 |E| (|E| + I)``, all in integers.
    """
    ctx = pctx.ctx
    E = _as_ranks(pctx, E)
    q = ctx.q
    pts = pctx.points[E]
    lam = additive_quadruples(pctx, E)
    inner = _inner_counts_all_b(pctx, pts)
    b_rank = int(np.argmax(inner))
    max_P = int(inner[b_rank])
    max_E = int(inner[E].max()) if len(E) else 0
    red = incidence_from_energy(pctx, E, pctx.points[b_rank])
    n = len(E)
    bound = n * (n + red.incidences)
    return {
        "E_size": n,
        "Lambda": lam,
        "b": list(red.b),
        "max_inner_over_P": max_P,
        "max_inner_over_E": max_E,
        "gap": max_P - max_E,
        "incidences": red.incidences,
        "counts_equal": red.counts_equal,
        "lambda_le_inner": lam <= n * max_P,
        "inner_le_incidence_form": max_P <= n + red.incidences,
        "chain_holds": lam <= bound,
        # ||.||_4^4 = q^3 Lambda / q^8 and the bound 2 q^3 q^-8 |E|(|E| + I) share q^-5
        "l4_bound_holds": lam <= 2 * bound,
        "l4_fourth_power": q**3 * lam / q**8,
        "l4_fourth_power_bound": 2 * q**3 * bound / q**8,
        "alpha_hat": measured_exponent(red.incidences, len(red.X)),
    }
