"""Constructive search for grid and subfield structure in rich configurations.

The pipeline mirrors the incidence-to-structure argument step by step:

1. :func:`prune` keeps lines and points of typical richness.
2. :func:`best_pair` finds two points whose bushes overlap the most.
3. :func:`normalize_pair` sends those two points to the points at infinity
   ``(1, 0, 0)`` and ``(0, 1, 0)``, so lines through them become horizontal
   and vertical respectively.
4. :func:`extract_grid` reads off the Cartesian grid ``A x B``.
5. :func:`subfield_detect` looks for ``A`` (and ``B``) inside an affine copy
   ``x * G + tau`` of a subfield ``G``.

None of the absolute constants of the underlying theorems are known, so every
stage reports what it measured instead of asserting a threshold.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from ffrestrict.ffield import FieldCtx, Subfield
from ffrestrict.incidence import PointLineConfig, count_incidences

__all__ = [
    "GridWitness",
    "ProjTransform",
    "PruneResult",
    "SubfieldWitness",
    "apply_projective",
    "best_pair",
    "bsg_refine",
    "bush",
    "collinear_energy",
    "extract_grid",
    "growth_stats",
    "incidence_structure_pipeline",
    "normalize_pair",
    "prune",
    "subfield_detect",
    "transform_config",
    "transform_lines",
]

COLLINEAR_CAP = 10**8


# ----------------------------------------------------------------------
# projective transforms
# ----------------------------------------------------------------------
def _det3(ctx: FieldCtx, m) -> int:
    m = [[int(v) for v in row] for row in m]
    mul, add, sub = ctx.mul, ctx.add, ctx.sub

    def minor(r0, r1, c0, c1):
        return sub(mul(m[r0][c0], m[r1][c1]), mul(m[r0][c1], m[r1][c0]))

    t0 = mul(m[0][0], minor(1, 2, 1, 2))
    t1 = mul(m[0][1], minor(1, 2, 0, 2))
    t2 = mul(m[0][2], minor(1, 2, 0, 1))
    return add(sub(t0, t1), t2)


def _inv3(ctx: FieldCtx, m) -> np.ndarray:
    m = [[int(v) for v in row] for row in m]
    d = _det3(ctx, m)
    if d == 0:
        raise ValueError("singular projective transform")
    dinv = ctx.inv(d)
    out = np.zeros((3, 3), dtype=np.int64)
    for i in range(3):
        for j in range(3):
            rows = [r for r in range(3) if r != j]
            cols = [c for c in range(3) if c != i]
            cof = ctx.sub(
                ctx.mul(m[rows[0]][cols[0]], m[rows[1]][cols[1]]),
                ctx.mul(m[rows[0]][cols[1]], m[rows[1]][cols[0]]),
            )
            if (i + j) % 2:
                cof = ctx.neg(cof)
            out[i, j] = ctx.mul(cof, dinv)
    return out


def _matvec(ctx: FieldCtx, m: np.ndarray, v: np.ndarray) -> np.ndarray:
    """``m @ v`` over the field for a batch of vectors ``v`` of shape (n, 3)."""
    prods = np.asarray(ctx.mul(m[None, :, :], v[:, None, :]))  # (n, 3, 3)
    acc = prods[..., 0]
    for j in range(1, 3):
        acc = np.asarray(ctx.add(acc, prods[..., j]))
    return acc


@dataclass(frozen=True, eq=False)
class ProjTransform:
    """An invertible 3x3 matrix over the field acting on homogeneous points."""

    ctx: FieldCtx
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.int64).reshape(3, 3) % self.ctx.q
        if _det3(self.ctx, m) == 0:
            raise ValueError("singular projective transform")
        m.setflags(write=False)
        object.__setattr__(self, "matrix", m)

    @classmethod
    def identity(cls, ctx: FieldCtx) -> "ProjTransform":
        return cls(ctx, np.eye(3, dtype=np.int64))

    def inverse(self) -> "ProjTransform":
        return ProjTransform(self.ctx, _inv3(self.ctx, self.matrix))

    def apply_homogeneous(self, v) -> np.ndarray:
        v = np.asarray(v, dtype=np.int64).reshape(-1, 3)
        return _matvec(self.ctx, self.matrix, v)

    def to_json(self) -> list:
        return self.matrix.tolist()


def _projective_equal(ctx: FieldCtx, u, v) -> bool:
    """``u ~ v`` as nonzero homogeneous vectors."""
    u = [int(a) for a in u]
    v = [int(a) for a in v]
    for i in range(3):
        for j in range(3):
            if ctx.mul(u[i], v[j]) != ctx.mul(u[j], v[i]):
                return False
    return any(u) and any(v)


def apply_projective(T: ProjTransform, pts) -> tuple[np.ndarray, int, np.ndarray]:
    """Apply ``T`` to points of F^2.

    Returns ``(image, lost, kept)`` where ``kept`` masks the input points that
    stay in the affine plane and ``lost`` counts those sent to infinity.
    """
    ctx = T.ctx
    pts = np.asarray(pts, dtype=np.int64).reshape(-1, 2)
    if len(pts) == 0:
        return pts.copy(), 0, np.zeros(0, dtype=bool)
    h = T.apply_homogeneous(np.column_stack([pts, np.ones(len(pts), dtype=np.int64)]))
    kept = h[:, 2] != 0
    w = np.asarray(ctx.inv(h[kept, 2])).reshape(-1, 1)
    image = np.asarray(ctx.mul(h[kept, :2], w)).reshape(-1, 2)
    return image, int(np.count_nonzero(~kept)), kept


def transform_lines(T: ProjTransform, lines) -> tuple[np.ndarray, int, np.ndarray]:
    """Image of lines ``[a:b:c]`` under ``T`` (inverse-transpose action)."""
    ctx = T.ctx
    lines = np.asarray(lines, dtype=np.int64).reshape(-1, 3)
    if len(lines) == 0:
        return lines.copy(), 0, np.zeros(0, dtype=bool)
    homog = np.column_stack([lines[:, 0], lines[:, 1], ctx.neg(lines[:, 2])])
    inv_t = T.inverse().matrix.T.copy()
    img = _matvec(ctx, inv_t, homog)
    kept = (img[:, 0] != 0) | (img[:, 1] != 0)
    out = np.column_stack([img[kept, 0], img[kept, 1], ctx.neg(img[kept, 2])]).reshape(-1, 3)
    return out, int(np.count_nonzero(~kept)), kept


def transform_config(T: ProjTransform, cfg: PointLineConfig):
    """``(T(cfg), lost_points, lost_lines)``."""
    pts, lost_p, _ = apply_projective(T, cfg.points)
    lns, lost_l, _ = transform_lines(T, cfg.lines)
    return PointLineConfig(cfg.ctx, pts, lns), lost_p, lost_l


# ----------------------------------------------------------------------
# pruning and bushes
# ----------------------------------------------------------------------
@dataclass
class PruneResult:
    points_mask: np.ndarray
    lines_mask: np.ndarray
    config: PointLineConfig
    report: dict


def prune(cfg: PointLineConfig, K: float, c8: float = 2.0) -> PruneResult:
    """Keep lines with ``K^-2 N^(1/2) <= |l cap P| <= K^2 N^(1/2)``, then points
    whose degree into the kept lines lies in ``[K^-c8 N^(1/2), K^c8 N^(1/2)]``.

    ``N = max(|P|, |L|)``.
    """
    N = max(cfg.n_points, cfg.n_lines)
    root = math.sqrt(N)
    counts = cfg.line_counts
    lines_mask = (counts >= root / K**2) & (counts <= root * K**2)
    mid = cfg.subset(line_mask=lines_mask)
    degrees = mid.point_degrees
    points_mask = (degrees >= root / K**c8) & (degrees <= root * K**c8)
    pruned = PointLineConfig(cfg.ctx, mid.points[points_mask], mid.lines)
    report = {
        "N": N,
        "K": K,
        "C8": c8,
        "incidences_before": count_incidences(cfg),
        "incidences_after": count_incidences(pruned),
        "lines_kept": int(np.count_nonzero(lines_mask)),
        "points_kept": int(np.count_nonzero(points_mask)),
        "line_window": [root / K**2, root * K**2],
        "degree_window": [root / K**c8, root * K**c8],
    }
    return PruneResult(points_mask, lines_mask, pruned, report)


def _bush_matrix(cfg: PointLineConfig) -> np.ndarray:
    """``U[p, p2]`` is True when some line of ``cfg`` holds both points."""
    M = np.zeros((cfg.n_lines, cfg.n_points), dtype=np.int64)
    li, pi = cfg.pairs
    M[li, pi] = 1
    return (M.T @ M) > 0


def bush(cfg: PointLineConfig, p) -> np.ndarray:
    """``U(p)``: points sharing a line of ``cfg`` with ``p`` (``p`` included if on a line)."""
    p = np.asarray(p, dtype=np.int64)
    idx = int(cfg.point_position[p[0] + cfg.ctx.q * p[1]])
    if idx < 0:
        raise ValueError("p is not a point of the configuration")
    return cfg.points[_bush_matrix(cfg)[idx]]


def best_pair(cfg: PointLineConfig, budget: int = 10**7, seed: int = 0) -> dict:
    """Pair ``(p0, q0)`` of distinct points maximizing ``|U(p0) cap U(q0)|``.

    Exhaustive when ``n_points**2 <= budget``; otherwise ``budget`` pairs are
    sampled with the given seed (an averaging argument guarantees pairs with
    large overlap exist, so the best sampled pair is reported).
    """
    n = cfg.n_points
    if n < 2:
        return {"p0": None, "q0": None, "overlap": 0, "exhaustive": True, "evaluated": 0}
    U = _bush_matrix(cfg).astype(np.int64)
    if n * n <= budget:
        overlap = U @ U.T
        np.fill_diagonal(overlap, -1)
        flat = int(np.argmax(overlap))
        i, j = divmod(flat, n)
        best = int(overlap[i, j])
        exhaustive, evaluated = True, n * (n - 1)
        mean = float((overlap.sum() + n) / (n * (n - 1)))
    else:
        rng = np.random.default_rng(seed)
        ii = rng.integers(0, n, size=budget)
        jj = rng.integers(0, n, size=budget)
        ok = ii != jj
        ii, jj = ii[ok], jj[ok]
        vals = np.einsum("ij,ij->i", U[ii], U[jj])
        k = int(np.argmax(vals))
        i, j, best = int(ii[k]), int(jj[k]), int(vals[k])
        exhaustive, evaluated = False, int(len(ii))
        mean = float(vals.mean()) if len(vals) else 0.0
    return {
        "p0": tuple(int(v) for v in cfg.points[i]),
        "q0": tuple(int(v) for v in cfg.points[j]),
        "overlap": best,
        "mean_overlap": mean,
        "exhaustive": exhaustive,
        "evaluated": evaluated,
    }


def normalize_pair(ctx: FieldCtx, p0, q0, r0=None) -> ProjTransform:
    """Projective ``T`` with ``T(p0) ~ (1,0,0)`` and ``T(q0) ~ (0,1,0)``.

    ``r0`` (sent to ``(0,0,1)``) is any point off the line ``p0 q0``; the first
    such point of F^2 is used when omitted.
    """
    p0 = (int(p0[0]), int(p0[1]), 1)
    q0 = (int(q0[0]), int(q0[1]), 1)
    if p0 == q0:
        raise ValueError("normalize_pair needs two distinct points")
    candidates = [] if r0 is None else [(int(r0[0]), int(r0[1]), 1)]
    candidates += [(x, y, 1) for y in range(ctx.q) for x in range(ctx.q)]
    for r in candidates:
        M = np.array([p0, q0, r], dtype=np.int64).T
        if _det3(ctx, M):
            T = ProjTransform(ctx, _inv3(ctx, M))
            img = T.apply_homogeneous(np.array([p0, q0]))
            if not (_projective_equal(ctx, img[0], (1, 0, 0)) and _projective_equal(ctx, img[1], (0, 1, 0))):
                raise RuntimeError("normalize_pair failed its post-condition")  # pragma: no cover
            return T
    raise ValueError("no point off the line through p0 and q0")  # pragma: no cover


# ----------------------------------------------------------------------
# grid extraction
# ----------------------------------------------------------------------
@dataclass
class GridWitness:
    """Projective transform plus Cartesian grid containing the transformed points."""

    T: ProjTransform | None
    A: np.ndarray
    B: np.ndarray
    P_prime: np.ndarray  # original coordinates of the points kept
    L_prime: np.ndarray  # original lines kept
    lost_at_infinity: int
    transformed: np.ndarray  # T(P') in the affine plane
    measured: dict = field(default_factory=dict)
    flags: list = field(default_factory=list)

    def check(self):
        """Containment and accounting invariants; raises on violation."""
        if self.T is None:
            return
        Aset, Bset = set(self.A.tolist()), set(self.B.tolist())
        for x, y in self.transformed.tolist():
            if x not in Aset or y not in Bset:
                raise RuntimeError("transformed point outside A x B")
        if len(self.A) * len(self.B) < len(self.transformed):
            raise RuntimeError("|A||B| smaller than |T(P')|")
        img, lost, _ = apply_projective(self.T, self.P_prime)
        if lost != self.lost_at_infinity or len(img) != len(self.transformed):
            raise RuntimeError("lost-at-infinity accounting mismatch")

    def to_json(self) -> dict:
        return {
            "T": None if self.T is None else self.T.to_json(),
            "A": self.A.tolist(),
            "B": self.B.tolist(),
            "P_prime": self.P_prime.tolist(),
            "L_prime": self.L_prime.tolist(),
            "lost_at_infinity": self.lost_at_infinity,
            "transformed": self.transformed.tolist(),
            "measured": self.measured,
            "flags": list(self.flags),
        }


def _incidence_hypothesis(cfg: PointLineConfig, K: float) -> tuple[bool, int, int]:
    N = max(cfg.n_points, cfg.n_lines)
    I = count_incidences(cfg)
    # I >= K^-1 N^(3/2)  <=>  (K I)^2 >= N^3 for I >= 0
    return (K * I) ** 2 >= N**3 and N > 0, I, N


def extract_grid(cfg: PointLineConfig, K: float, budget: int = 10**7, seed: int = 0, c8: float = 2.0) -> GridWitness:
    """prune -> best_pair -> normalize_pair -> read off ``A x B``."""
    ctx = cfg.ctx
    met, I, N = _incidence_hypothesis(cfg, K)
    flags = [] if met else ["low-incidence"]
    pr = prune(cfg, K, c8=c8)
    pc = pr.config
    measured = {
        "N": N,
        "incidences": I,
        "alpha_hat": math.log(max(I, 1)) / math.log(N) if N > 1 else 1.0,
        "hypothesis_met": met,
        "prune": pr.report,
    }
    empty = np.zeros(0, dtype=np.int64)
    if pc.n_points < 2 or _all_collinear(ctx, pc.points):
        flags.append("degenerate")
        return GridWitness(None, empty, empty, pc.points, pc.lines, 0, empty.reshape(0, 2), measured, flags)
    pair = best_pair(pc, budget=budget, seed=seed)
    measured["best_pair"] = pair
    U = _bush_matrix(pc)
    i0 = int(pc.point_position[pair["p0"][0] + ctx.q * pair["p0"][1]])
    j0 = int(pc.point_position[pair["q0"][0] + ctx.q * pair["q0"][1]])
    W = pc.points[U[i0] & U[j0]]
    if len(W) == 0:
        flags.append("degenerate")
        return GridWitness(None, empty, empty, W, pc.lines, 0, empty.reshape(0, 2), measured, flags)
    T = normalize_pair(ctx, pair["p0"], pair["q0"], r0=_first_off_line(ctx, W, pair["p0"], pair["q0"]))
    image, lost, kept = apply_projective(T, W)
    A = np.unique(image[:, 0])
    B = np.unique(image[:, 1])
    lines_img, lost_lines, _ = transform_lines(T, pc.lines)
    kept_cfg = PointLineConfig(ctx, W[kept], pc.lines)
    measured.update(
        {
            "W_size": int(len(W)),
            "T_P_prime_size": int(len(image)),
            "A_size": int(len(A)),
            "B_size": int(len(B)),
            "lost_lines": lost_lines,
            "retained_incidences": count_incidences(kept_cfg),
            "retained_incidences_after_T": count_incidences(PointLineConfig(ctx, image, lines_img)),
            "A_over_sqrtN": len(A) / math.sqrt(N),
            "B_over_sqrtN": len(B) / math.sqrt(N),
            "coverage_of_P": len(image) / max(cfg.n_points, 1),
        }
    )
    wit = GridWitness(T, A, B, W, pc.lines, lost, image, measured, flags)
    wit.check()
    return wit


def _all_collinear(ctx: FieldCtx, pts: np.ndarray) -> bool:
    if len(pts) < 3:
        return True
    p, q = pts[0], pts[1]
    d = ctx.sub(q, p)
    rest = ctx.sub(pts[2:], p)
    cross = ctx.sub(ctx.mul(d[0], rest[:, 1]), ctx.mul(d[1], rest[:, 0]))
    return bool(np.all(np.asarray(cross) == 0))


def _first_off_line(ctx: FieldCtx, pts, p0, q0):
    d = ctx.sub(np.asarray(q0), np.asarray(p0))
    rest = ctx.sub(np.asarray(pts), np.asarray(p0))
    cross = np.asarray(ctx.sub(ctx.mul(d[0], rest[:, 1]), ctx.mul(d[1], rest[:, 0])))
    hits = np.nonzero(cross != 0)[0]
    return None if hits.size == 0 else pts[hits[0]]


# ----------------------------------------------------------------------
# additive statistics
# ----------------------------------------------------------------------
def collinear_energy(ctx: FieldCtx, A, B) -> int:
    """``#{(y, x0, x1) in B x A x A : (1 - y) x0 + y x1 in A, y != 0, 1}``."""
    A = np.unique(np.asarray(A, dtype=np.int64))
    B = np.unique(np.asarray(B, dtype=np.int64))
    if len(A) ** 2 * len(B) > COLLINEAR_CAP:
        raise ValueError(f"|A|^2 |B| exceeds the cap {COLLINEAR_CAP}")
    member = np.zeros(ctx.q, dtype=bool)
    member[A] = True
    total = 0
    for y in B.tolist():
        if y in (0, 1):
            continue
        vals = ctx.add(ctx.mul(ctx.sub(1, y), A)[:, None], ctx.mul(y, A)[None, :])
        total += int(np.count_nonzero(member[vals]))
    return total


def growth_stats(ctx: FieldCtx, A) -> dict:
    """Sizes of ``A+A``, ``A-A``, ``A.A`` and their ratios to ``|A|``."""
    A = np.unique(np.asarray(A, dtype=np.int64))
    n = len(A)
    if n == 0:
        return {"size": 0, "sum": 0, "difference": 0, "product": 0, "sum_ratio": 0.0, "difference_ratio": 0.0, "product_ratio": 0.0}
    s = len(np.unique(ctx.add(A[:, None], A[None, :])))
    d = len(np.unique(ctx.sub(A[:, None], A[None, :])))
    m = len(np.unique(ctx.mul(A[:, None], A[None, :])))
    return {
        "size": n,
        "sum": s,
        "difference": d,
        "product": m,
        "sum_ratio": s / n,
        "difference_ratio": d / n,
        "product_ratio": m / n,
    }


def bsg_refine(ctx: FieldCtx, A, B, G, K: float, c: float = 1.0, C: float = 4.0, max_anchors: int | None = None) -> dict:
    """Constructive Balog-Szemeredi-Gowers refinement.

    ``G`` is a list of pairs ``(a, b)`` with ``a in A``, ``b in B``. Edges with
    unpopular sums are dropped first; then, for each anchor ``a0``, ``B'`` is
    the neighbourhood of ``a0``, ``A'`` the vertices with at least
    ``|B'| / 2K`` neighbours in ``B'``, and ``B'`` is thinned to vertices
    reached by at least half the average number of length-3 paths from ``A'``.
    The anchor with the largest ``min(|A'|, |B'|)`` (ties: smallest
    ``|A' - B'|``) wins.
    """
    A = np.unique(np.asarray(A, dtype=np.int64))
    B = np.unique(np.asarray(B, dtype=np.int64))
    G = np.asarray(G, dtype=np.int64).reshape(-1, 2)
    if len(A) != len(B):
        raise ValueError("bsg_refine needs |A| == |B|")
    if len(G) and (not np.all(np.isin(G[:, 0], A)) or not np.all(np.isin(G[:, 1], B))):
        raise ValueError("G must be a subset of A x B")
    G = np.unique(G, axis=0) if len(G) else G
    n = len(A)
    if len(G) * K < n * n:
        raise ValueError("bsg_refine needs |G| >= |A||B| / K")
    sums = ctx.add(G[:, 0], G[:, 1])
    restricted = len(np.unique(sums))
    vals, inv, cnt = np.unique(sums, return_inverse=True, return_counts=True)
    popular = cnt[inv] * 2 * K * n >= len(G)
    G1 = G[popular] if np.any(popular) else G
    ai = np.searchsorted(A, G1[:, 0])
    bi = np.searchsorted(B, G1[:, 1])
    M = np.zeros((n, n), dtype=np.int64)
    M[ai, bi] = 1
    paths3 = M @ M.T @ M
    anchors = np.nonzero(M.sum(axis=1))[0]
    if max_anchors is not None:
        anchors = anchors[np.argsort(-M.sum(axis=1)[anchors], kind="stable")][:max_anchors]
    best = None
    for a0 in anchors.tolist():
        Bp = np.nonzero(M[a0])[0]
        common = M[:, Bp].sum(axis=1)
        Ap = np.nonzero(common * 2 * K >= len(Bp))[0]
        score = paths3[np.ix_(Ap, Bp)].sum(axis=0)
        Bp = Bp[score * 2 >= score.mean()] if len(score) else Bp
        diff = len(np.unique(ctx.sub(A[Ap][:, None], B[Bp][None, :]))) if len(Ap) and len(Bp) else 0
        key = (min(len(Ap), len(Bp)), -diff)
        if best is None or key > best[0]:
            best = (key, Ap, Bp, diff)
    _, Ap, Bp, diff = best
    floor = c * K ** (-c) * n
    return {
        "A_prime": A[Ap].tolist(),
        "B_prime": B[Bp].tolist(),
        "difference_size": diff,
        "restricted_sumset": restricted,
        "popular_edges": int(len(G1)),
        "size_floor": floor,
        "meets_floor": len(Ap) >= floor and len(Bp) >= floor,
        "ratio_to_KC": diff / (K**C * n),
        "constants": {"c": c, "C": C},
    }


# ----------------------------------------------------------------------
# subfield detection
# ----------------------------------------------------------------------
@dataclass
class SubfieldWitness:
    """``A subset of (x * G + tau) cup X``."""

    G: Subfield
    x: int
    tau: int
    X: np.ndarray
    coverage: float

    def to_json(self) -> dict:
        return {
            "G_order": self.G.order,
            "G_degree": self.G.degree,
            "x": self.x,
            "tau": self.tau,
            "X": self.X.tolist(),
            "coverage": self.coverage,
        }


def _in_coset(ctx: FieldCtx, A: np.ndarray, G: Subfield, x: int, tau: int) -> np.ndarray:
    y = ctx.mul(ctx.sub(A, tau), ctx.inv(x))
    return np.asarray(ctx.pow(y, G.order)) == np.asarray(y)


def subfield_detect(
    ctx: FieldCtx,
    A,
    size_cap: float = 4.0,
    n_scales: int = 20,
    n_anchors: int = 20,
    min_coverage: float = 0.5,
) -> SubfieldWitness | None:
    """Best affine subfield copy ``x * G + tau`` containing most of ``A``.

    Subfields with ``|G| > size_cap * |A|`` are not considered. Scales ``x``
    are the ``n_scales`` most popular nonzero differences of ``A`` (a coset
    ``x G + tau`` has ``x G`` as its difference set); offsets ``tau`` range over
    the ``n_anchors`` elements of ``A`` taking part in the most popular
    differences. Returns ``None`` when no candidate covers ``min_coverage``.
    """
    A = np.unique(np.asarray(A, dtype=np.int64))
    n = len(A)
    if n == 0:
        return None
    subs = [G for G in ctx.subfields() if G.order <= size_cap * n]
    if not subs:
        return None
    if n == 1:
        return SubfieldWitness(subs[0], 1, int(A[0]), np.zeros(0, dtype=np.int64), 1.0)
    D = np.asarray(ctx.sub(A[:, None], A[None, :]))
    vals, counts = np.unique(D[D != 0], return_counts=True)
    order = np.lexsort((vals, -counts))
    scales = vals[order][:n_scales]
    popular = np.isin(D, scales)
    score = popular.sum(axis=1)
    anchors = A[np.lexsort((A, -score))][:n_anchors]
    best = None
    for G in subs:
        for x in scales.tolist():
            for tau in anchors.tolist():
                inside = _in_coset(ctx, A, G, x, tau)
                key = (int(np.count_nonzero(~inside)), G.order)
                if best is None or key < best[0]:
                    best = (key, G, x, tau, A[~inside])
    (_, _), G, x, tau, X = best
    coverage = 1.0 - len(X) / n
    if coverage < min_coverage:
        return None
    return SubfieldWitness(G, int(x), int(tau), X, coverage)


# ----------------------------------------------------------------------
# pipeline
# ----------------------------------------------------------------------
def incidence_structure_pipeline(
    cfg: PointLineConfig,
    K: float,
    budget: int = 10**7,
    seed: int = 0,
    size_cap: float = 4.0,
) -> dict:
    """extract_grid -> collinear_energy -> subfield_detect on both grid axes.

    Returns ``{"status": "hypothesis-failed", ...}`` when
    ``I(P, L) < K^-1 N^(3/2)``.
    """
    ctx = cfg.ctx
    met, I, N = _incidence_hypothesis(cfg, K)
    report = {
        "field": ctx.describe(),
        "K": K,
        "N": N,
        "incidences": I,
        "threshold": N**1.5 / K if N else 0.0,
    }
    if not met:
        report["status"] = "hypothesis-failed"
        return report
    grid = extract_grid(cfg, K, budget=budget, seed=seed)
    report["grid"] = grid.to_json()
    if grid.T is None:
        report["status"] = "degenerate"
        return report
    A, B = grid.A, grid.B
    energy_ab = collinear_energy(ctx, A, B)
    energy_ba = collinear_energy(ctx, B, A)
    wa = subfield_detect(ctx, A, size_cap=size_cap)
    wb = subfield_detect(ctx, B, size_cap=size_cap)
    root = math.sqrt(N)
    report.update(
        {
            "status": "ok",
            "collinear_energy_AB": energy_ab,
            "collinear_energy_BA": energy_ba,
            "collinear_energy_over_N32": energy_ab / N**1.5,
            "growth_A": growth_stats(ctx, A),
            "growth_B": growth_stats(ctx, B),
            "subfield_A": None if wa is None else wa.to_json(),
            "subfield_B": None if wb is None else wb.to_json(),
            "G_over_sqrtN": [None if w is None else w.G.order / root for w in (wa, wb)],
            "P_coverage": grid.measured.get("coverage_of_P", 0.0),
        }
    )
    return report
