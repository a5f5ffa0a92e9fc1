import itertools
import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffrestrict.ffield import get_field
from ffrestrict.fourier import lp_norm
from ffrestrict.generators import random_points
from ffrestrict.incidence import (
    PointLineConfig,
    additive_quadruples,
    count_incidences,
    energy_chain,
    galilean_reduction_check,
    incidence_from_energy,
    l4_identity_check,
    line_from_dot_form,
    line_from_x_chart,
    line_from_y_chart,
    line_map,
    line_map_injectivity,
    normalize_line,
    points_on_line,
    trivial_bound,
)
from ffrestrict.paraboloid import ParaboloidCtx, SurfaceFn, extension, galilean_ranks

F3, F5, F7, F11 = (get_field(p) for p in (3, 5, 7, 11))
P3, P5, P7 = (ParaboloidCtx(F) for F in (F3, F5, F7))


def _all_lines(F):
    q = F.q
    return [line_from_y_chart(F, m, c) for m in range(q) for c in range(q)] + [(1, 0, c) for c in range(q)]


def _full_config(F):
    pts = [(a, b) for a in range(F.q) for b in range(F.q)]
    return PointLineConfig(F, pts, _all_lines(F))


def _random_E(pctx, rng, lo=1, hi=None):
    hi = hi or pctx.size
    n = int(rng.integers(lo, hi + 1))
    return rng.choice(pctx.size, size=n, replace=False)


def _naive_quadruples(pctx, E):
    F = pctx.ctx
    pts = [tuple(pctx.points[r]) for r in E]
    count = 0
    for a, b, c in itertools.product(pts, repeat=3):
        d = tuple(int(v) for v in F.sub(F.add(a, b), c))
        count += d in set(pts)
    return count


# ----------------------------------------------------------------------
# lines
# ----------------------------------------------------------------------
def test_normalize_line():
    assert normalize_line(F7, (2, 4, 6)) == (1, 2, 3)
    assert normalize_line(F7, (0, 3, 6)) == (0, 1, 2)
    with pytest.raises(ValueError):
        normalize_line(F7, (0, 0, 1))


def test_chart_forms_agree_with_points():
    for m, c in [(0, 0), (3, 2), (6, 5)]:
        line = line_from_y_chart(F7, m, c)
        pts = points_on_line(F7, line)
        assert len(pts) == 7
        assert all(y == (m * x + c) % 7 for x, y in pts.tolist())
    line = line_from_x_chart(F7, 2, 3)  # x = 2y + 3
    assert all(x == (2 * y + 3) % 7 for x, y in points_on_line(F7, line).tolist())
    assert line_from_dot_form(F7, (2, 4), 3) == normalize_line(F7, (2, 4, 3))


def test_line_map_examples():
    assert line_map(F7, (1, 2)) == (1, 2, 5)
    assert line_map_injectivity(F7) == (True, None)
    ok, (y, y2) = line_map_injectivity(F5)
    assert not ok and y != y2 and line_map(F5, y) == line_map(F5, y2)
    assert line_map(F5, (1, 2)) == line_map(F5, (2, 4)) == (1, 2, 0)
    with pytest.raises(ValueError):
        line_map(F7, (0, 0))


# ----------------------------------------------------------------------
# counting
# ----------------------------------------------------------------------
def test_count_examples():
    full = _full_config(F3)
    assert full.n_lines == 12 and count_incidences(full) == 36
    assert count_incidences(full, method="naive") == 36
    assert count_incidences(PointLineConfig(F7, [(0, 0)], [(1, 0, 0)])) == 1
    assert count_incidences(PointLineConfig(F7, [(0, 0), (1, 1)])) == 0


def test_config_normalizes_and_dedups():
    cfg = PointLineConfig(F7, [(1, 2), (1, 2), (0, 0)], [(2, 4, 6), (1, 2, 3)])
    assert cfg.n_points == 2 and cfg.n_lines == 1
    assert PointLineConfig.from_json(cfg.to_json()).to_json() == cfg.to_json()


def test_trivial_bound_examples():
    tb = trivial_bound(_full_config(F3))
    assert tb.count == 36 and tb.holds
    assert math.isclose(tb.bound, min(3 * 12 + 9, 9 * math.sqrt(12) + 12))
    single = trivial_bound(PointLineConfig(F7, [(0, 0)], [(1, 0, 0)]))
    assert single.bound >= 1 and single.holds


def test_trivial_bound_random_gf11():
    for seed in range(200):
        n = int(np.random.default_rng(seed).integers(0, 61))
        cfg = PointLineConfig.from_json(random_points(F11, n, seed=seed)["config"])
        assert trivial_bound(cfg).holds


@given(st.integers(0, 10**6), st.integers(0, 40), st.integers(0, 40))
def test_hash_and_naive_counts_agree(seed, n_pts, n_lines):
    cfg = PointLineConfig.from_json(random_points(F7, n_pts, n_lines, seed=seed)["config"])
    assert count_incidences(cfg) == count_incidences(cfg, method="naive")
    assert int(cfg.line_counts.sum()) == count_incidences(cfg) == int(cfg.point_degrees.sum())


# ----------------------------------------------------------------------
# quadruples and the L^4 identity
# ----------------------------------------------------------------------
def test_quadruple_examples():
    assert additive_quadruples(P7, [5]) == 1
    full = np.arange(P3.size)
    assert additive_quadruples(P3, full) == additive_quadruples(P3, full, method="cubic") == _naive_quadruples(P3, full)
    with pytest.raises(ValueError):
        additive_quadruples(P3, [99])


def test_l4_identity_random_gf7():
    rng = np.random.default_rng(0)
    for _ in range(50):
        E = _random_E(P7, rng)
        analytic, direct, rel = l4_identity_check(P7, E)
        assert rel < 1e-9


@given(st.integers(0, 10**6))
def test_quadruples_at_least_diagonal(seed):
    rng = np.random.default_rng(seed)
    E = _random_E(P5, rng, 1, 12)
    lam = additive_quadruples(P5, E)
    assert lam == _naive_quadruples(P5, E)
    n = len(E)
    assert lam >= n * n
    # (c, d) = (a, b) and (c, d) = (b, a) always solve a + b = c + d
    assert lam >= 2 * n * n - n


@given(st.integers(0, 10**6))
def test_energy_galilean_invariant(seed):
    rng = np.random.default_rng(seed)
    E = _random_E(P5, rng, 1, 15)
    nu = rng.integers(5, size=2)
    assert additive_quadruples(P5, E) == additive_quadruples(P5, galilean_ranks(P5, nu, E))


def test_l4_dual_path_against_extension():
    # the L^4 norm of an indicator extension, by summation and by quadruple count
    rng = np.random.default_rng(3)
    for _ in range(10):
        E = _random_E(P5, rng)
        direct = lp_norm(extension(SurfaceFn.indicator(P5, E)), 4) ** 4
        assert math.isclose(direct, 5**3 * additive_quadruples(P5, E) / 5**8, rel_tol=1e-9)


# ----------------------------------------------------------------------
# Galilean claim and the reduction
# ----------------------------------------------------------------------
def _naive_claim(pctx, E, b):
    F = pctx.ctx
    pts = [tuple(pctx.points[r]) for r in E]
    lhs = sum(bool(pctx.contains(F.add(F.sub(a, d), b))) for a in pts for d in pts)
    nu = np.asarray(b[:2])
    Ep = [tuple(pctx.points[r]) for r in galilean_ranks(pctx, F.neg(nu), E)]
    rhs = sum(bool(pctx.contains(F.sub(a, d))) for a in Ep for d in Ep)
    return lhs, rhs


def test_galilean_claim_examples():
    b = P7.points[10]
    lhs, rhs, eq = galilean_reduction_check(P7, [10], b)
    assert eq and lhs == rhs
    full = np.arange(P3.size)
    for r in range(P3.size):
        assert galilean_reduction_check(P3, full, P3.points[r])[2]
    with pytest.raises(ValueError):
        galilean_reduction_check(P7, [1], (1, 0, 0))


def test_galilean_claim_random_gf7():
    rng = np.random.default_rng(1)
    for _ in range(50):
        E = _random_E(P7, rng, 1, 20)
        b = P7.points[rng.integers(P7.size)]
        lhs, rhs, eq = galilean_reduction_check(P7, E, b)
        assert eq
        assert (lhs, rhs) == _naive_claim(P7, E, b)


def test_incidence_from_energy_examples():
    red = incidence_from_energy(P7, [10], P7.points[10])
    assert len(red.X) == 0 and red.incidences == 0
    with pytest.raises(ValueError, match="square"):
        incidence_from_energy(P5, [1, 2], P5.points[1])


def test_reduction_counts_equal_random_gf7():
    rng = np.random.default_rng(2)
    for _ in range(50):
        E = _random_E(P7, rng, 1, 25)
        chain = energy_chain(P7, E)
        assert chain["counts_equal"]
        assert chain["lambda_le_inner"] and chain["inner_le_incidence_form"] and chain["chain_holds"]
        assert chain["gap"] >= 0


def test_full_paraboloid_chain_gf7():
    chain = energy_chain(P7, np.arange(P7.size))
    assert chain["chain_holds"] and chain["l4_bound_holds"]
    assert chain["l4_fourth_power"] <= chain["l4_fourth_power_bound"]
