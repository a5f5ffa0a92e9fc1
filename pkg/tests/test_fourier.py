import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffrestrict.ffield import get_field
from ffrestrict.fourier import (
    GridFn,
    fourier_transform,
    grid_coords,
    grid_index,
    inner,
    lp_norm,
    plancherel_check,
    reflect,
    translate,
)


def _random(ctx, n, seed):
    rng = np.random.default_rng(seed)
    return GridFn(ctx, n, rng.normal(size=ctx.q**n) + 1j * rng.normal(size=ctx.q**n))


def test_delta_transforms_to_one():
    F = get_field(5)
    fh = fourier_transform(GridFn.delta(F, 2))
    assert fh.measure == "normalized"
    assert np.allclose(fh.values, 1)


def test_constant_transforms_to_delta():
    F = get_field(3, 2)
    fh = fourier_transform(GridFn(F, 2, np.ones(F.q**2)))
    expect = np.zeros(F.q**2)
    expect[0] = F.q**2
    assert np.allclose(fh.values, expect, atol=1e-9)


def test_double_transform_with_reflection():
    F = get_field(5)
    f = _random(F, 2, 1)
    twice = fourier_transform(GridFn(F, 2, fourier_transform(f).values))
    assert np.allclose(reflect(twice).values, F.q**2 * f.values, atol=1e-9)


def test_norm_examples():
    F = get_field(3)
    assert lp_norm(GridFn.delta(F, 3), 3) == 1.0
    one = GridFn(F, 3, np.ones(27))
    assert math.isclose(lp_norm(one, 2), 27**0.5)
    assert math.isclose(lp_norm(one.with_values(one.values, "normalized"), 2), 1.0)
    assert lp_norm(one, math.inf) == 1.0


def test_plancherel_examples():
    F = get_field(7)
    assert plancherel_check(GridFn.delta(F, 1)) == (1.0, 1.0, 0.0)
    lhs, rhs, rel = plancherel_check(GridFn(F, 1, np.ones(7)))
    assert math.isclose(lhs, 7**0.5) and math.isclose(rhs, 7**0.5) and rel < 1e-12


def test_plancherel_random_gf5_cube():
    F = get_field(5)
    for seed in range(100):
        assert plancherel_check(_random(F, 3, seed))[2] < 1e-9


@pytest.mark.parametrize("pk,n", [((3, 1), 3), ((5, 1), 2), ((3, 2), 2), ((7, 1), 1), ((5, 1), 3)])
def test_fast_matches_direct(pk, n):
    F = get_field(*pk)
    f = _random(F, n, 3)
    fast = fourier_transform(f).values
    direct = fourier_transform(f, method="direct").values
    assert np.max(np.abs(fast - direct)) < 1e-12 * max(1.0, np.abs(direct).max())


def test_translation_modulation_exhaustive_gf3_square():
    F = get_field(3)
    f = _random(F, 2, 4)
    fh = fourier_transform(f).values
    xi = grid_coords(F, 2)
    for a in grid_coords(F, 2):
        lhs = fourier_transform(translate(f, a)).values
        phase = F.char_table[F.neg(F.dot(xi, np.broadcast_to(a, xi.shape)))]
        assert np.allclose(lhs, phase * fh, atol=1e-12)


def test_indexing_convention():
    F = get_field(5)
    assert grid_index(F, (2, 3, 1)) == 2 + 3 * 5 + 1 * 25
    assert np.array_equal(grid_coords(F, 3)[grid_index(F, (2, 3, 1))], [2, 3, 1])
    arr = np.zeros((5, 5))
    arr[2, 3] = 1
    assert GridFn.from_array(F, arr).values[grid_index(F, (2, 3))] == 1


def test_json_roundtrip():
    F = get_field(3, 2)
    f = _random(F, 1, 5)
    assert GridFn.from_json(f.to_json()) == f
    g = f.with_values(f.values, "normalized")
    assert g != f


def test_measure_validation():
    F = get_field(3)
    with pytest.raises(ValueError):
        GridFn(F, 2, np.ones(8))
    with pytest.raises(ValueError):
        fourier_transform(GridFn(F, 1, np.ones(3), "normalized"))


def test_exact_integer_norm_path():
    F = get_field(7)
    rng = np.random.default_rng(0)
    f = GridFn(F, 3, rng.choice([-1.0, 0.0, 1.0], size=343))
    n = np.count_nonzero(f.values)
    assert lp_norm(f, 4) == n**0.25


@given(st.integers(0, 10**6))
def test_linearity(seed):
    F = get_field(5)
    f, g = _random(F, 2, seed), _random(F, 2, seed + 1)
    c = 2.0 - 0.5j
    lhs = fourier_transform(f.with_values(f.values + c * g.values)).values
    rhs = fourier_transform(f).values + c * fourier_transform(g).values
    assert np.allclose(lhs, rhs, atol=1e-9)


@given(st.integers(0, 10**6))
def test_parseval_pairing(seed):
    F = get_field(3, 2)
    f, g = _random(F, 2, seed), _random(F, 2, seed + 7)
    lhs = inner(f, g)
    rhs = inner(fourier_transform(f), fourier_transform(g))
    assert abs(lhs - rhs) < 1e-9 * max(1.0, abs(lhs))


@given(st.integers(0, 10**6), st.floats(1, 6), st.floats(1, 6))
def test_norm_monotone_in_p(seed, p1, p2):
    F = get_field(5)
    rng = np.random.default_rng(seed)
    f = GridFn(F, 2, rng.random(25) * (rng.random(25) < 0.5))
    lo, hi = sorted((p1, p2))
    assert lp_norm(f, hi) <= lp_norm(f, lo) * (1 + 1e-12) + 1e-15
