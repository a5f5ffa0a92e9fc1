import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from ffrestrict.ffield import FieldCtx, FieldError, get_field, is_prime, parse_field

SMALL = [(3, 1), (5, 1), (7, 1), (3, 2), (5, 2), (3, 3), (3, 4), (7, 2)]


def test_prime_field_arithmetic():
    F = get_field(7)
    assert F.mul(3, 5) == 1
    assert F.inv(3) == 5
    assert F.sub(2, 5) == 4
    assert F.neg(1) == 6


def test_gf9_with_explicit_modulus():
    F = FieldCtx(3, 2, (1, 0, 1))  # x^2 + 1
    x = F.element([0, 1])
    assert F.mul(x, x) == 2  # x^2 = -1
    assert F.trace(x) == 0
    assert F.minus_one_is_square()


def test_character_sums_vanish():
    for p, k in SMALL:
        F = get_field(p, k)
        assert abs(F.char_table.sum()) < 1e-9
        assert abs(F.character(0) - 1) < 1e-12


def test_minus_one_square_examples():
    assert not get_field(7).minus_one_is_square()
    assert get_field(5).minus_one_is_square()
    F = get_field(5)
    i = F.sqrt_minus_one()
    assert F.mul(i, i) == F.neg(1)
    with pytest.raises(FieldError):
        get_field(7).sqrt_minus_one()


def test_subfields_of_gf81():
    F = get_field(3, 4)
    orders = sorted(G.order for G in F.subfields())
    assert orders == [3, 9, 81]
    G3 = [G for G in F.subfields() if G.order == 3][0]
    assert sorted(G3.elements.tolist()) == [0, 1, 2]


def test_gf9_prime_subfield():
    F = get_field(3, 2)
    G = [G for G in F.subfields() if G.order == 3][0]
    assert set(G.elements.tolist()) == {0, 1, 2}


def test_invert_zero_raises():
    with pytest.raises(ZeroDivisionError):
        get_field(5).inv(0)


def test_invalid_fields():
    with pytest.raises(FieldError, match="p not prime"):
        parse_field("4^1")
    with pytest.raises(FieldError):
        FieldCtx(2)
    with pytest.raises(FieldError):
        FieldCtx(3, 2, (2, 0, 1))  # x^2 + 2 = (x-1)(x+1)
    with pytest.raises(FieldError):
        FieldCtx(3, 11)


def test_parse_roundtrip():
    F = parse_field("3^4")
    assert parse_field(F.describe()) == F
    assert parse_field("7") == get_field(7)


@pytest.mark.parametrize("p,k", SMALL)
def test_field_axioms_exhaustive(p, k):
    F = get_field(p, k)
    e = F.elements
    a, b = np.meshgrid(e, e, indexing="ij")
    M, A = F.mul_table, F.add_table
    # commutativity
    assert np.array_equal(M, M.T) and np.array_equal(A, A.T)
    # identities and inverses
    assert np.array_equal(M[1], e) and np.array_equal(A[0], e)
    assert np.all(A[e, F.neg(e)] == 0)
    nz = e[1:]
    assert np.all(M[nz, F.inv(nz)] == 1)
    # table agrees with the polynomial oracle on a sample
    for x, y in itertools.islice(itertools.product(e.tolist(), repeat=2), 0, None, max(1, F.q**2 // 400)):
        assert F.mul(x, y) == F.mul_slow(x, y)
    # distributivity and associativity
    c = e[:, None, None]
    assert np.array_equal(M[c, A[a, b][None]], A[M[c, a[None]], M[c, b[None]]])


@pytest.mark.parametrize("p,k", SMALL)
def test_multiplicative_associativity(p, k):
    F = get_field(p, k)
    rng = np.random.default_rng(p * 10 + k)
    x, y, z = rng.integers(F.q, size=(3, 500))
    assert np.array_equal(F.mul(F.mul(x, y), z), F.mul(x, F.mul(y, z)))


def test_minus_one_square_iff_q_1_mod_4():
    for p in range(3, 1000):
        if not is_prime(p):
            continue
        for k in range(1, 11):
            if p**k > 1000:
                break
            F = get_field(p, k)
            assert F.minus_one_is_square() == (F.q % 4 == 1), F.describe()


@pytest.mark.parametrize("p,k", SMALL)
def test_subfields_closed(p, k):
    F = get_field(p, k)
    for G in F.subfields():
        g = G.elements
        assert len(g) == G.order
        a, b = np.meshgrid(g, g)
        assert set(F.add(a, b).ravel().tolist()) <= set(g.tolist())
        assert set(F.mul(a, b).ravel().tolist()) <= set(g.tolist())


def test_is_square_matches_enumeration():
    for p, k in SMALL:
        F = get_field(p, k)
        sq = set(F.squares().tolist())
        assert {int(a) for a in F.elements if F.is_square(int(a))} == sq
        assert len(sq) == (F.q + 1) // 2


@given(st.sampled_from(SMALL), st.data())
def test_character_is_additive(pk, data):
    F = get_field(*pk)
    a = data.draw(st.integers(0, F.q - 1))
    b = data.draw(st.integers(0, F.q - 1))
    assert abs(F.character(F.add(a, b)) - F.character(a) * F.character(b)) < 1e-12


@given(st.sampled_from(SMALL), st.data())
def test_character_twist_invariance(pk, data):
    # sum_x e(a x) over F equals q when a = 0 and 0 otherwise
    F = get_field(*pk)
    a = data.draw(st.integers(0, F.q - 1))
    s = F.char_matrix[a].sum()
    assert abs(s - (F.q if a == 0 else 0)) < 1e-9


@given(st.sampled_from(SMALL), st.data())
def test_trace_is_linear_and_frobenius_invariant(pk, data):
    F = get_field(*pk)
    a = data.draw(st.integers(0, F.q - 1))
    b = data.draw(st.integers(0, F.q - 1))
    assert F.trace(F.add(a, b)) == (F.trace(a) + F.trace(b)) % F.p
    assert F.trace(F.pow(a, F.p)) == F.trace(a)
