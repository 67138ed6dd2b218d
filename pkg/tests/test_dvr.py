"""Tests for the ramified-ring arithmetic layer."""

import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from p2models.dvr import (
    IndeterminateAtPrecision,
    RingElement,
    cyclotomic_eisenstein,
    enumerate_quotient,
    eq_mod,
    eta,
    make_custom_ring,
    make_ring,
    ring_element_from_json,
)
from p2models.errors import EisensteinError, PrecisionError, ValuationError


@pytest.fixture(scope="module")
def R3():
    return make_ring(3, 8)


@pytest.fixture(scope="module")
def R5():
    return make_ring(5, 6)


def rand_element(ring, rng, unit=None):
    digits = [rng.randrange(ring.pM) for _ in range(ring.e)]
    if unit is True:
        digits[0] = digits[0] - digits[0] % ring.p + 1 + rng.randrange(ring.p - 1)
    if unit is False:
        digits[0] -= digits[0] % ring.p
    return ring.from_digits(digits)


def test_make_ring_p3(R3):
    assert R3.e == 6
    assert R3.from_int(3).valuation() == 6
    assert R3.lam1.valuation() == 3


def test_make_ring_p5(R5):
    assert R5.e == 20
    assert R5.lam1.valuation() == 5
    assert R5.from_int(5).valuation() == 20


def test_cyclotomic_polynomial_is_eisenstein():
    # expand Phi_9(1+x) by hand and check the divisibility pattern
    coeffs = cyclotomic_eisenstein(3)
    assert coeffs == [3, 9, 18, 21, 15, 6]
    assert all(c % 3 == 0 for c in coeffs)
    assert coeffs[0] % 9 != 0


def test_non_eisenstein_rejected():
    with pytest.raises(EisensteinError):
        make_custom_ring(3, 6, [9, 3])  # constant term valuation 2
    with pytest.raises(EisensteinError):
        make_custom_ring(3, 6, [3, 1])  # middle coefficient a unit


def test_bad_p_rejected():
    for p in (2, 4, 9, 1):
        with pytest.raises(ValueError):
            make_ring(p, 6)


def test_relation_forces_reduction(R3):
    # pi * pi^(e-1) reduces through E(pi) and keeps valuation e
    x = R3.pi() * R3.pi(R3.e - 1)
    assert x.valuation() == R3.e


def test_additive_inverse(R3):
    rng = random.Random(1)
    for _ in range(20):
        x = rand_element(R3, rng)
        assert (x + (-x)).is_zero()


def test_zeta_relations(R3):
    # zeta_1 = zeta_2^p and lam1 = zeta_1 - 1
    assert (R3.zeta1 - R3.zeta2 ** 3).is_zero()
    assert (R3.lam1 - (R3.zeta1 - R3.one())).is_zero()
    # zeta_{p^2} is a root of E, i.e. a primitive p^2-th root of unity
    assert (R3.zeta2 ** 9 - R3.one()).is_zero()
    assert not (R3.zeta2 ** 3 - R3.one()).is_zero()


def test_valuation_of_zero_indeterminate(R3):
    z = R3.zero(prec=7)
    v = z.valuation()
    assert v == IndeterminateAtPrecision(7)


def test_divide_exact_unit_case(R3):
    # p / lam1^(p-1) is a unit: 6 - 2*3 = 0
    q = R3.from_int(3).divide_exact(R3.lam1 ** 2)
    assert q.valuation() == 0
    # multiply back
    back = q * R3.lam1 ** 2
    eq, _ = eq_mod(back, R3.from_int(3), q.prec)
    assert eq


def test_divide_exact_identity(R3):
    rng = random.Random(2)
    x = rand_element(R3, rng)
    assert x.divide_exact(R3.one()) == x


def test_divide_exact_valuation_error(R3):
    with pytest.raises(ValuationError):
        R3.pi().divide_exact(R3.pi(2))


def test_invert_unit(R3):
    one = R3.one()
    assert one.invert_unit() == one
    # inverse of zeta agrees with zeta^(p^2-1)
    z = R3.zeta2
    assert (z.invert_unit() - z ** 8).is_zero()
    with pytest.raises(ValuationError):
        R3.pi().invert_unit()


def test_eta_p3(R3):
    e = eta(R3)
    # closed form at p=3: lam2 - lam2^2 * inv(2)
    inv2 = R3.from_int(2).invert_unit()
    expect = R3.lam2 - R3.lam2 ** 2 * inv2
    assert (e - expect).is_zero()
    assert e.valuation() == 1


@pytest.mark.parametrize("p,M", [(3, 8), (5, 6)])
def test_eta_congruence(p, M):
    # p*eta - lam1 = (p/lam1^(p-1)) eta^p modulo lam1^p
    R = make_ring(p, M)
    et = eta(R)
    lhs = et.scale(p) - R.lam1
    rhs = R.from_int(p).divide_exact(R.lam1 ** (p - 1)) * et ** p
    eq, _ = eq_mod(lhs, rhs, p * p)
    assert eq


def test_reduce_mod_and_enumerate(R3):
    assert len(list(enumerate_quotient(R3, 3))) == 27
    assert R3.lam1.reduce_mod(3).is_zero()
    ones = sorted(q.digits for q in enumerate_quotient(R3, 1))
    assert ones == [(0,), (1,), (2,)]


def test_reduce_mod_precision_guard(R3):
    x = R3.pi().with_prec(2)
    with pytest.raises(PrecisionError):
        x.reduce_mod(3)


def test_quot_element_roundtrip(R3):
    rng = random.Random(3)
    for _ in range(10):
        x = rand_element(R3, rng)
        q = x.reduce_mod(4)
        diff = x - q.lift()
        v = diff.valuation()
        assert isinstance(v, IndeterminateAtPrecision) or v >= 4


def test_json_roundtrip(R3):
    rng = random.Random(4)
    x = rand_element(R3, rng)
    assert ring_element_from_json(R3, x.to_json()) == x


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_ring_axioms(data):
    R = make_ring(3, 6)
    digs = st.lists(st.integers(0, R.pM - 1), min_size=R.e, max_size=R.e)
    x = R.from_digits(data.draw(digs))
    y = R.from_digits(data.draw(digs))
    z = R.from_digits(data.draw(digs))
    assert ((x + y) + z == x + (y + z))
    assert (x * y == y * x)
    assert ((x * y) * z == x * (y * z))
    assert (x * (y + z) == x * y + x * z)


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_valuation_laws(data):
    R = make_ring(3, 6)
    digs = st.lists(st.integers(0, R.pM - 1), min_size=R.e, max_size=R.e)
    x = R.from_digits(data.draw(digs))
    y = R.from_digits(data.draw(digs))
    vx, vy = x.valuation(), y.valuation()
    vxy = (x * y).valuation()
    if not any(isinstance(v, IndeterminateAtPrecision) for v in (vx, vy, vxy)):
        assert vxy == vx + vy
    vsum = (x + y).valuation()
    if not any(isinstance(v, IndeterminateAtPrecision) for v in (vx, vy, vsum)):
        assert vsum >= min(vx, vy)


def test_divide_roundtrip_random(R3):
    rng = random.Random(5)
    for _ in range(30):
        x = rand_element(R3, rng)
        y = rand_element(R3, rng, unit=bool(rng.randrange(2)))
        if isinstance(y.valuation(), IndeterminateAtPrecision):
            continue
        z = (x * y).divide_exact(y)
        eq, _ = eq_mod(z, x, z.prec)
        assert eq


def test_valuation_formula_vs_repeated_division(R3):
    rng = random.Random(6)
    for _ in range(100):
        x = rand_element(R3, rng)
        v = x.valuation()
        if isinstance(v, IndeterminateAtPrecision):
            continue
        # divide by pi exactly v times, landing on a unit
        cur = x
        for _ in range(v):
            cur = cur.divide_exact(R3.pi())
        assert cur.valuation() == 0
