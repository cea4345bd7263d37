from fractions import Fraction as F

import gmpy2
import pytest
import sympy as sp
from hypothesis import given, settings
from hypothesis import strategies as st

from tfham.basis_series import BasisParams, NumericMode
from tfham.errors import DegeneracyError, DomainError
from tfham.ham_engine import HamConfig, run
from tfham.series_accel import (
    DIRECT,
    EPSILON,
    diagonal,
    error_percent,
    pade_at_one,
    pade_coefficients,
    partial_sums,
    wynn_epsilon,
)

REF_SLOPE = -1.588071022611375


@pytest.fixture(scope="module")
def slope_tail_20():
    seq = run(HamConfig(BasisParams(F(3, 4), 1, 1), F(-3, 4), 20, NumericMode.approx(256)))
    return list(seq.slope_per_order)


# pade_at_one ----------------------------------------------------------------

def test_m0_returns_first_coefficient():
    assert pade_at_one([F(-4, 3), 5, 7], 0).value == F(-4, 3)
    assert pade_at_one([F(-4, 3)], 0, method=EPSILON).value == F(-4, 3)


def test_geometric_tail_exact():
    tail = [F(1, 2**k) for k in range(3)]
    for method in (DIRECT, EPSILON):
        assert pade_at_one(tail, 1, method=method).value == 2


def test_rational_function_reproduced_exactly():
    # (1 + 2p) / (1 - p/3) has [1/1] equal to itself
    p = sp.Symbol("p")
    ser = sp.series((1 + 2 * p) / (1 - p / 3), p, 0, 7).removeO()
    tail = [F(str(ser.coeff(p, k))) for k in range(7)]
    expected = F(3) / F(2, 3)
    res = pade_at_one(tail, 1, cross_check=True)
    assert res.value == expected
    assert res.cross_check == expected
    for m in (2, 3):
        # higher diagonal systems are singular; the epsilon table still converges
        with pytest.raises(DegeneracyError):
            pade_at_one(tail, m, method=DIRECT)
        assert pade_at_one(tail, m, method=EPSILON).value == expected


def test_non_normal_table_not_misreported():
    # p^2 - p^4: [2/2] = p^2/(1+p^2) = 1/2 at p=1, reached through a singular epsilon table
    tail = [F(0), F(0), F(1), F(0), F(-1)]
    assert pade_at_one(tail, 2, method=DIRECT).value == F(1, 2)
    assert diagonal(wynn_epsilon(partial_sums(tail)), 2) is None


def test_pade_coefficients_against_sympy():
    p = sp.Symbol("p")
    f = sp.exp(p)
    tail = [F(str(sp.Rational(1, sp.factorial(k)))) for k in range(5)]
    num, den = pade_coefficients(tail, 2)
    # independent check: Q*f - P vanishes through p**4
    P = sum(sp.Rational(str(c)) * p**i for i, c in enumerate(num))
    Q = sum(sp.Rational(str(c)) * p**i for i, c in enumerate(den))
    lead = sp.series(Q * f - P, p, 0, 5).removeO()
    assert sp.expand(lead) == 0
    assert den[0] == 1


def test_too_few_coefficients():
    with pytest.raises(IndexError):
        pade_at_one([1, 2, 3], 2)


def test_degenerate_pole_at_one():
    # [1/1] of 1 + p + p^2 is 1/(1-p): denominator vanishes at p=1
    with pytest.raises(DegeneracyError):
        pade_at_one([F(1), F(1), F(1)], 1, method=DIRECT)


def test_default_method_follows_number_type(slope_tail_20):
    assert pade_at_one([F(1), F(1, 2), F(1, 4)], 1).method == DIRECT
    assert pade_at_one(slope_tail_20, 3).method == EPSILON


# wynn_epsilon ---------------------------------------------------------------

def test_epsilon_constant_sequence():
    table = wynn_epsilon([5, 5, 5])
    assert table[1] == [None, None]
    assert table[2] == [5]


def test_epsilon_aitken_example():
    table = wynn_epsilon([F(1), F(3, 2), F(7, 4)])
    assert diagonal(table, 1) == 2


def test_epsilon_requires_three_sums():
    with pytest.raises(ValueError):
        wynn_epsilon([1, 2])


def test_partial_sums():
    assert partial_sums([1, 2, 3]) == [1, 3, 6]


# cross-route agreement ------------------------------------------------------

def test_routes_agree_on_engine_tail(slope_tail_20):
    tail = slope_tail_20[:11]
    d = pade_at_one(tail, 5, method=DIRECT).value
    e = pade_at_one(tail, 5, method=EPSILON).value
    assert abs(d - e) <= abs(d) * gmpy2.mpfr("1e-20")


@settings(max_examples=40, deadline=None)
@given(st.lists(st.fractions(-5, 5, max_denominator=7), min_size=5, max_size=5))
def test_routes_agree_exact(tail):
    try:
        d = pade_at_one(tail, 2, method=DIRECT).value
    except DegeneracyError:
        return
    e = wynn_epsilon(partial_sums(tail))
    got = diagonal(e, 2)
    # the epsilon table can break down where the Pade system is still solvable
    if got is not None:
        assert got == d


# published [10,10] value -------------------------------------------------

def test_pade_10_from_order_20(slope_tail_20):
    v = pade_at_one(slope_tail_20, 10, cross_check=True)
    assert abs(float(v.value) - -1.58030) <= 2e-4
    assert abs(float(error_percent(v.value, REF_SLOPE)) - 0.489) <= 0.02
    assert abs(v.value - v.cross_check) <= abs(v.value) * gmpy2.mpfr("1e-20")


def test_pade_beats_truncation(slope_tail_20):
    for m in (5, 10):
        trunc = sum(slope_tail_20[: 2 * m + 1])
        pade = pade_at_one(slope_tail_20, m).value
        assert error_percent(pade, REF_SLOPE) < error_percent(trunc, REF_SLOPE)


def test_pade_independent_of_h():
    basis = BasisParams(F(3, 4), 1, 1)
    vals = [
        pade_at_one(run(HamConfig(basis, h, 10, NumericMode.approx(256))).slope_per_order, 5).value
        for h in (F(-3, 4), F(-4, 5))
    ]
    assert abs(vals[0] - vals[1]) <= gmpy2.mpfr("1e-30")


# error_percent --------------------------------------------------------------

@pytest.mark.parametrize(
    "value, expected",
    [(-1.54628, 2.63), (-1.58030, 0.489), (-1.58515, 0.18), (-1.58801, 0.0038)],
)
def test_error_percent_examples(value, expected):
    assert abs(error_percent(value, -1.588071) - expected) <= 0.005


def test_error_percent_zero_reference():
    with pytest.raises(DomainError):
        error_percent(1.0, 0)
