import json
import math
from fractions import Fraction

import pytest

import whitasym.coefficients as coeffs
from whitasym import (
    big_Z,
    coefficient_table,
    ehat1,
    ehat_even,
    ehat_odd,
    eplus_coefficients,
    fhat,
    fhat_table,
    lg_constants,
)
from whitasym.coefficients import (
    CoefficientOverflowError,
    constants_by_quadrature,
    eplus_inf_stirling,
    k_stirling,
)
from whitasym.verify import path_quadrature, random_points, recursion_residual

LAMS = (0.0, 0.225, 0.5, 0.9)


def test_fhat1_lambda_zero():
    for z in (0.5 + 0.1j, 3 + 1j, 7.0):
        ref = -z**2 * (z**2 - 16) / (2 * (z**2 + 4) ** 3)
        assert fhat(z, 0.0, 1) == pytest.approx(ref, rel=1e-13)


@pytest.mark.parametrize("lam", LAMS)
def test_fhat2_bracket(lam):
    for z in (0.5 + 0.1j, 3 + 1j, 7.0):
        br = (z**5 + 2 * lam * z**4 + 8 * (lam**2 - 5) * z**3 - 8 * lam * (lam**2 - 9) * z**2
              - 16 * (5 * lam**2 - 4) * z - 32 * lam)
        assert fhat(z, lam, 2) == pytest.approx(-z * br / big_Z(z, lam) ** 9, rel=1e-12)


def test_p7_against_numerical_recursion():
    assert recursion_residual(0.5, 4, [3 + 1j]) < 1e-12


@pytest.mark.parametrize("lam", LAMS)
def test_recursion_consistency(lam):
    assert recursion_residual(lam, 12, random_points(20, lam)) < 1e-8


def test_ehat1_examples():
    z = 2.0
    assert ehat1(z, 0.0) == pytest.approx((6 * 4 - 16) / (24 * 8**1.5), rel=1e-14)
    for lam in LAMS:
        assert abs(ehat1(1e8, lam)) < 1e-8


@pytest.mark.parametrize("lam", LAMS)
def test_ehat1_at_origin_matches_quadrature(lam):
    e0, _, _ = constants_by_quadrature(lam, 1)
    assert ehat1(0.0, lam).real == pytest.approx(float(e0), rel=1e-12)
    assert ehat1(0.0, lam).real == pytest.approx(-(2 - lam) / (24 * (1 - lam)), rel=1e-12)


@pytest.mark.parametrize("lam", LAMS)
def test_ehat_odd_paths_agree(lam):
    for z in (0.3 + 0.2j, 3 + 1j, 5.0, -1 + 2j):
        assert ehat_odd(z, lam, 0) == pytest.approx(ehat1(z, lam), rel=1e-12, abs=1e-15)


def test_ehat3_against_path_quadrature():
    assert ehat_odd(5.0, 0.5, 1) == pytest.approx(path_quadrature(5.0, 0.5, 3), rel=1e-10)


@pytest.mark.parametrize("lam", LAMS)
@pytest.mark.parametrize("s", [1, 2, 3, 4, 5])
def test_closed_forms_against_path_quadrature(lam, s):
    tab = coefficient_table(lam)
    for z in (3 + 1j, 2 + 3j, 8 + 0.1j):
        q = path_quadrature(z, lam, s)
        assert tab.ehat_values(z, big_Z(z, lam), s)[s] == pytest.approx(q, rel=1e-8)


@pytest.mark.parametrize("lam", LAMS)
def test_even_coefficients(lam):
    for z in (0.4 + 0.3j, 3 + 1j):
        f = {s: fhat(z, lam, s) for s in (1, 2, 3)}
        assert ehat_even(z, lam, 1) == pytest.approx(-0.5 * f[1], rel=1e-13)
        assert ehat_even(z, lam, 2) == pytest.approx(0.25 * f[1] ** 2 - 0.5 * f[3], rel=1e-12)
    assert ehat_even(0.0, lam, 1) == 0
    with pytest.raises(ValueError):
        ehat_even(1.0, lam, 0)


@pytest.mark.parametrize("lam", LAMS)
def test_decay_along_positive_axis(lam):
    tab = coefficient_table(lam)
    for s in range(1, 12):
        mags = [abs(tab.ehat_values(x, big_Z(x, lam), s)[s]) for x in (1e2, 1e3, 1e4)]
        assert mags[0] > mags[1] > mags[2]


@pytest.mark.parametrize("lam", LAMS)
def test_first_constants_closed_forms(lam):
    e0, l, k = lg_constants(lam)
    assert l[1] == pytest.approx(-lam / (12 * (1 - lam * lam)), abs=1e-16)
    assert k[1] == pytest.approx((2 + lam) / (24 * (1 + lam)), rel=1e-14)
    assert k[1] == pytest.approx(l[1] - e0[1], rel=1e-14)


@pytest.mark.parametrize("lam", [0.0, 0.225, 0.5, 0.9, Fraction(1, 3)])
def test_constants_against_stirling(lam):
    tab = coefficient_table(float(lam), 12)
    for m in range(6):
        s = 2 * m + 1
        assert tab.exact["k"][s] == k_stirling(float(lam), m)
        assert tab.exact["eplus_inf"][s] == eplus_inf_stirling(float(lam), m)
    assert lg_constants(0.0)[2][1] == pytest.approx(1 / 12)


@pytest.mark.parametrize("lam", LAMS)
def test_constants_against_beta_quadrature(lam):
    tab = coefficient_table(lam)
    for s in (1, 3, 5):
        e0, l, k = constants_by_quadrature(lam, s)
        assert float(tab.exact["ehat0"][s]) == pytest.approx(float(e0), rel=1e-12, abs=1e-300)
        assert float(tab.exact["l"][s]) == pytest.approx(float(l), rel=1e-12, abs=1e-300)
        assert float(tab.exact["k"][s]) == pytest.approx(float(k), rel=1e-12)


def test_even_constants_vanish():
    tab = coefficient_table(0.3)
    for s in range(2, tab.n_max + 1, 2):
        assert tab.exact["ehat0"][s] == tab.exact["l"][s] == tab.exact["k"][s] == 0


def test_eplus_shift_and_limits():
    assert eplus_coefficients(math.inf, 0.0, 3) == 0
    assert eplus_coefficients(math.inf, 0.0, 5) == 0
    lam = 0.4
    for s in (1, 3, 5):
        cinf = eplus_coefficients(math.inf, lam, s)
        for z in (0.7 + 0.4j, 4 + 2j):
            tab = coefficient_table(lam)
            diff = eplus_coefficients(z, lam, s) - tab.ehat_values(z, big_Z(z, lam), s)[s]
            assert diff == pytest.approx(cinf, rel=1e-12)
        assert eplus_coefficients(1e9, lam, s) == pytest.approx(cinf, rel=1e-6)


def test_table_json_and_api():
    tab = fhat_table(0.5, 6)
    rec = json.loads(tab.to_json())
    assert rec["lambda"] == 0.5 and rec["n_max"] == 6
    assert Fraction(rec["polynomials"]["1"][0]) == -8 * Fraction(1, 2)
    assert rec["k"]["1"] == pytest.approx(2.5 / 36)
    with pytest.raises(ValueError):
        tab.ehat_values(1.0, big_Z(1.0, 0.5), 7)


def test_overflow_alarm(monkeypatch):
    monkeypatch.setattr(coeffs, "COEFF_ALARM", 10.0)
    with pytest.raises(CoefficientOverflowError):
        coeffs.coefficient_table.__wrapped__(0.123, 8)
