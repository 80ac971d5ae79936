import cmath
import math
from fractions import Fraction

import mpmath
import numpy as np
import pytest

from whitasym import (
    ParameterError,
    ParameterSet,
    airy_complex,
    b_sequence,
    coeff_funcs_AB,
    eval_airy_compact,
    eval_airy_triple,
    eval_M_lg,
    eval_W_lg,
    evaluate,
    turning_points,
    zeta_and_xi_plus,
)
from whitasym.airy import (
    _OMEGA,
    airy_identity_residual,
    connection_identity_residual,
    delta_bounds,
    estimate_eta_infinity,
    gamma_ratio_check,
)
from whitasym.coefficients import eplus_coefficients
from whitasym.maps import big_Z, zeta_power
from whitasym.verify import annulus_points, random_points, rel_error_mp, seam_jump, strategy_gap

P = ParameterSet(20.0, 4.5)


def _mp_ai(w, j):
    mpmath.mp.dps = 30
    rot = mpmath.expjpi(mpmath.mpf(-2 * j) / 3)
    x = mpmath.mpc(w) * rot
    return complex(mpmath.airyai(x)), complex(rot * mpmath.airyai(x, derivative=1))


def test_airy_at_origin():
    v = airy_complex(0, 0)
    assert v.value == pytest.approx(3 ** (-2 / 3) / math.gamma(2 / 3), rel=1e-15)
    assert v.derivative == pytest.approx(-(3 ** (-1 / 3)) / math.gamma(1 / 3), rel=1e-15)


@pytest.mark.parametrize("j", [0, 1, -1])
def test_airy_against_mpmath(j):
    rng = np.random.default_rng(7)
    worst = 0.0
    for _ in range(150):
        w = complex(*rng.uniform(-25, 25, 2))
        v = airy_complex(w, j)
        ai, aip = _mp_ai(w, j)
        worst = max(worst, abs(v.value - ai) / abs(ai), abs(v.derivative - aip) / abs(aip))
    assert worst < 1e-12


def test_airy_crossover_continuity():
    # values on both sides of the series/asymptotic switch agree with mpmath
    for r in np.linspace(9.0, 11.0, 21):
        for th in (0.1, 1.5, 2.5, -2.0):
            w = r * cmath.exp(1j * th)
            ai, _ = _mp_ai(w, 0)
            assert airy_complex(w, 0).value == pytest.approx(ai, rel=1e-12)


def test_airy_scaled_large_argument():
    v = airy_complex(400.0 + 0j, 0)
    assert v.log_scale < -5000 and v.value == 0.0
    x = 400.0
    xi = (2 / 3) * x**1.5
    lead = -xi - 0.25 * math.log(x) - 0.5 * math.log(4 * math.pi) + math.log1p(-5 / (72 * xi))
    assert math.log(abs(v.ai)) + v.log_scale == pytest.approx(lead, abs=1e-8)


def test_airy_identity():
    assert airy_identity_residual(1 + 1j) < 1e-12
    rng = np.random.default_rng(3)
    pts = [complex(*rng.uniform(-15, 15, 2)) for _ in range(50)]
    assert max(airy_identity_residual(w) for w in pts) < 1e-12


@pytest.mark.parametrize("j", [0, 1, -1])
def test_airy_large_argument_against_mpmath(j):
    mpmath.mp.dps = 30
    rot = mpmath.expjpi(mpmath.mpf(-2 * j) / 3)
    for w in (30.0 + 5j, 60.0 - 10j, -45.0 + 20j):
        v = airy_complex(w, j)
        ref = mpmath.log(mpmath.airyai(mpmath.mpc(w) * rot))
        got = cmath.log(v.ai) + v.log_scale
        assert abs(got.real - float(ref.real)) < 1e-12 * max(1.0, abs(got.real))
        assert abs(cmath.exp(1j * (got.imag - float(ref.imag))) - 1) < 1e-11


def test_b_sequence_examples():
    a = b_sequence("a", 6)
    at = b_sequence("a_tilde", 6)
    # the lists hold the 1-based sequences starting at index 0
    assert a[0] == a[1] == Fraction(5, 72)
    assert at[0] == at[1] == Fraction(-7, 72)
    assert a[2] == Fraction(1105, 10368)
    for seq in (a, at):
        b = [None] + seq
        for s in range(2, 6):
            rhs = Fraction(s + 1, 2) * b[s] + Fraction(1, 2) * sum(b[j] * b[s - j] for j in range(1, s))
            assert b[s + 1] == rhs
    with pytest.raises(ValueError):
        b_sequence("b", 4)


def test_phi_removable_at_turning_point():
    zp, _ = turning_points(P)
    ab = coeff_funcs_AB(zp, P, 0)
    assert cmath.isfinite(ab.A) and abs(ab.A) > 0.1


def test_m0_closed_forms():
    lam, mu = P.lam, P.mu
    z = 4 + 1j
    zeta, _ = zeta_and_xi_plus(z, lam)
    xp = (2 / 3) * zeta_power(zeta, 1.5)
    phi = cmath.sqrt(z / big_Z(z, lam)) * zeta_power(zeta, 0.25)
    e1 = eplus_coefficients(z, lam, 1)
    cal = e1 - float(b_sequence("a", 2)[1]) / xp
    calt = e1 - float(b_sequence("a_tilde", 2)[1]) / xp
    ab = coeff_funcs_AB(z, P, 0)
    assert ab.A == pytest.approx(phi * cmath.cosh(calt / mu), rel=1e-13)
    assert ab.B == pytest.approx(phi * mu ** (-1 / 3) / zeta_power(zeta, 0.5) * cmath.sinh(cal / mu), rel=1e-13)


def test_near_strategies_agree():
    pts = annulus_points(P.lam, 12)
    zp, _ = turning_points(P)
    pts += [zp, zp + 0.05, zp + 0.1j]
    assert strategy_gap(P, 3, pts) < 1e-12


def test_AB_continuous_through_turning_point():
    zp, _ = turning_points(P)
    base = coeff_funcs_AB(zp, P, 3)
    for th in np.linspace(0, 2 * math.pi, 8, endpoint=False):
        ab = coeff_funcs_AB(zp + 1e-6 * cmath.exp(1j * th), P, 3)
        assert ab.A == pytest.approx(base.A, rel=1e-5)
        assert ab.B == pytest.approx(base.B, rel=1e-5)


def test_seam_consistency():
    """Direct and re-expanded A, B across the zeta seam (tolerance 1e-8 relative)."""
    jump = seam_jump(P, 3, annulus_points(P.lam, 16))
    assert jump < 1e-8


def test_seam_jump_is_truncation_error():
    # the direct/circle gap falls like mu^-(2m+2): it is the truncated remainder, not roundoff
    z = annulus_points(P.lam, 4)[0]
    gaps = []
    for mu in (20.0, 40.0, 80.0):
        p = ParameterSet(mu, 0.225 * mu)
        d = coeff_funcs_AB(z, p, 1, strategy="direct")
        c = coeff_funcs_AB(z, p, 1, zeta_seam=math.inf)
        gaps.append(abs(d.A - c.A) / abs(c.A))
    assert gaps[0] / gaps[1] > 2 ** 3.5 and gaps[1] / gaps[2] > 2 ** 3.5


@pytest.mark.parametrize("which", ["M", "W", "Wminus"])
def test_triple_at_turning_point(which):
    zp, _ = turning_points(P)
    res = eval_airy_triple(zp, P, 3, which)
    assert cmath.isfinite(res.value)
    assert rel_error_mp(res, evaluate(which, zp, P, "oracle", dps=30)) < 1e-10


def test_triple_matches_lg_away_from_turning_point():
    for lg, which in ((eval_M_lg, "M"), (eval_W_lg, "W")):
        a = eval_airy_triple(5.0, P, 3, which)
        b = lg(5.0, P)
        diff = abs(cmath.exp(a.log_value - b.log_value) - 1)
        assert diff <= b.rel_error_bound + a.extras["delta_bound"]


def test_uniformity_near_turning_point():
    zp, _ = turning_points(P)
    for d in (0.0, 0.05, 0.2j, -0.1 + 0.1j, 0.5 + 0.5j, 1.5, 3j):
        z = zp + d
        err = rel_error_mp(eval_airy_triple(z, P, 3, "W"), evaluate("W", z, P, "oracle", dps=30))
        assert err < 1e-3


def test_connection_identity():
    pts = random_points(50, P.lam, avoid=0.0, box=(0.1, 8.0, 0.05, 5.0))
    assert max(connection_identity_residual(z, P) for z in pts) < 1e-12


def test_compact_forms():
    ref = evaluate("W", 5.0, P, "oracle", dps=30)
    e_t = rel_error_mp(eval_airy_triple(5.0, P, 3, "W"), ref)
    e_c = rel_error_mp(eval_airy_compact(5.0, P, 3, "W"), ref)
    assert e_c < 10 * e_t + 1e-12
    assert eval_airy_compact(5.0, P, 3, "W").rel_error_bound is None
    for mu in (20.0, 40.0, 80.0):
        p = ParameterSet(mu, 0.225 * mu)
        for which in ("M", "W", "Wminus"):
            t = eval_airy_triple(3 + 1j, p, 3, which)
            c = eval_airy_compact(3 + 1j, p, 3, which)
            assert abs(cmath.exp(c.log_value - t.log_value) - 1) < 1e-12


def test_compact_symmetric_at_kappa_zero():
    p = ParameterSet(20.0, 0.0)
    for z in (1 + 1j, 3.0):
        w = eval_airy_compact(z, p, 3, "W")
        ref = evaluate("W", z, p, "oracle", dps=30)
        assert rel_error_mp(w, ref) < 1e-8


def test_gamma_ratio_constants():
    ratio = gamma_ratio_check(0.5, 1e3) / gamma_ratio_check(0.5, 1e4)
    assert 1e7 / 3 < ratio < 3e7
    assert gamma_ratio_check(0.0, 50.0) < 1e-40


def test_delta_bound_provider():
    d = delta_bounds(P, 3)
    assert 0 < d[0] < 1e-6 and 0 < d[1] < 1e-6
    assert delta_bounds(P, 3, provider=lambda p, m: (0.0, 0.0)) == (0.0, 0.0)
    with pytest.raises(ParameterError):
        eval_airy_triple(5.0, P, 3, "W", provider=lambda p, m: (0.6, 0.6))
    assert estimate_eta_infinity(P, 3)[0] > 0


def test_rotation_constant():
    assert _OMEGA == pytest.approx(cmath.exp(-2j * math.pi / 3))
