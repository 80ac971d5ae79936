import cmath
import math

import numpy as np
import pytest

from whitasym import (
    CancellationError,
    ParameterSet,
    RegionError,
    classify_region,
    error_bound,
    eval_by_connection,
    eval_crosscut,
    eval_lg,
    eval_M_lg,
    eval_W_lg,
    eval_Wminus_lg,
    evaluate,
    lg_constants,
    turning_points,
)
from whitasym.verify import bound_violations, rel_error_mp

P = ParameterSet(20.0, 4.5)


def _oracle(which, z, p=P):
    return evaluate(which, z, p, "oracle", dps=30)


def _err(res, which, z, p=P):
    return rel_error_mp(res, _oracle(which, z, p))


def test_M_small_z_limit():
    mu = P.mu
    for z in (1e-4, 1e-6):
        res = eval_M_lg(z, P)
        ratio = cmath.exp(res.log_value - (mu + 0.5) * cmath.log(mu * z))
        assert abs(ratio - 1) < 2 * mu * z + res.rel_error_bound


@pytest.mark.parametrize("which", ["M", "W"])
def test_value_at_five_within_bound(which):
    res = eval_lg(which, 5.0, P, 11, 2, True, 30)
    assert res.rel_error_bound is not None and math.isfinite(res.rel_error_bound)
    assert _err(res, which, 5.0) <= res.rel_error_bound


def test_W_large_z_limit():
    # W(mu z) / ((mu z)^kappa e^{-mu z/2}) = 1 + (mu^2 - (kappa - 1/2)^2)/(mu z) + O(z^-2)
    mu, ka = P.mu, P.kappa
    c1 = (mu * mu - (ka - 0.5) ** 2) / mu
    for z in (1e3, 1e4, 1e5):
        res = eval_W_lg(z, P)
        ratio = cmath.exp(res.log_value - ka * cmath.log(mu * z) + mu * z / 2)
        assert abs(ratio - 1 - c1 / z) < 2 * (c1 / z) ** 2 + 1e-12


def test_W_imaginary_axis():
    res = eval_lg("W", 3j, P, 11, 2, True, 30)
    assert math.isfinite(res.rel_error_bound)
    assert _err(res, "W", 3j) <= res.rel_error_bound


def test_Wminus_growth_in_S0():
    # relative deviation from the leading exponential form decays like 1/|z|
    mu, ka = P.mu, P.kappa
    devs = []
    zs = (50 + 50j, 500 + 500j, 5000 + 5000j)
    for z in zs:
        res = eval_Wminus_lg(z, P)
        lead = 1j * math.pi * ka - ka * cmath.log(mu * z) + mu * z / 2
        devs.append(abs(cmath.exp(res.log_value - lead) - 1))
    scaled = [d * abs(z) for d, z in zip(devs, zs)]
    assert devs[0] > devs[1] > devs[2]
    assert scaled[2] == pytest.approx(scaled[1], rel=0.05)


def test_Wminus_near_negative_axis():
    z = -4 + 0.5j
    res = eval_lg("Wminus", z, P, 11, 2, True, 30)
    assert _err(res, "Wminus", z) <= res.rel_error_bound


def test_empty_sum_leading_term():
    for which, z in (("M", 5.0), ("W", 5.0), ("Wminus", -4 + 0.5j)):
        res = eval_lg(which, z, P, 1, 0, True, 30)
        assert res.n_terms == 1
        err = _err(res, which, z)
        assert err <= res.rel_error_bound
        assert 1e-4 < err < 0.1


def test_region_errors():
    with pytest.raises(RegionError, match="eval_crosscut"):
        eval_M_lg(3j, ParameterSet.from_lambda(20.0, 0.5))
    with pytest.raises(RegionError, match="eval_crosscut"):
        eval_Wminus_lg(0.3, P)
    zp, _ = turning_points(P)
    with pytest.raises(RegionError):
        eval_W_lg(zp + 0.01, P)
    with pytest.raises(ValueError):
        eval_lg("W", 5.0, P, 0, 2)


def test_crosscut_examples():
    p = ParameterSet.from_lambda(20.0, 0.5)
    res = eval_crosscut(3j, p, which="M", dps=30)
    assert _err(res, "M", 3j, p) <= res.rel_error_bound
    res = eval_crosscut(0.3, P, which="Wminus", dps=30)
    assert _err(res, "Wminus", 0.3) <= res.rel_error_bound
    _, l, k = lg_constants(P)
    assert all(l[s] == 0 and k[s] == 0 for s in range(2, 12, 2))


def test_error_bound_examples():
    om0, vp0, eta0 = error_bound(5.0, P, 11, 0, 2)
    om2, vp2, eta2 = error_bound(5.0, P, 11, 2, 2)
    assert eta0 > 0 and eta2 > 0
    res = eval_lg("W", 5.0, P, 11, 2, True, 30)
    assert eta2 == pytest.approx(res.rel_error_bound)
    assert _err(res, "W", 5.0) <= eta2
    omegas = [error_bound(x, P, 11, 2, 2)[0] for x in (5.0, 50.0, 500.0)]
    assert omegas[0] > omegas[1] > omegas[2]
    assert omegas[2] < 1e-3 * omegas[0]


def test_connection_agrees_with_direct():
    for z in (5.0, 4.0, 3 + 1j):
        via = eval_by_connection(z, P)
        direct = eval_Wminus_lg(z, P)
        diff = abs(cmath.exp(via.log_value - direct.log_value) - 1)
        assert diff <= via.rel_error_bound + direct.rel_error_bound


def test_connection_lambda_zero():
    p = ParameterSet(20.0, 0.0)
    via = eval_by_connection(5.0, p, dps=30)
    assert _err(via, "Wminus", 5.0, p) <= via.rel_error_bound


def test_connection_cancellation_alarm():
    # near the negative axis W- is recessive and the two terms of the connection formula cancel
    with pytest.raises(CancellationError):
        eval_by_connection(-4 + 0.5j, ParameterSet(60.0, 6.0))


def test_bounds_hold_on_grid():
    worst, count = bound_violations(P, 11, 2)
    assert count > 20 and worst <= 1.0


def test_order_improvement():
    grid = (0.05, 0.3, 4.0, 8.0, 3 + 1j)
    maxima = []
    for n in (3, 7, 11):
        maxima.append(max(rel_error_mp(eval_lg("M", z, P, n, 2, False, 30), _oracle("M", z)) for z in grid))
    assert maxima[0] > maxima[1] > maxima[2]


def test_recessiveness():
    mods = [eval_M_lg(x, P).log_value.real for x in (1e-1, 1e-2, 1e-3)]
    assert mods[0] > mods[1] > mods[2]
    mods = [eval_W_lg(x, P).log_value.real for x in (5.0, 10.0, 20.0)]
    assert mods[0] > mods[1] > mods[2]


def test_conjugate_symmetry():
    for which, z in (("M", 3 + 1j), ("W", 0.5 + 3j), ("Wminus", 4 + 1j)):
        up = evaluate(which, z, P, "lg")
        down = evaluate(which, z.conjugate(), P, "lg")
        assert down.value == up.value.conjugate()
        assert down.rel_error_bound == up.rel_error_bound


def test_log_space_overflow():
    p = ParameterSet(400.0, 90.0)
    res = eval_M_lg(8.0, p, bound=False)
    assert res.log10_modulus > 400 and math.isfinite(res.log_value.real)
    assert cmath.isinf(res.value) or abs(res.value) > 1e300


def test_region_label_attached():
    res = eval_W_lg(5.0, P)
    assert res.region == classify_region(5.0, P)
    assert res.r_extra == 2 and res.n_terms == 11
