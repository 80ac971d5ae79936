import cmath

import pytest

import whitasym
from whitasym import ParameterSet, RegionError, choose_method, evaluate, turning_points
from whitasym.verify import rel_error_mp

P = ParameterSet(20.0, 4.5)


def test_public_names():
    for name in ("evaluate", "eval_lg", "eval_airy_triple", "ParameterSet", "coefficient_table"):
        assert name in whitasym.__all__
    assert all(not n.startswith("_") for n in whitasym.__all__)


def test_auto_picks_airy_near_turning_point():
    zp, _ = turning_points(P)
    assert choose_method("W", zp + 0.05, P) == "airy"
    assert choose_method("W", 6.0, P) == "lg"
    res = evaluate("W", zp + 0.05, P)
    assert res.method.startswith("airy")
    assert rel_error_mp(res, evaluate("W", zp + 0.05, P, "oracle", dps=30)) < 1e-6


@pytest.mark.parametrize("which", ["M", "W", "Wminus"])
def test_methods_agree_with_oracle(which):
    z = 4 + 1j
    ref = evaluate(which, z, P, "oracle", dps=30)
    for method in ("lg", "auto", "airy"):
        res = evaluate(which, z, P, method, dps=30)
        bound = res.rel_error_bound if res.rel_error_bound is not None else 0.0
        tol = bound + res.extras.get("delta_bound", 0.0) + 1e-12
        assert rel_error_mp(res, ref) <= tol


@pytest.mark.parametrize("method", ["lg", "airy", "oracle"])
@pytest.mark.parametrize("which", ["M", "W", "Wminus"])
def test_schwarz_reflection(method, which):
    z = 5 + 1.5j
    up = evaluate(which, z, P, method)
    down = evaluate(which, z.conjugate(), P, method)
    assert down.value == up.value.conjugate()
    assert down.log_value == up.log_value.conjugate()
    assert down.method.endswith("reflection")


def test_lower_half_plane_Wminus_is_companion():
    # below the axis "Wminus" is W_{-kappa,mu}(mu z e^{+pi i})
    z = 5 - 1.5j
    lg = evaluate("Wminus", z, P, "lg")
    ref = evaluate("Wminus", z, P, "oracle", dps=30)
    assert rel_error_mp(lg, ref) <= lg.rel_error_bound


def test_input_validation():
    with pytest.raises(ValueError):
        evaluate("V", 1.0, P)
    with pytest.raises(ValueError):
        evaluate("M", 1.0, P, method="best")
    with pytest.raises(RegionError):
        evaluate("M", 0.0, P)
    with pytest.raises(RegionError):
        evaluate("W", turning_points(P)[0], P, "lg")


def test_oracle_result_fields():
    res = evaluate("M", 2.0, P, "oracle", dps=40)
    assert res.method.startswith("oracle")
    assert res.rel_error_bound <= 1e-35
    assert cmath.isfinite(res.log_value)
    assert "log_value_mp" in res.extras
