"""Acceptance criteria, one PASS/FAIL line each at the stated tolerances.

Run under pytest (lines appear in the terminal summary) or directly with
``python3 tests/test_acceptance.py``.
"""

import cmath
import math
import time

import numpy as np

from whitasym import (
    CancellationError,
    ParameterSet,
    RegionError,
    ehat_even,
    eval_airy_triple,
    eval_by_connection,
    eval_lg,
    evaluate,
    fhat,
    turning_points,
)
from whitasym.airy import airy_identity_residual, connection_identity_residual, gamma_ratio_check
from whitasym.cli import GridSpec, SweepConfig, run_sweep
from whitasym.coefficients import constants_by_quadrature
from whitasym.geometry import classify_region
from whitasym.oracle import connection_residual
from whitasym.verify import bound_violations, random_points, rel_error_mp

LAMS = (0.0, 0.225, 0.5, 0.9)


def _line(label, passed, worst, tol, detail=""):
    text = f"{'PASS' if passed else 'FAIL'}  {label:<44} worst={worst:.3e}  tol={tol:.1e}"
    return text + (f"  ({detail})" if detail else "")


def _record(log, label, passed, worst, tol, detail=""):
    line = _line(label, passed, worst, tol, detail)
    log.append(line)
    print(line)
    return passed


def _rel(a, b):
    return abs(a - b) / abs(b)


def test_c1_closed_form_constants(acceptance_log):
    parts = {"E1(0)": 0.0, "l1": 0.0, "k1": 0.0}
    for lam in LAMS:
        e0, l1, k1 = (float(v) for v in constants_by_quadrature(lam, 1))
        parts["E1(0)"] = max(parts["E1(0)"], _rel(e0, (2 - lam**2) / (24 * (1 - lam**2))))
        parts["l1"] = max(parts["l1"], abs(l1 + lam / (12 * (1 - lam**2))) / max(abs(l1), 1e-300))
        parts["k1"] = max(parts["k1"], _rel(k1, (2 + lam) / (24 * (1 + lam))))
    tol = 1e-10
    detail = ", ".join(f"{k} {v:.1e} {'ok' if v <= tol else 'FAIL'}" for k, v in parts.items())
    worst = max(parts.values())
    assert _record(acceptance_log, "1 closed-form constants vs beta quadrature", worst <= tol, worst, tol, detail)


def test_c2_recursion_identity(acceptance_log):
    worst = 0.0
    for lam in (0.225, 0.5):
        for z in random_points(20, lam):
            f1, f3 = fhat(z, lam, 1), fhat(z, lam, 3)
            worst = max(worst, _rel(ehat_even(z, lam, 2), 0.25 * f1 * f1 - 0.5 * f3))
    assert _record(acceptance_log, "2 E4 = F1^2/4 - F3/2", worst <= 1e-10, worst, 1e-10, "20 points, lambda 0.225 and 0.5")


def test_c3_error_sweep(acceptance_log):
    # the log grid on (0, 10] starts at 1e-3; the ends are the first and last tenth of the grid
    t0 = time.perf_counter()
    cfg = SweepConfig(mu=20.0, kappa=4.5, n=11, functions=("M", "W"), z_grid=GridSpec(1e-3, 10.0, 200, "log"),
                      method="lg", digits=30)
    rows = run_sweep(cfg)
    elapsed = time.perf_counter() - t0
    ok = elapsed < 300
    notes = []
    worst = 0.0
    for which in ("M", "W"):
        rr = [r for r in rows if r["function"] == which]
        errs = np.array([r["rel_error"] if r["status"] == "ok" else math.nan for r in rr], dtype=float)
        zs = np.array([r["z_re"] for r in rr])
        finite = bool(np.all(np.isfinite(errs)))
        peak = int(np.nanargmax(errs))
        ends = max(errs[:20].max(), errs[-20:].max())
        ratio = ends / errs[peak]
        worst = max(worst, ratio)
        ok &= finite and 1 < zs[peak] < 2 and ratio <= 1e-2
        notes.append(f"{which}: peak {errs[peak]:.1e} at z={zs[peak]:.3f}, ends/peak {ratio:.1e}")
    notes.append(f"{elapsed:.0f}s")
    assert _record(acceptance_log, "3 n=11 sweep: finite, peak in (1,2), ends", ok, worst, 1e-2, "; ".join(notes))


def test_c4_bound_validity(acceptance_log):
    worst, checked, violations = 0.0, 0, 0
    for mu in (10.0, 20.0, 50.0):
        for lam in (0.0, 0.225, 0.5):
            p = ParameterSet.from_lambda(mu, lam)
            for n in (3, 7, 11):
                for r in (0, 2):
                    ratio, count = bound_violations(p, n, r)
                    worst = max(worst, ratio)
                    checked += count
    violations = int(worst > 1.0)
    assert _record(acceptance_log, "4 error <= eta bound", worst <= 1.0, worst, 1.0,
                   f"{checked} comparisons, max error/bound; {violations and 'violations' or 'no violations'}")


def test_c5_connection(acceptance_log):
    p = ParameterSet(20.0, 4.5)
    pts = random_points(50, p.lam, avoid=0.0, box=(0.1, 8.0, 0.05, 5.0))
    oracle_worst = max(r / (10 * a) for r, a in (connection_residual(complex(z) * p.mu, p.mu, p.kappa) for z in pts))
    lg_worst, used = 0.0, 0
    for z in (0.5 + 0.2j, 3.0 + 1.0j, 6.0 + 0.5j, 1.0 + 1.5j, 4.0, 8.0 + 2.0j):
        if not classify_region(z, p).in_Z3:
            continue
        try:
            via = eval_by_connection(z, p)
        except CancellationError:
            continue
        direct = eval_lg("Wminus", z, p)
        diff = abs(cmath.exp(via.log_value - direct.log_value) - 1)
        lg_worst = max(lg_worst, diff / (via.rel_error_bound + direct.rel_error_bound))
        used += 1
    worst = max(oracle_worst, lg_worst)
    ok = worst <= 1.0 and used >= 3
    assert _record(acceptance_log, "5 connection formula", ok, worst, 1.0,
                   f"oracle residual/(10 acc) {oracle_worst:.1e} at 50 points; connection vs direct/bounds "
                   f"{lg_worst:.1e} at {used} points")


def test_c6_turning_point(acceptance_log):
    p = ParameterSet.from_lambda(20.0, 0.225)
    zp, _ = turning_points(p)
    worst = 0.0
    for which in ("M", "W", "Wminus"):
        res = eval_airy_triple(zp, p, 3, which)
        assert cmath.isfinite(res.value)
        worst = max(worst, rel_error_mp(res, evaluate(which, zp, p, "oracle", dps=30)))
    assert _record(acceptance_log, "6 Airy triple at the turning point", worst <= 1e-6, worst, 1e-6, "M, W, W-")


def test_c7_gamma_ratio(acceptance_log):
    worst = 0.0
    for lam in (0.225, 0.5, 0.9):
        ratio = gamma_ratio_check(lam, 1e3) / gamma_ratio_check(lam, 1e4)
        worst = max(worst, abs(math.log10(ratio) - 7))
    tol = math.log10(3)
    assert _record(acceptance_log, "7 gamma-ratio constants, |log10 ratio - 7|", worst <= tol, worst, tol,
                   "lambda 0.225, 0.5, 0.9")


def test_c8_airy_identities(acceptance_log):
    rng = np.random.default_rng(11)
    ws = [complex(*rng.uniform(-15, 15, 2)) for _ in range(50)]
    a = max(airy_identity_residual(w) for w in ws)
    p = ParameterSet(20.0, 4.5)
    b = max(connection_identity_residual(z, p) for z in random_points(50, p.lam, avoid=0.0, box=(0.1, 8.0, 0.05, 5.0)))
    worst = max(a, b)
    assert _record(acceptance_log, "8 Airy identity and w-function identity", worst < 1e-12, worst, 1e-12,
                   f"Airy {a:.1e}, w {b:.1e}, 50 points each")


def test_c9_schwarz_reflection(acceptance_log):
    p = ParameterSet(20.0, 4.5)
    worst, count = 0.0, 0
    for which in ("M", "W", "Wminus"):
        for method in ("lg", "airy", "auto", "oracle"):
            for z in (5 + 1.5j, 3 + 0.5j, 1 + 3j, 7 + 4j):
                try:
                    up = evaluate(which, z, p, method)
                except RegionError:
                    continue
                down = evaluate(which, z.conjugate(), p, method)
                worst = max(worst, abs(down.value - up.value.conjugate()) / abs(up.value))
                count += 1
    assert _record(acceptance_log, "9 Schwarz reflection across the API", worst <= 1e-15, worst, 1e-15,
                   f"{count} evaluations")


if __name__ == "__main__":
    log: list[str] = []
    for name, fn in sorted(globals().items()):
        if name.startswith("test_c"):
            try:
                fn(log)
            except AssertionError:
                pass
    raise SystemExit(0 if all(line.startswith("PASS") for line in log) else 1)
