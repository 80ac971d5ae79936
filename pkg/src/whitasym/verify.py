"""Property suites behind ``whitasym verify``.

Each suite returns a list of :class:`Check` records carrying the worst
observed value and the tolerance it was held to.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .airy import (
    airy_identity_residual,
    coeff_funcs_AB,
    connection_identity_residual,
    eval_airy_triple,
    gamma_ratio_check,
    ZETA_SEAM,
)
from .api import evaluate
from .coefficients import coefficient_table, constants_by_quadrature, ehat1
from .geometry import classify_region
from .lg import CancellationError, eval_by_connection, eval_lg
from .maps import big_Z, zeta_and_xi_plus
from .oracle import connection_residual
from .params import ParameterSet, turning_points

SUITES = ("coefficients", "bounds", "connection", "airy-seam")
_SEED = 20240601


@dataclass
class Check:
    name: str
    passed: bool
    worst: float
    tol: float
    detail: str = ""

    def line(self) -> str:
        tag = "PASS" if self.passed else "FAIL"
        extra = f"  ({self.detail})" if self.detail else ""
        return f"{tag}  {self.name:<44s} worst={self.worst:.3e}  tol={self.tol:.1e}{extra}"


def _check(name, worst, tol, detail="") -> Check:
    return Check(name, bool(worst <= tol), float(worst), float(tol), detail)


def _rng():
    return np.random.default_rng(_SEED)


def random_points(count: int, lam: float, avoid: float = 0.4, box=(0.3, 6.0, 0.3, 4.0)) -> list[complex]:
    """Deterministic points of the box kept ``avoid`` away from the turning point."""
    rng = _rng()
    zp, _ = turning_points(lam)
    out = []
    while len(out) < count:
        z = complex(rng.uniform(box[0], box[1]), rng.uniform(box[2], box[3]))
        if abs(z - zp) > avoid:
            out.append(z)
    return out


def rel_error_mp(res, ref, dps: int = 40) -> float:
    """``|value/reference - 1|`` formed from the extended-precision logs when present."""
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    lv = res.extras.get("log_value_mp", res.log_value)
    lr = ref.extras.get("log_value_mp", ref.log_value)
    return float(abs(ctx.exp(ctx.mpc(lv) - ctx.mpc(lr)) - 1))


# -- coefficients ---------------------------------------------------------------------------

def _matched_Z(t, lam, Z_ref):
    Zt = big_Z(t, lam)
    return Zt if abs(Zt - Z_ref) <= abs(Zt + Z_ref) else -Zt


def numerical_derivative(f, z, rho, nodes=32):
    """Derivative of an analytic ``f`` at ``z`` by the trapezoid rule on a circle of radius ``rho``."""
    w = np.exp(2j * np.pi * np.arange(nodes) / nodes)
    return complex(np.mean([f(z + rho * wk) / wk for wk in w]) / rho)


def recursion_residual(lam: float, n_max: int, points) -> float:
    """Worst relative residual of the F-recursion with numerically differentiated ``F_s``."""
    tab = coefficient_table(lam, n_max)
    zp, zm = turning_points(lam)
    worst = 0.0
    for z in points:
        Z = big_Z(z, lam)
        F = tab.fhat_values(z, Z, n_max)
        rho = 0.1 * min(abs(z - zp), abs(z - zm), abs(z))
        for s in range(1, n_max):
            dF = numerical_derivative(lambda t: tab.fhat_values(t, _matched_Z(t, lam, Z), s)[s], z, rho)
            quad = sum(F[j] * F[s - j] for j in range(1, s))
            lhs = -(z / Z) * dF - 0.5 * quad
            scale = max(abs(F[s + 1]), abs(z / Z * dF), abs(quad))
            worst = max(worst, abs(lhs - F[s + 1]) / scale)
    return worst


def path_quadrature(z: complex, lam: float, s: int) -> complex:
    """``E_s(z)`` by numerical quadrature of its defining integral along a horizontal ray to infinity."""
    tab = coefficient_table(lam, max(s, 2))

    def g(x):
        x = float(x)
        if x >= 1.0:
            return 0.0
        u = x / (1.0 - x)
        t = z + u
        Z = big_Z(t, lam)
        return 0.5 * Z * tab.fhat_values(t, Z, s)[s] / t / (1.0 - x) ** 2

    ctx = mpmath.mp.clone()
    ctx.dps = 17
    return -complex(ctx.quad(g, [0, 0.5, 0.9, 1]))


def suite_coefficients(lam: float = 0.5, n_max: int = 8, fast: bool = False) -> list[Check]:
    checks = []
    lam_q = Fraction(lam)
    tab = coefficient_table(lam, max(n_max, 5))
    polys = tab.exact["polys"]
    p3 = [16 * lam_q, 4 * lam_q**2 - 16, 0, 1]
    p5 = [-32 * lam_q, -16 * (5 * lam_q**2 - 4), -8 * lam_q * (lam_q**2 - 9), 8 * (lam_q**2 - 5), 2 * lam_q, 1]
    mism = int(list(polys[0]) != [-c / 2 for c in p3] + [0] * (len(polys[0]) - 4))
    mism += int(list(polys[1]) != [-c for c in p5] + [0] * (len(polys[1]) - 6))
    checks.append(_check("closed forms of F1, F2 (exact)", mism, 0))

    pts = random_points(5 if fast else 20, lam)
    checks.append(_check(f"F recursion, s<{n_max}, numerical derivative", recursion_residual(lam, n_max, pts), 1e-8))

    worst = 0.0
    grid = [3.0 + 1.0j, 5.0 + 0.5j, 2.0 + 3.0j] if fast else [3.0 + 1.0j, 5.0 + 0.5j, 2.0 + 3.0j, 8.0 + 0.1j, 4.0 + 4.0j]
    for z in grid:
        E = tab.ehat_values(z, big_Z(z, lam), 5)
        for s in range(1, 6):
            q = path_quadrature(z, lam, s)
            worst = max(worst, abs(E[s] - q) / max(abs(q), 1e-300))
    checks.append(_check("closed forms vs path quadrature, s<=5", worst, 1e-8))

    worst = 0.0
    for s in (1, 3, 5):
        e0, ls, ks = constants_by_quadrature(lam, s, 25)
        for got, ref in ((tab.exact["ehat0"][s], e0), (tab.exact["l"][s], ls), (tab.exact["k"][s], ks)):
            worst = max(worst, float(abs(float(got) - ref) / max(abs(ref), 1e-300)))
    checks.append(_check("E_s(0), l_s, k_s vs beta quadrature, s<=5", worst, 1e-10))

    worst = 0.0
    for z in grid:
        worst = max(worst, abs(ehat1(z, lam) - tab.ehat_values(z, big_Z(z, lam), 1)[1]))
    checks.append(_check("E_1 closed form vs table", worst, 1e-13))

    bad = 0
    for s in range(1, min(n_max, tab.n_max) + 1):
        mags = [abs(tab.ehat_values(x, big_Z(x, lam), s)[s]) for x in (1e2, 1e3, 1e4)]
        bad += int(not (mags[0] > mags[1] > mags[2]))
    checks.append(_check("decay of E_s along the positive axis", bad, 0))

    nz = sum(1 for s in range(2, tab.n_max + 1, 2)
             for d in ("ehat0", "l", "k") if tab.exact[d][s] != 0)
    checks.append(_check("even-order constants vanish (exact)", nz, 0))
    return checks


# -- bounds ------------------------------------------------------------------------------------------

BOUND_POINTS = (0.02, 0.1, 0.4, 1.5, 4.0, 9.0, 0.3 + 0.3j, 1.0 + 2.5j, 3.0 + 1.0j, 0.6 + 4.0j)


@lru_cache(maxsize=4096)
def cached_oracle(which: str, z: complex, mu: float, kappa: float, dps: int = 30):
    """Reference value shared between the (n, r) cases of one parameter set."""
    return evaluate(which, z, ParameterSet(mu, kappa), "oracle", dps=dps)


def bound_violations(params: ParameterSet, n: int, r: int, points=BOUND_POINTS, dps: int = 30):
    """``(worst ratio error/bound, count)`` over the points lying in each function's region."""
    worst, count = 0.0, 0
    for which, key in (("M", "in_Z1"), ("W", "in_Z2"), ("Wminus", "in_Z3")):
        for z in points:
            z = complex(z)
            if not getattr(classify_region(z, params), key):
                continue
            res = eval_lg(which, z, params, n, r, True, dps)
            ref = cached_oracle(which, z, params.mu, params.kappa, dps)
            err = rel_error_mp(res, ref)
            worst = max(worst, err / res.rel_error_bound)
            count += 1
    return worst, count


def suite_bounds(fast: bool = False, report=None) -> list[Check]:
    if fast:
        cases = [(20.0, 0.225, 3, 2), (20.0, 0.225, 11, 2)]
    else:
        cases = [(mu, lam, n, r) for mu in (10.0, 20.0, 50.0) for lam in (0.0, 0.225, 0.5, 0.9)
                 for n in (3, 7, 11) for r in (0, 2)]
    checks = []
    for mu, lam, n, r in cases:
        worst, count = bound_violations(ParameterSet(mu, lam * mu), n, r)
        checks.append(_check(f"LG error/bound mu={mu:g} lam={lam:g} n={n} r={r}", worst, 1.0, f"{count} points"))
        if report:
            report(checks[-1])
    return checks


# -- connection ----------------------------------------------------------------------------------

def suite_connection(fast: bool = False) -> list[Check]:
    params = ParameterSet(20.0, 4.5)
    pts = random_points(10 if fast else 50, params.lam, avoid=0.0, box=(0.1, 8.0, 0.05, 5.0))
    worst = 0.0
    for z in pts:
        res, acc = connection_residual(complex(z) * params.mu, params.mu, params.kappa)
        worst = max(worst, res / (10 * acc))
    checks = [_check("oracle connection residual / (10 est_accuracy)", worst, 1.0, f"{len(pts)} points")]

    worst = max(connection_identity_residual(z, params) for z in pts)
    checks.append(_check("Airy-type connection identity residual", worst, 1e-12, f"{len(pts)} points"))

    worst, used = 0.0, 0
    for z in (0.5 + 0.2j, 3.0 + 1.0j, 6.0 + 0.5j, 1.0 + 1.5j):
        if not classify_region(z, params).in_Z3:
            continue
        try:
            via = eval_by_connection(z, params)
        except (CancellationError, ValueError):
            continue
        direct = eval_lg("Wminus", z, params)
        diff = abs(cmath.exp(via.log_value - direct.log_value) - 1)
        worst = max(worst, diff / (via.rel_error_bound + direct.rel_error_bound))
        used += 1
    checks.append(_check("W- by connection vs direct, within bounds", worst, 1.0, f"{used} points"))
    return checks


# -- airy seam -----------------------------------------------------------------------------------------

def annulus_points(lam: float, count: int, zeta_seam: float = ZETA_SEAM) -> list[complex]:
    """Points with ``zeta_seam/2 < |zeta| < zeta_seam`` on circles around the turning point."""
    zp, _ = turning_points(lam)
    out = []
    for rad in np.linspace(0.02, 1.0, 60):
        for th in np.linspace(0, 2 * math.pi, 24, endpoint=False):
            z = zp + rad * cmath.exp(1j * th)
            if z.imag <= 0:
                continue
            zeta, _ = zeta_and_xi_plus(z, lam)
            if zeta_seam / 2 < abs(zeta) < zeta_seam:
                out.append(z)
    step = max(1, len(out) // count)
    return out[::step][:count]


def seam_jump(params: ParameterSet, m: int, points) -> float:
    """Worst relative difference of ``A``, ``B`` between direct and circle-based evaluation."""
    worst = 0.0
    for z in points:
        d = coeff_funcs_AB(z, params, m, strategy="direct")
        c = coeff_funcs_AB(z, params, m, zeta_seam=math.inf)
        worst = max(worst, abs(d.A - c.A) / abs(c.A), abs(d.B - c.B) / abs(c.B))
    return worst


def strategy_gap(params: ParameterSet, m: int, points) -> float:
    worst = 0.0
    for z in points:
        c = coeff_funcs_AB(z, params, m, zeta_seam=math.inf)
        t = coeff_funcs_AB(z, params, m, strategy="taylor", zeta_seam=math.inf)
        worst = max(worst, abs(c.A - t.A) / abs(c.A), abs(c.B - t.B) / abs(c.B))
    return worst


def uniformity_error(params: ParameterSet, m: int, count: int, dps: int = 30) -> float:
    """Worst error of the Airy-type W expansion vs the oracle for ``|z - z+| <= 3``."""
    zp, _ = turning_points(params.lam)
    pts = [zp]
    for rad in np.linspace(0.1, 3.0, count):
        for th in (-0.4 * math.pi, 0.0, 0.5 * math.pi, 0.9 * math.pi):
            z = zp + rad * cmath.exp(1j * th)
            if z.imag > 0.02:
                pts.append(z)
    worst = 0.0
    for z in pts:
        res = eval_airy_triple(z, params, m, "W")
        ref = evaluate("W", z, params, "oracle", dps=dps)
        worst = max(worst, rel_error_mp(res, ref))
    return worst


UNIFORMITY_TOL = 1e-3


def suite_airy_seam(fast: bool = False) -> list[Check]:
    params = ParameterSet(20.0, 4.5)
    m = 3
    pts = annulus_points(params.lam, 8 if fast else 32)
    checks = [
        _check("A,B seam jump on zeta0/2<|zeta|<zeta0, mu=20", seam_jump(params, m, pts), 1e-8,
               f"{len(pts)} points"),
        _check("circle kernel vs Taylor re-expansion", strategy_gap(params, m, pts), 1e-12),
    ]
    ws = [complex(x, y) for x in np.linspace(-8, 8, 9 if fast else 21) for y in np.linspace(-8, 8, 9 if fast else 21)]
    checks.append(_check("Airy rotation identity", max(airy_identity_residual(w) for w in ws), 1e-12))
    ratio = gamma_ratio_check(0.5, 1e3) / gamma_ratio_check(0.5, 1e4)
    checks.append(_check("gamma-ratio constants, |log10 ratio - 7| (mu 1e3 vs 1e4)",
                         abs(math.log10(ratio) - 7.0), 0.1))
    checks.append(_check("Airy-type W vs oracle for |z-z+|<=3, mu=20",
                         uniformity_error(params, m, 3 if fast else 8), UNIFORMITY_TOL))
    return checks


def run_suite(name: str, fast: bool = False, lam: float = 0.5, n_max: int = 8, report=None) -> list[Check]:
    """Run one suite; ``report`` (if given) is called with each check as it completes."""
    if name == "bounds":
        return suite_bounds(fast, report)
    if name == "coefficients":
        checks = suite_coefficients(lam, n_max, fast)
    elif name == "connection":
        checks = suite_connection(fast)
    elif name == "airy-seam":
        checks = suite_airy_seam(fast)
    else:
        raise ValueError(f"unknown suite {name!r}")
    if report:
        for chk in checks:
            report(chk)
    return checks
