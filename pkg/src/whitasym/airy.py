"""Airy-type expansions valid through the turning point.

``Ai_j(w) = Ai(w e^{-2 pi i j/3})`` and ``Ai'_j`` is its derivative with
respect to ``w``, i.e. ``e^{-2 pi i j/3} Ai'(w e^{-2 pi i j/3})``; with this
convention ``Ai_0 + e^{-2pi i/3} Ai_1 + e^{2pi i/3} Ai_-1 = 0`` holds for
both the functions and their derivatives.

Airy values are returned in scaled form ``(ai, ai', log_scale)`` so that
large ``mu`` does not overflow.  Small arguments use the Maclaurin series
in ``mpmath`` at a working precision that covers the cancellation; large
arguments use the exponential form of the asymptotic expansion whose
coefficients obey the same quadratic recursion as the sequences ``a_s``.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

import mpmath
import numpy as np

from .coefficients import DEFAULT_N_MAX, coefficient_table
from .lg import ExpansionResult, _finish, _log_phase
from .maps import big_Z, zeta_and_xi_plus, zeta_power
from .oracle import log_gamma
from .params import ParameterError, ParameterSet, turning_points

SERIES_RADIUS = 10.0
ZETA_SEAM = 0.3
CAUCHY_TOL = 1e-13
MAX_CIRCLE_NODES = 1024
_OMEGA = cmath.exp(-2j * math.pi / 3.0)
_LOG_2SQRTPI = math.log(2.0 * math.sqrt(math.pi))


# -- sequences ------------------------------------------------------------------

@lru_cache(maxsize=8)
def _b_cached(kind: str, s_max: int) -> tuple:
    if kind == "a":
        b = [None, Fraction(5, 72), Fraction(5, 72)]
    elif kind == "a_tilde":
        b = [None, Fraction(-7, 72), Fraction(-7, 72)]
    else:
        raise ValueError("kind must be 'a' or 'a_tilde'")
    for s in range(2, s_max):
        conv = sum((b[j] * b[s - j] for j in range(1, s)), Fraction(0))
        b.append(Fraction(s + 1, 2) * b[s] + conv / 2)
    return tuple(b[1:s_max + 1])


def b_sequence(kind: str, s_max: int) -> list[Fraction]:
    """Exact ``a_1..a_{s_max}`` (``kind='a'``) or ``a~_1..`` (``kind='a_tilde'``)."""
    if s_max < 2:
        raise ValueError("s_max must be at least 2")
    return list(_b_cached(kind, s_max))


_ASYM_TERMS = 80
_A_FLOAT = [0.0] + [float(x) for x in b_sequence("a", _ASYM_TERMS)]
_AT_FLOAT = [0.0] + [float(x) for x in b_sequence("a_tilde", _ASYM_TERMS)]


# -- complex Airy function ----------------------------------------------------------

@dataclass(frozen=True)
class AiryValue:
    """``Ai_j(w)`` and ``d/dw Ai_j(w)``, both equal to the stored value times ``exp(log_scale)``."""

    j: int
    ai: complex
    ai_prime: complex
    log_scale: float = 0.0

    @property
    def value(self) -> complex:
        return self.ai * math.exp(self.log_scale)

    @property
    def derivative(self) -> complex:
        return self.ai_prime * math.exp(self.log_scale)


def _series(x: complex) -> tuple[complex, complex, float]:
    """Maclaurin series of ``Ai`` and ``Ai'``; extra digits cover the cancellation."""
    extra = int((4.0 / 3.0) * abs(x) ** 1.5 / math.log(10.0)) + 12
    ctx = mpmath.mp.clone()
    ctx.dps = 17 + extra
    X = ctx.mpc(x)
    if x == 0:
        return 0.355028053887817239 + 0j, -0.258819403792806798 + 0j, 0.0
    c0 = 1 / (ctx.power(3, ctx.mpf(2) / 3) * ctx.gamma(ctx.mpf(2) / 3))
    c1 = -1 / (ctx.power(3, ctx.mpf(1) / 3) * ctx.gamma(ctx.mpf(1) / 3))
    # y = sum c_n X^n with c_{n+3} = c_n / ((n+3)(n+2))
    y, yp = c0 + c1 * X, c1
    t0, t1 = c0, c1 * X  # c_{3k} X^{3k}, c_{3k+1} X^{3k+1}
    X3 = X**3
    eps = ctx.mpf(10) ** (-(ctx.dps - 2))
    k = 0
    while True:
        n0, n1 = 3 * k, 3 * k + 1
        t0 = t0 * X3 / ((n0 + 3) * (n0 + 2))
        t1 = t1 * X3 / ((n1 + 3) * (n1 + 2))
        y += t0 + t1
        yp += (n0 + 3) * t0 / X + (n1 + 3) * t1 / X
        k += 1
        if abs(t0) + abs(t1) < eps * (abs(y) + abs(yp) + 1) and k > 3:
            break
    mag = max(abs(y), abs(yp))
    if mag == 0:
        return 0j, 0j, 0.0
    ls = float(ctx.log(mag))
    s = ctx.exp(-ls)
    return complex(y * s), complex(yp * s), ls


def _asymptotic(x: complex) -> tuple[complex, complex, float]:
    """Exponential-form expansion for ``|arg x| <= 2pi/3`` and large ``|x|``."""
    lx = cmath.log(x)
    xi = (2.0 / 3.0) * cmath.exp(1.5 * lx)
    sa = sat = 0j
    prev = math.inf
    p = 1.0 + 0j
    for s in range(1, _ASYM_TERMS + 1):
        p = p * (-1.0 / xi)
        ta = _A_FLOAT[s] * p / s
        tat = _AT_FLOAT[s] * p / s
        size = abs(ta) + abs(tat)
        if size > prev:
            break
        sa += ta
        sat += tat
        prev = size
        if size < 1e-18 * (1.0 + abs(sa) + abs(sat)):
            break
    log_ai = -xi - _LOG_2SQRTPI - 0.25 * lx + sa
    log_aip = -xi - _LOG_2SQRTPI + 0.25 * lx + sat
    ls = max(log_ai.real, log_aip.real)
    ai = cmath.exp(log_ai - ls)
    aip = -cmath.exp(log_aip - ls)
    return ai, aip, ls


def _ai_plain(x: complex) -> tuple[complex, complex, float]:
    """Scaled ``Ai(x), Ai'(x)``."""
    if abs(x) <= SERIES_RADIUS:
        return _series(x)
    if abs(cmath.phase(x)) <= 2.0 * math.pi / 3.0:
        return _asymptotic(x)
    # Ai(x) = -e^{-2pi i/3} Ai(x e^{-2pi i/3}) - e^{2pi i/3} Ai(x e^{2pi i/3})
    a1, d1, l1 = _asymptotic(x * _OMEGA)
    a2, d2, l2 = _asymptotic(x / _OMEGA)
    ls = max(l1, l2)
    f1, f2 = math.exp(l1 - ls), math.exp(l2 - ls)
    ai = -_OMEGA * a1 * f1 - a2 * f2 / _OMEGA
    aip = -_OMEGA**2 * d1 * f1 - d2 * f2 / _OMEGA**2
    return ai, aip, ls


def airy_complex(w: complex, j: int = 0) -> AiryValue:
    """``Ai_j(w)`` and its ``w``-derivative in scaled form."""
    if j not in (-1, 0, 1):
        raise ValueError("j must be -1, 0 or 1")
    rot = _OMEGA**j
    ai, aip, ls = _ai_plain(complex(w) * rot)
    return AiryValue(j=j, ai=ai, ai_prime=rot * aip, log_scale=ls)


# -- coefficient functions ----------------------------------------------------------

@dataclass(frozen=True)
class ABPair:
    A: complex
    B: complex
    m: int
    method: str = "direct"


def _phi(z: complex, Z: complex, zeta: complex) -> complex:
    return cmath.sqrt(z / Z) * zeta_power(zeta, 0.25)


def _ab_direct(z: complex, lam: float, m: int, mu: float) -> tuple[complex, complex]:
    z = complex(z)
    zeta, xp = zeta_and_xi_plus(z, lam)
    Z = big_Z(z, lam)
    xp = (2.0 / 3.0) * zeta_power(zeta, 1.5)
    tab = coefficient_table(lam, max(DEFAULT_N_MAX, 2 * m + 1))
    Ep = tab.ehat_values(z, Z, 2 * m + 1, plus=True)
    a, at = _A_FLOAT, _AT_FLOAT
    se = so = ste = sto = 0j
    for s in range(1, 2 * m + 2):
        inv = (-1) ** s / (s * xp**s)
        cal = Ep[s] + a[s] * inv
        calt = Ep[s] + at[s] * inv
        if s % 2 == 0:
            se += cal / mu**s
            ste += calt / mu**s
        else:
            so += cal / mu**s
            sto += calt / mu**s
    phi = _phi(z, Z, zeta)
    A = phi * cmath.exp(ste) * cmath.cosh(sto)
    B = phi / (mu ** (1.0 / 3.0) * zeta_power(zeta, 0.5)) * cmath.exp(se) * cmath.sinh(so)
    return A, B


def default_circle_radius(lam: float) -> float:
    return 0.5 * turning_points(lam)[0].imag


@lru_cache(maxsize=128)
def _circle_samples(lam: float, m: int, mu: float, radius: float, npts: int):
    zp, _ = turning_points(lam)
    th = 2.0 * math.pi * np.arange(npts) / npts
    pts = zp + radius * np.exp(1j * th)
    vals = np.array([_ab_direct(t, lam, m, mu) for t in pts])
    return pts, vals[:, 0], vals[:, 1]


def _cauchy(z: complex, lam: float, m: int, mu: float, radius: float, strategy: str):
    """Trapezoid rule on the circle, doubling the nodes until the change stalls."""
    zp, _ = turning_points(lam)
    out, prev_change = None, math.inf
    npts = 32
    while npts <= MAX_CIRCLE_NODES:
        pts, A, B = _circle_samples(lam, m, mu, radius, npts)
        if strategy == "cauchy":
            k = (pts - zp) / (pts - z) / npts
            cur = np.array([np.sum(A * k), np.sum(B * k)])
        else:
            # Taylor coefficients about z_plus from the FFT of the samples
            half = npts // 2
            powers = ((z - zp) / radius) ** np.arange(half)
            cur = np.array([np.sum((np.fft.fft(A) / npts)[:half] * powers),
                            np.sum((np.fft.fft(B) / npts)[:half] * powers)])
        if out is not None:
            scale = np.array([np.max(np.abs(A)), np.max(np.abs(B))])
            change = float(np.max(np.abs(cur - out) / scale))
            if change <= CAUCHY_TOL or change >= prev_change:
                return cur
            prev_change = change
        out = cur
        npts *= 2
    return out


def coeff_funcs_AB(z: complex, params, m: int, mu: float | None = None, strategy: str = "cauchy",
                   zeta_seam: float = ZETA_SEAM, radius: float | None = None) -> ABPair:
    """``A_{2m+2}`` and ``B_{2m+2}`` with the error factors set to one.

    Away from the turning point (``|zeta| >= zeta_seam``) the exponential
    forms are evaluated directly.  Inside, ``strategy`` selects the Cauchy
    integral over the circle ``|t - z_plus| = radius`` (``"cauchy"``) or
    the Taylor polynomial about ``z_plus`` built from the same samples
    (``"taylor"``); ``"direct"`` forces the closed forms everywhere.
    """
    lam = params.lam if isinstance(params, ParameterSet) else float(params)
    mu = params.mu if mu is None else float(mu)
    if m < 0:
        raise ValueError("m must be nonnegative")
    z = complex(z)
    zeta, _ = zeta_and_xi_plus(z, lam)
    if strategy == "direct" or abs(zeta) >= zeta_seam:
        A, B = _ab_direct(z, lam, m, mu)
        return ABPair(A=A, B=B, m=m, method="direct")
    if strategy not in ("cauchy", "taylor"):
        raise ValueError("strategy must be 'cauchy', 'taylor' or 'direct'")
    zp, _ = turning_points(lam)
    r1 = default_circle_radius(lam) if radius is None else float(radius)
    d = abs(z - zp)
    if d > 0.8 * r1:
        # the |zeta| < zeta_seam disk reaches past the circle: enlarge it, staying in the upper half-plane
        r1 = min(d / 0.8, 0.95 * zp.imag)
        if d > 0.8 * r1:
            A, B = _ab_direct(z, lam, m, mu)
            return ABPair(A=A, B=B, m=m, method="direct")
    A, B = _cauchy(z, lam, m, mu, round(r1, 12), strategy)
    return ABPair(A=complex(A), B=complex(B), m=m, method=strategy)


# -- delta bound provider ---------------------------------------------------------

def estimate_eta_infinity(params: ParameterSet, m: int) -> tuple[float, float]:
    """Default estimate of ``|eta~_{2m+2}(mu, inf)|`` and ``|eta_{2m+2}(mu, inf)|``.

    At ``z = inf`` the Airy terms vanish and both coefficient functions
    reduce to ``cosh``/``sinh`` of ``sum E+_{2s+1}(inf) mu^{-2s-1}``; the
    estimate is ten times the first omitted contribution
    ``|E+_{2m+3}(inf)| mu^{-2m-3}`` plus ``mu^{-2m-2}`` for the even part.
    This is an estimate, not a proof.
    """
    tab = coefficient_table(params.lam, max(DEFAULT_N_MAX, 2 * m + 3))
    mu = params.mu
    est = 10.0 * (abs(tab.eplus_inf[2 * m + 3]) / mu ** (2 * m + 3) + mu ** (-2 * m - 2))
    return est, est


def delta_bounds(params: ParameterSet, m: int, provider=estimate_eta_infinity) -> tuple[float, float]:
    """Bounds on ``|delta+_{2m+2}|`` and ``|delta-_{2m+2}|``."""
    et, e = provider(params, m)
    tab = coefficient_table(params.lam, max(DEFAULT_N_MAX, 2 * m + 1))
    S = sum(tab.eplus_inf[2 * s + 1] / params.mu ** (2 * s + 1) for s in range(m + 1))
    base = max(abs(et), abs(e))
    return base * (1.0 + math.exp(2.0 * S)), base * (1.0 + math.exp(-2.0 * S))


# -- assembled expansions ------------------------------------------------------------

_SECTOR = {"M": -1, "W": 0, "Wminus": 1}


def _log_w(z, params: ParameterSet, m: int, j: int, strategy: str) -> tuple[complex, ABPair, AiryValue]:
    zeta, _ = zeta_and_xi_plus(z, params.lam)
    ab = coeff_funcs_AB(z, params, m, strategy=strategy)
    ai = airy_complex(params.mu ** (2.0 / 3.0) * zeta, j)
    w = ai.ai * ab.A + ai.ai_prime * ab.B
    if w == 0:
        return complex(-math.inf, 0.0), ab, ai
    return cmath.log(w) + ai.log_scale, ab, ai


def _eplus_sum(params: ParameterSet, m: int) -> float:
    tab = coefficient_table(params.lam, max(DEFAULT_N_MAX, 2 * m + 1))
    return sum(tab.eplus_inf[2 * s + 1] / params.mu ** (2 * s + 1) for s in range(m + 1))


def _check_z(z):
    z = complex(z)
    if z.imag < 0 or z == 0:
        raise ValueError("z must lie in the closed upper half-plane, z != 0")
    return z


def eval_airy_triple(z, params: ParameterSet, m: int = 3, which: str = "W", strategy: str = "cauchy",
                     provider=estimate_eta_infinity) -> ExpansionResult:
    """Airy-type expansion with the ``E+(inf)`` constants.

    The unknown factor ``(1 + delta)^{-1}`` is omitted from the value; its
    bound from the provider is reported in ``extras['delta_bound']``.
    """
    z = _check_z(z)
    if which not in _SECTOR:
        raise ValueError("which must be 'M', 'W' or 'Wminus'")
    mu, ka, lam = params.mu, params.kappa, params.lam
    dplus, dminus = delta_bounds(params, m, provider)
    dbound = dminus if which == "W" else dplus
    if dbound >= 1.0:
        raise ParameterError(f"mu = {mu} too small: the delta bound {dbound:.3g} is not below 1")
    lw, ab, _ = _log_w(z, params, m, _SECTOR[which], strategy)
    S = _eplus_sum(params, m)
    if which == "M":
        pre = (_LOG_2SQRTPI + mu * math.log1p(-lam) + complex(log_gamma(2 * mu + 1, 20))
               - (ka - 1.0 / 6.0) * math.log(mu) - 0.5 * (mu + ka) * math.log1p(-lam * lam)
               - complex(log_gamma(mu - ka + 0.5, 20)) + _log_phase(0.5 * (mu - ka + 1.0 / 3.0)) + ka - S)
    elif which == "W":
        pre = (_LOG_2SQRTPI + (ka + 1.0 / 6.0) * math.log(mu) + 0.5 * ka * math.log1p(-lam * lam)
               + 0.5 * mu * (math.log1p(lam) - math.log1p(-lam)) + _log_phase(0.5 * (ka - mu)) - ka + S)
    else:
        pre = (_LOG_2SQRTPI + mu * math.log1p(-lam) - (ka - 1.0 / 6.0) * math.log(mu)
               - 0.5 * (mu + ka) * math.log1p(-lam * lam) + _log_phase(0.5 * (mu + ka - 1.0 / 3.0)) + ka - S)
    return _finish(pre + lw, rel_error_bound=None, n_terms=m, r_extra=0, method=f"airy-{which}",
                   extras={"delta_bound": dbound, "ab_method": ab.method})


def eval_airy_compact(z, params: ParameterSet, m: int = 3, which: str = "W",
                      strategy: str = "cauchy") -> ExpansionResult:
    """Gamma-ratio form of the Airy expansion; no error bound."""
    z = _check_z(z)
    if which not in _SECTOR:
        raise ValueError("which must be 'M', 'W' or 'Wminus'")
    mu, ka = params.mu, params.kappa
    lw, ab, _ = _log_w(z, params, m, _SECTOR[which], strategy)
    lgp = complex(log_gamma(mu + ka + 0.5, 20))
    lgm = complex(log_gamma(mu - ka + 0.5, 20))
    base = _LOG_2SQRTPI + math.log(mu) / 6.0
    if which == "M":
        pre = base + _log_phase(0.5 * (mu - ka + 1.0 / 3.0)) + complex(log_gamma(2 * mu + 1, 20)) - 0.5 * (lgp + lgm)
    elif which == "W":
        pre = base + _log_phase(0.5 * (ka - mu)) + 0.5 * (lgp - lgm)
    else:
        pre = base + _log_phase(0.5 * (mu + ka - 1.0 / 3.0)) + 0.5 * (lgm - lgp)
    return _finish(pre + lw, rel_error_bound=None, n_terms=m, r_extra=0, method=f"airy-compact-{which}",
                   extras={"ab_method": ab.method})


def airy_identity_residual(w: complex) -> float:
    """Relative residual of ``Ai_0 + e^{-2pi i/3} Ai_1 + e^{2pi i/3} Ai_-1 = 0`` (values and derivatives)."""
    vals = [airy_complex(w, j) for j in (0, 1, -1)]
    ls = max(v.log_scale for v in vals)
    coef = (1.0, _OMEGA, 1.0 / _OMEGA)
    res = []
    for attr in ("ai", "ai_prime"):
        terms = [c * getattr(v, attr) * math.exp(v.log_scale - ls) for c, v in zip(coef, vals)]
        res.append(abs(sum(terms)) / max(abs(t) for t in terms))
    return max(res)


def w_functions(z, params: ParameterSet, m: int = 3, strategy: str = "cauchy") -> dict:
    """``log w_{m,j}(mu, z)`` for ``j = -1, 0, 1`` sharing one ``A, B`` pair."""
    z = _check_z(z)
    zeta, _ = zeta_and_xi_plus(z, params.lam)
    ab = coeff_funcs_AB(z, params, m, strategy=strategy)
    out = {}
    for j in (-1, 0, 1):
        ai = airy_complex(params.mu ** (2.0 / 3.0) * zeta, j)
        out[j] = cmath.log(ai.ai * ab.A + ai.ai_prime * ab.B) + ai.log_scale
    return out


def connection_identity_residual(z, params: ParameterSet, m: int = 3) -> float:
    """Relative residual of ``w_0 + e^{-2pi i/3} w_1 + e^{2pi i/3} w_-1 = 0``."""
    lw = w_functions(z, params, m)
    ref = max(v.real for v in lw.values())
    terms = [cmath.exp(lw[0] - ref), _OMEGA * cmath.exp(lw[1] - ref), cmath.exp(lw[-1] - ref) / _OMEGA]
    return abs(sum(terms)) / max(abs(t) for t in terms)


def gamma_ratio_check(lam: float, mu: float, s_max: int = 2, dps: int = 60) -> float:
    """``|lhs / exp(2 sum E+_{2s+1}(inf) mu^{-2s-1}) - 1|`` for the gamma-ratio identity.

    ``lhs = ((1-lam)/(1+lam))^mu (e^2/(mu^2(1-lam^2)))^{lam mu}
    Gamma(mu+lam mu+1/2)/Gamma(mu-lam mu+1/2)``; the constants are the exact
    rationals of the coefficient table, summed for ``s = 0..s_max``.
    """
    tab = coefficient_table(lam, max(DEFAULT_N_MAX, 2 * s_max + 1))
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    M, L = ctx.mpf(mu), ctx.mpf(lam)
    lhs = (M * ctx.log((1 - L) / (1 + L)) + L * M * (2 - ctx.log(M * M * (1 - L * L)))
           + log_gamma(M + L * M + ctx.mpf(1) / 2, dps) - log_gamma(M - L * M + ctx.mpf(1) / 2, dps))
    rhs = 0
    for s in range(s_max + 1):
        q = tab.exact["eplus_inf"][2 * s + 1]
        rhs += 2 * (ctx.mpf(q.numerator) / q.denominator) / M ** (2 * s + 1)
    return float(abs(ctx.exp(lhs - rhs) - 1))
