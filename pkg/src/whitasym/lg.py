"""Liouville-Green expansions for M, W and W- with computable error bounds.

All prefactors are composed as logarithms; ``ExpansionResult.value`` is
the exponential when it is representable and ``log_value`` always carries
the full information.  Error bounds are assembled from path integrals of
``|Z F_s / t|`` and ``|Z G_{n,s} / t|`` over a progressive path, which in
polynomial form are free of branch choices:

    |Z F_s / t|       = |p_{2s+1}(t)| / |Z|^{3s+2}
    |Z G_{n,s} / t|   = |t| |Z|^{-3(s+n)-2} |sum_k p_{2k+1} p_{2(s+n-k)-1}|
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from fractions import Fraction

import mpmath
import numpy as np

from .coefficients import DEFAULT_N_MAX, coefficient_table, exact_coefficients
from .geometry import RegionError, RegionLabel, build_progressive_path, classify_region
from .maps import S_0, S_1, S_MINUS1, big_Z, xi_principal
from .oracle import log_gamma
from .params import ParameterSet

DEFAULT_R = 2
CANCELLATION_LIMIT = 1e12
# multiple of the unit roundoff charged per unit of accumulated log magnitude
ROUNDING_FACTOR = 8.0
_U = 2.0**-53

_GL_X, _GL_W = np.polynomial.legendre.leggauss(10)
_TAIL_PANELS = np.array([0.0, 0.5, 0.8, 0.95, 1.0])


class CancellationError(ArithmeticError):
    """The two terms of the connection formula cancel beyond double precision."""


@dataclass(frozen=True)
class ExpansionResult:
    """Value of an expansion together with its relative error bound.

    ``rel_error_bound`` is ``None`` when no bound is available (for the
    compact Airy forms, or when the bound was not requested).
    """

    value: complex
    log_value: complex
    rel_error_bound: float | None
    n_terms: int
    r_extra: int
    method: str
    region: RegionLabel | None = None
    extras: dict = field(default_factory=dict, compare=False)

    @property
    def log10_modulus(self) -> float:
        return self.log_value.real / math.log(10.0)

    @property
    def phase(self) -> float:
        return math.remainder(self.log_value.imag, 2.0 * math.pi)


def _finish(log_value: complex, **kw) -> ExpansionResult:
    lv = complex(log_value.real, math.remainder(log_value.imag, 2.0 * math.pi))
    value = cmath.exp(lv) if lv.real < 709.0 else complex(math.inf, math.inf)
    return ExpansionResult(value=value, log_value=lv, **kw)


def _as_params(params, kappa=None) -> ParameterSet:
    if isinstance(params, ParameterSet):
        return params
    raise TypeError("expected a ParameterSet")


def _table(lam: float, order: int):
    return coefficient_table(lam, max(DEFAULT_N_MAX, order))


def _log_phase(x: float) -> complex:
    """``log(e^{i pi x})`` with the angle reduced mod 2 pi."""
    return complex(0.0, math.remainder(math.pi * x, 2.0 * math.pi))


# -- path integrals ---------------------------------------------------------------

def _scaled_poly(coeffs: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    """``p(t) / T^deg`` from ``x = t/T`` and ``y = 1/T`` (homogeneous Horner)."""
    deg = len(coeffs) - 1
    acc = np.full(x.shape, coeffs[deg], dtype=complex)
    ypow = np.ones(x.shape)
    for k in range(deg - 1, -1, -1):
        ypow = ypow * y
        acc = acc * x + coeffs[k] * ypow
    return acc


def _integrands(t: np.ndarray, lam: float, tab, N: int, mu: float):
    """Rows ``|Z F_s/t|`` (s=1..N) and ``sum_s |Z G_{N,s}/t| / (2 mu^s)``.

    Polynomials are scaled by ``T^deg`` with ``T = max(1, |t|)`` so the far
    tail of the mapped quadrature does not overflow.
    """
    absZ = np.sqrt(np.abs(t * t - 4.0 * lam * t + 4.0))
    T = np.maximum(1.0, np.abs(t))
    x, y = t / T, 1.0 / T
    rho = T / absZ
    P = [None] + [_scaled_poly(tab._pfloat[s - 1], x, y) for s in range(1, N + 1)]
    deg = [None] + [len(tab._pfloat[s - 1]) - 1 for s in range(1, N + 1)]
    F = np.array([np.abs(P[s]) * rho ** deg[s] / absZ ** (3 * s + 2 - deg[s]) for s in range(1, N + 1)])
    G = np.zeros(t.shape)
    for s in range(1, N):
        acc = np.zeros(t.shape, dtype=complex)
        for k in range(s, N):
            acc += P[k] * P[s + N - k - 1]
        d = deg[s] + deg[N - 1]  # every product in the sum has this degree
        G += np.abs(t) * np.abs(acc) * rho**d / absZ ** (3 * (s + N) + 2 - d) / (2.0 * mu**s)
    return F, G


def path_integrals(path, lam: float, N: int, mu: float) -> tuple[np.ndarray, float]:
    """``int |Z F_s / t| |dt|`` for ``s = 1..N`` and the weighted ``G`` sum of ``omega_N``."""
    tab = _table(lam, N)
    a, b = path.nodes[:-1], path.nodes[1:]
    half = 0.5 * (b - a)
    t = (0.5 * (a + b))[:, None] + half[:, None] * _GL_X[None, :]
    wts = np.abs(half)[:, None] * _GL_W[None, :]
    F, G = _integrands(t.ravel(), lam, tab, N, mu)
    IF = F @ wts.ravel()
    IG = float(G @ wts.ravel())
    if path.tail is not None:
        t0 = path.nodes[-1]
        R = max(abs(t0), 1.0)
        us, ws = [], []
        for lo, hi in zip(_TAIL_PANELS[:-1], _TAIL_PANELS[1:]):
            us.append(0.5 * (hi - lo) * _GL_X + 0.5 * (hi + lo))
            ws.append(0.5 * (hi - lo) * _GL_W)
        u, wu = np.concatenate(us), np.concatenate(ws)
        s = R * u / (1.0 - u)
        jac = R / (1.0 - u) ** 2
        F2, G2 = _integrands(t0 + path.tail * s, lam, tab, N, mu)
        IF = IF + F2 @ (wu * jac)
        IG += float(G2 @ (wu * jac))
    return IF, IG


def omega_varpi(path, lam: float, N: int, mu: float) -> tuple[float, float]:
    """``omega_N`` and ``varpi_N`` along ``path``."""
    IF, IG = path_integrals(path, lam, N, mu)
    omega = float(IF[N - 1]) + IG
    varpi = sum(2.0 * float(IF[s]) / mu**s for s in range(0, N - 1))
    return omega, varpi


def _expm1(w: complex) -> complex:
    """``exp(w) - 1`` without cancellation for small ``|w|``."""
    return math.expm1(w.real) * cmath.exp(1j * w.imag) + 2j * math.sin(0.5 * w.imag) * cmath.exp(0.5j * w.imag)


def _assemble_bound(c: list[complex], c_re: list[float], omega: float, varpi: float, mu: float, N: int) -> float:
    """``|exp(sum c_s) - 1| + (omega/mu^N) exp(varpi/mu + sum Re c_s + omega/mu^N)``.

    ``c`` already contains the ``mu^-s`` weights.
    """
    om = omega / mu**N
    try:
        first = abs(_expm1(complex(sum(c)))) if c else 0.0
        return first + om * math.exp(varpi / mu + sum(c_re) + om)
    except OverflowError:
        return math.inf


# -- evaluators ------------------------------------------------------------------

_MODES = {
    # kind: (endpoint j, sign pattern, constant key)
    "M": (1, 1, "ehat0"),
    "W": (2, -1, None),
    "Wminus": (3, 1, None),
    "M_cross": (1, -1, "k_const"),
    "Wminus_cross": (3, -1, "l_const"),
}


def _check_n(n, r):
    if n < 1:
        raise ValueError("n must be a positive integer")
    if r < 0:
        raise ValueError("r must be nonnegative")


def _exponent_terms(kind, E, tab, mu, lo, hi):
    """Weighted exponent coefficients ``sign^s (E_s - const_s)/mu^s`` for ``lo <= s < hi``."""
    _, sign, key = _MODES[kind]
    const = getattr(tab, key) if key else None
    full, real = [], []
    for s in range(lo, hi):
        cs = const[s] if const is not None else 0.0
        sg = sign**s
        full.append(sg * (E[s] - cs) / mu**s)
        real.append(sg * (E[s].real - cs) / mu**s)
    return full, real


def _log_magnitude(p: ParameterSet, z: complex, Z: complex) -> float:
    """Sum of the moduli of the pieces added to form the log of the result."""
    mu, ka, lam = p.mu, p.kappa, p.lam
    xi_mag = 0.5 * abs(Z) + lam * abs(cmath.log(Z + z - 2 * lam)) + abs(cmath.log((Z - lam * z + 2) / z))
    return mu * (xi_mag + 1.0 + abs(math.log(4 * mu))) + ka * (abs(math.log(mu)) + 2.0) + abs(cmath.log(z / Z)) + 2.0


def _log_prefactor(kind, p: ParameterSet, z: complex, Z: complex, xi: complex) -> complex:
    mu, ka, lam = p.mu, p.kappa, p.lam
    half = 0.5 * cmath.log(z / Z)
    if kind == "M":
        return (mu * math.log(4 * mu) + ka * math.log(2 * (1 - lam)) + 0.5 * math.log(2 * mu)
                + half + mu * (xi - 1.0))
    if kind == "W":
        return ka * math.log(mu / (2 * math.e)) - mu * math.log1p(-lam) + half - mu * xi
    if kind == "Wminus":
        return _log_phase(ka) + mu * math.log1p(-lam) + ka * math.log(2 * math.e / mu) + half + mu * xi
    if kind == "M_cross":
        return (_log_phase(0.5 + mu - ka) - mu * math.log1p(-lam * lam) - ka * math.log(2 * (1 + lam))
                + mu * math.log(4 * mu / math.e) + 0.5 * math.log(2 * mu) + half - mu * xi)
    if kind == "Wminus_cross":
        return (_log_phase(mu - 0.5) - mu * math.log1p(lam)
                + ka * math.log(math.e / (2 * mu * (1 - lam * lam))) + half - mu * xi)
    raise ValueError(kind)


_EXACT_KEY = {"ehat0": "ehat0", "k_const": "k", "l_const": "l"}


def _mpq(ctx, q):
    return ctx.mpf(q.numerator) / q.denominator


def _mp_poly(ctx, coeffs, x):
    acc = ctx.mpf(0)
    for c in reversed(coeffs):
        acc = acc * x + _mpq(ctx, c)
    return acc


def _ehat_mp(ctx, exact, lam_q, z, Z, n):
    """``E_s(z)`` for ``s < n`` in the working precision of ``ctx`` (exact coefficients)."""
    lam = _mpq(ctx, lam_q)
    L = 1 - lam * lam
    tau = z - 2 * lam
    beta = tau / Z
    u = 4 * L / (Z * Z)
    out = {}
    for s in range(1, n, 2):
        pc = exact["odd"][s]
        odd = (2 * L / Z) * _mp_poly(ctx, pc.B, u)
        out[s] = _mpq(ctx, pc.K) * ((beta - 1) * _mp_poly(ctx, pc.A_quot, beta) + odd)
    m_max = (n - 1) // 2
    if m_max:
        x = [ctx.mpf(0)] * (m_max + 1)
        Zm3 = Z ** -3
        for j in range(m_max):
            s = 2 * j + 1
            x[j + 1] = z * Zm3 ** (s + 1) * _mp_poly(ctx, exact["polys"][s - 1], z)
        y = [ctx.mpf(0)] * (m_max + 1)
        for k in range(1, m_max + 1):
            acc = k * x[k]
            for i in range(1, k):
                acc -= i * y[i] * x[k - i]
            y[k] = acc / k
        for k in range(1, m_max + 1):
            out[2 * k] = -y[k] / 2
    return out


def _log_value_mp(kind, p: ParameterSet, z: complex, Zd: complex, n: int, dps: int):
    """Log of the truncated expansion in ``dps`` digits; the branch of ``Z`` follows ``Zd``."""
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    z = ctx.mpc(z)
    mu, ka = ctx.mpf(p.mu), ctx.mpf(p.kappa)
    lam = ka / mu
    Z = ctx.sqrt(z * z - 4 * lam * z + 4)
    if (complex(Z) * Zd.conjugate()).real < 0:
        Z = -Z
    xi = Z / 2 - lam * ctx.log(Z + z - 2 * lam) - ctx.log((Z - lam * z + 2) / z)
    if abs(complex(xi) - xi_principal(complex(z), p.lam)) > 1e-6 * (1 + abs(complex(xi))):
        raise ArithmeticError("extended-precision branch does not match the double-precision branch")
    half = ctx.log(z / Z) / 2
    ipi = ctx.mpc(0, 1) * ctx.pi
    e = ctx.e
    if kind == "M":
        pre = mu * ctx.log(4 * mu) + ka * ctx.log(2 * (1 - lam)) + ctx.log(2 * mu) / 2 + half + mu * (xi - 1)
    elif kind == "W":
        pre = ka * ctx.log(mu / (2 * e)) - mu * ctx.log(1 - lam) + half - mu * xi
    elif kind == "Wminus":
        pre = ipi * ka + mu * ctx.log(1 - lam) + ka * ctx.log(2 * e / mu) + half + mu * xi
    elif kind == "M_cross":
        pre = (ipi * (ctx.mpf(1) / 2 + mu - ka) - mu * ctx.log(1 - lam * lam) - ka * ctx.log(2 * (1 + lam))
               + mu * ctx.log(4 * mu / e) + ctx.log(2 * mu) / 2 + half - mu * xi)
    else:
        pre = (ipi * (mu - ctx.mpf(1) / 2) - mu * ctx.log(1 + lam)
               + ka * ctx.log(e / (2 * mu * (1 - lam * lam))) + half - mu * xi)
    _, sign, key = _MODES[kind]
    lam_q = Fraction(p.kappa) / Fraction(p.mu)
    exact = exact_coefficients(lam_q, max(n, 2))
    E = _ehat_mp(ctx, exact, lam_q, z, Z, n)
    for s in range(1, n):
        cs = _mpq(ctx, exact[_EXACT_KEY[key]][s]) if key else 0
        pre += sign**s * (E[s] - cs) / mu**s
    two_pi = 2 * ctx.pi
    im = pre.imag - two_pi * ctx.floor((pre.imag + ctx.pi) / two_pi)
    return ctx.mpc(pre.real, im)


def _evaluate(kind, z, params, n, r, bound, label=None, dps=None):
    p = _as_params(params)
    _check_n(n, r)
    z = complex(z)
    j = _MODES[kind][0]
    N = n + r
    tab = _table(p.lam, N)
    Z = big_Z(z, p.lam)
    xi = xi_principal(z, p.lam)
    E = tab.ehat_values(z, Z, max(N - 1, 1)) if N > 1 else {}
    terms, _ = _exponent_terms(kind, E, tab, p.mu, 1, n)
    log_value = _log_prefactor(kind, p, z, Z, xi) + sum(terms)
    extras = {}
    eta = None
    if bound:
        path = build_progressive_path(z, j, p)
        omega, varpi = omega_varpi(path, p.lam, N, p.mu)
        c, c_re = _exponent_terms(kind, E, tab, p.mu, n, N)
        trunc = _assemble_bound(c, c_re, omega, varpi, p.mu, N)
        rounding = ROUNDING_FACTOR * _U * (_log_magnitude(p, z, Z) + sum(abs(t) for t in terms))
        eta = trunc + rounding
        extras = {"omega": omega, "varpi": varpi, "eta_truncation": trunc, "rounding": rounding,
                  "path_nodes": len(path.nodes)}
    if dps is not None:
        lv_mp = _log_value_mp(kind, p, z, Z, n, int(dps))
        extras["log_value_mp"] = lv_mp
        log_value = complex(lv_mp)
    return _finish(log_value, rel_error_bound=eta, n_terms=n, r_extra=r, method=f"lg-{kind}",
                   region=label, extras=extras)


def _require(label: RegionLabel, j: int, sectors, what: str, alt: str):
    if not label.in_Z(j):
        raise RegionError(f"{what}: z is within delta of gamma{j}; use the Airy expansion")
    if label.sector not in sectors:
        raise RegionError(f"{what}: z is in sector S_{label.sector}; use {alt}")


def eval_M_lg(z, params, n: int = 11, r: int = DEFAULT_R, bound: bool = True,
              dps: int | None = None) -> ExpansionResult:
    """``M_{kappa,mu}(mu z)`` for ``z`` in ``Z_1`` and ``S_-1 or S_0``."""
    label = classify_region(z, params)
    _require(label, 1, (S_MINUS1, S_0), "eval_M_lg", "eval_crosscut(which='M')")
    return _evaluate("M", z, params, n, r, bound, label, dps)


def eval_W_lg(z, params, n: int = 11, r: int = DEFAULT_R, bound: bool = True,
              dps: int | None = None) -> ExpansionResult:
    """``W_{kappa,mu}(mu z)`` for ``z`` in ``Z_2``."""
    label = classify_region(z, params)
    _require(label, 2, (S_MINUS1, S_0, S_1), "eval_W_lg", "")
    return _evaluate("W", z, params, n, r, bound, label, dps)


def eval_Wminus_lg(z, params, n: int = 11, r: int = DEFAULT_R, bound: bool = True,
              dps: int | None = None) -> ExpansionResult:
    """``W_{-kappa,mu}(mu z e^{-pi i})`` for ``z`` in ``Z_3`` and ``S_0 or S_1``."""
    label = classify_region(z, params)
    _require(label, 3, (S_0, S_1), "eval_Wminus_lg", "eval_crosscut(which='Wminus')")
    return _evaluate("Wminus", z, params, n, r, bound, label, dps)


def eval_crosscut(z, params, n: int = 11, r: int = DEFAULT_R, which: str = "M",
                  bound: bool = True, dps: int | None = None) -> ExpansionResult:
    """Principal-value forms beyond ``gamma2``: M in ``S_1``, W- in ``S_-1``."""
    label = classify_region(z, params)
    if which == "M":
        _require(label, 1, (S_1,), "eval_crosscut(M)", "eval_M_lg")
        return _evaluate("M_cross", z, params, n, r, bound, label, dps)
    if which == "Wminus":
        _require(label, 3, (S_MINUS1,), "eval_crosscut(Wminus)", "eval_Wminus_lg")
        return _evaluate("Wminus_cross", z, params, n, r, bound, label, dps)
    raise ValueError("which must be 'M' or 'Wminus'")


def eval_lg(which: str, z, params, n: int = 11, r: int = DEFAULT_R, bound: bool = True,
            dps: int | None = None) -> ExpansionResult:
    """Dispatch to the principal or cross-cut form according to the sector of ``z``.

    With ``dps`` set the value is also formed in that many digits and kept
    in ``extras['log_value_mp']``; the bound is unaffected.
    """
    label = classify_region(z, params)
    if which == "M":
        if label.sector == S_1:
            return eval_crosscut(z, params, n, r, "M", bound, dps)
        return eval_M_lg(z, params, n, r, bound, dps)
    if which == "W":
        return eval_W_lg(z, params, n, r, bound, dps)
    if which == "Wminus":
        if label.sector == S_MINUS1:
            return eval_crosscut(z, params, n, r, "Wminus", bound, dps)
        return eval_Wminus_lg(z, params, n, r, bound, dps)
    raise ValueError("which must be 'M', 'W' or 'Wminus'")


def error_bound(z, params, n: int, r: int, j: int) -> tuple[float, float, float]:
    """``(omega_{n+r,j}, varpi_{n+r,j}, eta bound)`` for the expansion recessive at ``z^(j)``.

    For ``j = 1`` (``3``) the cross-cut constants are used when ``z`` lies
    in ``S_1`` (``S_-1``).
    """
    p = _as_params(params)
    label = classify_region(z, p)
    kind = {1: "M", 2: "W", 3: "Wminus"}[j]
    if j == 1 and label.sector == S_1:
        kind = "M_cross"
    elif j == 3 and label.sector == S_MINUS1:
        kind = "Wminus_cross"
    res = _evaluate(kind, z, p, n, r, True, label)
    return res.extras["omega"], res.extras["varpi"], res.extras["eta_truncation"]


def connection_coefficients(params) -> tuple[complex, complex]:
    """Logs of ``c1, c2`` in ``M = c1 W + c2 W-``."""
    mu, ka = params.mu, params.kappa
    lg2 = complex(log_gamma(2 * mu + 1, 20))
    lc1 = _log_phase(0.5 + mu - ka) + lg2 - complex(log_gamma(mu + ka + 0.5, 20))
    lc2 = _log_phase(-ka) + lg2 - complex(log_gamma(mu - ka + 0.5, 20))
    return lc1, lc2


def eval_by_connection(z, params, n: int = 11, r: int = DEFAULT_R, bound: bool = True,
              dps: int | None = None) -> ExpansionResult:
    """``W_{-kappa,mu}(mu z e^{-pi i})`` from the M and W expansions on ``Z_1 and Z_2``.

    The bound is the additive propagation ``(|A| eta_M + |B| eta_W) / |A - B|``
    with ``A = M / c2`` and ``B = (c1/c2) W``.
    """
    p = _as_params(params)
    label = classify_region(z, p)
    if not (label.in_Z1 and label.in_Z2):
        raise RegionError("eval_by_connection needs z in Z_1 and Z_2")
    M = eval_lg("M", z, p, n, r, bound)
    W = eval_W_lg(z, p, n, r, bound)
    lc1, lc2 = connection_coefficients(p)
    lA = M.log_value - lc2
    lB = W.log_value + lc1 - lc2
    top = max(lA.real, lB.real)
    a = cmath.exp(lA - top)
    b = cmath.exp(lB - top)
    diff = a - b
    ratio = max(abs(a), abs(b)) / abs(diff) if diff != 0 else math.inf
    if ratio > CANCELLATION_LIMIT:
        raise CancellationError(f"terms cancel by a factor {ratio:.3g}; double precision is exhausted")
    log_value = top + cmath.log(diff)
    eta = None
    if bound:
        eta = (abs(a) * M.rel_error_bound + abs(b) * W.rel_error_bound) / abs(diff) + ratio * 4e-16
    return _finish(log_value, rel_error_bound=eta, n_terms=n, r_extra=r, method="connection",
                   region=label, extras={"cancellation": ratio})
