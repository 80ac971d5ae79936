"""High-precision reference values of Whittaker functions.

Everything here runs in ``mpmath`` at an explicit digit count; the
precision is always passed in, never taken from the global context.
Accuracy estimates come from repeating the computation at a higher
working precision (series, finite sums) or from the quadrature error
estimate, never from an assumed figure.

Arguments are given as ``z`` together with an optional ``rotate`` so that
the function is evaluated at ``z * exp(i pi rotate)`` with
``log`` of the argument equal to ``log z + i pi rotate``; this is how
``W_{-kappa,mu}(x e^{-pi i})`` is reached without leaving the principal
``log``.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass

import mpmath
from mpmath import mp

DEFAULT_DIGITS = int(os.environ.get("WHITASYM_DIGITS", "30"))


class OracleError(ArithmeticError):
    """The reference computation did not converge or does not apply."""


@dataclass(frozen=True)
class OracleValue:
    value: complex
    est_accuracy: float
    method: str
    mp_value: object = None

    @property
    def log_abs(self) -> float:
        return float(mpmath.log(abs(self.mp_value))) if self.mp_value is not None else math.log(abs(self.value))


def _ctx(dps):
    ctx = mpmath.mp.clone()
    ctx.dps = dps
    return ctx


# -- gamma ---------------------------------------------------------------------

def log_gamma(x, dps: int = DEFAULT_DIGITS):
    """``log Gamma(x)`` by Stirling's series after an upward shift.

    The result may differ from the principal log-gamma by a multiple of
    ``2 pi i``, which is irrelevant once exponentiated or differenced.
    """
    ctx = _ctx(dps + 10)
    x = ctx.mpc(x)
    if x.imag == 0 and x.real <= 0 and x.real == ctx.floor(x.real):
        raise OracleError(f"Gamma has a pole at {x}")
    shift = max(0, int(math.ceil(dps * 1.2 - float(x.real))) + 1)
    acc = ctx.mpc(0)
    prod = ctx.mpc(1)
    for k in range(shift):
        prod *= x + k
        if abs(prod) > ctx.mpf(10) ** 100:
            acc += ctx.log(prod)
            prod = ctx.mpc(1)
    acc += ctx.log(prod)
    y = x + shift
    s = (y - 0.5) * ctx.log(y) - y + ctx.log(2 * ctx.pi) / 2
    y2 = y * y
    yp = y
    eps = ctx.mpf(10) ** (-(dps + 8))
    for k in range(1, 200):
        term = ctx.bernoulli(2 * k) / ((2 * k) * (2 * k - 1) * yp)
        s += term
        if abs(term) < eps * abs(s):
            break
        yp *= y2
    return s - acc


def gamma_reference(x, dps: int = DEFAULT_DIGITS):
    """``Gamma(x)`` as an ``mpc`` at ``dps`` digits."""
    ctx = _ctx(dps)
    return ctx.exp(log_gamma(x, dps))


def log_gamma_ratio(a, b, dps: int = DEFAULT_DIGITS):
    """``log(Gamma(a) / Gamma(b))``."""
    return log_gamma(a, dps) - log_gamma(b, dps)


# -- M ---------------------------------------------------------------------------

def _kummer_series(a, b, x, ctx):
    """``M(a, b, x)`` Maclaurin sum; returns (value, terms used)."""
    term = ctx.mpc(1)
    total = ctx.mpc(1)
    eps = ctx.eps
    for s in range(0, 100000):
        term *= (a + s) / (b + s) * x / (s + 1)
        total += term
        if s > abs(x) and abs(term) <= eps * abs(total):
            return total, s + 1
    raise OracleError("Kummer series did not converge")


def _log_arg(z, rotate, ctx):
    z = ctx.mpc(z)
    return ctx.log(z) + ctx.mpc(0, 1) * ctx.pi * rotate


def _M_series(z, mu, kappa, dps, rotate):
    extra = int(abs(complex(z)) / 2.3) + 10
    ctx = _ctx(dps + extra)
    lx = _log_arg(z, rotate, ctx)
    x = ctx.exp(lx)
    mu, kappa = ctx.mpf(mu), ctx.mpf(kappa)
    a = 0.5 + mu - kappa
    b = 1 + 2 * mu
    if x.real < 0:
        m, _ = _kummer_series(b - a, b, -x, ctx)
        return ctx.exp((mu + 0.5) * lx + x / 2) * m
    m, _ = _kummer_series(a, b, x, ctx)
    return ctx.exp((mu + 0.5) * lx - x / 2) * m


def whittaker_M_reference(z, mu, kappa, dps: int = DEFAULT_DIGITS, rotate: float = 0) -> OracleValue:
    """``M_{kappa,mu}(z e^{i pi rotate})`` from the Maclaurin series of Kummer's function."""
    if float(2 * mu) <= 0 and float(2 * mu) == int(2 * mu):
        raise OracleError("2 mu must not be a nonpositive integer")
    v1 = _M_series(z, mu, kappa, dps, rotate)
    v2 = _M_series(z, mu, kappa, dps + 15, rotate)
    acc = float(abs(v1 - v2) / abs(v2)) if v2 != 0 else 0.0
    return OracleValue(complex(v2), max(acc, 10.0 ** (-dps)), "series", v2)


def whittaker_M_quadrature(z, mu, kappa, dps: int = DEFAULT_DIGITS) -> OracleValue:
    """``M_{kappa,mu}(z)`` from the Euler-type integral over ``[-1, 1]``."""
    if not (mu + kappa > -0.5 and mu - kappa > -0.5):
        raise OracleError("integral representation needs Re(mu +- kappa) > -1/2")
    ctx = _ctx(dps + 10)
    x = ctx.mpc(z)
    mu, kappa = ctx.mpf(mu), ctx.mpf(kappa)
    p, q = mu - 0.5 - kappa, mu + kappa - 0.5
    lt = _log_t_scale(x, p, q, ctx)

    def integrand(t):
        return ctx.exp(x * t / 2 - lt + p * ctx.log1p(t) + q * ctx.log1p(-t)) if -1 < t < 1 else ctx.mpf(0)

    # split at the saddle of the integrand for large |z|
    pts = sorted({ctx.mpf(-1), ctx.mpf(1), ctx.mpf(0), _saddle(x, p, q, ctx)})
    val, err = ctx.quad(integrand, pts, error=True, maxdegree=10)
    pref = (log_gamma(1 + 2 * mu, dps + 10) + (mu + 0.5) * ctx.log(x) - 2 * mu * ctx.log(2)
            - log_gamma(mu - kappa + 0.5, dps + 10) - log_gamma(mu + kappa + 0.5, dps + 10) + lt)
    out = ctx.exp(pref) * val
    acc = float(abs(err / val)) if val != 0 else 0.0
    return OracleValue(complex(out), max(acc, 10.0 ** (-dps)), "quadrature", out)


def _saddle(x, p, q, ctx):
    # maximiser of Re(x t/2 + p log(1+t) + q log(1-t)) on (-1, 1) for real-ish x
    xr = ctx.re(x)
    lo, hi = ctx.mpf(-1) + ctx.mpf(10) ** -12, ctx.mpf(1) - ctx.mpf(10) ** -12
    g = lambda t: xr / 2 + p / (1 + t) - q / (1 - t)
    if g(lo) * g(hi) > 0:
        return ctx.mpf(0)
    return ctx.findroot(g, (lo, hi), solver="bisect", tol=1e-20)


def _log_t_scale(x, p, q, ctx):
    t = _saddle(x, p, q, ctx)
    return ctx.re(x) * t / 2 + p * ctx.log1p(t) + q * ctx.log1p(-t)


# -- W ---------------------------------------------------------------------------

def _finite_order(mu, kappa):
    n = mu + kappa - 0.5
    r = round(n)
    return r if r >= 0 and abs(n - r) < 1e-12 else None


def _W_finite(z, mu, kappa, dps, rotate, N):
    ctx = _ctx(dps + 10)
    ly = _log_arg(z, rotate, ctx)
    y = ctx.exp(ly)
    mu, kappa = ctx.mpf(mu), ctx.mpf(kappa)
    # Gamma(mu-kappa+s+1/2)/Gamma(mu+kappa-s+1/2) via exact products from s=0
    lg0 = log_gamma(mu - kappa + 0.5, dps + 10) - log_gamma(mu + kappa + 0.5, dps + 10)
    total = ctx.mpc(0)
    ratio = ctx.mpc(1)  # Gamma(mu-kappa+s+1/2)Gamma(mu+kappa+1/2)/(Gamma(mu-kappa+1/2)Gamma(mu+kappa-s+1/2) s! y^s)
    for s in range(N + 1):
        total += ratio
        ratio *= (mu - kappa + s + 0.5) * (mu + kappa - s - 0.5) / ((s + 1) * y)
    # leading factor Gamma(mu+kappa+1/2)/Gamma(mu-kappa+1/2) cancels against lg0 normalisation
    return ctx.exp(kappa * ly - y / 2 + lg0 - lg0) * total


def _W_integral(z, mu, kappa, dps, rotate):
    ctx = _ctx(dps + 10)
    lx = _log_arg(z, rotate, ctx)
    x = ctx.exp(lx)
    mu, kappa = ctx.mpf(mu), ctx.mpf(kappa)
    a = 0.5 + mu - kappa
    b = 1 + 2 * mu
    if a.real <= 0:
        raise OracleError("integral branch needs Re(mu - kappa + 1/2) > 0")
    argx = float(ctx.im(lx))
    if abs(argx) >= math.pi - 1e-15 and abs(argx) > math.pi:
        raise OracleError("argument outside the continued integral's range")
    theta = -argx if abs(argx) <= math.pi / 2 else -argx + math.copysign(math.pi / 4, argx)
    e = ctx.expj(theta)
    c = b - a - 1
    xe = x * e
    # peak of s^{a-1} e^{-Re(xe) s}
    peak = (a - 1) / ctx.re(xe) if a > 1 else ctx.mpf(1)
    lscale = (a - 1) * ctx.log(peak) - ctx.re(xe) * peak if a > 1 else ctx.mpf(0)

    def integrand(s):
        if s == 0:
            return ctx.mpc(0) if a > 1 else ctx.inf
        t = s * e
        return ctx.exp(-xe * s + (a - 1) * ctx.log(s) + c * ctx.log(1 + t) - lscale)

    pts = [ctx.mpf(0), peak / 2, peak, 2 * peak, 4 * peak + 10, ctx.inf]
    val, err = ctx.quad(integrand, pts, error=True, maxdegree=10)
    pref = (mu + 0.5) * lx - x / 2 - log_gamma(a, dps + 10) + a * ctx.log(e) + lscale
    out = ctx.exp(pref) * val
    return out, float(abs(err / val)) if val != 0 else 0.0


def whittaker_W_reference(z, mu, kappa, dps: int = DEFAULT_DIGITS, rotate: float = 0) -> OracleValue:
    """``W_{kappa,mu}(z e^{i pi rotate})``.

    Uses the terminating sum when ``mu + kappa - 1/2`` is a nonnegative
    integer and the Laplace-type integral of ``U`` otherwise.
    """
    N = _finite_order(mu, kappa)
    if N is not None:
        v1 = _W_finite(z, mu, kappa, dps, rotate, N)
        v2 = _W_finite(z, mu, kappa, dps + 15, rotate, N)
        acc = float(abs(v1 - v2) / abs(v2))
        return OracleValue(complex(v2), max(acc, 10.0 ** (-dps)), "finite_sum", v2)
    if mu - kappa + 0.5 <= 0:
        raise OracleError(f"no reference branch for W with mu={mu}, kappa={kappa}")
    v, err = _W_integral(z, mu, kappa, dps, rotate)
    return OracleValue(complex(v), max(err, 10.0 ** (-dps)), "quadrature", v)


def whittaker_W_integral(z, mu, kappa, dps: int = DEFAULT_DIGITS, rotate: float = 0) -> OracleValue:
    """Integral branch of :func:`whittaker_W_reference`, forced."""
    v, err = _W_integral(z, mu, kappa, dps, rotate)
    return OracleValue(complex(v), max(err, 10.0 ** (-dps)), "quadrature", v)


def whittaker_Wminus_reference(z, mu, kappa, dps: int = DEFAULT_DIGITS) -> OracleValue:
    """``W_{-kappa,mu}(z e^{-pi i})``, recessive at ``z = infinity e^{pi i}``."""
    return whittaker_W_reference(z, mu, -kappa, dps=dps, rotate=-1)


# -- reflections and the connection formula -------------------------------------

_REFERENCE = {
    "M": whittaker_M_reference,
    "W": whittaker_W_reference,
    "Wminus": whittaker_Wminus_reference,
}


def symmetry_reflection(which: str, z, mu, kappa, dps: int = DEFAULT_DIGITS, evaluator=None) -> OracleValue:
    """Evaluate anywhere in the plane through upper-half-plane values.

    ``which`` is ``"M"``, ``"W"`` or ``"Wminus"``.  For ``Im z < 0`` the
    Schwarz reflections are applied; for ``"Wminus"`` in the lower half
    plane this yields the companion ``W_{-kappa,mu}(z e^{pi i})``.
    ``"M+"``/``"M-"`` give ``M_{kappa,mu}(z e^{+-pi i})`` through the
    continuation ``+-i e^{+-mu pi i} M_{-kappa,mu}(z)``.
    """
    ev = evaluator or (lambda w, k, z_: _REFERENCE[w](z_, mu, k, dps=dps))
    if not hasattr(z, "conjugate"):
        z = complex(z)
    if which in ("M+", "M-"):
        sgn = 1 if which == "M+" else -1
        inner = ev("M", -kappa, z)
        ctx = _ctx(dps)
        fac = sgn * 1j * ctx.expj(sgn * ctx.pi * mu)
        v = fac * (inner.mp_value if inner.mp_value is not None else inner.value)
        return OracleValue(complex(v), inner.est_accuracy, "reflection", v)
    if z.imag < 0:
        inner = ev(which, kappa, z.conjugate())
        v = inner.mp_value.conjugate() if inner.mp_value is not None else None
        return OracleValue(inner.value.conjugate(), inner.est_accuracy, "reflection", v)
    return ev(which, kappa, z)


def connection_terms(z, mu, kappa, dps: int = DEFAULT_DIGITS):
    """The three pieces of ``M = c1 W + c2 W_-`` at argument ``z`` in the upper half plane."""
    ctx = _ctx(dps + 10)
    M = whittaker_M_reference(z, mu, kappa, dps)
    W = whittaker_W_reference(z, mu, kappa, dps)
    Wm = whittaker_Wminus_reference(z, mu, kappa, dps)
    lg2 = log_gamma(2 * mu + 1, dps + 10)
    i = ctx.mpc(0, 1)
    c1 = i * ctx.expj((mu - kappa) * ctx.pi) * ctx.exp(lg2 - log_gamma(mu + kappa + 0.5, dps + 10))
    c2 = ctx.expj(-kappa * ctx.pi) * ctx.exp(lg2 - log_gamma(mu - kappa + 0.5, dps + 10))
    return M, W, Wm, c1, c2


def connection_residual(z, mu, kappa, dps: int = DEFAULT_DIGITS) -> tuple[float, float]:
    """Relative residual of the connection formula and the combined accuracy estimate."""
    M, W, Wm, c1, c2 = connection_terms(z, mu, kappa, dps)
    t1 = c1 * W.mp_value
    t2 = c2 * Wm.mp_value
    scale = max(abs(M.mp_value), abs(t1), abs(t2))
    res = abs(M.mp_value - t1 - t2) / scale
    acc = max(M.est_accuracy, W.est_accuracy, Wm.est_accuracy)
    return float(res), acc
