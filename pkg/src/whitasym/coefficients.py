"""Coefficient polynomials and exponent coefficients of the LG expansions.

``F_s(z) = z Z^{-3s-3} p_{2s+1}(z)`` with ``p`` generated exactly (rational
arithmetic in ``lam``) by

    p_{2s+3} = -(p + z p') Q + 3(s+1) z (z - 2 lam) p - z/2 sum_j p_{2j+1} p_{2s-2j+1}

where ``Q = Z^2 = z^2 - 4 lam z + 4``.

Odd exponent coefficients are integrated in closed form through
``beta = (z - 2 lam)/Z``.  With ``L = 1 - lam^2`` and ``s = 2m+1`` they
take the shape

    E_s(z)  = K [A(beta) - A(1)] + K (2L/Z) B(4L/Z^2)
    E+_s(z) = K A(beta)          + K (2L/Z) B(4L/Z^2)

with ``A`` an odd polynomial, ``B`` a polynomial and ``K`` a rational
constant.  Even coefficients come from expanding
``-1/2 log(1 + sum F_{2j+1} mu^{-2j-2})`` and need no integration.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache
from math import comb

import mpmath
import numpy as np

from .maps import _lam, big_Z

DEFAULT_N_MAX = 16
COEFF_ALARM = 1e280


class CoefficientOverflowError(ArithmeticError):
    """Coefficient magnitudes no longer fit in double precision."""


# -- exact polynomial helpers (ascending coefficient lists) -----------------

def _padd(a, b):
    n = max(len(a), len(b))
    return [(a[i] if i < len(a) else 0) + (b[i] if i < len(b) else 0) for i in range(n)]


def _pscale(a, c):
    return [c * x for x in a]


def _pmul(a, b):
    out = [Fraction(0)] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x:
            for j, y in enumerate(b):
                out[i + j] += x * y
    return out


def _pderiv(a):
    return [i * a[i] for i in range(1, len(a))] or [Fraction(0)]


def _pint(a):
    return [Fraction(0)] + [a[i] / (i + 1) for i in range(len(a))]


def _peval(a, x):
    acc = 0
    for c in reversed(a):
        acc = acc * x + c
    return acc


def _taylor_shift(a, h):
    """Coefficients of ``a(t + h)`` in powers of ``t``."""
    n = len(a)
    return [sum(a[k] * comb(k, i) * h ** (k - i) for k in range(i, n)) for i in range(n)]


def _pdivide_root(a, r):
    """Quotient ``q`` with ``a(x) - a(r) = (x - r) q(x)``."""
    n = len(a) - 1
    q = [Fraction(0)] * n
    acc = Fraction(0)
    for k in range(n, 0, -1):
        acc = acc * r + a[k]
        q[k - 1] = acc
    return q


def _one_minus_b2_pow(k):
    """``(1 - b^2)^k`` as an ascending polynomial in ``b``."""
    out = [Fraction(0)] * (2 * k + 1)
    for i in range(k + 1):
        out[2 * i] = Fraction((-1) ** i * comb(k, i))
    return out


def p_polynomials(lam, n_max: int) -> list[list[Fraction]]:
    """Exact ``p_{2s+1}`` for ``s = 1..n_max`` (index ``s - 1``)."""
    if n_max < 1:
        raise ValueError("n_max must be at least 1")
    lam = Fraction(lam)
    Q = [Fraction(4), -4 * lam, Fraction(1)]
    zt = [Fraction(0), -2 * lam, Fraction(1)]  # z (z - 2 lam)
    p3 = [-8 * lam, 8 - 2 * lam * lam, Fraction(0), Fraction(-1, 2)]
    polys = [p3]
    for s in range(1, n_max):
        p = polys[s - 1]
        zp = [Fraction(0)] + _pderiv(p)
        nxt = _pscale(_pmul(_padd(p, zp), Q), -1)
        nxt = _padd(nxt, _pscale(_pmul(zt, p), 3 * (s + 1)))
        if s >= 2:
            conv = [Fraction(0)]
            for j in range(1, s):
                conv = _padd(conv, _pmul(polys[j - 1], polys[s - j - 1]))
            nxt = _padd(nxt, _pscale([Fraction(0)] + conv, Fraction(-1, 2)))
        nxt = nxt[: 2 * s + 4]
        polys.append(nxt)
    return polys


@dataclass(frozen=True)
class OddPieces:
    """Exact closed-form pieces of ``E_{2m+1}``."""

    K: Fraction
    A: list[Fraction]
    A_quot: list[Fraction]  # (A(beta) - A(1)) / (beta - 1)
    B: list[Fraction]


def _odd_pieces(p: list[Fraction], lam: Fraction, m: int) -> OddPieces:
    L = 1 - lam * lam
    c = _taylor_shift(p, 2 * lam)
    even = [Fraction(0)]
    for j in range(0, (len(c) + 1) // 2):
        if 2 * j < len(c) and c[2 * j]:
            term = _one_minus_b2_pow(3 * m + 1 - j)
            term = [Fraction(0)] * (2 * j) + term
            even = _padd(even, _pscale(term, c[2 * j] * 4**j * L**j))
    A = _pint(even)
    B = [Fraction(0)]
    for j in range(0, len(c) // 2):
        k = 2 * j + 1
        if k < len(c) and c[k]:
            for i in range(j + 1):
                n_i = 3 * m - j + i + 1
                mono = [Fraction(0)] * n_i + [Fraction(1)]
                coef = c[k] * 2 ** (2 * j + 1) * L**j * Fraction(-1, 2) * comb(j, i) * (-1) ** i / (Fraction(2 * n_i + 1, 2))
                B = _padd(B, _pscale(mono, coef))
    K = 1 / (8 * L * 2 ** (6 * m + 2) * L ** (3 * m + 1))
    return OddPieces(K=K, A=A, A_quot=_pdivide_root(A, Fraction(1)), B=B)


def _even_from_fhat(fvals: dict[int, complex], m_max: int) -> dict[int, complex]:
    """Match powers of ``eps = mu^-2`` in ``-1/2 log(1 + sum F_{2j+1} eps^{j+1})``."""
    x = np.zeros(m_max + 1, dtype=complex)
    for j in range(m_max):
        x[j + 1] = fvals[2 * j + 1]
    # log(1 + x) via  y' = x' / (1 + x)
    y = np.zeros(m_max + 1, dtype=complex)
    for k in range(1, m_max + 1):
        acc = k * x[k]
        for i in range(1, k):
            acc -= i * y[i] * x[k - i]
        y[k] = acc / k
    return {2 * k: -0.5 * y[k] for k in range(1, m_max + 1)}


def _to_float(x: Fraction) -> float:
    v = float(x)
    if not math.isfinite(v) or abs(v) > COEFF_ALARM:
        raise CoefficientOverflowError(
            "coefficient magnitude exceeds double range; use a smaller n_max or higher precision"
        )
    return v


@dataclass(frozen=True)
class CoefficientTable:
    """Per-``lam`` cache of polynomials and connection constants.

    Dictionaries are keyed by the order ``s``.  ``ehat0``, ``l_const`` and
    ``k_const`` hold ``E_s(0)``, ``l_s`` and ``k_s`` for every ``s``;
    ``eplus_inf`` holds ``E+_s(inf)`` (zero for even ``s``).
    """

    lam: float
    n_max: int
    polys: tuple
    ehat0: dict
    l_const: dict
    k_const: dict
    eplus_inf: dict
    exact: dict = field(repr=False, compare=False)
    _pfloat: tuple = field(repr=False, compare=False)
    _odd: dict = field(repr=False, compare=False)

    # -- evaluation -------------------------------------------------------

    def p_value(self, s: int, z: complex) -> complex:
        return np.polyval(self._pfloat[s - 1][::-1], z)

    def fhat_values(self, z: complex, Z: complex, n: int) -> dict[int, complex]:
        """``F_s(z)`` for ``s = 1..n`` given the branch value ``Z``."""
        out = {}
        Zm3 = Z ** -3
        zpow = z * Zm3  # z Z^-3
        for s in range(1, n + 1):
            zpow *= Zm3
            out[s] = zpow * self.p_value(s, z)
        return out

    def ehat_values(self, z: complex, Z: complex, n: int, plus: bool = False) -> dict[int, complex]:
        """``E_s(z)`` (or ``E+_s``) for ``s = 1..n`` on the branch given by ``Z``."""
        if n > self.n_max:
            raise ValueError(f"order {n} exceeds table n_max={self.n_max}")
        if n == 0:
            return {}
        z = complex(z)
        out = {}
        tau = z - 2.0 * self.lam
        beta = tau / Z
        L = 1.0 - self.lam * self.lam
        bm1 = -4.0 * L / (Z * (tau + Z)) if abs(tau + Z) > 1e-3 * abs(Z) else beta - 1.0
        u = 4.0 * L / (Z * Z)
        for s in range(1, n + 1, 2):
            K, A, Aq, B = self._odd[s]
            odd = (2.0 * L / Z) * np.polyval(B[::-1], u)
            if plus:
                out[s] = K * (np.polyval(A[::-1], beta) + odd)
            else:
                out[s] = K * (bm1 * np.polyval(Aq[::-1], beta) + odd)
        if n >= 2:
            f = self.fhat_values(z, Z, n)
            out.update({k: v for k, v in _even_from_fhat(f, n // 2).items() if k <= n})
        return dict(sorted(out.items()))

    def to_json(self) -> str:
        rec = {
            "lambda": self.lam,
            "n_max": self.n_max,
            "polynomials": {str(s): [str(c) for c in self.exact["polys"][s - 1]] for s in range(1, self.n_max + 1)},
            "ehat0": {str(s): float(v) for s, v in self.ehat0.items()},
            "l": {str(s): float(v) for s, v in self.l_const.items()},
            "k": {str(s): float(v) for s, v in self.k_const.items()},
            "eplus_inf": {str(s): float(v) for s, v in self.eplus_inf.items()},
        }
        return json.dumps(rec, indent=2)


@lru_cache(maxsize=64)
def exact_coefficients(lam_q: Fraction, n_max: int) -> dict:
    """Exact rational pieces for the ratio ``lam_q``.

    Keys: ``polys`` (the ``p`` polynomials), ``odd`` (closed-form pieces of
    the odd coefficients) and the constant dictionaries ``ehat0``, ``l``,
    ``k`` and ``eplus_inf`` keyed by ``s``.
    """
    lam_q = Fraction(lam_q)
    polys = p_polynomials(lam_q, n_max)
    odd = {}
    ehat0_q, l_q, k_q, eplus_q = {}, {}, {}, {}
    L = 1 - lam_q * lam_q
    for s in range(1, n_max + 1):
        if s % 2 == 1:
            pc = _odd_pieces(polys[s - 1], lam_q, (s - 1) // 2)
            odd[s] = pc
            a1 = _peval(pc.A, Fraction(1))
            e0 = pc.K * (_peval(pc.A, -lam_q) - a1) + pc.K * L * _peval(pc.B, L)
            l_s = -2 * pc.K * a1
            ehat0_q[s], l_q[s], k_q[s], eplus_q[s] = e0, l_s, l_s - e0, pc.K * a1
        else:
            ehat0_q[s] = l_q[s] = k_q[s] = eplus_q[s] = Fraction(0)
    return {"polys": polys, "odd": odd, "ehat0": ehat0_q, "l": l_q, "k": k_q, "eplus_inf": eplus_q}


@lru_cache(maxsize=32)
def coefficient_table(lam: float, n_max: int = DEFAULT_N_MAX) -> CoefficientTable:
    lam_f = float(lam)
    exact = exact_coefficients(Fraction(lam_f), n_max)
    pfloat = tuple(np.array([_to_float(c) for c in p]) for p in exact["polys"])
    odd_f = {
        s: (_to_float(pc.K), np.array([_to_float(c) for c in pc.A]),
            np.array([_to_float(c) for c in pc.A_quot]), np.array([_to_float(c) for c in pc.B]))
        for s, pc in exact["odd"].items()
    }
    flt = {key: {s: float(v) for s, v in exact[key].items()} for key in ("ehat0", "l", "k", "eplus_inf")}
    return CoefficientTable(lam=lam_f, n_max=n_max, polys=tuple(tuple(p) for p in exact["polys"]),
                            ehat0=flt["ehat0"], l_const=flt["l"], k_const=flt["k"], eplus_inf=flt["eplus_inf"],
                            exact=exact, _pfloat=pfloat, _odd=odd_f)


# -- operation-level API ------------------------------------------------------

def fhat_table(params, n_max: int = DEFAULT_N_MAX) -> CoefficientTable:
    return coefficient_table(_lam(params), n_max)


def fhat(z: complex, params, s: int) -> complex:
    lam = _lam(params)
    tab = coefficient_table(lam, max(s, 2))
    return tab.fhat_values(complex(z), big_Z(z, lam), s)[s]


def ehat1(z: complex, params) -> complex:
    """Closed form of ``E_1`` on the principal branch."""
    lam = _lam(params)
    z = complex(z)
    Z = big_Z(z, lam)
    L = 1.0 - lam * lam
    num = lam * z**3 + 6.0 * (1.0 - 2.0 * lam * lam) * z**2 + 12.0 * lam**3 * z + 8.0 * lam * lam - 16.0
    return num / (24.0 * L * Z**3) - lam / (24.0 * L)


def ehat_odd(z: complex, params, m: int) -> complex:
    lam = _lam(params)
    s = 2 * m + 1
    tab = coefficient_table(lam, max(s, DEFAULT_N_MAX))
    return tab.ehat_values(complex(z), big_Z(z, lam), s)[s]


def ehat_even(z: complex, params, m: int) -> complex:
    if m < 1:
        raise ValueError("even coefficients start at m = 1")
    lam = _lam(params)
    s = 2 * m
    tab = coefficient_table(lam, max(s, DEFAULT_N_MAX))
    return tab.ehat_values(complex(z), big_Z(z, lam), s)[s]


def lg_constants(params, n_max: int = DEFAULT_N_MAX) -> tuple[dict, dict, dict]:
    """``(E_s(0), l_s, k_s)`` for ``s = 1..n_max``."""
    tab = coefficient_table(_lam(params), n_max)
    return tab.ehat0, tab.l_const, tab.k_const


def eplus_coefficients(z: complex, params, s: int) -> complex:
    """``E+_s(z)``; pass ``z = math.inf`` (or ``cmath.inf``) for the constant at infinity."""
    lam = _lam(params)
    tab = coefficient_table(lam, max(s, DEFAULT_N_MAX))
    if isinstance(z, (int, float, complex)) and not cmath.isfinite(complex(z)):
        return complex(tab.eplus_inf[s])
    return tab.ehat_values(complex(z), big_Z(z, lam), s, plus=True)[s]


# -- constants from Stirling matching ---------------------------------------

def _bernoulli(n: int) -> Fraction:
    # Akiyama-Tanigawa
    a = [Fraction(0)] * (n + 1)
    for mm in range(n + 1):
        a[mm] = Fraction(1, mm + 1)
        for j in range(mm, 0, -1):
            a[j - 1] = j * (a[j - 1] - a[j])
    return a[0] if n != 1 else Fraction(-1, 2)


def k_stirling(lam, m: int) -> Fraction:
    """``k_{2m+1}`` from the large-``mu`` expansion of the gamma-ratio identity."""
    lam = Fraction(lam)
    k = 2 * m + 1
    B = _bernoulli(k + 1)
    return B / (k * (k + 1)) * (Fraction(1, 2**k) + (1 - Fraction(1, 2**k)) / (1 + lam) ** k)


def eplus_inf_stirling(lam, m: int) -> Fraction:
    """``E+_{2m+1}(inf)`` from Stirling's series for ``log Gamma``."""
    lam = Fraction(lam)
    k = 2 * m + 1
    B = _bernoulli(k + 1)
    return -Fraction(1, 2) * (1 - Fraction(1, 2**k)) * B / (k * (k + 1)) * (1 / (1 + lam) ** k - 1 / (1 - lam) ** k)


# -- independent quadrature route ---------------------------------------------

def ehat_beta_quadrature(beta_end, lam, s: int, dps: int = 30):
    """``E_s`` at the point where ``beta = beta_end`` by quadrature in ``beta``.

    Uses ``E_s = (8(1-lam^2))^{-1} int_1^beta p(tau(b) + 2 lam) / Zt(b)^{3s-1} db``
    with ``tau(b) = 2b sqrt(L/(1-b^2))`` and ``Zt(b) = 2 sqrt(L/(1-b^2))``,
    evaluated by tanh-sinh quadrature (endpoint singularities are
    integrable).  ``beta_end = -lam`` gives ``E_s(0)``; ``beta_end = -1``
    gives the limit across the cut towards ``-infinity``.
    """
    ctx = mpmath.mp.clone()
    ctx.dps = dps + 10
    lam_q = Fraction(lam)
    L = 1 - ctx.mpf(lam_q.numerator) / lam_q.denominator * ctx.mpf(lam_q.numerator) / lam_q.denominator
    two_lam = 2 * ctx.mpf(lam_q.numerator) / lam_q.denominator
    poly = [ctx.mpf(c.numerator) / c.denominator for c in p_polynomials(lam_q, s)[s - 1]]

    def integrand(b):
        root = ctx.sqrt(L / (1 - b * b))
        t = 2 * b * root + two_lam
        val = ctx.mpf(0)
        for c in reversed(poly):
            val = val * t + c
        return val / (2 * root) ** (3 * s - 1)

    if isinstance(beta_end, Fraction):
        beta_end = ctx.mpf(beta_end.numerator) / beta_end.denominator
    ends = [ctx.mpf(1), ctx.mpf(beta_end)]
    if ends[1] < 0:
        ends = [ends[0], ctx.mpf(0), ends[1]]
    return ctx.quad(integrand, ends) / (8 * L)


def constants_by_quadrature(lam, s: int = 1, dps: int = 30) -> tuple:
    """``(E_s(0), l_s, k_s)`` from :func:`ehat_beta_quadrature`, with ``k_s = l_s - E_s(0)``."""
    e0 = ehat_beta_quadrature(-Fraction(lam), lam, s, dps)
    l_s = ehat_beta_quadrature(-1, lam, s, dps)
    return e0, l_s, l_s - e0
