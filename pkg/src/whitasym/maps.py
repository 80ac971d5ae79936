"""Principal branches of the Liouville-Green variables.

``Z = (z^2 - 4 lam z + 4)^{1/2}`` is positive on ``(0, inf)`` with its cut
along ``gamma2``.  It is assembled from a reference branch whose only cut
in the upper half-plane is the straight chord from the turning point to
the foot of ``gamma2`` on the negative axis; inside the lens between that
chord and ``gamma2`` the sign is flipped.  Points exactly on ``gamma2``
take the limit from the ``S_-1`` side.

``zeta`` is single valued in the upper half-plane.  It is recovered from
``xi+ = (2/3) zeta^{3/2}`` by choosing ``arg zeta`` inside the sector of
the region containing ``z``; close to the turning point a series
inversion replaces the (numerically indeterminate) closed form.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .curves import cut_lens_polygon, level_curves, point_in_polygon, s_minus1_polygon
from .params import local_scale, turning_points

NEAR_TP_RADIUS = 0.1
_SERIES_TERMS = 40

S_MINUS1, S_0, S_1 = -1, 0, 1


def _lam(params) -> float:
    return float(params) if isinstance(params, (int, float)) else params.lam


def big_Z(z: complex, params) -> complex:
    """Principal ``Z(z)``: ``Z > 0`` on the positive axis, ``Z ~ z`` at ``+inf``."""
    lam = _lam(params)
    z = complex(z)
    zp, zm = turning_points(lam)
    x2 = level_curves(lam)[2].end_real
    if z == zp:
        return 0j
    if z.imag == 0.0 and z.real <= x2:
        # lower edge of ℂ⁺ left of gamma2 lies in S_1, where Z ~ z
        return -math.sqrt(z.real * z.real - 4.0 * lam * z.real + 4.0) + 0j
    zc = cmath.sqrt((z - zp) / (z - x2)) * cmath.sqrt(z - x2) * cmath.sqrt(z - zm)
    if point_in_polygon(z, cut_lens_polygon(lam)):
        zc = -zc
    return zc


def xi_offset(lam: float) -> complex:
    """Constant ``xi+ - xi``."""
    return complex(
        lam * math.log(2.0) + 0.5 * (1.0 + lam) * math.log((1.0 - lam) * (1.0 + lam)),
        -0.5 * (1.0 - lam) * math.pi,
    )


def _xi_from_Z(z: complex, Z: complex, lam: float) -> complex:
    return 0.5 * Z - lam * cmath.log(Z + z - 2.0 * lam) - cmath.log((Z - lam * z + 2.0) / z)


def xi_principal(z: complex, params) -> complex:
    """Liouville variable ``xi = int f^{1/2} dz``; real on ``(0, inf)``."""
    lam = _lam(params)
    z = complex(z)
    return _xi_from_Z(z, big_Z(z, lam), lam)


def beta_tau(z: complex, params) -> tuple[complex, complex]:
    """``(beta, tau)`` with ``tau = z - 2 lam`` and ``beta = tau / Z``."""
    lam = _lam(params)
    tau = complex(z) - 2.0 * lam
    return tau / big_Z(z, lam), tau


def in_s_minus1(z: complex, lam: float) -> bool:
    return point_in_polygon(complex(z), s_minus1_polygon(lam))


@lru_cache(maxsize=64)
def _zeta_series(lam: float) -> np.ndarray:
    """Coefficients ``e_k`` with ``zeta = c u (1 + sum_k e_k u^k)``, ``u = z - z_plus``."""
    zp, zm = turning_points(lam)
    n = _SERIES_TERMS
    a = zp - zm
    # sqrt(a + u) / (2 (zp + u)) = sqrt(a)/(2 zp) * (1 + u/a)^{1/2} * (1 + u/zp)^{-1}
    binom = np.zeros(n, dtype=complex)
    c = 1.0 + 0j
    for k in range(n):
        binom[k] = c / a**k
        c *= (0.5 - k) / (k + 1)
    geo = np.array([(-1.0 / zp) ** k for k in range(n)], dtype=complex)
    h = np.convolve(binom, geo)[:n]  # normalised so h[0] = 1
    # (3/2) xi+ / (h0 u^{3/2}) = sum h_k u^k * (3/2)/(k + 3/2)
    q = np.array([h[k] * 1.5 / (k + 1.5) for k in range(n)], dtype=complex)
    # (q)^{2/3} with q[0] = 1
    out = np.zeros(n, dtype=complex)
    out[0] = 1.0
    # power of a series: J. C. P. Miller recurrence
    p = 2.0 / 3.0
    for k in range(1, n):
        s = 0j
        for i in range(1, k + 1):
            s += ((p + 1.0) * i - k) * q[i] * out[k - i]
        out[k] = s / k
    return out


def _zeta_near_tp(z: complex, lam: float) -> complex:
    zp, _ = turning_points(lam)
    u = complex(z) - zp
    coef = _zeta_series(lam)
    return local_scale(lam) * u * np.polyval(coef[::-1], u)


def sector_of(z: complex, lam: float, xi_plus: complex) -> int:
    """Sector label; ties on a boundary curve go to the smaller index."""
    if in_s_minus1(z, lam):
        return S_MINUS1
    return S_0 if xi_plus.real >= 0.0 else S_1


def sector_from_zeta(zeta: complex) -> int:
    """Airy sector containing ``zeta``; boundary rays go to the smaller index."""
    if zeta == 0:
        return S_MINUS1
    a = cmath.phase(zeta)
    if a <= -math.pi / 3.0 or a == math.pi:
        return S_MINUS1
    return S_0 if a <= math.pi / 3.0 else S_1


def zeta_from_xi_plus(xi_plus: complex, sector: int) -> complex:
    w = 1.5 * xi_plus
    if w == 0:
        return 0j
    phi = cmath.phase(w)
    if sector == S_1 and phi < math.pi / 2.0 - 1e-12:
        phi += 2.0 * math.pi
    elif sector == S_MINUS1 and phi > -math.pi / 2.0 + 1e-12:
        phi -= 2.0 * math.pi
    return abs(w) ** (2.0 / 3.0) * cmath.exp(1j * 2.0 * phi / 3.0)


def zeta_and_xi_plus(z: complex, params, near_radius: float = NEAR_TP_RADIUS) -> tuple[complex, complex]:
    """Return ``(zeta, xi_plus)``; ``zeta(z_plus) = 0``."""
    lam = _lam(params)
    z = complex(z)
    zp, _ = turning_points(lam)
    if abs(z - zp) < near_radius:
        zeta = _zeta_near_tp(z, lam)
        return zeta, _xi_plus_from_zeta(zeta)
    xp = xi_principal(z, lam) + xi_offset(lam)
    return zeta_from_xi_plus(xp, sector_of(z, lam, xp)), xp


def _xi_plus_from_zeta(zeta: complex) -> complex:
    if zeta == 0:
        return 0j
    r, a = abs(zeta), cmath.phase(zeta)
    return (2.0 / 3.0) * r**1.5 * cmath.exp(1.5j * a)


def zeta_power(zeta: complex, p: float) -> complex:
    """``zeta**p`` with ``arg zeta`` in ``(-pi, pi]``."""
    if zeta == 0:
        return 0j
    return abs(zeta) ** p * cmath.exp(1j * p * cmath.phase(zeta))


@dataclass(frozen=True)
class BranchValue:
    z: complex
    Z: complex
    xi: complex
    xi_plus: complex
    zeta: complex
    beta: complex
    tau: complex
    sector: int


def branch_value(z: complex, params) -> BranchValue:
    lam = _lam(params)
    z = complex(z)
    Z = big_Z(z, lam)
    xi = _xi_from_Z(z, Z, lam) if Z != 0 else -xi_offset(lam)
    zeta, xp = zeta_and_xi_plus(z, lam)
    if abs(z - turning_points(lam)[0]) < NEAR_TP_RADIUS:
        xp = xi + xi_offset(lam) if Z != 0 else 0j
    tau = z - 2.0 * lam
    beta = tau / Z if Z != 0 else complex(math.inf, math.inf)
    near = abs(z - turning_points(lam)[0]) < NEAR_TP_RADIUS
    sector = sector_from_zeta(zeta) if near else sector_of(z, lam, xp)
    return BranchValue(z=z, Z=Z, xi=xi, xi_plus=xp, zeta=zeta, beta=beta, tau=tau, sector=sector)
