"""Level curves ``Re xi+ = 0`` through the upper turning point.

The three curves leave ``z_plus`` at mutual angles of 2pi/3.  ``gamma1``
runs off to infinity in the upper half-plane, ``gamma2`` ends on the
negative real axis and ``gamma3`` on the positive real axis.  They are
traced by RK4 on the unit direction field ``i conj(f^1/2) / |f^1/2|``,
whose sign is carried along the curve by continuity, so no branch of
``f^1/2`` is ever needed.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .params import theta_plus, turning_points

# arg(zeta) of each curve near the turning point
CURVE_ZETA_ANGLES = {1: math.pi / 3.0, 2: math.pi, 3: -math.pi / 3.0}

START_OFFSET = 1e-5
FAR_RADIUS = 2.0e3


@dataclass(frozen=True)
class LevelCurve:
    """Polyline approximation of one curve ``gamma_j``.

    ``nodes`` starts at the turning point.  ``end_real`` is the real-axis
    crossing for gamma2/gamma3 and ``None`` for gamma1, whose last node lies
    at radius ``FAR_RADIUS`` and continues along ``tail_direction``.
    """

    j: int
    nodes: np.ndarray
    end_real: float | None
    tail_direction: complex

    def distance(self, z: complex) -> float:
        return polyline_distance(z, self.nodes, self.tail_direction if self.end_real is None else None)


def _direction(z: complex, lam: float, prev: complex) -> complex:
    g = cmath.sqrt((z * z - 4.0 * lam * z + 4.0) / (4.0 * z * z))
    v = 1j * g.conjugate() / abs(g)
    return v if (v * prev.conjugate()).real >= 0.0 else -v


def _trace(lam: float, j: int) -> LevelCurve:
    zp, _ = turning_points(lam)
    d = cmath.exp(1j * (CURVE_ZETA_ANGLES[j] - theta_plus(lam)))
    z = zp + START_OFFSET * d
    nodes = [zp, z]
    end_real = None
    for _ in range(400000):
        r = abs(z - zp)
        h = min(0.02 * max(r, 1e-4), 0.01 * max(abs(z), 1.0), 0.25 * max(z.imag, 1e-3) if j != 1 else 1e9)
        h = max(h, 1e-7)
        if j == 1:
            h = max(h, 0.01 * abs(z)) if abs(z) > 5 else h
        k1 = _direction(z, lam, d)
        k2 = _direction(z + 0.5 * h * k1, lam, k1)
        k3 = _direction(z + 0.5 * h * k2, lam, k2)
        k4 = _direction(z + h * k3, lam, k3)
        step = (k1 + 2.0 * k2 + 2.0 * k3 + k4) / 6.0
        step /= abs(step)
        znew = z + h * step
        if j != 1 and znew.imag <= 0.0:
            t = z.imag / (z.imag - znew.imag)
            end_real = (z + t * (znew - z)).real
            nodes.append(complex(end_real, 0.0))
            break
        z, d = znew, step
        nodes.append(z)
        if j == 1 and abs(z) >= FAR_RADIUS:
            break
    else:  # pragma: no cover - defensive
        raise RuntimeError(f"level curve gamma{j} did not terminate for lam={lam}")
    arr = np.asarray(nodes, dtype=complex)
    tail = arr[-1] - arr[-2]
    return LevelCurve(j=j, nodes=arr, end_real=end_real, tail_direction=tail / abs(tail))


@lru_cache(maxsize=64)
def level_curves(lam: float) -> dict[int, LevelCurve]:
    """Traced curves ``{1: gamma1, 2: gamma2, 3: gamma3}`` for ratio ``lam`` (cached)."""
    lam = float(lam)
    return {j: _trace(lam, j) for j in (1, 2, 3)}


def polyline_distance(z: complex, nodes: np.ndarray, tail: complex | None = None) -> float:
    a = nodes[:-1]
    b = nodes[1:]
    ab = b - a
    denom = np.abs(ab) ** 2
    t = np.where(denom > 0, ((z - a) * ab.conj()).real / np.where(denom > 0, denom, 1.0), 0.0)
    t = np.clip(t, 0.0, 1.0)
    d = float(np.min(np.abs(a + t * ab - z)))
    if tail is not None:
        s = max(((z - nodes[-1]) * tail.conjugate()).real, 0.0)
        d = min(d, abs(nodes[-1] + s * tail - z))
    return d


def point_in_polygon(z: complex, poly: np.ndarray) -> bool:
    """Even-odd rule; ``poly`` is an implicitly closed sequence of vertices."""
    x, y = z.real, z.imag
    xs, ys = poly.real, poly.imag
    xj, yj = np.roll(xs, 1), np.roll(ys, 1)
    crosses = (ys > y) != (yj > y)
    with np.errstate(divide="ignore", invalid="ignore"):
        xint = (xj - xs) * (y - ys) / (yj - ys) + xs
    return bool(np.count_nonzero(crosses & (x < xint)) % 2)


@lru_cache(maxsize=64)
def s_minus1_polygon(lam: float) -> np.ndarray:
    """Closed boundary of the finite region containing ``z = 0``."""
    c = level_curves(lam)
    return np.concatenate([c[3].nodes, c[2].nodes[::-1]])


@lru_cache(maxsize=64)
def cut_lens_polygon(lam: float) -> np.ndarray:
    """Region between gamma2 and the straight chord from ``z_plus`` to its foot."""
    return level_curves(lam)[2].nodes.copy()
