"""Region labels and progressive integration paths.

In the ``w = xi+`` plane the three sectors are simple: ``S_0`` is the half
strip ``Re w > 0, Im w > -(1-lam)pi/2``, ``S_-1`` the strip ``Re w < 0,
-(1-lam)pi/2 < Im w < (1+lam)pi/2`` and ``S_1`` the half strip ``Re w < 0,
Im w > -(1+lam)pi/2``; the real axis is a union of lines ``Im w = const``.
A progressive path is therefore built as a vertical move in ``w`` (``Re w``
frozen) followed by a horizontal one (``Re w`` monotone), each obtained by
integrating ``dz/dw = 2z/Z`` in the ``z`` plane with the sign of ``Z``
carried by continuity.  Crossing ``gamma2`` onto the continued sheet is
handled by starting from ``w = -xi+`` with ``Z`` negated.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from .curves import level_curves
from .maps import S_0, S_1, S_MINUS1, _lam, big_Z, zeta_and_xi_plus, sector_from_zeta
from .params import DEFAULT_DELTA, turning_points

TAIL_RADIUS = 40.0
ORIGIN_RADIUS = 1e-3
MAX_ATTEMPTS = 4
_STEP = 0.04


class RegionError(ValueError):
    """The point lies outside the region required by an evaluator."""


class PathError(RuntimeError):
    """No progressive path with the required properties was found."""


@dataclass(frozen=True)
class RegionLabel:
    sector: int
    in_Z1: bool
    in_Z2: bool
    in_Z3: bool
    distances: tuple = (math.inf, math.inf, math.inf)

    def in_Z(self, j: int) -> bool:
        return (self.in_Z1, self.in_Z2, self.in_Z3)[j - 1]


def _delta_of(params, delta):
    if delta is not None:
        return float(delta)
    return getattr(params, "delta", DEFAULT_DELTA)


def classify_region(z: complex, params, delta: float | None = None) -> RegionLabel:
    """Sector of ``zeta(z)`` and membership of ``z`` in ``Z_1, Z_2, Z_3``."""
    lam = _lam(params)
    z = complex(z)
    if z == 0 or z.imag < 0:
        raise RegionError(f"z = {z} is not in the closed upper half-plane minus the origin")
    d = _delta_of(params, delta)
    zeta, _ = zeta_and_xi_plus(z, lam)
    curves = level_curves(lam)
    dist = tuple(curves[j].distance(z) for j in (1, 2, 3))
    return RegionLabel(sector=sector_from_zeta(zeta), in_Z1=dist[0] >= d, in_Z2=dist[1] >= d,
                       in_Z3=dist[2] >= d, distances=dist)


# -- path plan ------------------------------------------------------------------

def _plan(j: int, sector: int, lam: float):
    """(sheet, allowed Im w interval, horizontal direction) for endpoint ``j``."""
    lo_p, hi_m = -(1.0 - lam) * math.pi / 2.0, (1.0 + lam) * math.pi / 2.0
    lo_1 = -(1.0 + lam) * math.pi / 2.0
    table = {
        (1, S_MINUS1): (1, (lo_p, hi_m), -1),
        (1, S_0): (1, (lo_p, 0.0), -1),
        (1, S_1): (-1, (0.0, hi_m), -1),
        (2, S_0): (1, (lo_p, math.inf), 1),
        (2, S_1): (1, (0.0, math.inf), 1),
        (2, S_MINUS1): (1, (lo_p, 0.0), 1),
        (3, S_1): (1, (lo_1, math.inf), -1),
        (3, S_0): (1, (0.0, math.inf), -1),
        (3, S_MINUS1): (-1, (lo_1, 0.0), -1),
    }
    return table[(j, sector)]


def _target_level(im_w: float, interval, margin: float) -> float:
    """Keep ``Im w`` if comfortably inside ``interval``; otherwise pick a safe level."""
    lo, hi = interval
    if lo < 0.0 < hi:
        return im_w
    if hi == 0.0:
        safe = min(margin, 0.5 * abs(lo))
        if lo <= im_w <= -safe:
            return im_w
        return -safe if im_w > -safe else 0.5 * lo
    safe = min(margin, 0.5 * hi) if math.isfinite(hi) else margin
    if safe <= im_w <= hi:
        return im_w
    return safe if im_w < safe else 0.5 * hi


@dataclass(frozen=True)
class ProgressivePath:
    """Polyline from ``z`` towards the singularity ``z^(j)``.

    ``nodes[0] = z``.  For ``j = 1`` the last node is ``0``.  For ``j = 2, 3``
    the polyline stops at ``nodes[-1]`` and continues along the ray
    ``nodes[-1] + s * tail``, ``s >= 0``; the bound integrals cover that
    ray exactly through a mapped quadrature.
    """

    endpoint_index: int
    nodes: np.ndarray
    tail: complex | None
    sheet: int
    w_values: np.ndarray
    truncation_note: str

    def check(self, params, delta: float | None = None, rtol: float = 1e-7) -> None:
        lam = _lam(params)
        d = _delta_of(params, delta)
        zp, _ = turning_points(lam)
        clearance = float(np.min(np.abs(self.nodes - zp)))
        if clearance < d:
            raise PathError(f"path passes within {clearance:.3g} of the turning point (need {d})")
        re = self.w_values.real
        sgn = 1.0 if self.endpoint_index == 2 else -1.0
        steps = sgn * np.diff(re)
        scale = rtol * (1.0 + np.abs(re[:-1]))
        if np.any(steps < -scale):
            k = int(np.argmin(steps + scale))
            raise PathError(f"Re xi not monotone along path near node {k} ({self.nodes[k]:.4g})")


def _seg_w(z0, z1, Z0, lam):
    """Integral of ``Z/(2t)`` over ``[z0, z1]`` (Simpson), and ``Z`` at ``z1`` by continuity."""
    zm = 0.5 * (z0 + z1)
    Zm = _cont_Z(zm, Z0, lam)
    Z1 = _cont_Z(z1, Zm, lam)
    dw = (z1 - z0) / 6.0 * (Z0 / (2 * z0) + 4 * Zm / (2 * zm) + Z1 / (2 * z1))
    return dw, Z1


def _cont_Z(z, Zprev, lam):
    Z = cmath.sqrt(z * z - 4.0 * lam * z + 4.0)
    return Z if (Z * Zprev.conjugate()).real >= 0.0 else -Z


def _local_scale(z, lam, zp, zm):
    return min(abs(z), abs(z - zp), abs(z - zm), 1.0 + abs(z))


def _flow(z, Z, direction, length, lam, zp, zm, stop=None, max_steps=200000):
    """Integrate ``dz/dw = 2z/Z`` for ``w`` moving ``length`` along ``direction``.

    ``length`` may be ``inf`` when ``stop`` decides termination.  Returns the
    node list, the final ``Z`` branch and the covered ``w`` length.
    """
    nodes = [z]
    done = 0.0
    for _ in range(max_steps):
        if stop is not None and stop(z):
            break
        if done >= length:
            break
        dzdw = 2.0 * z / Z
        h = _STEP * _local_scale(z, lam, zp, zm) / abs(dzdw)
        h = min(h, length - done)

        def rhs(zz, Zref):
            ZZ = _cont_Z(zz, Zref, lam)
            return direction * 2.0 * zz / ZZ, ZZ

        k1, Za = rhs(z, Z)
        k2, Zb = rhs(z + 0.5 * h * k1, Za)
        k3, Zc = rhs(z + 0.5 * h * k2, Zb)
        k4, Zd = rhs(z + h * k3, Zc)
        znew = z + h * (k1 + 2 * k2 + 2 * k3 + k4) / 6.0
        if znew.imag < 0.0:
            znew = complex(znew.real, 0.0)
        Z = _cont_Z(znew, Zd, lam)
        z = znew
        done += h
        nodes.append(z)
    else:
        raise PathError("path integration did not terminate")
    return nodes, Z, done


def build_progressive_path(z: complex, j: int, params, delta: float | None = None,
                           margin: float = 0.6) -> ProgressivePath:
    """Progressive path from ``z`` to ``0`` (j=1), ``+inf`` (j=2) or ``inf e^{pi i}`` (j=3)."""
    if j not in (1, 2, 3):
        raise ValueError("endpoint index must be 1, 2 or 3")
    lam = _lam(params)
    z = complex(z)
    label = classify_region(z, params, delta)
    if not label.in_Z(j):
        raise RegionError(f"z = {z} lies within delta of gamma{j} (distance {label.distances[j - 1]:.3g})")
    zp, zm = turning_points(lam)
    sheet, interval, direction = _plan(j, label.sector, lam)
    Z0 = sheet * big_Z(z, lam)
    _, xp = zeta_and_xi_plus(z, lam)
    w0 = sheet * xp
    last_err = None
    for attempt in range(MAX_ATTEMPTS):
        try:
            path = _attempt(z, Z0, w0, j, interval, direction, margin / (2 ** attempt), lam, zp, zm, sheet)
            path.check(params, delta)
            return path
        except PathError as exc:
            last_err = exc
    raise PathError(f"no progressive path from z = {z} to z^({j}) after {MAX_ATTEMPTS} attempts: {last_err}")


def _attempt(z, Z0, w0, j, interval, direction, margin, lam, zp, zm, sheet):
    c = _target_level(w0.imag, interval, margin)
    nodes = [z]
    Z = Z0
    if abs(c - w0.imag) > 0.0:
        dirv = 1j if c > w0.imag else -1j
        seg, Z, _ = _flow(z, Z, dirv, abs(c - w0.imag), lam, zp, zm)
        nodes.extend(seg[1:])
    far = max(TAIL_RADIUS, 2.0 * abs(z))
    if j == 1:
        stop = lambda t: abs(t) < ORIGIN_RADIUS * min(1.0, abs(z))
    elif j == 2:
        stop = lambda t: t.real > far and abs(t.imag) < 0.5 * t.real
    else:
        stop = lambda t: t.real < -far and abs(t.imag) < 0.5 * abs(t.real)
    seg, Z, _ = _flow(nodes[-1], Z, float(direction), math.inf, lam, zp, zm, stop=stop)
    nodes.extend(seg[1:])
    if j == 1:
        nodes.append(0j)
        tail, note = None, "ends at the origin"
    else:
        tail = 1.0 + 0j if j == 2 else -1.0 + 0j
        note = "horizontal ray from the last node to infinity, integrated by mapped quadrature"
    arr = np.asarray(nodes, dtype=complex)
    w = _w_along(arr, Z0, w0, lam)
    return ProgressivePath(endpoint_index=j, nodes=arr, tail=tail, sheet=sheet, w_values=w, truncation_note=note)


def _w_along(nodes, Z0, w0, lam):
    """``xi+`` along the polyline, integrated segment by segment from ``w0``."""
    w = np.empty(len(nodes), dtype=complex)
    w[0] = w0
    Z = Z0
    for k in range(1, len(nodes)):
        if nodes[k] == 0:
            w[k] = complex(-math.inf, w[k - 1].imag)
            continue
        dw, Z = _seg_w(nodes[k - 1], nodes[k], Z, lam)
        w[k] = w[k - 1] + dw
    return w
