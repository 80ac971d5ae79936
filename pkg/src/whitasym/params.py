"""Parameter regime and turning points for Whittaker's equation in the
large-``mu`` scaling ``w'' = (mu^2 f(z) + g(z)) w``."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

DEFAULT_DELTA = 0.05


class ParameterError(ValueError):
    """Raised when (mu, kappa, delta) fall outside 0 <= kappa/mu <= 1 - delta."""


@dataclass(frozen=True)
class ParameterSet:
    """Large parameter ``mu``, ``kappa`` and the derived ratio ``lam = kappa/mu``.

    ``delta`` is the exclusion margin: both the admissible ratio range and
    the clearance kept from the level curves through the turning point.
    """

    mu: float
    kappa: float
    delta: float = DEFAULT_DELTA
    lam: float = field(init=False)

    def __post_init__(self):
        mu, kappa, delta = float(self.mu), float(self.kappa), float(self.delta)
        if not (math.isfinite(mu) and mu > 0):
            raise ParameterError(f"mu must be positive and finite, got {self.mu}")
        if not (0.0 < delta < 1.0):
            raise ParameterError(f"delta must lie in (0, 1), got {self.delta}")
        if not math.isfinite(kappa):
            raise ParameterError(f"kappa must be finite, got {self.kappa}")
        lam = kappa / mu
        if lam < 0.0 or lam > 1.0 - delta:
            raise ParameterError(
                f"kappa/mu = {lam:.6g} outside the admissible range [0, {1.0 - delta:.6g}]"
            )
        object.__setattr__(self, "mu", mu)
        object.__setattr__(self, "kappa", kappa)
        object.__setattr__(self, "delta", delta)
        object.__setattr__(self, "lam", lam)

    @classmethod
    def from_lambda(cls, mu: float, lam: float, delta: float = DEFAULT_DELTA) -> "ParameterSet":
        return cls(mu=mu, kappa=lam * mu, delta=delta)


def theta(lam: float) -> float:
    """Angle of the upper turning point, ``arccos(lam)``."""
    return math.acos(lam)


def theta_plus(lam: float) -> float:
    """Rotation of the local turning-point map, ``asin(2 lam^2 - 1) / 3``."""
    return math.asin(2.0 * lam * lam - 1.0) / 3.0


def turning_points(params_or_lam) -> tuple[complex, complex]:
    """Return ``(z_plus, z_minus)``, the zeros of ``z^2 - 4 lam z + 4``.

    Accepts a :class:`ParameterSet` or a bare ratio ``lam``.
    """
    lam = params_or_lam.lam if isinstance(params_or_lam, ParameterSet) else float(params_or_lam)
    s = math.sqrt((1.0 - lam) * (1.0 + lam))
    zp = complex(2.0 * lam, 2.0 * s)
    return zp, zp.conjugate()


def f_value(z: complex, lam: float) -> complex:
    return (z * z - 4.0 * lam * z + 4.0) / (4.0 * z * z)


def local_scale(lam: float) -> complex:
    """Coefficient ``c`` with ``zeta ~ c (z - z_plus)`` at the turning point."""
    return 2.0 ** (-2.0 / 3.0) * (1.0 - lam * lam) ** (1.0 / 6.0) * cmath.exp(1j * theta_plus(lam))
