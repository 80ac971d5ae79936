"""One entry point over the LG, Airy and reference evaluators.

``which`` names the function of ``z`` being evaluated:

* ``"M"``       ``M_{kappa,mu}(mu z)``
* ``"W"``       ``W_{kappa,mu}(mu z)``
* ``"Wminus"``  ``W_{-kappa,mu}(mu z e^{-pi i})``

Points with ``Im z < 0`` are handled by Schwarz reflection of the value at
``conj(z)``; for ``"Wminus"`` this gives the companion
``W_{-kappa,mu}(mu z e^{+pi i})``.
"""

from __future__ import annotations

import cmath
import dataclasses
import math

import mpmath

from .airy import eval_airy_triple
from .geometry import RegionError, classify_region
from .lg import ExpansionResult, _finish, eval_lg
from .oracle import DEFAULT_DIGITS, symmetry_reflection
from .params import ParameterSet

FUNCTIONS = ("M", "W", "Wminus")
METHODS = ("lg", "airy", "auto", "oracle")
_ENDPOINT = {"M": 1, "W": 2, "Wminus": 3}


def choose_method(which: str, z: complex, params: ParameterSet) -> str:
    """``"lg"`` when ``z`` is at least ``2 delta`` from the relevant curve, else ``"airy"``."""
    label = classify_region(z, params)
    return "lg" if label.distances[_ENDPOINT[which] - 1] >= 2.0 * params.delta else "airy"


def _reflect(res: ExpansionResult) -> ExpansionResult:
    extras = dict(res.extras)
    if "log_value_mp" in extras:
        extras["log_value_mp"] = extras["log_value_mp"].conjugate()
    return dataclasses.replace(res, value=res.value.conjugate(), log_value=res.log_value.conjugate(),
                               method=res.method + "+reflection", extras=extras)


def _oracle(which, z, params, dps):
    ctx = mpmath.mp.clone()
    ctx.dps = dps + 20
    x = ctx.mpc(z) * params.mu  # mu z formed without double rounding
    ov = symmetry_reflection(which, x, params.mu, params.kappa, dps=dps)
    extras = {"est_accuracy": ov.est_accuracy}
    mv = ov.mp_value
    if mv is not None and mv != 0:
        extras["log_value_mp"] = ctx.log(ctx.mpc(mv))
        lv = complex(extras["log_value_mp"])
    else:
        lv = cmath.log(ov.value) if ov.value != 0 else complex(-math.inf, 0.0)
    return _finish(lv, rel_error_bound=ov.est_accuracy, n_terms=0, r_extra=0,
                   method=f"oracle-{ov.method}", extras=extras)


def evaluate(which: str, z, params: ParameterSet, method: str = "auto", n: int = 11, r: int = 2,
             m: int = 3, dps: int | None = None, bound: bool = True) -> ExpansionResult:
    """Evaluate ``which`` at ``z`` with the chosen method.

    ``dps`` sets the oracle precision and, for the LG method, also forms
    the value in that many digits (``extras['log_value_mp']``).  Raises
    :class:`~whitasym.geometry.RegionError` when an LG form is requested
    at a point outside its region.
    """
    if which not in FUNCTIONS:
        raise ValueError(f"which must be one of {FUNCTIONS}")
    if method not in METHODS:
        raise ValueError(f"method must be one of {METHODS}")
    z = complex(z)
    if z == 0:
        raise RegionError("z = 0 is a singular point")
    if method == "oracle":
        return _oracle(which, z, params, dps or DEFAULT_DIGITS)
    if z.imag < 0:
        return _reflect(evaluate(which, z.conjugate(), params, method, n, r, m, dps, bound))
    if method == "auto":
        method = choose_method(which, z, params)
    if method == "lg":
        return eval_lg(which, z, params, n, r, bound, dps)
    return eval_airy_triple(z, params, m, which)
