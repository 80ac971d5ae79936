"""Uniform asymptotic evaluation of Whittaker functions for large ``mu``.

Evaluates ``M_{kappa,mu}(mu z)``, ``W_{kappa,mu}(mu z)`` and
``W_{-kappa,mu}(mu z e^{-pi i})`` for ``kappa/mu`` in ``[0, 1 - delta]``
with Liouville-Green expansions carrying computable error bounds, Airy-type
expansions valid through the turning point, and an extended-precision
reference implementation for checking both.
"""

from types import ModuleType as _ModuleType

from .airy import (
    ABPair,
    AiryValue,
    airy_complex,
    b_sequence,
    coeff_funcs_AB,
    eval_airy_compact,
    eval_airy_triple,
)
from .api import choose_method, evaluate
from .coefficients import (
    CoefficientTable,
    coefficient_table,
    ehat1,
    ehat_even,
    ehat_odd,
    eplus_coefficients,
    fhat,
    fhat_table,
    lg_constants,
)
from .geometry import (
    PathError,
    ProgressivePath,
    RegionError,
    RegionLabel,
    build_progressive_path,
    classify_region,
)
from .lg import (
    CancellationError,
    ExpansionResult,
    error_bound,
    eval_by_connection,
    eval_crosscut,
    eval_lg,
    eval_M_lg,
    eval_W_lg,
    eval_Wminus_lg,
)
from .maps import BranchValue, beta_tau, big_Z, branch_value, xi_principal, zeta_and_xi_plus
from .oracle import (
    OracleValue,
    connection_residual,
    gamma_reference,
    symmetry_reflection,
    whittaker_M_reference,
    whittaker_W_reference,
    whittaker_Wminus_reference,
)
from .params import ParameterError, ParameterSet, turning_points

__version__ = "0.1.0"

__all__ = [name for name, obj in dict(globals()).items()
           if not name.startswith("_") and not isinstance(obj, _ModuleType)]
