"""
Exton's K2 quadruple hypergeometric function.

Series evaluation with tail estimates (``series``), the second-order PDE
system and its 16 Frobenius-type solutions (``pde``), exact operator images
(``opcalc``) and a verification harness for finite sums and decomposition
formulas (``identities``).

    >>> from k2hyper import K2Params, Point4, k2_eval
    >>> k2_eval(K2Params(1, 1, 1, 1, 1, 1, 1), Point4(0.0, 0.0, 0.0, 0.0)).value
    1.0
"""

from .errors import DivergenceWarning, DomainError, InconclusiveError, K2Error, PoleError
from .identities import (
    DuplicationIndexMap,
    IdentityReport,
    matching_variants,
    verify_3_10,
    verify_3_11,
    verify_3_12,
    verify_3_13,
)
from .opcalc import (
    Monomial,
    OpCheck,
    apply_derive,
    apply_integrate,
    apply_shift_pair,
    composition_matches_shift,
    verify_lemma1,
    verify_theorem31,
)
from .pde import (
    GlobalSolutionCoeffs,
    IndependenceDiagnostic,
    coefficient_recurrence_check,
    exponent_table,
    global_solution,
    independence_check,
    pde_residual_2nd,
    sample_points,
    solution_function,
    solution_spec,
    solution_value,
)
from .series import (
    DEFAULT_POLICY,
    ORIGIN,
    K2Params,
    MultiIndex4,
    Point4,
    SeriesValue,
    TruncationPolicy,
    appell_f4,
    gauss_2f1,
    k2_coefficient,
    k2_eval,
    k2_mixed_partial,
    k2_terminating_sum,
    lauricella_fc4,
    pochhammer,
    quad_series_eval,
    srivastava_f3_shape,
)

__version__ = "0.1.0"
