"""q-Stancu operators: finite-degree basis in product and q-Pochhammer
form, moment recurrences, and the limit operator with certified series
evaluation."""
from .numerics import (
    DEFAULT_TOLERANCE,
    ScalarKind,
    Tolerance,
    approx_equal,
    rational_of,
)
from .qcore import (
    QParams,
    TruncationCertificate,
    q_binomial,
    q_binomial_theorem_series,
    q_factorial,
    q_integer,
    q_pochhammer,
    q_pochhammer_infinite,
    verify_product_identity,
)
from .stancu import (
    BasisVector,
    SampledFunction,
    apply,
    basis,
    basis_pochhammer_form,
    basis_product_form,
    basis_recurrence_check,
    builtin,
    falling_product_x,
    moment_closed_form,
    moment_recurrence_binomial,
    moment_recurrence_videnskii,
    monomial,
    parse_function,
    polynomial,
    rising_product_x,
)
from .limitop import (
    ConvergenceTable,
    LimitBasisValue,
    SeriesEvaluation,
    convergence_experiment,
    limit_apply,
    limit_basis,
    limit_moment_closed_form,
    limit_moment_general,
    limit_recurrence,
    limit_recurrence_binomial,
)

__version__ = "0.1.0"
