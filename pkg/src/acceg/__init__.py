"""Accelerated extragradient methods for co-hypomonotone inclusions ``0 in F x + T x``."""

from .core import (
    ConvergenceError,
    InclusionError,
    MissingSolutionError,
    MultivaluedOperator,
    NonFiniteError,
    ProblemSpec,
    ResidualPair,
    ResolventError,
    SelectionError,
    SingleValuedOperator,
    inclusion_residual_norm,
    lipschitz_constant_linear,
    natural_residual,
    resolvent_apply,
    verify_cohypomonotone_linear,
    with_counters,
)
from .schedules import (
    Admissibility,
    AdmissibilityError,
    Method,
    ScheduleEntry,
    admissibility_check,
    aeg_schedule,
    apeg_schedule,
    default_step,
    eag_schedule,
    peag_schedule,
    schedule,
)
from .solvers import (
    RunConfig,
    SolverState,
    Trace,
    TraceRow,
    aeg_step,
    apeg_step,
    eag_step,
    eliminated_step,
    fbfs_step,
    init_state,
    peag_step,
    pfbfs_step,
    run,
)
from .certify import (
    CertReport,
    certify_trace,
    check_monotone_decrease,
    lyapunov_eag,
    lyapunov_peag,
    potential_aeg,
    potential_apeg,
    theoretical_bound,
)
from .problems import (
    CorpusEntry,
    corpus,
    get_problem,
    make_box_bilinear,
    make_rotation,
    make_shifted_rotation,
)

__version__ = "0.1.0"
