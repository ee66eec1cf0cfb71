"""Ergodicity criteria and convergence-rate bounds for one-dimensional
time-changed symmetric stable processes, with numerical verification by
Green-operator quadrature, a nonlocal-form eigensolver, and Monte Carlo
path simulation."""

from .criteria import (
    ErgodicityReport,
    LyapunovReport,
    PolynomialClosedForms,
    RateBounds,
    TriState,
    classify,
    lyapunov_check,
    polynomial_closed_forms,
    rate_bounds,
)
from .errors import (
    AllCensored,
    AlphaOutOfRange,
    DomainError,
    EvalError,
    GridTooCoarse,
    HorizonExceeded,
    IntegralDiverged,
    NoConvergence,
    NonPositiveSigma,
    NotErgodic,
    ParseError,
    PreconditionError,
    SignalTooNoisy,
    StableErgoError,
    TailUndetermined,
)
from .green import (
    Domain,
    GreenKernel,
    QuadratureSpec,
    green_apply,
    green_complement_interval,
    green_halfline,
    green_punctured,
    ii_operator,
    ii_plus_operator,
    mean_exit_bound,
)
from .measure import (
    CriterionValue,
    I_integral,
    delta,
    delta_minus,
    delta_plus,
    mu_total,
    pi_cdf,
    tail_mass,
)
from .montecarlo import (
    DecayEstimate,
    HittingEstimate,
    PathConfig,
    StableSampler,
    StationaryEstimate,
    estimate_decay_rate,
    estimate_hitting_time,
    estimate_stationary,
    sample_stable_increment,
    simulate_euler,
    simulate_timechange,
)
from .sigma import (
    ExpressionSigma,
    PolynomialSigma,
    SigmaProfile,
    TabulatedSigma,
    estimate_tail_exponent,
    eval_sigma,
    load_profile,
    parse_sigma,
)
from .special import (
    AlphaConstants,
    J_alpha,
    K_alpha,
    frac_kernel_constant,
    harmonic_h,
    interval_green_constant,
    omega_alpha,
)
from .spectral import (
    EigenResult,
    FormSystem,
    Grid,
    assemble_form,
    lambda0_numeric,
    rayleigh_upper,
    solve_lambda0,
    variational_lower,
)

__version__ = "0.1.0"
