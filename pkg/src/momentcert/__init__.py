"""Certified two-sided bounds comparing moments of sums of independent
random variables to the matching Gaussian moments."""

from .bounds import (
    Assumption,
    BoundReport,
    SequenceSpec,
    bound_even_centered,
    bound_even_symmetric,
    bound_general_p,
    bound_p_2_4,
    check_centered_tail_bounds,
    check_rademacher_moment_ratio,
    check_symmetric_tail_bounds,
    compute_m,
    latala_logconcave_bounds,
    minimal_C_centered,
    minimal_C_symmetric,
)
from .charfn import (
    CharFunction,
    GridCheckReport,
    IntegralResult,
    check_cosine_bounds,
    check_main_charfn_inequality,
    default_t_grid,
    haagerup_constant,
    haagerup_moment,
    sum_abs_moment_via_haagerup,
)
from .combinatorics import (
    MultiIndex,
    count_no_singleton_compositions,
    count_support_compositions,
    elementary_symmetric,
    enumerate_indices,
    multinomial,
)
from .distmodel import (
    MomentProfile,
    VariableSpec,
    charfn_of,
    gaussian,
    moments_of,
    rademacher,
    sample,
    spec_from_atoms,
    symmetric_exponential,
    symmetric_three_point,
    uniform,
)
from .exactmoments import (
    WeightVector,
    gaussian_lp_norm,
    rademacher_abs_moment,
    rademacher_even_moment,
    sum_even_moment,
    tail_sum_even_moment,
)
from .oracle import (
    MCEstimate,
    SupportExplosion,
    Verdict,
    exact_discrete_moment,
    mc_moment,
    verify_report,
)

__version__ = "0.1.0"
