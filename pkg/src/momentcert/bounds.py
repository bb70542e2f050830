"""The bound engine: head-length and growth constants, and certified
bound reports for every supported statement.

Every operation sorts the sequence by variance (nonincreasing) internally
and records the permutation, so callers never have to pre-sort.  When a
hypothesis fails the engine returns a structured non-certifying report
instead of raising, so sweeps can tabulate applicability regions.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

from . import charfn as _charfn
from .combinatorics import elementary_symmetric
from .distmodel import VariableSpec
from .exactmoments import (
    WeightVector,
    gaussian_abs_moment,
    gaussian_lp_norm,
    rademacher_abs_moment,
    rademacher_even_moment,
    sum_even_moment,
    tail_sum_even_moment,
)

__all__ = [
    "Assumption",
    "SequenceSpec",
    "BoundReport",
    "compute_m",
    "minimal_C_symmetric",
    "minimal_C_centered",
    "bound_p_2_4",
    "bound_even_symmetric",
    "bound_even_centered",
    "bound_general_p",
    "check_rademacher_moment_ratio",
    "latala_logconcave_bounds",
    "check_symmetric_tail_bounds",
    "check_centered_tail_bounds",
]

# Guard against float noise when a ratio sits exactly on an integer.
_CEIL_EPS = 1e-12


def _ceil(x: float) -> int:
    return math.ceil(x - _CEIL_EPS)


@dataclass(frozen=True)
class Assumption:
    name: str
    satisfied: bool
    detail: str = ""


@dataclass(frozen=True)
class SequenceSpec:
    """An ordered family of independent variables."""

    variables: tuple[VariableSpec, ...]

    def __post_init__(self) -> None:
        object.__setattr__(self, "variables", tuple(self.variables))
        if not self.variables:
            raise ValueError("sequence must contain at least one variable")

    def __len__(self) -> int:
        return len(self.variables)

    @property
    def variances(self) -> tuple[float, ...]:
        return tuple(v.variance for v in self.variables)

    @property
    def sorted_nonincreasing(self) -> bool:
        v = self.variances
        return all(v[i] >= v[i + 1] for i in range(len(v) - 1))

    @property
    def all_symmetric(self) -> bool:
        return all(v.symmetric for v in self.variables)

    @property
    def all_centered(self) -> bool:
        return all(v.centered for v in self.variables)

    @property
    def all_log_concave(self) -> bool:
        return all(v.log_concave_tail for v in self.variables)

    @property
    def total_variance(self) -> float:
        return sum(self.variances)

    def sorted(self) -> tuple["SequenceSpec", tuple[int, ...]]:
        """Variance-nonincreasing copy plus the applied permutation
        (original 0-based positions in sorted order; stable)."""
        order = sorted(range(len(self)), key=lambda i: -self.variances[i])
        return SequenceSpec(tuple(self.variables[i] for i in order)), tuple(order)

    def profiles(self, max_order: int):
        return [v.moments(max_order) for v in self.variables]


@dataclass(frozen=True)
class BoundReport:
    """One certified interval for a moment of a (possibly truncated) sum.

    target_kind "norm" means the bound is on (E|.|^p)^{1/p}; "abs_moment"
    means it is on the raw E|.|^p.  start_index is the 1-based first summand
    of the bounded sum after sorting (1 = the full sum).
    """

    statement_id: str
    p: float
    center: float
    lower: float | None
    upper: float | None
    radius: float | None
    constants: dict
    assumptions: tuple[Assumption, ...]
    certifying: bool
    target_kind: str = "norm"
    start_index: int = 1
    permutation: tuple[int, ...] = ()
    error_budget: float = 0.0
    aux: dict = field(default_factory=dict)

    def __post_init__(self) -> None:
        if self.lower is not None and self.upper is not None:
            if self.lower > self.upper + 1e-12:
                raise ValueError("report invariant violated: lower > upper")

    def failed_assumptions(self) -> tuple[Assumption, ...]:
        return tuple(a for a in self.assumptions if not a.satisfied)


def _non_certifying(statement_id, p, assumptions, permutation, constants=None):
    return BoundReport(
        statement_id=statement_id,
        p=p,
        center=float("nan"),
        lower=None,
        upper=None,
        radius=None,
        constants=constants or {},
        assumptions=tuple(assumptions),
        certifying=False,
        permutation=permutation,
    )


# -- constants --------------------------------------------------------------


def compute_m(seq: SequenceSpec) -> int:
    """Head length m = max_k ceil((1/6) E X_k^4 / (E X_k^2)^2)."""
    worst = max(p.moment(4) / p.variance ** 2 for p in seq.profiles(4))
    return _ceil(worst / 6.0)


def minimal_C_symmetric(seq: SequenceSpec, r: int) -> float:
    """Least C >= 1 with E X_k^{2l} <= C^{2l-2} (2l)!/2^l (E X_k^2)^l
    for all 2 <= l <= r and all k."""
    if r < 2:
        return 1.0
    c = 1.0
    for prof in seq.profiles(2 * r):
        if not prof.symmetric:
            raise ValueError("minimal_C_symmetric requires symmetric profiles")
        for l in range(2, r + 1):
            ratio = (
                prof.moment(2 * l)
                * 2 ** l
                / (math.factorial(2 * l) * prof.variance ** l)
            )
            if ratio > 1.0:
                c = max(c, ratio ** (1.0 / (2 * l - 2)))
    return c


def minimal_C_centered(seq: SequenceSpec, r: int) -> float:
    """Least C >= 1 with |E X_k^l| <= C^{l-2} l!/2^{l/2} (E X_k^2)^{l/2}
    for all 2 <= l <= 2r and all k (l = 2 holds automatically)."""
    if r < 1:
        return 1.0
    c = 1.0
    for prof in seq.profiles(2 * r):
        if not prof.centered:
            raise ValueError("minimal_C_centered requires centered profiles")
        for l in range(3, 2 * r + 1):
            ratio = (
                abs(prof.moment(l))
                * 2 ** (l / 2.0)
                / (math.factorial(l) * prof.variance ** (l / 2.0))
            )
            if ratio > 1.0:
                c = max(c, ratio ** (1.0 / (l - 2)))
    return c


# -- bound reports ----------------------------------------------------------


def bound_p_2_4(seq: SequenceSpec, p: float) -> BoundReport:
    """Two-sided bound on ||sum X_k||_p for 2 <= p <= 4, symmetric summands.

    lower = gamma_p (sum_{k>=2} v_k)^{1/2};
    upper = gamma_p (sum v_k)^{1/2} + sqrt(3 m) sqrt(v_1).
    The symmetric radius sqrt(3 m) sqrt(v_1) of the two-sided form is also
    reported, together with the tighter one-sided lower radius 3^{1/4}
    sqrt(v_1) as auxiliary data.
    """
    sorted_seq, perm = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    m = compute_m(sorted_seq)
    assumptions = (
        Assumption("p_range", 2.0 <= p <= 4.0, f"2 <= p={p} <= 4"),
        Assumption("symmetric", sorted_seq.all_symmetric, "all summands symmetric"),
        Assumption("head_shorter_than_n", m < n, f"m={m} < n={n}"),
    )
    constants = {"m": m}
    if not all(a.satisfied for a in assumptions):
        return _non_certifying("symmetric_p24_band", p, assumptions, perm, constants)
    gp = gaussian_lp_norm(p)
    center = gp * math.sqrt(sum(v))
    radius = math.sqrt(3.0 * m) * math.sqrt(v[0])
    return BoundReport(
        statement_id="symmetric_p24_band",
        p=p,
        center=center,
        lower=gp * math.sqrt(sum(v[1:])),
        upper=center + radius,
        radius=radius,
        constants=constants,
        assumptions=assumptions,
        certifying=True,
        permutation=perm,
        aux={"one_sided_lower_radius": 3.0 ** 0.25 * math.sqrt(v[0])},
    )


def bound_even_symmetric(seq: SequenceSpec, r: int) -> BoundReport:
    """Two-sided bound on ||sum X_k||_{2r} for symmetric summands, r >= 2.

    Uses the growth constant C and cutoff D = ceil(C^2 (r-1)):
    lower = gamma_{2r} (sum_{k>=r} v_k)^{1/2};
    upper = gamma_{2r} (sum v_k)^{1/2} + 2 D sqrt(v_1); radius = 2 D sqrt(v_1).
    """
    sorted_seq, perm = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    assumptions = [
        Assumption("r_range", r >= 2, f"r={r} >= 2"),
        Assumption("symmetric", sorted_seq.all_symmetric, "all summands symmetric"),
    ]
    if not all(a.satisfied for a in assumptions):
        return _non_certifying("even_symmetric_band", 2 * r, assumptions, perm)
    c = minimal_C_symmetric(sorted_seq, r)
    cutoff = _ceil(c * c * (r - 1))
    constants = {"C": c, "cutoff_index": cutoff}
    assumptions.append(
        Assumption("cutoff_below_n", cutoff < n, f"ceil(C^2 (r-1))={cutoff} < n={n}")
    )
    if cutoff >= n:
        return _non_certifying("even_symmetric_band", 2 * r, assumptions, perm, constants)
    gp = gaussian_lp_norm(2 * r)
    center = gp * math.sqrt(sum(v))
    radius = 2.0 * cutoff * math.sqrt(v[0])
    return BoundReport(
        statement_id="even_symmetric_band",
        p=float(2 * r),
        center=center,
        lower=gp * math.sqrt(sum(v[r - 1 :])),
        upper=center + radius,
        radius=radius,
        constants=constants,
        assumptions=tuple(assumptions),
        certifying=True,
        permutation=perm,
    )


def bound_even_centered(seq: SequenceSpec, r: int) -> BoundReport:
    """Upper bound on ||sum X_k||_{2r} for centered (possibly asymmetric)
    summands: gamma_{2r} (sum v_k)^{1/2} + 2 ceil(C^2 r(r-1)/2) sqrt(v_1).
    No lower bound is available in this regime.
    """
    sorted_seq, perm = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    assumptions = [
        Assumption("r_range", r >= 2, f"r={r} >= 2"),
        Assumption("centered", sorted_seq.all_centered, "all summands centered"),
    ]
    if not all(a.satisfied for a in assumptions):
        return _non_certifying("even_centered_upper", 2 * r, assumptions, perm)
    c = minimal_C_centered(sorted_seq, r)
    cutoff = _ceil(c * c * r * (r - 1) / 2.0)
    constants = {"C": c, "cutoff_index": cutoff}
    assumptions.append(
        Assumption(
            "cutoff_below_n", cutoff < n, f"ceil(C^2 r(r-1)/2)={cutoff} < n={n}"
        )
    )
    if cutoff >= n:
        return _non_certifying("even_centered_upper", 2 * r, assumptions, perm, constants)
    gp = gaussian_lp_norm(2 * r)
    center = gp * math.sqrt(sum(v))
    return BoundReport(
        statement_id="even_centered_upper",
        p=float(2 * r),
        center=center,
        lower=None,
        upper=center + 2.0 * cutoff * math.sqrt(v[0]),
        radius=None,
        constants=constants,
        assumptions=tuple(assumptions),
        certifying=True,
        permutation=perm,
    )


def bound_general_p(seq: SequenceSpec, p: float, r: int) -> BoundReport:
    """Upper bound on the raw moment E |sum_{k>=cutoff} X_k|^p of a
    *truncated* sum, 2 <= p <= 2r.

    The bound is multiplier * E |sum_k sqrt(v_k) eps_k|^p over the full
    weighted Rademacher sum, with multiplier (2 floor(p/2)+1)/(2 floor(p/2)-1)
    and cutoff ceil(C^2 floor(p/2))+1 for symmetric summands
    (ceil(C^2 floor(p/2)(floor(p/2)+1)/2)+1 otherwise).  The report never
    re-labels this as a bound on the full sum.
    """
    sorted_seq, perm = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    half = math.floor(p / 2.0)
    assumptions = [
        Assumption("p_range", 2.0 <= p <= 2 * r, f"2 <= p={p} <= 2r={2 * r}"),
        Assumption("centered", sorted_seq.all_centered, "all summands centered"),
    ]
    if not all(a.satisfied for a in assumptions):
        return _non_certifying("truncated_general_p_upper", p, assumptions, perm)
    symmetric = sorted_seq.all_symmetric
    if symmetric:
        c = minimal_C_symmetric(sorted_seq, r)
        cutoff = _ceil(c * c * half) + 1
    else:
        c = minimal_C_centered(sorted_seq, r)
        cutoff = _ceil(c * c * half * (half + 1) / 2.0) + 1
    multiplier = (2.0 * half + 1.0) / (2.0 * half - 1.0)
    constants = {"C": c, "cutoff_index": cutoff, "multiplier": multiplier}
    assumptions.append(
        Assumption("cutoff_within_n", cutoff <= n, f"cutoff={cutoff} <= n={n}")
    )
    if cutoff > n:
        return _non_certifying(
            "truncated_general_p_upper", p, assumptions, perm, constants
        )
    w = WeightVector(tuple(math.sqrt(x) for x in v))
    if float(p).is_integer() and int(p) % 2 == 0:
        rad = rademacher_even_moment(w, int(p) // 2)
    else:
        try:
            rad = rademacher_abs_moment(w, p)
        except ValueError as exc:
            assumptions.append(Assumption("enumeration_cap", False, str(exc)))
            return _non_certifying(
                "truncated_general_p_upper", p, assumptions, perm, constants
            )
    tail_var = sum(v[cutoff - 1 :])
    return BoundReport(
        statement_id="truncated_general_p_upper",
        p=p,
        center=gaussian_abs_moment(p) * tail_var ** (p / 2.0),
        lower=None,
        upper=multiplier * rad,
        radius=None,
        constants=constants,
        assumptions=tuple(assumptions),
        certifying=True,
        target_kind="abs_moment",
        start_index=cutoff,
        permutation=perm,
        aux={"rademacher_abs_moment": rad},
    )


@dataclass(frozen=True)
class RatioCheckReport:
    lhs: float
    rhs: float
    ratio: float
    passed: bool


def check_rademacher_moment_ratio(w: WeightVector, r: int) -> RatioCheckReport:
    """Check the even-moment product inequality for a weighted Rademacher sum:

    ((2r+1)/(2r-1)) M_{2r}^2 >= ((2r+2)!/2^{r+1}) e_{r+1}(sigma^2) M_{2r-2},

    with M_{2j} = E (sum sigma_k eps_k)^{2j}.  Requires |sigma| sorted
    nonincreasing.  Returns the ratio LHS/RHS (inf when the RHS vanishes).
    """
    if r < 1:
        raise ValueError("r must be at least 1")
    if not w.sorted_nonincreasing:
        raise ValueError("weights must be sorted by |sigma| nonincreasing")
    m2r = rademacher_even_moment(w, r)
    m_prev = rademacher_even_moment(w, r - 1)
    lhs = (2.0 * r + 1.0) / (2.0 * r - 1.0) * m2r * m2r
    sq = [s * s for s in w.sigmas]
    if r + 1 > len(sq):
        er1 = 0.0
    else:
        er1 = elementary_symmetric(sq, r + 1)
    rhs = math.factorial(2 * r + 2) / 2 ** (r + 1) * er1 * m_prev
    ratio = math.inf if rhs == 0.0 else lhs / rhs
    return RatioCheckReport(lhs, rhs, ratio, lhs >= rhs * (1.0 - 1e-12))


def latala_logconcave_bounds(
    seq: SequenceSpec,
    p: float,
    *,
    tol: float = 1e-8,
    mc_samples: int = 1_000_000,
    mc_seed: int = 0,
) -> tuple[BoundReport, BoundReport]:
    """The two log-concave-tail estimates, valid for p >= 2.

    (a) two-sided: | ||S||_p - gamma_p (sum v_k)^{1/2} | <= p max_k sqrt(v_k);
    (b) sandwich: max(gamma_p tail, head) <= ||S||_p <= gamma_p tail + head,
        with tail = (sum_{k >= ceil(p/2)} v_k)^{1/2} over the sorted sequence
        and head = ||sum_{k < p} X_k||_p computed exactly for even integer p,
        by quadrature for 2 < p < 4, and by Monte Carlo otherwise (the head's
        numeric error is carried in the report's error budget).
    """
    sorted_seq, perm = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    assumptions = (
        Assumption("p_range", p >= 2.0, f"p={p} >= 2"),
        Assumption("symmetric", sorted_seq.all_symmetric, "all summands symmetric"),
        Assumption(
            "log_concave_tails",
            sorted_seq.all_log_concave,
            "every family has a logarithmically concave tail",
        ),
    )
    gp = gaussian_lp_norm(p)
    center = gp * math.sqrt(sum(v))
    if not all(a.satisfied for a in assumptions):
        return (
            _non_certifying("logconcave_radius", p, assumptions, perm),
            _non_certifying("logconcave_sandwich", p, assumptions, perm),
        )
    radius = p * math.sqrt(max(v))
    two_sided = BoundReport(
        statement_id="logconcave_radius",
        p=p,
        center=center,
        lower=center - radius,
        upper=center + radius,
        radius=radius,
        constants={},
        assumptions=assumptions,
        certifying=True,
        permutation=perm,
    )
    # Sandwich: head indices k < p, tail variance from index ceil(p/2) on.
    head_count = min(n, int(math.ceil(p)) - 1 if not float(p).is_integer() else int(p) - 1)
    tail_start = _ceil(p / 2.0)
    tail_var = sum(v[tail_start - 1 :]) if tail_start <= n else 0.0
    head_specs = sorted_seq.variables[:head_count]
    head_err = 0.0
    head_provenance = "exact"
    if head_count == 0:
        head = 0.0
    elif float(p).is_integer() and int(p) % 2 == 0:
        raw = sum_even_moment([s.moments(int(p)) for s in head_specs], int(p) // 2)
        head = raw ** (1.0 / p)
    elif 2.0 < p < 4.0:
        res = _charfn.sum_abs_moment_via_haagerup(head_specs, p, tol)
        head = res.value ** (1.0 / p)
        # Monotone 1/p-power transform of the raw-moment error budget.
        head_err = (res.value + res.total_error) ** (1.0 / p) - head
        head_provenance = "quadrature"
    else:
        from .oracle import mc_moment

        est = mc_moment(head_specs, p, samples=mc_samples, seed=mc_seed)
        head = est.point
        head_err = est.half_width
        head_provenance = "mc"
    g_tail = gp * math.sqrt(tail_var)
    sandwich = BoundReport(
        statement_id="logconcave_sandwich",
        p=p,
        center=center,
        lower=max(g_tail, head - head_err),
        upper=g_tail + head + head_err,
        radius=None,
        constants={"head_count": head_count, "tail_start": tail_start},
        assumptions=assumptions,
        certifying=True,
        permutation=perm,
        error_budget=head_err,
        aux={"head_norm": head, "head_provenance": head_provenance},
    )
    return two_sided, sandwich


# -- tail-moment theorem checkers -------------------------------------------


@dataclass(frozen=True)
class TailCheckReport:
    tail_moment: float
    symmetric_function_bound: float
    rademacher_bound: float
    cutoff_index: int
    growth_constant: float
    passed: bool
    applicable: bool = True


def check_symmetric_tail_bounds(seq: SequenceSpec, r: int) -> TailCheckReport:
    """Check, for sorted symmetric summands with growth constant C and
    D = ceil(C^2 (r-1)) < n, that

    E (sum_{k>D} X_k)^{2r} <= (2r)!/2^r e_r(v) <= E (sum sqrt(v_k) eps_k)^{2r}.
    """
    sorted_seq, _ = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    c = minimal_C_symmetric(sorted_seq, r)
    cutoff = _ceil(c * c * (r - 1))
    if r < 2 or cutoff >= n:
        return TailCheckReport(math.nan, math.nan, math.nan, cutoff, c, False, False)
    profiles = sorted_seq.profiles(2 * r)
    tail = tail_sum_even_moment(profiles, cutoff + 1, r)
    esym = math.factorial(2 * r) / 2 ** r * elementary_symmetric(list(v), r)
    rad = rademacher_even_moment(WeightVector(tuple(math.sqrt(x) for x in v)), r)
    slack = 1.0 - 1e-12
    return TailCheckReport(
        tail, esym, rad, cutoff, c, tail <= esym / slack and esym <= rad / slack
    )


def check_centered_tail_bounds(seq: SequenceSpec, r: int) -> TailCheckReport:
    """Centered analogue with cutoff D = ceil(C^2 r(r-1)/2)."""
    sorted_seq, _ = seq.sorted()
    v = sorted_seq.variances
    n = len(v)
    c = minimal_C_centered(sorted_seq, r)
    cutoff = _ceil(c * c * r * (r - 1) / 2.0)
    if r < 2 or cutoff >= n:
        return TailCheckReport(math.nan, math.nan, math.nan, cutoff, c, False, False)
    profiles = sorted_seq.profiles(2 * r)
    tail = tail_sum_even_moment(profiles, cutoff + 1, r)
    esym = math.factorial(2 * r) / 2 ** r * elementary_symmetric(list(v), r)
    rad = rademacher_even_moment(WeightVector(tuple(math.sqrt(x) for x in v)), r)
    slack = 1.0 - 1e-12
    return TailCheckReport(
        tail, esym, rad, cutoff, c, tail <= esym / slack and esym <= rad / slack
    )
