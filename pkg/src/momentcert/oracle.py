"""Independent ground-truth engines.

Exhaustive atom convolution for finite-support inputs, seeded Monte Carlo
with confidence intervals for everything else, and the verdict function
that checks a bound report against a ground-truth value.
"""
from __future__ import annotations

import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import stats

from .bounds import BoundReport
from .charfn import IntegralResult
from .distmodel import VariableSpec

__all__ = [
    "MCEstimate",
    "Verdict",
    "SupportExplosion",
    "exact_discrete_moment",
    "mc_moment",
    "verify_report",
]

_MAX_SUPPORT_PRODUCT = 20_000_000
_CHUNK = 1 << 17


class SupportExplosion(ValueError):
    """The product of atom-support sizes exceeds the enumeration budget."""


@dataclass(frozen=True)
class MCEstimate:
    """Monte Carlo estimate of ||S||_p with a delta-method CI half-width."""

    p: float
    point: float
    half_width: float
    samples: int
    seed: int
    confidence: float
    raw_mean: float
    raw_half_width: float


@dataclass(frozen=True)
class Verdict:
    passed: bool
    margin: float
    detail: str


def exact_discrete_moment(specs: Sequence[VariableSpec], p: float) -> float:
    """E |sum_k X_k|^p by full convolution of atoms; exact up to rounding.

    Only finite-support specs are accepted, and the product of support
    sizes must stay within the enumeration budget.
    """
    supports = []
    for spec in specs:
        atoms = spec.atoms()
        if atoms is None:
            raise ValueError(f"family {spec.family!r} has no finite support")
        supports.append(atoms)
    values = np.array([0.0])
    probs = np.array([1.0])
    for av, ap in supports:
        # The budget applies to each intermediate grid, after merging, so
        # lattice-valued inputs (e.g. many equal Rademacher weights) stay
        # cheap no matter how long the sequence is.
        if len(values) * len(av) > _MAX_SUPPORT_PRODUCT:
            raise SupportExplosion(
                f"support grid would reach {len(values) * len(av)} points "
                f"(> {_MAX_SUPPORT_PRODUCT})"
            )
        values = (values[:, None] + av[None, :]).ravel()
        probs = (probs[:, None] * ap[None, :]).ravel()
        # Merge coinciding atoms to keep the grid small.
        keys = np.round(values, 10)
        uniq, inv = np.unique(keys, return_inverse=True)
        merged = np.bincount(inv, weights=probs)
        values, probs = uniq, merged
    return float(np.dot(np.abs(values) ** p, probs))


def _worker_count() -> int:
    env = os.environ.get("MOMENT_CERT_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def mc_moment(
    specs: Sequence[VariableSpec],
    p: float,
    samples: int = 1_000_000,
    seed: int = 0,
    confidence: float = 0.999,
) -> MCEstimate:
    """Monte Carlo estimate of ||sum_k X_k||_p with a CI at ``confidence``.

    Sampling is split into fixed-size chunks, each seeded from
    (seed, chunk_index), so the result is deterministic and independent of
    the worker-thread count.  The CI is computed on E|S|^p with a normal
    approximation and both endpoints are mapped through the monotone
    1/p-power transform.
    """
    if samples < 10_000:
        raise ValueError("samples must be at least 10^4")
    if not 0.0 < confidence < 1.0:
        raise ValueError("confidence must lie in (0, 1)")
    for spec in specs:
        if spec.family == "raw_moments" and spec.support is None:
            raise ValueError("raw-moment specs without atoms cannot be sampled")

    chunks = [
        (i, min(_CHUNK, samples - i * _CHUNK))
        for i in range((samples + _CHUNK - 1) // _CHUNK)
    ]

    def run_chunk(arg):
        idx, count = arg
        rng = np.random.default_rng(np.random.SeedSequence([seed, idx]))
        total = np.zeros(count)
        for spec in specs:
            total += spec.sample_with(rng, count)
        x = np.abs(total) ** p
        return float(np.sum(x)), float(np.sum(x * x))

    workers = _worker_count()
    if workers > 1 and len(chunks) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            partials = list(pool.map(run_chunk, chunks))
    else:
        partials = [run_chunk(c) for c in chunks]
    s1 = math.fsum(a for a, _ in partials)
    s2 = math.fsum(b for _, b in partials)
    mean = s1 / samples
    var = max(s2 / samples - mean * mean, 0.0)
    z = float(stats.norm.ppf(0.5 + confidence / 2.0))
    half = z * math.sqrt(var / samples)
    lo = max(mean - half, 0.0) ** (1.0 / p)
    hi = (mean + half) ** (1.0 / p)
    return MCEstimate(
        p=p,
        point=mean ** (1.0 / p),
        half_width=(hi - lo) / 2.0,
        samples=samples,
        seed=seed,
        confidence=confidence,
        raw_mean=mean,
        raw_half_width=half,
    )


def _ground_value_and_budget(report: BoundReport, ground) -> tuple[float, float]:
    if isinstance(ground, MCEstimate):
        if report.target_kind == "abs_moment":
            return ground.raw_mean, ground.raw_half_width
        return ground.point, ground.half_width
    if isinstance(ground, IntegralResult):
        if report.target_kind == "abs_moment":
            return ground.value, ground.total_error
        v = ground.value ** (1.0 / report.p)
        return v, (ground.value + ground.total_error) ** (1.0 / report.p) - v
    return float(ground), 0.0


def verify_report(report: BoundReport, ground) -> Verdict:
    """PASS iff the ground value (with its own error budget) respects the
    report's interval.  ``ground`` may be a plain float on the report's
    target scale, an MCEstimate, or a raw-moment IntegralResult.
    """
    if not report.certifying:
        raise ValueError("cannot verify a non-certifying report")
    value, budget = _ground_value_and_budget(report, ground)
    budget += report.error_budget
    margins = []
    if report.lower is not None:
        margins.append(value - (report.lower - budget))
    if report.upper is not None:
        margins.append((report.upper + budget) - value)
    if not margins:
        raise ValueError("report carries no bound values")
    worst = min(margins)
    # Allow last-ulp roundoff when a bound is attained with equality.
    if worst >= -1e-12 * max(1.0, abs(value)):
        return Verdict(True, worst, f"{report.statement_id}: contained")
    return Verdict(
        False,
        worst,
        f"{report.statement_id}: ground {value} outside "
        f"[{report.lower}, {report.upper}] by {-worst}",
    )
