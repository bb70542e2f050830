import dataclasses
import math

import numpy as np
import pytest
from scipy import stats

from momentcert import (
    SequenceSpec,
    SupportExplosion,
    WeightVector,
    bound_even_symmetric,
    exact_discrete_moment,
    gaussian,
    mc_moment,
    rademacher,
    rademacher_abs_moment,
    spec_from_atoms,
    sum_abs_moment_via_haagerup,
    sum_even_moment,
    symmetric_exponential,
    uniform,
    verify_report,
)


class TestExactDiscreteMoment:
    def test_single_rademacher(self):
        assert exact_discrete_moment([rademacher(1.0)], 3.7) == pytest.approx(1.0)

    def test_two_rademacher_p3(self):
        assert exact_discrete_moment([rademacher(1.0)] * 2, 3.0) == pytest.approx(4.0)

    def test_matches_weighted_enumeration(self):
        rng = np.random.default_rng(40)
        for _ in range(15):
            n = int(rng.integers(1, 10))
            p = float(rng.uniform(0.5, 6.0))
            sig = rng.uniform(0.3, 1.5, n)
            specs = [rademacher(float(s)) for s in sig]
            # merging snaps atoms to 10 decimals, so exactness is only to ~1e-9
            assert exact_discrete_moment(specs, p) == pytest.approx(
                rademacher_abs_moment(WeightVector(tuple(sig)), p), rel=1e-8
            )

    def test_mixed_atom_specs_even_p(self):
        specs = [
            spec_from_atoms([-1.0, 0.0, 1.0], [0.25, 0.5, 0.25], 4),
            spec_from_atoms([0.0, 1.0, 3.0], [0.5, 0.3, 0.2], 4),
        ]
        exact = exact_discrete_moment(specs, 4.0)
        via_dp = sum_even_moment([s.profile for s in specs], 2)
        assert exact == pytest.approx(via_dp, rel=1e-10)

    def test_atom_merging_controls_growth(self):
        # 60 coin flips collapse to 61 lattice points, far below 2^60
        specs = [rademacher(1.0)] * 60
        val = exact_discrete_moment(specs, 2.0)
        assert val == pytest.approx(60.0, rel=1e-9)

    def test_continuous_refused(self):
        with pytest.raises(ValueError, match="finite support"):
            exact_discrete_moment([gaussian(1.0)], 2.0)

    def test_support_explosion(self):
        specs = [spec_from_atoms(np.linspace(-1, 1, 37) ** 3, np.full(37, 1 / 37), 2)] * 30
        with pytest.raises(SupportExplosion):
            exact_discrete_moment(specs, 2.0)


class TestMCMoment:
    def test_deterministic_given_seed(self):
        specs = [gaussian(1.0), uniform(1.0)]
        a = mc_moment(specs, 3.0, samples=50_000, seed=5)
        b = mc_moment(specs, 3.0, samples=50_000, seed=5)
        assert a == b

    def test_seed_changes_estimate(self):
        specs = [gaussian(1.0)]
        a = mc_moment(specs, 3.0, samples=50_000, seed=1)
        b = mc_moment(specs, 3.0, samples=50_000, seed=2)
        assert a.point != b.point

    def test_thread_count_invariance(self, monkeypatch):
        specs = [symmetric_exponential(1.0)] * 3
        monkeypatch.setenv("MOMENT_CERT_THREADS", "1")
        a = mc_moment(specs, 2.5, samples=300_000, seed=9)
        monkeypatch.setenv("MOMENT_CERT_THREADS", "4")
        b = mc_moment(specs, 2.5, samples=300_000, seed=9)
        assert a == b

    def test_matches_exact_gaussian_norm(self):
        est = mc_moment([gaussian(1.0)] * 4, 4.0, samples=2_000_000, seed=11)
        exact = 3.0 ** 0.25 * 2.0
        assert abs(est.point - exact) <= 2.0 * est.half_width

    def test_ci_coverage(self):
        """The 90% CI for E|S|^p should cover the exact value in roughly
        90% of independent repetitions; a binomial bound at 200 trials."""
        specs = [rademacher(1.0)] * 6
        exact = exact_discrete_moment(specs, 3.0)
        trials, hits = 200, 0
        for seed in range(trials):
            est = mc_moment(specs, 3.0, samples=20_000, seed=seed, confidence=0.9)
            if abs(est.raw_mean - exact) <= est.raw_half_width:
                hits += 1
        # P(hits < 160) under p = 0.9 is ~1e-4
        assert hits >= 160

    def test_too_few_samples_rejected(self):
        with pytest.raises(ValueError):
            mc_moment([gaussian(1.0)], 2.0, samples=100)

    def test_bad_confidence_rejected(self):
        with pytest.raises(ValueError):
            mc_moment([gaussian(1.0)], 2.0, samples=20_000, confidence=1.5)


class TestVerifyReport:
    def _report(self):
        return bound_even_symmetric(SequenceSpec((symmetric_exponential(1.0),) * 10), 2)

    def test_pass_on_exact_ground(self):
        verdict = verify_report(self._report(), 330.0 ** 0.25)
        assert verdict.passed and verdict.margin > 0.0

    def test_pass_on_mc_ground(self):
        rep = self._report()
        est = mc_moment([symmetric_exponential(1.0)] * 10, 4.0, samples=200_000, seed=2)
        assert verify_report(rep, est).passed

    def test_pass_on_quadrature_ground(self):
        from momentcert.bounds import bound_p_2_4

        rep = bound_p_2_4(SequenceSpec((symmetric_exponential(1.0),) * 10), 3.0)
        res = sum_abs_moment_via_haagerup([symmetric_exponential(1.0)] * 10, 3.0)
        assert verify_report(rep, res).passed

    def test_corrupted_report_fails(self):
        """Self-test: a deliberately shrunk interval must produce a FAIL."""
        rep = self._report()
        broken = dataclasses.replace(rep, upper=rep.lower + 1e-6, radius=None)
        verdict = verify_report(broken, 330.0 ** 0.25)
        assert not verdict.passed
        assert verdict.margin < 0.0
        assert "outside" in verdict.detail

    def test_non_certifying_rejected(self):
        rep = bound_even_symmetric(SequenceSpec((gaussian(1.0),) * 5), 1)
        with pytest.raises(ValueError):
            verify_report(rep, 1.0)

    def test_abs_moment_scale(self):
        from momentcert.bounds import bound_general_p

        seq = SequenceSpec((rademacher(1.0),) * 6)
        rep = bound_general_p(seq, 3.0, 2)
        truth = exact_discrete_moment([rademacher(1.0)] * 5, 3.0)
        assert verify_report(rep, truth).passed
