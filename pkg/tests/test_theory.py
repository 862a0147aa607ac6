import math

import numpy as np
import pytest
from scipy import stats

from sc2pcr.theory import (
    AmbiguityModel,
    inlier_outlier_counts,
    mc_ambiguity_sc,
    mc_ambiguity_sc2,
    poisson_pmf,
    sc2_ambiguity,
    sc2_ambiguity_sensitivity,
    sc_ambiguity,
    skellam_tail,
)

from conftest import rng_for


def mc_ambiguity_sc2_dense(model, trials, seed):
    """Brute-force oracle: materialize the full compatibility matrix per trial.

    Only tractable at small n; used to certify the marginalized sampler.
    """
    rng = rng_for(seed)
    ni, no = inlier_outlier_counts(model)
    hits = 0
    for _ in range(trials):
        cross = rng.random((model.n, model.n)) < model.p
        cross = np.triu(cross, 1)
        c = cross | cross.T
        c[:ni, :ni] = True
        np.fill_diagonal(c, False)
        counts = (c.astype(np.int64) @ c.astype(np.int64)) * c
        i, j, o = 0, 1, ni
        hits += counts[i, o] > counts[i, j]
    est = hits / trials
    return est, math.sqrt(max(est * (1 - est), 1e-30) / trials)


class TestAmbiguityModel:
    def test_rejects_too_few_inliers(self):
        with pytest.raises(ValueError):
            AmbiguityModel(n=100, alpha=0.01, p=0.2)

    @pytest.mark.parametrize("p", [0.0, 1.0, -0.2, 1.5])
    def test_rejects_bad_p(self, p):
        with pytest.raises(ValueError):
            AmbiguityModel(n=100, alpha=0.5, p=p)

    def test_rejects_alpha_one(self):
        with pytest.raises(ValueError):
            AmbiguityModel(n=100, alpha=1.0, p=0.2)


class TestScAmbiguity:
    def test_reference_point(self):
        assert sc_ambiguity(0.2) == pytest.approx(0.1)

    def test_vanishing_limit(self):
        assert sc_ambiguity(1e-12) == pytest.approx(0.0, abs=1e-12)

    def test_half(self):
        assert sc_ambiguity(0.5) == pytest.approx(0.25)

    @pytest.mark.parametrize("p", [0.0, 1.0, 2.0, -0.1])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            sc_ambiguity(p)


class TestPoissonPmf:
    def test_zero_rate_point_mass(self):
        d = poisson_pmf(0.0)
        np.testing.assert_array_equal(d.pmf, [1.0])
        assert d.offset == 0

    def test_unit_rate(self):
        d = poisson_pmf(1.0)
        assert d.pmf[0] == pytest.approx(math.exp(-1.0), abs=1e-9)

    def test_moment_at_fifty(self):
        d = poisson_pmf(50.0)
        mean = float(np.arange(len(d.pmf)) @ d.pmf)
        assert mean == pytest.approx(50.0, abs=1e-8)

    def test_mass_and_tail_accounting(self):
        for lam in (0.3, 5.0, 211.7):
            d = poisson_pmf(lam)
            assert 1.0 - 1e-10 <= d.pmf.sum() <= 1.0 + 1e-12
            assert d.truncated_tail < 1e-12
            assert np.all(d.pmf >= 0.0)

    def test_matches_scipy(self):
        d = poisson_pmf(17.3)
        ref = stats.poisson.pmf(np.arange(len(d.pmf)), 17.3)
        np.testing.assert_allclose(d.pmf, ref, atol=1e-13)

    def test_negative_rate(self):
        with pytest.raises(ValueError):
            poisson_pmf(-1.0)


class TestSkellamTail:
    def test_degenerate_reduces_to_poisson(self):
        d = poisson_pmf(3.0)
        sf = 1.0 - float(np.cumsum(d.pmf)[2])  # P(X > 2)
        assert skellam_tail(3.0, 0.0, 2) == pytest.approx(sf, abs=1e-12)

    def test_symmetric_case(self):
        for mu in (0.5, 2.0, 9.0):
            p0 = stats.skellam.pmf(0, mu, mu)
            assert skellam_tail(mu, mu, 0) == pytest.approx((1.0 - p0) / 2.0, abs=1e-10)

    def test_double_sum_oracle(self):
        mu1, mu2, k = 3.0, 1.0, 2
        total = 0.0
        for a in range(81):
            for b in range(81):
                if a - b > k:
                    total += stats.poisson.pmf(a, mu1) * stats.poisson.pmf(b, mu2)
        assert skellam_tail(mu1, mu2, k) == pytest.approx(total, abs=1e-10)

    def test_matches_scipy_sf(self):
        for mu1, mu2, k in [(3.0, 1.0, 2), (10.0, 12.0, -3), (200.0, 180.0, 40)]:
            assert skellam_tail(mu1, mu2, k) == pytest.approx(
                float(stats.skellam.sf(k, mu1, mu2)), abs=1e-9
            )

    def test_non_increasing_in_k(self):
        values = [skellam_tail(4.0, 2.5, k) for k in range(-20, 20)]
        assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))
        assert values[0] == pytest.approx(1.0, abs=1e-9)

    def test_negative_rates(self):
        with pytest.raises(ValueError):
            skellam_tail(-1.0, 1.0, 0)


class TestSc2Ambiguity:
    def test_near_zero_at_one_percent_large_n(self):
        value = sc2_ambiguity(AmbiguityModel(n=5000, alpha=0.01, p=0.2))
        assert value < 0.01

    def test_monotone_decreasing_in_alpha(self):
        values = [
            sc2_ambiguity(AmbiguityModel(n=2000, alpha=a, p=0.2))
            for a in (0.002, 0.005, 0.01, 0.02, 0.05, 0.1)
        ]
        assert all(a >= b - 1e-15 for a, b in zip(values, values[1:]))
        assert values[-1] < 1e-6

    def test_monotone_decreasing_in_n(self):
        values = [
            sc2_ambiguity(AmbiguityModel(n=n, alpha=0.01, p=0.2))
            for n in (1000, 2500, 5000)
        ]
        assert values[0] >= values[1] >= values[2]

    def test_sensitivity_collapses_on_integral_threshold(self):
        model = AmbiguityModel(n=1000, alpha=0.01, p=0.2)  # n*alpha-2 = 8
        lo, mid, hi = sc2_ambiguity_sensitivity(model)
        assert lo == mid == hi

    def test_sensitivity_brackets_nonintegral(self):
        model = AmbiguityModel(n=1000, alpha=0.0105, p=0.2)
        lo, mid, hi = sc2_ambiguity_sensitivity(model)
        assert hi <= mid <= lo  # tail shrinks as the threshold grows


class TestMcAmbiguitySc2:
    def test_tiny_p_gives_zero(self):
        model = AmbiguityModel(n=500, alpha=0.1, p=1e-4)
        est, se = mc_ambiguity_sc2(model, trials=20000, seed=1)
        assert est == 0.0

    def test_no_outliers_rejected(self):
        model = AmbiguityModel(n=10, alpha=0.99, p=0.2)  # rounds to 10 inliers
        with pytest.raises(ValueError):
            mc_ambiguity_sc2(model, trials=100, seed=0)

    def test_agrees_with_analytic(self):
        model = AmbiguityModel(n=1000, alpha=0.02, p=0.2)
        est, se = mc_ambiguity_sc2(model, trials=200000, seed=3)
        assert abs(sc2_ambiguity(model) - est) <= 3 * se + 0.02

    def test_agrees_with_dense_oracle(self):
        for n, alpha, p in [(30, 0.2, 0.3), (50, 0.1, 0.25)]:
            model = AmbiguityModel(n=n, alpha=alpha, p=p)
            fast, fast_se = mc_ambiguity_sc2(model, trials=200000, seed=5)
            dense, dense_se = mc_ambiguity_sc2_dense(model, trials=15000, seed=6)
            gap = abs(fast - dense)
            assert gap <= 4 * math.hypot(fast_se, dense_se), (n, alpha, p, fast, dense)

    def test_reproducible(self):
        model = AmbiguityModel(n=800, alpha=0.05, p=0.2)
        a = mc_ambiguity_sc2(model, trials=50000, seed=11)
        b = mc_ambiguity_sc2(model, trials=50000, seed=11)
        assert a == b

    def test_toy_regime_never_ambiguous(self):
        # 5 inliers among 7 with small p: the event requires outlier
        # compatibility that essentially never happens
        model = AmbiguityModel(n=7, alpha=5 / 7, p=1e-3)
        est, _ = mc_ambiguity_sc2(model, trials=5000, seed=13)
        assert est == 0.0


class TestMcAmbiguitySc:
    def test_reference_point(self):
        est, se = mc_ambiguity_sc(0.2, trials=1_000_000, seed=21)
        assert abs(est - 0.1) <= 3 * se

    def test_vanishing_window(self):
        est, _ = mc_ambiguity_sc(1e-6, trials=50000, seed=22)
        assert est <= 1e-4

    def test_seed_consistency(self):
        a, se_a = mc_ambiguity_sc(0.2, trials=200000, seed=1)
        b, se_b = mc_ambiguity_sc(0.2, trials=200000, seed=2)
        assert abs(a - b) <= 6 * math.hypot(se_a, se_b)

    @pytest.mark.parametrize("p", [0.0, 1.0])
    def test_domain(self, p):
        with pytest.raises(ValueError):
            mc_ambiguity_sc(p, trials=10, seed=0)
