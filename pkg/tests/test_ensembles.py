import numpy as np
import pytest
from scipy import stats

from sdcs import ensembles, linalg
from sdcs.ensembles import (
    EnsembleSpec,
    SignalSpec,
    gaussian,
    inf_norm_study,
    sample_matrix,
    sample_signal,
    sigma_min_study,
    stream_rng,
)


class TestStreams:
    def test_same_key_same_draws(self):
        a = stream_rng(7, 3).random(16)
        b = stream_rng(7, 3).random(16)
        assert np.array_equal(a, b)

    def test_different_streams_differ(self):
        a = stream_rng(7, 3).random(16)
        b = stream_rng(7, 4).random(16)
        assert not np.array_equal(a, b)

    def test_streams_independent_of_order(self):
        # drawing stream 5 first or second never changes its output
        first = stream_rng(1, 5).random(8)
        stream_rng(1, 9).random(1000)
        second = stream_rng(1, 5).random(8)
        assert np.array_equal(first, second)


class TestGaussian:
    def test_moments(self):
        z = gaussian(stream_rng(0), 200_000)
        assert abs(z.mean()) < 0.01
        assert abs(z.std() - 1.0) < 0.01
        assert abs(stats.skew(z)) < 0.02
        assert abs(stats.kurtosis(z)) < 0.05

    def test_normality_ks(self):
        z = gaussian(stream_rng(1), 10_000)
        assert stats.kstest(z, "norm").pvalue > 1e-3

    def test_odd_size_and_shape(self):
        z = gaussian(stream_rng(2), (7, 3))
        assert z.shape == (7, 3)
        assert np.isfinite(z).all()

    def test_deterministic(self):
        assert np.array_equal(gaussian(stream_rng(3), 100), gaussian(stream_rng(3), 100))


class TestSampleMatrix:
    def test_scaled_is_unit_over_sqrt_m(self):
        m, n, seed = 36, 10, 5
        unit = sample_matrix(EnsembleSpec("gaussian_unit", m, n, seed), stream=2)
        scaled = sample_matrix(EnsembleSpec("gaussian_scaled", m, n, seed), stream=2)
        assert np.array_equal(scaled, unit / 6.0)

    def test_scaled_matches_unit_distribution_ks(self):
        m = 25
        unit = sample_matrix(EnsembleSpec("gaussian_unit", m, 400, 6)).ravel()
        scaled = sample_matrix(EnsembleSpec("gaussian_scaled", m, 400, 7)).ravel()
        assert stats.ks_2samp(unit / np.sqrt(m), scaled).pvalue > 1e-3

    def test_bernoulli_entries(self):
        a = sample_matrix(EnsembleSpec("bernoulli", 50, 40, 8))
        assert set(np.unique(a)) == {-1.0, 1.0}
        assert abs(a.mean()) < 0.05

    def test_sigma_relation_between_kinds(self):
        m, k = 40, 5
        unit = sample_matrix(EnsembleSpec("gaussian_unit", m, k, 9))
        scaled = sample_matrix(EnsembleSpec("gaussian_scaled", m, k, 9))
        su = linalg.singular_values(unit)
        ss = linalg.singular_values(scaled)
        assert np.allclose(su, np.sqrt(m) * ss, rtol=1e-12)

    def test_unknown_kind(self):
        with pytest.raises(ValueError):
            EnsembleSpec("uniform", 4, 4, 0)


class TestSampleSignal:
    def test_constant_model_unit_norm(self):
        x = sample_signal(SignalSpec(n=64, k=9, model="constant", seed=10))
        assert np.linalg.norm(x.dense()) == pytest.approx(1.0, rel=1e-12)
        assert np.all(x.values == 1.0 / 3.0)

    def test_support_size_and_range(self):
        x = sample_signal(SignalSpec(n=30, k=7, model="gaussian", seed=11))
        assert x.k == 7
        assert np.all(np.diff(x.support) > 0)
        assert x.support.min() >= 0 and x.support.max() < 30

    def test_full_support(self):
        x = sample_signal(SignalSpec(n=6, k=6, model="constant", seed=12))
        assert np.array_equal(x.support, np.arange(6))

    def test_support_uniformity(self):
        # each index appears with frequency k/n
        hits = np.zeros(16)
        for t in range(4000):
            x = sample_signal(SignalSpec(n=16, k=4, model="constant", seed=13), stream=t)
            hits[x.support] += 1
        freq = hits / 4000
        assert np.abs(freq - 0.25).max() < 0.03

    def test_seed_changes_draw(self):
        a = sample_signal(SignalSpec(n=40, k=5, model="gaussian", seed=14))
        b = sample_signal(SignalSpec(n=40, k=5, model="gaussian", seed=15))
        assert not (
            np.array_equal(a.support, b.support) and np.array_equal(a.values, b.values)
        )

    def test_validation(self):
        with pytest.raises(ValueError):
            SignalSpec(n=10, k=0, model="constant", seed=0)
        with pytest.raises(ValueError):
            SignalSpec(n=10, k=2, model="laplace", seed=0)


class TestStudies:
    def test_sigma_min_study_r0_near_one(self):
        # for the scaled ensemble at high oversampling, sigma_min(E) ~ 1
        rows = sigma_min_study(r=0, k=5, lambdas=[16], trials=30, seed=16)
        assert 0.4 < rows[0]["min"] <= rows[0]["max"] < 1.6
        assert rows[0]["worst_inverse"] == pytest.approx(1.0 / rows[0]["min"])

    def test_sigma_min_study_grows_with_lambda(self):
        rows = sigma_min_study(r=1, k=5, lambdas=[2, 8, 32], trials=25, seed=17)
        mins = [row["min"] for row in rows]
        assert mins[0] < mins[1] < mins[2]

    def test_sigma_min_study_rejects_fractional_m(self):
        with pytest.raises(ValueError):
            sigma_min_study(r=1, k=3, lambdas=[2.5], trials=1, seed=0)

    def test_sigma_min_study_deterministic(self):
        a = sigma_min_study(r=1, k=4, lambdas=[4], trials=10, seed=18)
        b = sigma_min_study(r=1, k=4, lambdas=[4], trials=10, seed=18)
        assert a == b

    def test_inf_norm_bernoulli_ratio_exact(self):
        # ||E||_inf = k for +-1 entries, so the ratio is sqrt(k/m) exactly
        rows = inf_norm_study(k=4, lambdas=[4, 9], trials=5, seed=19, kind="bernoulli")
        assert rows[0]["max_ratio"] == pytest.approx(np.sqrt(4 / 16.0))
        assert rows[1]["max_ratio"] == pytest.approx(np.sqrt(4 / 36.0))

    def test_inf_norm_gaussian_below_one(self):
        rows = inf_norm_study(k=20, lambdas=[10], trials=50, seed=20)
        assert rows[0]["max_ratio"] < 1.0

    def test_inf_norm_decreases_with_lambda(self):
        rows = inf_norm_study(k=8, lambdas=[2, 32], trials=20, seed=21)
        assert rows[1]["max_ratio"] < rows[0]["max_ratio"]
