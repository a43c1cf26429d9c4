import numpy as np
import pytest
from scipy.integrate import quad

from psolab.analysis import (
    PdfKind,
    build_histogram,
    fit_exponential,
    fit_power_law,
    msd_to_centroid,
    positive_increments,
    power_law_pdf,
)
from psolab.core import PsoParams, SwarmConfig, init_swarm
from psolab.errors import ConfigurationError, DegenerateDataError

from conftest import powerlaw_samples


def state_with_positions(positions):
    positions = np.array(positions, dtype=float)
    config = SwarmConfig(
        n_particles=positions.shape[0],
        dims=positions.shape[1],
        iterations=1,
        boundary_radius=10.0,
        objective="sphere",
        seed=0,
    )
    state = init_swarm(config, PsoParams())
    state.positions = positions
    return state


class TestMsd:
    def test_coincident(self):
        state = state_with_positions([[2.0, 2.0], [2.0, 2.0]])
        assert msd_to_centroid(state) == 0.0

    def test_two_symmetric(self):
        state = state_with_positions([[1.0, 0.0], [-1.0, 0.0]])
        assert msd_to_centroid(state) == pytest.approx(1.0)

    def test_hand_arithmetic(self):
        # centroid (1,1); squared distances 2, 5, 5; mean 4
        state = state_with_positions([[0.0, 0.0], [3.0, 0.0], [0.0, 3.0]])
        assert msd_to_centroid(state) == pytest.approx(4.0)

    def test_nonneg_zero_iff_coincident(self):
        rng = np.random.default_rng(3)
        for _ in range(20):
            pts = rng.normal(size=(5, 3))
            assert msd_to_centroid(state_with_positions(pts)) > 0


class TestPositiveIncrements:
    def test_mixed_series(self):
        np.testing.assert_allclose(
            positive_increments([1.0, 2.0, 1.5, 4.0]), [1.0, 2.5]
        )

    def test_monotone_decreasing(self):
        assert positive_increments([5.0, 4.0, 3.0]).size == 0

    def test_constant_series(self):
        assert positive_increments([2.0, 2.0, 2.0]).size == 0

    def test_order_preserved_and_length(self):
        rng = np.random.default_rng(4)
        series = rng.normal(size=200).cumsum()
        incs = positive_increments(series)
        assert incs.size <= series.size - 1
        raw = np.diff(series)
        np.testing.assert_array_equal(incs, raw[raw > 0])

    def test_nonfinite_dropped(self):
        incs = positive_increments([1.0, np.inf, np.inf, 2.0])
        assert np.all(np.isfinite(incs))


class TestHistogram:
    def test_small_example(self):
        h = build_histogram([0.1, 0.15, 0.3], bin_size=0.2, range_min=0, range_max=25)
        assert h.counts[0] == 2
        assert h.counts[1] == 1
        assert h.counts[2:].sum() == 0

    def test_bin_count_from_range(self):
        h = build_histogram([], bin_size=0.2, range_min=0, range_max=25)
        assert h.n_bins == 125

    def test_empty_values(self):
        h = build_histogram([], bin_size=0.5, range_min=0, range_max=5)
        assert h.counts.sum() == 0
        assert np.all(h.normalized == 0)

    def test_out_of_range_dropped(self):
        h = build_histogram([-1.0, 0.0, 4.9, 5.0, 99.0], bin_size=1.0, range_min=0, range_max=5)
        assert h.counts.sum() == 2  # 0.0 and 4.9

    def test_normalization_extremes(self):
        h = build_histogram([0.1, 0.1, 0.1, 1.1], bin_size=1.0, range_min=0, range_max=3)
        assert h.normalized.max() == 1.0
        assert h.normalized.min() == 0.0

    def test_uniform_values_similar_frequencies(self):
        rng = np.random.default_rng(5)
        h = build_histogram(rng.uniform(0, 10, 100_000), bin_size=1.0, range_min=0, range_max=10)
        assert h.counts.std() / h.counts.mean() < 0.05

    def test_total_count_is_in_range_count(self):
        rng = np.random.default_rng(6)
        values = rng.normal(5, 3, 10_000)
        h = build_histogram(values, bin_size=0.5, range_min=0, range_max=10)
        assert h.counts.sum() == np.count_nonzero((values >= 0) & (values < 10))


class TestPowerLawFit:
    def test_recovers_alpha_25(self):
        xs = powerlaw_samples(2.5, 1.0, 10_000, seed=1)
        fit = fit_power_law(xs)
        assert fit.alpha_hat == pytest.approx(2.5, abs=0.05)
        assert not fit.low_confidence
        assert fit.n_tail >= 50
        assert fit.xmin_hat <= xs.max()

    def test_recovers_alpha_15(self):
        # the classic x^(-3/2) demonstration shape
        xs = powerlaw_samples(1.5, 1.0, 10_000, seed=2)
        fit = fit_power_law(xs)
        assert fit.alpha_hat == pytest.approx(1.5, abs=0.05)

    def test_exponential_data_scores_much_worse(self):
        rng = np.random.default_rng(3)
        exp_data = rng.exponential(2.0, 10_000) + 1.0
        pl_data = powerlaw_samples(2.5, 1.0, 10_000, seed=3)
        ks_on_exp = fit_power_law(exp_data).ks
        ks_on_pl = fit_power_law(pl_data).ks
        assert ks_on_exp > 3.0 * ks_on_pl

    def test_comparison_protocol_discriminates_both_ways(self):
        pl_data = powerlaw_samples(2.5, 1.0, 10_000, seed=4)
        assert fit_power_law(pl_data).ks < fit_exponential(pl_data).ks
        rng = np.random.default_rng(4)
        exp_data = rng.exponential(2.0, 10_000) + 1.0
        assert fit_exponential(exp_data).ks < fit_power_law(exp_data).ks

    def test_identical_samples_degenerate(self):
        with pytest.raises(DegenerateDataError):
            fit_power_law(np.full(100, 3.0))

    def test_too_few_samples(self):
        with pytest.raises(DegenerateDataError):
            fit_power_law([1.0])

    def test_nonpositive_rejected(self):
        with pytest.raises(DegenerateDataError):
            fit_power_law([0.0, 1.0, 2.0])

    def test_small_sample_flagged_low_confidence(self):
        xs = powerlaw_samples(2.5, 1.0, 30, seed=5)
        fit = fit_power_law(xs)
        assert fit.low_confidence

    def test_alpha_above_one(self):
        for seed in range(5):
            xs = powerlaw_samples(2.0, 1.0, 5_000, seed=seed)
            assert fit_power_law(xs).alpha_hat > 1.0


class TestPowerLawPdf:
    def test_continuous_at_xmin(self):
        assert power_law_pdf(1.0, 2.5, 1.0) == pytest.approx(1.5)
        assert power_law_pdf(2.0, 3.0, 2.0) == pytest.approx(1.0)

    def test_continuous_integrates_to_one(self):
        for alpha, xmin in [(1.5, 1.0), (2.5, 0.5), (3.0, 2.0)]:
            total, _ = quad(
                lambda x: power_law_pdf(x, alpha, xmin), xmin, np.inf
            )
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_discrete_zeta_normalizer(self):
        # zeta(2, 1) = pi^2 / 6
        assert power_law_pdf(1.0, 2.0, 1.0, PdfKind.DISCRETE) == pytest.approx(
            6.0 / np.pi**2, abs=1e-9
        )

    def test_discrete_sums_to_one_over_truncation_support(self):
        # support truncated where the raw term drops below 1e-12
        for alpha in (2.5, 3.0):
            last = int(np.ceil(1e-12 ** (-1.0 / alpha)))
            total = sum(
                power_law_pdf(float(x), alpha, 1.0, PdfKind.DISCRETE)
                for x in range(1, last + 1)
            )
            assert total == pytest.approx(1.0, abs=1e-6)

    def test_domain_error_below_xmin(self):
        with pytest.raises(ConfigurationError):
            power_law_pdf(0.5, 2.0, 1.0)

    def test_alpha_must_exceed_one(self):
        with pytest.raises(ConfigurationError):
            power_law_pdf(2.0, 1.0, 1.0)
