import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from scipy.integrate import trapezoid

from scatterlab.filterbank import (
    FAMILIES,
    GAMMATONE,
    MORLET,
    SHANNON,
    FilterbankSpec,
    build_filterbank,
    build_frequency_grid,
    evaluate_wavelet_hat,
)


class TestFrequencyGrid:
    def test_octave_grid(self):
        np.testing.assert_allclose(build_frequency_grid(0.25, 1, 3), [0.25, 0.125, 0.0625])

    def test_two_per_octave(self):
        np.testing.assert_allclose(
            build_frequency_grid(0.25, 2, 1), [0.25, 0.25 * 2 ** (-0.5)]
        )

    def test_nine_octaves_q4(self):
        grid = build_frequency_grid(0.2, 4, 9)
        assert len(grid) == 36
        assert grid[0] / grid[-1] == pytest.approx(2 ** (35 / 4))

    def test_rejects_bad_lambda_max(self):
        for bad in (0.0, -0.1, 0.6, 1.0):
            with pytest.raises(ValueError):
                build_frequency_grid(bad, 1, 3)

    def test_rejects_empty_grid(self):
        with pytest.raises(ValueError):
            build_frequency_grid(0.25, 0, 3)
        with pytest.raises(ValueError):
            build_frequency_grid(0.25, 1, 0)

    @given(
        st.floats(min_value=0.01, max_value=0.5),
        st.integers(min_value=1, max_value=12),
        st.integers(min_value=1, max_value=10),
    )
    @settings(max_examples=50, deadline=None)
    def test_strictly_decreasing_geometric(self, lambda_max, Q, J):
        grid = build_frequency_grid(lambda_max, Q, J)
        assert len(grid) == Q * J
        assert np.all(np.diff(grid) < 0)
        ratios = grid[1:] / grid[:-1]
        np.testing.assert_allclose(ratios, 2 ** (-1.0 / Q), rtol=1e-12)


class TestWaveletHat:
    def test_shannon_indicator(self):
        assert evaluate_wavelet_hat(SHANNON, 1, 1.5) == 1.0
        assert evaluate_wavelet_hat(SHANNON, 1, 0.99) == 0.0
        assert evaluate_wavelet_hat(SHANNON, 1, 2.5) == 0.0
        # half-open band: excluded at the low edge, included at the high edge
        assert evaluate_wavelet_hat(SHANNON, 1, 1.0) == 0.0
        assert evaluate_wavelet_hat(SHANNON, 1, 2.0) == 1.0

    @pytest.mark.parametrize("family", [MORLET, GAMMATONE])
    def test_unit_peak_at_center(self, family):
        assert abs(evaluate_wavelet_hat(family, 4, 1.0)) == pytest.approx(1.0, abs=1e-12)
        assert abs(evaluate_wavelet_hat(family, 1, 1.0)) == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_null_average_and_analyticity(self, family):
        assert evaluate_wavelet_hat(family, 1, 0.0) == 0.0
        assert evaluate_wavelet_hat(family, 1, -0.7) == 0.0

    @pytest.mark.parametrize("family", [MORLET, GAMMATONE])
    @pytest.mark.parametrize("Q", [1, 4, 8])
    def test_erb_matches_quality_factor(self, family, Q):
        # independent quadrature of |psi_hat|^2 / max|psi_hat|^2
        omega = np.linspace(1e-6, 10.0, 400_001)
        power = np.abs(evaluate_wavelet_hat(family, Q, omega)) ** 2
        erb = trapezoid(power, omega) / power.max()
        assert 0.95 <= erb * Q <= 1.05

    @pytest.mark.parametrize("family", [MORLET, GAMMATONE])
    def test_peak_sits_at_unit_frequency(self, family):
        omega = np.linspace(1e-3, 4.0, 40_001)
        mag = np.abs(evaluate_wavelet_hat(family, 4, omega))
        peak_at = omega[int(np.argmax(mag))]
        assert abs(peak_at - 1.0) < 0.05
        assert mag.max() <= 1.01

    def test_rejects_unknown_family(self):
        with pytest.raises(ValueError):
            evaluate_wavelet_hat("haar", 1, 1.0)


class TestBuildFilterbank:
    def test_shannon_octave_bins(self):
        # lambda = 0.25 on a 1024 frame: indicator of bins 257..512 exactly
        fb = build_filterbank(FilterbankSpec(family=SHANNON, Q=1, J=3, signal_len=1024, T=1024))
        f0 = fb.filters[0].real
        expected = np.zeros(1024)
        expected[257:513] = 1.0
        np.testing.assert_array_equal(f0, expected)

    @pytest.mark.parametrize("family", FAMILIES)
    def test_dc_bin_zero_and_analytic(self, family):
        fb = build_filterbank(FilterbankSpec(family=family, Q=2, J=4, signal_len=512, T=512))
        assert np.all(fb.filters[:, 0] == 0.0)
        negative = np.arange(512) / 512 > 0.5
        assert np.all(fb.filters[:, negative] == 0.0)

    def test_lowpass_unit_dc(self):
        for T in (64, 256, 1024):
            fb = build_filterbank(FilterbankSpec(family=MORLET, Q=1, J=3, signal_len=1024, T=T))
            assert fb.lowpass_hat[0] == 1.0
            assert np.all(np.abs(fb.lowpass_hat) <= 1.0 + 1e-12)

    def test_littlewood_paley_shannon_tiles(self):
        fb = build_filterbank(FilterbankSpec(family=SHANNON, Q=1, J=5, signal_len=2048, T=2048))
        lp = np.sum(np.abs(fb.filters) ** 2, axis=0)
        nu = np.arange(2048) / 2048
        lowest = fb.grid[-1]
        covered = (nu > lowest) & (nu <= 2 * fb.grid[0])
        np.testing.assert_array_equal(lp[covered], 1.0)

    @pytest.mark.parametrize("family", [MORLET, GAMMATONE])
    def test_littlewood_paley_bounded(self, family):
        fb = build_filterbank(FilterbankSpec(family=family, Q=4, J=6, signal_len=4096, T=4096))
        lp = np.sum(np.abs(fb.filters) ** 2, axis=0)
        assert np.isfinite(lp.max())
        assert lp.max() < 10.0

    def test_rejects_sub_cycle_wavelet(self):
        with pytest.raises(ValueError):
            FilterbankSpec(family=SHANNON, Q=1, J=9, signal_len=1024, T=1024)

    def test_rejects_non_power_of_two(self):
        with pytest.raises(ValueError):
            FilterbankSpec(family=SHANNON, Q=1, J=3, signal_len=1000, T=1000)

    def test_filterbank_immutable(self):
        fb = build_filterbank(FilterbankSpec(family=SHANNON, Q=1, J=3, signal_len=256, T=256))
        with pytest.raises(ValueError):
            fb.filters[0, 0] = 1.0

    def test_nearest_index_log_domain(self):
        fb = build_filterbank(FilterbankSpec(family=GAMMATONE, Q=4, J=6, signal_len=4096, T=4096))
        assert fb.nearest_index(float(fb.grid[7])) == 7
        assert fb.nearest_index(0.2) == int(
            np.argmin(np.abs(np.log2(fb.grid) - np.log2(0.2)))
        )
