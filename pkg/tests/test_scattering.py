import numpy as np
import pytest

from scatterlab.filterbank import (
    FAMILIES,
    GAMMATONE,
    MORLET,
    SHANNON,
    FilterbankSpec,
    build_filterbank,
    evaluate_wavelet_hat,
)
from scatterlab.scattering import (
    ScatteringPath,
    layer_energy,
    propagate_layer,
    renormalize_second_order,
    scalogram_power,
    scatter,
)
from scatterlab.synthesis import TwoToneSpec, two_tone


def shannon_fb(signal_len=1024, J=3):
    return build_filterbank(
        FilterbankSpec(family=SHANNON, Q=1, J=J, signal_len=signal_len, T=signal_len)
    )


class TestScalogram:
    @pytest.mark.parametrize("family", [MORLET, GAMMATONE])
    def test_pure_tone_at_center_frequency(self, family):
        # amplitude-2 cosine at the filter center: U1 = |psi_hat(1)|^2 = 1
        fb = build_filterbank(FilterbankSpec(family=family, Q=1, J=3, signal_len=1024, T=1024))
        t = np.arange(1024)
        y = 2.0 * np.cos(2 * np.pi * 0.25 * t)
        layer = scalogram_power(y, fb)
        np.testing.assert_allclose(layer.data[0], 1.0, rtol=1e-9)

    def test_shannon_in_band_tone(self):
        # in-band amplitude-2 cosine: U1 = 1 in that band, 0 in all others
        fb = shannon_fb()
        t = np.arange(1024)
        nu = 384 / 1024  # inside (0.25, 0.5]
        layer = scalogram_power(2.0 * np.cos(2 * np.pi * nu * t), fb)
        np.testing.assert_allclose(layer.data[0], 1.0, atol=1e-12)
        assert np.abs(layer.data[1:]).max() < 1e-20

    def test_shannon_band_edges_half_open(self):
        fb = shannon_fb()
        t = np.arange(1024)
        at_lambda = scalogram_power(2.0 * np.cos(2 * np.pi * 0.25 * t), fb)
        assert np.abs(at_lambda.data[0]).max() < 1e-20  # nu = lambda excluded
        np.testing.assert_allclose(at_lambda.data[1], 1.0, atol=1e-12)  # top of next band
        # the Nyquist bin is included in the top band; it is self-conjugate,
        # so the amplitude-2 cosine keeps both halves and lands at 4
        at_nyquist = scalogram_power(2.0 * np.cos(2 * np.pi * 0.5 * t), fb)
        np.testing.assert_allclose(at_nyquist.data[0], 4.0, atol=1e-11)

    def test_zero_signal(self):
        fb = shannon_fb()
        layer = scalogram_power(np.zeros(1024), fb)
        assert np.all(layer.data == 0.0)

    def test_length_mismatch_rejected(self):
        with pytest.raises(ValueError):
            scalogram_power(np.zeros(512), shannon_fb())

    def test_modulus_switch_is_sqrt_of_power(self):
        fb = shannon_fb()
        y = np.random.default_rng(0).standard_normal(1024)
        power = scalogram_power(y, fb).data
        amplitude = scalogram_power(y, fb, activation="modulus").data
        np.testing.assert_allclose(amplitude, np.sqrt(power), rtol=1e-12, atol=1e-15)


class TestPropagate:
    @pytest.mark.parametrize("family", FAMILIES)
    def test_pure_tone_second_layer_vanishes(self, family):
        # constants are annihilated: every wavelet has a null average
        fb = build_filterbank(FilterbankSpec(family=family, Q=1, J=4, signal_len=1024, T=1024))
        t = np.arange(1024)
        u1 = scalogram_power(2.0 * np.cos(2 * np.pi * 0.25 * t), fb)
        u2 = propagate_layer(u1, fb)
        assert layer_energy(u2) < 1e-24

    def test_two_tone_peak_brackets_difference(self):
        fb = build_filterbank(FilterbankSpec(family=SHANNON, Q=1, J=6, signal_len=4096, T=4096))
        nu1, nu2 = 1600 / 4096, 1500 / 4096  # same top band; difference 100 bins
        y = two_tone(TwoToneSpec(a1=1, a2=1, nu1=nu1, nu2=nu2, signal_len=4096))
        u2 = propagate_layer(scalogram_power(y, fb), fb)
        top = [
            (p, layer_energy(type(u2)(depth=2, paths=(p,), data=row[None, :])))
            for p, row in zip(u2.paths, u2.data)
            if p.indices[0] == 0
        ]
        best = max(top, key=lambda pr: pr[1])[0]
        lam2 = fb.grid[best.indices[1]]
        dnu = nu1 - nu2
        assert lam2 < dnu <= 2 * lam2  # difference tone lands in the argmax band

    def test_cross_term_matches_closed_form(self):
        # oracle: expand the per-tone filter response analytically, then push
        # the closed-form first-layer trajectory through the second layer
        n = 4096
        fb = build_filterbank(FilterbankSpec(family=GAMMATONE, Q=4, J=8, signal_len=n, T=n))
        k1, k2 = 800, 760  # exact bins
        nu1, nu2 = k1 / n, k2 / n
        a1, a2, phi1, phi2 = 1.0, 0.6, 0.3, -1.1
        y = two_tone(TwoToneSpec(a1=a1, a2=a2, nu1=nu1, nu2=nu2, phi1=phi1, phi2=phi2, signal_len=n))

        j1 = fb.nearest_index(nu1)
        lam1 = fb.grid[j1]
        h1 = complex(evaluate_wavelet_hat(GAMMATONE, 4, nu1 / lam1))
        h2 = complex(evaluate_wavelet_hat(GAMMATONE, 4, nu2 / lam1))
        t = np.arange(n)
        constant = 0.25 * (abs(h1) ** 2 * a1**2 + abs(h2) ** 2 * a2**2)
        cross = (
            0.5
            * a1
            * a2
            * np.real(
                h1
                * np.conj(h2)
                * np.exp(1j * (2 * np.pi * (nu1 - nu2) * t + (phi1 - phi2)))
            )
        )
        u1_oracle = constant + cross

        u1 = scalogram_power(y, fb)
        np.testing.assert_allclose(u1.data[j1], u1_oracle, rtol=1e-6)

        # second layer at the band bracketing the difference tone
        j2 = fb.nearest_index(nu1 - nu2)
        child = np.fft.ifft(np.fft.fft(u1_oracle) * fb.filters[j2])
        u2_oracle = np.abs(child) ** 2
        u2 = propagate_layer(u1, fb)
        row = u2.data[u2.paths.index(ScatteringPath((j1, j2)))]
        np.testing.assert_allclose(row, u2_oracle, rtol=1e-6)
        assert u2_oracle.max() > 1e-4  # the peak actually carries signal

    def test_natural_termination_empty_layer(self):
        fb = build_filterbank(FilterbankSpec(family=SHANNON, Q=1, J=1, signal_len=256, T=256))
        u1 = scalogram_power(np.random.default_rng(1).standard_normal(256), fb)
        u2 = propagate_layer(u1, fb)
        assert u2.is_empty
        assert u2.depth == 2


class TestScatter:
    def test_feature_dimension_37(self):
        fb = build_filterbank(FilterbankSpec(family=MORLET, Q=1, J=8, signal_len=1024, T=1024))
        y = np.random.default_rng(2).standard_normal(1024)
        feature, layers = scatter(y, fb, max_order=2)
        assert feature.dimension == 37  # 1 + QJ + Q^2 J(J-1)/2
        assert len(feature.order(1)) == 8
        assert len(feature.order(2)) == 28

    def test_pure_tone_features(self):
        fb = shannon_fb(4096, J=4)
        t = np.arange(4096)
        y = 2.0 * np.cos(2 * np.pi * (1536 / 4096) * t)
        feature, _ = scatter(y, fb, max_order=2)
        s1 = feature.order(1)
        nonzero = [p for p, v in s1.items() if v > 1e-12]
        assert nonzero == [ScatteringPath((0,))]
        assert all(v < 1e-20 for v in feature.order(2).values())

    def test_shift_invariance_of_features(self):
        fb = build_filterbank(FilterbankSpec(family=MORLET, Q=1, J=8, signal_len=1024, T=1024))
        rng = np.random.default_rng(3)
        y = rng.standard_normal(1024)
        ref, _ = scatter(y, fb, max_order=2)
        shifted, _ = scatter(np.roll(y, 1024 // 8), fb, max_order=2)
        a = np.array(list(ref.coeffs.values()) + [ref.order0])
        b = np.array(list(shifted.coeffs.values()) + [shifted.order0])
        assert np.linalg.norm(a - b) / np.linalg.norm(a) <= 0.15  # circular: near-exact
        assert np.linalg.norm(a - b) / np.linalg.norm(a) < 1e-10

    def test_shift_covariance_of_layers(self):
        fb = shannon_fb(2048, J=5)
        rng = np.random.default_rng(4)
        y = rng.standard_normal(2048)
        tau = 321
        _, ref = scatter(y, fb, max_order=2)
        _, shifted = scatter(np.roll(y, tau), fb, max_order=2)
        for la, lb in zip(ref, shifted):
            rolled = np.roll(la.data, tau, axis=1)
            np.testing.assert_allclose(lb.data, rolled, atol=1e-12 * max(1.0, la.data.max()))

    def test_smoothed_average_equals_explicit_convolution(self):
        fb = build_filterbank(FilterbankSpec(family=MORLET, Q=1, J=6, signal_len=1024, T=256))
        rng = np.random.default_rng(5)
        rows = rng.random((4, 1024))
        from scatterlab.scattering import _smoothed_means

        direct = _smoothed_means(rows, fb)
        explicit = np.fft.ifft(np.fft.fft(rows, axis=1) * fb.lowpass_hat[None, :], axis=1).real.mean(axis=1)
        np.testing.assert_allclose(direct, explicit, rtol=1e-12)

    def test_path_order_lexicographic(self):
        fb = shannon_fb(1024, J=3)
        y = np.random.default_rng(6).standard_normal(1024)
        feature, layers = scatter(y, fb, max_order=3)
        for layer in layers:
            assert list(layer.paths) == sorted(layer.paths)
            for p in layer.paths:
                assert all(a < b for a, b in zip(p.indices, p.indices[1:]))

    def test_nonnegativity(self):
        fb = build_filterbank(FilterbankSpec(family=GAMMATONE, Q=2, J=4, signal_len=512, T=512))
        y = np.random.default_rng(7).standard_normal(512)
        feature, layers = scatter(y, fb, max_order=2)
        assert all(np.all(layer.data >= 0.0) for layer in layers)
        assert all(v >= 0.0 for v in feature.coeffs.values())

    def test_quadratic_energy_recursion_bound(self):
        # tiling filterbank: child quartic energy is at most the parent's squared
        fb = shannon_fb(4096, J=6)
        from scatterlab.synthesis import HarmonicStackSpec, harmonic_stack

        y = harmonic_stack(HarmonicStackSpec(N=16, f1=17, signal_len=4096))
        _, layers = scatter(y, fb, max_order=4)
        for prev, nxt in zip(layers, layers[1:]):
            e_prev = layer_energy(prev)
            assert layer_energy(nxt) <= e_prev**2 * (1.0 + 1e-12)

    def test_rejects_bad_order(self):
        with pytest.raises(ValueError):
            scatter(np.zeros(1024), shannon_fb(), max_order=0)


class TestRenormalize:
    def test_pure_tone_all_zero(self):
        fb = shannon_fb(1024, J=3)
        t = np.arange(1024)
        feature, _ = scatter(2.0 * np.cos(2 * np.pi * (384 / 1024) * t), fb, max_order=2)
        renorm = renormalize_second_order(feature)
        assert max(abs(v) for v in renorm.values()) < 1e-20  # FFT ripple only

    def test_degenerate_mixture_matches_single_tone(self):
        fb = build_filterbank(FilterbankSpec(family=GAMMATONE, Q=4, J=6, signal_len=4096, T=4096))
        t = np.arange(4096)
        single = 0.8 * np.cos(2 * np.pi * 0.21 * t)
        mixture = two_tone(TwoToneSpec(a1=0.8, a2=0.0, nu1=0.21, nu2=0.15, signal_len=4096))
        fa, _ = scatter(single, fb, max_order=2)
        fm, _ = scatter(mixture, fb, max_order=2)
        ra = renormalize_second_order(fa)
        rm = renormalize_second_order(fm)
        assert ra.keys() == rm.keys()
        for p in ra:
            assert ra[p] == pytest.approx(rm[p], abs=1e-15)

    def test_equal_amplitude_peak_at_difference(self):
        fb = build_filterbank(FilterbankSpec(family=GAMMATONE, Q=4, J=8, signal_len=8192, T=8192))
        nu1 = 0.2
        nu2 = nu1 * (1 - 0.1)
        y = two_tone(TwoToneSpec(a1=1, a2=1, nu1=nu1, nu2=nu2, signal_len=8192))
        feature, _ = scatter(y, fb, max_order=2)
        renorm = renormalize_second_order(feature)
        j1 = fb.nearest_index(nu1)
        slice2 = {p.indices[1]: v for p, v in renorm.items() if p.indices[0] == j1}
        argmax_j2 = max(slice2, key=slice2.get)
        assert argmax_j2 == fb.nearest_index(nu1 - nu2)

    def test_requires_first_order(self):
        with pytest.raises(ValueError):
            from scatterlab.scattering import ScatteringFeature

            renormalize_second_order(ScatteringFeature(order0=0.0, coeffs={}, meta={}))


class TestLayerEnergy:
    def test_zero_layer(self):
        fb = shannon_fb()
        assert layer_energy(scalogram_power(np.zeros(1024), fb)) == 0.0

    def test_pure_tone_energy_is_frame_length(self):
        fb = shannon_fb(2048, J=3)
        t = np.arange(2048)
        y = 2.0 * np.cos(2 * np.pi * (768 / 2048) * t)  # in band (0.25, 0.5]
        u1 = scalogram_power(y, fb)
        assert layer_energy(u1) == pytest.approx(2048.0, rel=1e-9)
        u2 = propagate_layer(u1, fb)
        assert layer_energy(u2) / layer_energy(u1) < 1e-20


class TestScatteringPath:
    def test_rejects_nonmonotone(self):
        with pytest.raises(ValueError):
            ScatteringPath((3, 3))
        with pytest.raises(ValueError):
            ScatteringPath((5, 2))
        with pytest.raises(ValueError):
            ScatteringPath(())

    def test_label_format(self):
        fb = shannon_fb()
        assert ScatteringPath((0,)).label(fb) == "S1:0.25"
        assert ScatteringPath((0, 1)).label(fb) == "S2:0.25:0.125"
