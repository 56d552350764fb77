"""Tests for the spectral analysis/synthesis core and the ERB filterbank."""

import numpy as np
import pytest

from batkit import dsp


class TestWindow:
    def test_length(self):
        assert len(dsp.make_window(512)) == 512

    def test_endpoint_zero(self):
        assert dsp.make_window(512)[0] == 0.0

    def test_cola_by_direct_summation(self):
        # sum of squared windows over all hop offsets, checked sample by sample
        w2 = dsp.make_window(512) ** 2
        for n in range(256):
            assert w2[n] + w2[n + 256] == pytest.approx(1.0, abs=1e-12)

    @pytest.mark.parametrize("bad", [0, -4, 511])
    def test_invalid_size(self, bad):
        with pytest.raises(ValueError):
            dsp.make_window(bad)


class TestStft:
    def test_zero_signal(self):
        spec = dsp.stft(np.zeros(4096))
        assert np.all(spec.data == 0)

    def test_frame_count_5s(self):
        assert dsp.frame_count(5 * 16000) == 311
        spec = dsp.stft(np.zeros(5 * 16000))
        assert spec.frames == 311
        assert spec.bins == 257

    def test_too_short(self):
        with pytest.raises(ValueError):
            dsp.stft(np.zeros(100))

    def test_sinusoid_peaks_at_bin(self):
        # oracle: direct DFT summation of one windowed frame
        k = 37
        n = np.arange(5 * 512)
        x = np.cos(2 * np.pi * k * n / 512)
        spec = dsp.stft(x)
        w = dsp.make_window(512)
        frame_idx = 3
        seg = x[frame_idx * 256 : frame_idx * 256 + 512] * w
        oracle = np.array(
            [np.sum(seg * np.exp(-2j * np.pi * f * np.arange(512) / 512)) for f in range(257)]
        )
        assert np.allclose(spec.data[frame_idx], oracle, atol=1e-9)
        for l in range(1, spec.frames - 1):
            assert np.argmax(np.abs(spec.data[l])) == k

    def test_parseval_convention(self):
        # pins the unnormalized-forward convention: one-sided weighted
        # spectrum energy equals N times the windowed-frame energy
        rng = np.random.default_rng(0)
        x = rng.standard_normal(2048)
        spec = dsp.stft(x)
        w = dsp.make_window(512)
        frame = x[256 : 256 + 512] * w
        mag2 = np.abs(spec.data[1]) ** 2
        one_sided = mag2[0] + 2 * np.sum(mag2[1:-1]) + mag2[-1]
        assert one_sided == pytest.approx(512 * np.sum(frame**2), rel=1e-10)


class TestIstft:
    def test_roundtrip(self):
        rng = np.random.default_rng(7)
        x = rng.standard_normal(16000)
        y = dsp.istft(dsp.stft(x))
        interior = slice(256, len(y) - 256)
        err = np.abs(y[interior] - x[interior]) / np.max(np.abs(x))
        assert np.max(err) < 1e-6

    def test_roundtrip_many_lengths(self):
        rng = np.random.default_rng(8)
        for n in (2048, 3000, 4097, 10240):
            x = rng.standard_normal(n)
            y = dsp.istft(dsp.stft(x))
            interior = slice(256, len(y) - 256)
            assert np.max(np.abs(y[interior] - x[interior])) < 1e-6 * np.max(np.abs(x))

    def test_zero(self):
        spec = dsp.Spectrogram(np.zeros((8, 257), dtype=complex))
        assert np.all(dsp.istft(spec) == 0)

    def test_scaling_linearity(self):
        rng = np.random.default_rng(9)
        spec = dsp.stft(rng.standard_normal(4096))
        c = 2.7
        scaled = dsp.Spectrogram(c * spec.data)
        assert np.allclose(dsp.istft(scaled), c * dsp.istft(spec), rtol=1e-12, atol=1e-12)

    def test_geometry_mismatch(self):
        bad = dsp.Spectrogram(np.zeros((4, 100), dtype=complex))
        with pytest.raises(ValueError):
            dsp.istft(bad)


@pytest.fixture(scope="module")
def fb():
    return dsp.build_erb_filterbank(32, 257, 16000)


class TestErbFilterbank:
    def test_band_count_and_centers(self, fb):
        assert fb.bands == 32
        assert fb.centers_hz[-1] < 8000.0
        assert np.all(np.diff(fb.centers_hz) > 0)

    def test_erb_rate_1khz(self):
        v = dsp.erb_rate(1000.0)
        assert v == pytest.approx(21.4 * np.log10(1.0 + 0.00437 * 1000.0), abs=1e-12)
        assert v == pytest.approx(15.59, abs=0.05)

    def test_normalizer_identity(self, fb):
        # Eq-level identity: normalizers are exactly the row sums
        assert np.array_equal(fb.normalizers, fb.weights.sum(axis=1))

    def test_no_spectral_holes(self, fb):
        assert np.all(fb.weights.sum(axis=0) > 0)

    def test_invalid_args(self):
        with pytest.raises(ValueError):
            dsp.build_erb_filterbank(40, 32)
        with pytest.raises(ValueError):
            dsp.build_erb_filterbank(1, 257)


class TestErbCompress:
    def test_constant_input(self, fb):
        out = dsp.erb_compress(np.full((5, 257), 0.37), fb)
        assert np.allclose(out, 0.37, atol=1e-14)

    def test_bound_preservation(self, fb):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            x = rng.uniform(-1.0, 1.0, size=(3, 257))
            out = dsp.erb_compress(x, fb)
            assert np.all(np.abs(out) <= 1.0 + 1e-12)

    def test_single_bin_impulse(self, fb):
        for f0 in (0, 17, 100, 256):
            x = np.zeros((1, 257))
            x[0, f0] = 1.0
            out = dsp.erb_compress(x, fb)
            expected = fb.weights[:, f0] / fb.normalizers
            assert np.allclose(out[0], expected, atol=1e-15)

    def test_dimension_mismatch(self, fb):
        with pytest.raises(ValueError):
            dsp.erb_compress(np.zeros((4, 100)), fb)


class TestErbExpand:
    def test_ones(self, fb):
        out = dsp.erb_expand(np.ones((4, 32)), fb)
        assert np.all(out == 1.0)

    def test_zeros(self, fb):
        assert np.all(dsp.erb_expand(np.zeros((4, 32)), fb) == 0.0)

    def test_roundtrip_golden(self, fb):
        # smoothing error of compress(expand(g)) pinned for the reference
        # filterbank; recomputed value must match the frozen one
        rng = np.random.default_rng(123)
        g = rng.uniform(0.0, 2.0, size=(64, 32))
        err = np.max(np.abs(dsp.erb_compress(dsp.erb_expand(g, fb), fb) - g))
        assert err == pytest.approx(0.6556899149073276, abs=1e-6)

    def test_dimension_mismatch(self, fb):
        with pytest.raises(ValueError):
            dsp.erb_expand(np.zeros((4, 31)), fb)
