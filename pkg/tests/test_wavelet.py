"""Wavelet transform, thresholding, and denoising."""

import math

import numpy as np
import pytest

from voicegate.audio_io import Signal
from voicegate.backends import active_backend
from voicegate.errors import ConfigError, DepthError, StructureError
from voicegate.wavelet_denoise import (
    MAD_SCALE,
    WaveletConfig,
    denoise,
    dwt_forward,
    dwt_inverse,
    filter_pair,
    universal_threshold,
)

from oracles import naive_multilevel_dwt, naive_soft_threshold

SQRT2 = math.sqrt(2.0)


def _signal(samples, sr=16000):
    return Signal(np.asarray(samples, dtype=np.float64), sr)


class TestConfig:
    def test_defaults(self):
        cfg = WaveletConfig()
        assert cfg.family == "db4" and cfg.levels == 4
        assert cfg.threshold_rule == "universal" and cfg.threshold_mode == "soft"

    def test_unknown_family_rejected(self):
        with pytest.raises(ConfigError):
            WaveletConfig(family="sym5")

    def test_nonpositive_levels_rejected(self):
        with pytest.raises(ConfigError):
            WaveletConfig(levels=0)

    def test_unknown_rule_and_mode_rejected(self):
        with pytest.raises(ConfigError):
            WaveletConfig(threshold_rule="sure")
        with pytest.raises(ConfigError):
            WaveletConfig(threshold_mode="hard")

    def test_quadrature_mirror_relation(self):
        for family in ("haar", "db4"):
            lo, hi = filter_pair(family)
            expected = [(-1.0) ** m * lo[len(lo) - 1 - m] for m in range(len(lo))]
            np.testing.assert_allclose(hi, expected, atol=1e-15)


class TestForward:
    def test_haar_constant_signal(self):
        d = dwt_forward(_signal([1, 1, 1, 1]), WaveletConfig(family="haar", levels=1))
        np.testing.assert_allclose(d.approximation, [SQRT2, SQRT2], atol=1e-12)
        np.testing.assert_allclose(d.details[0], [0, 0], atol=1e-12)

    def test_haar_alternating_signal(self):
        d = dwt_forward(_signal([1, -1, 1, -1]), WaveletConfig(family="haar", levels=1))
        np.testing.assert_allclose(d.approximation, [0, 0], atol=1e-12)
        np.testing.assert_allclose(d.details[0], [SQRT2, SQRT2], atol=1e-12)

    def test_db4_matches_naive_cascade_oracle(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(1024)
        cfg = WaveletConfig(family="db4", levels=3)
        d = dwt_forward(_signal(x), cfg)
        lo, hi = filter_pair("db4")
        approx, details = naive_multilevel_dwt(x, lo, hi, 3)
        np.testing.assert_allclose(d.approximation, approx, atol=1e-9)
        assert len(d.details) == 3
        for got, want in zip(d.details, details):
            np.testing.assert_allclose(got, want, atol=1e-9)

    def test_critical_sampling(self):
        rng = np.random.default_rng(4)
        for n in (64, 100, 257):
            x = rng.standard_normal(n)
            d = dwt_forward(_signal(x), WaveletConfig(levels=3))
            # each level halves its (evenly padded) input; totals must match
            expected_details = []
            length = n
            for _ in range(3):
                length += length % 2
                length //= 2
                expected_details.append(length)
            assert [len(lv) for lv in d.details] == expected_details
            assert len(d.approximation) == expected_details[-1]
            assert d.original_length == n

    def test_dyadic_total_equals_input_length(self):
        d = dwt_forward(_signal(np.random.default_rng(1).standard_normal(64)), WaveletConfig(levels=3))
        total = len(d.approximation) + sum(len(lv) for lv in d.details)
        assert total == 64

    def test_too_short_signal_raises_depth_error(self):
        with pytest.raises(DepthError):
            dwt_forward(_signal([1.0, 2.0]), WaveletConfig(levels=4))


class TestInverse:
    @pytest.mark.parametrize("family", ["haar", "db4"])
    @pytest.mark.parametrize("n", [8, 64, 1024])
    def test_perfect_reconstruction_dyadic(self, family, n):
        rng = np.random.default_rng(n)
        x = rng.standard_normal(n)
        cfg = WaveletConfig(family=family, levels=3)
        out = dwt_inverse(dwt_forward(_signal(x), cfg), cfg)
        assert np.max(np.abs(out - x)) < 1e-10

    def test_perfect_reconstruction_odd_lengths(self):
        rng = np.random.default_rng(9)
        for n in (101, 333, 1000):
            x = rng.standard_normal(n)
            cfg = WaveletConfig(levels=3)
            out = dwt_inverse(dwt_forward(_signal(x), cfg), cfg)
            assert len(out) == n
            assert np.max(np.abs(out - x)) < 1e-10

    def test_all_zero_decomposition_gives_zero_signal(self):
        cfg = WaveletConfig(family="haar", levels=2)
        d = dwt_forward(_signal(np.zeros(16)), cfg)
        out = dwt_inverse(d, cfg)
        np.testing.assert_allclose(out, np.zeros(16), atol=1e-15)

    def test_level_mismatch_raises_structure_error(self):
        cfg2 = WaveletConfig(family="haar", levels=2)
        cfg3 = WaveletConfig(family="haar", levels=3)
        d = dwt_forward(_signal(np.arange(32.0)), cfg2)
        with pytest.raises(StructureError):
            dwt_inverse(d, cfg3)

    def test_1024_roundtrip_error_bound(self):
        rng = np.random.default_rng(11)
        x = rng.standard_normal(1024)
        cfg = WaveletConfig(family="db4", levels=3)
        out = dwt_inverse(dwt_forward(_signal(x), cfg), cfg)
        assert np.max(np.abs(out - x)) < 1e-10


class TestThreshold:
    def test_universal_threshold_formula(self):
        rng = np.random.default_rng(2)
        finest = rng.standard_normal(512)
        t = universal_threshold(finest, 1024)
        sigma = np.median(np.abs(finest)) / MAD_SCALE
        assert t == pytest.approx(sigma * math.sqrt(2.0 * math.log(1024)), rel=1e-12)

    def test_soft_threshold_matches_naive(self):
        rng = np.random.default_rng(5)
        x = rng.standard_normal(300)
        got = active_backend().soft_threshold(x, 0.7)
        np.testing.assert_allclose(got, naive_soft_threshold(x, 0.7), atol=1e-15)

    def test_soft_threshold_is_contraction(self):
        rng = np.random.default_rng(6)
        x = rng.standard_normal(1000) * 3
        out = active_backend().soft_threshold(x, 0.5)
        assert np.all(np.abs(out) <= np.abs(x) + 1e-15)


class TestDenoise:
    def test_constant_signal_unchanged(self):
        x = np.full(256, 0.5)
        out = denoise(_signal(x))
        assert np.max(np.abs(out.samples - x)) < 1e-10

    def test_pure_noise_variance_shrinks(self):
        rng = np.random.default_rng(8)
        x = 0.1 * rng.standard_normal(4096)
        out = denoise(_signal(x))
        assert out.samples.var() < x.var()

    def test_sine_snr_improves_by_3db(self):
        sr = 32000
        t = np.arange(sr) / sr
        clean = 0.5 * np.sin(2 * np.pi * 440.0 * t)
        rng = np.random.default_rng(0)
        noise = rng.standard_normal(sr)
        noise *= np.sqrt(np.mean(clean**2) / 10 ** (5 / 10) / np.mean(noise**2))
        noisy = clean + noise

        def snr_db(x):
            return 10 * np.log10(np.sum(clean**2) / np.sum((x - clean) ** 2))

        out = denoise(_signal(noisy, sr))
        assert len(out.samples) == sr
        assert snr_db(out.samples) - snr_db(noisy) >= 3.0

    def test_energy_never_increases(self):
        rng = np.random.default_rng(13)
        for _ in range(20):
            n = int(rng.integers(64, 3000))
            x = rng.standard_normal(n)
            out = denoise(_signal(x))
            assert np.sum(out.samples**2) <= np.sum(x**2) + 1e-9

    def test_repeated_denoise_variance_monotone(self):
        rng = np.random.default_rng(14)
        x = _signal(0.2 * rng.standard_normal(2048))
        once = denoise(x)
        twice = denoise(once)
        assert twice.samples.var() <= once.samples.var() + 1e-12

    def test_output_preserves_rate_and_length(self):
        rng = np.random.default_rng(15)
        sig = _signal(rng.standard_normal(999), 22050)
        out = denoise(sig)
        assert out.sample_rate_hz == 22050
        assert len(out.samples) == 999
