"""Shared fixtures: an independent WAV encoder and a warmed-up backend."""

import struct

import numpy as np
import pytest

from voicegate.backends import (
    active_backend,
    available_backends,
    reset_backend,
    set_backend,
)
from voicegate.wavelet_denoise import filter_pair


def encode_wav(samples, sample_rate_hz, bits=16, channels=1) -> bytes:
    """Sample-by-sample struct packing, independent of the package's writer.

    `samples` is a flat interleaved sequence of floats in [-1, 1] for
    integer formats, or raw float32 values when bits == 32.
    """
    frames = bytearray()
    if bits == 8:
        for s in samples:
            frames += struct.pack("<B", max(0, min(255, int(round(s * 128.0)) + 128)))
        block_align = channels
    elif bits == 16:
        for s in samples:
            frames += struct.pack("<h", max(-32768, min(32767, int(round(s * 32768.0)))))
        block_align = 2 * channels
    elif bits == 24:
        for s in samples:
            v = max(-8388608, min(8388607, int(round(s * 8388608.0))))
            frames += struct.pack("<i", v)[:3]
        block_align = 3 * channels
    elif bits == 32:
        for s in samples:
            frames += struct.pack("<f", s)
        block_align = 4 * channels
    else:
        raise ValueError(f"unsupported bit depth {bits}")

    audio_format = 3 if bits == 32 else 1
    byte_rate = sample_rate_hz * block_align
    header = b"RIFF" + struct.pack("<I", 36 + len(frames)) + b"WAVE"
    header += b"fmt " + struct.pack(
        "<IHHIIHH", 16, audio_format, channels, sample_rate_hz, byte_rate, block_align, bits
    )
    header += b"data" + struct.pack("<I", len(frames))
    return header + bytes(frames)


@pytest.fixture
def wav_encoder():
    return encode_wav


def sine_wave(freq_hz: float, seconds: float, sample_rate_hz: int, amplitude: float = 0.5):
    t = np.arange(int(round(seconds * sample_rate_hz))) / sample_rate_hz
    return amplitude * np.sin(2.0 * np.pi * freq_hz * t)


@pytest.fixture
def make_sine():
    return sine_wave


@pytest.fixture(autouse=True, scope="session")
def warm_backends():
    """Compile numba kernels once so per-test timings measure steady state."""
    rng = np.random.default_rng(0)
    frames = rng.standard_normal((2, 16))
    lo, hi = filter_pair("db4")
    x = rng.standard_normal(32)
    for name in available_backends():
        set_backend(name)
        backend = active_backend()
        backend.fft_magnitude_batch(frames)
        a = backend.dwt_analysis(x, lo, hi)
        backend.dwt_synthesis(a[0], a[1], lo, hi)
        backend.soft_threshold(x, 0.1)
    reset_backend()
    yield


@pytest.fixture
def use_backend():
    """Switch backend for one test, restoring the default afterwards."""

    def _switch(name):
        set_backend(name)

    yield _switch
    reset_backend()
