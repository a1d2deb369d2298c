"""Pure-numpy implementations of the hot DSP kernels.

Reference backend: every kernel here is the vectorized counterpart of the
numba backend and must stay numerically interchangeable with it.
"""

import numpy as np

NAME = "numpy"

_bitrev_cache: dict[int, np.ndarray] = {}
_twiddle_cache: dict[int, np.ndarray] = {}


def _bitrev(n: int) -> np.ndarray:
    perm = _bitrev_cache.get(n)
    if perm is None:
        bits = n.bit_length() - 1
        perm = np.zeros(n, dtype=np.intp)
        for i in range(1, n):
            perm[i] = (perm[i >> 1] >> 1) | ((i & 1) << (bits - 1))
        _bitrev_cache[n] = perm
    return perm


def _twiddles(n: int) -> np.ndarray:
    tw = _twiddle_cache.get(n)
    if tw is None:
        tw = np.exp(-2j * np.pi * np.arange(n // 2) / n)
        _twiddle_cache[n] = tw
    return tw


def fft_magnitude_batch(frames: np.ndarray) -> np.ndarray:
    """Magnitude half-spectra of a batch of real frames.

    ``frames`` is (num_frames, n) with n a power of two; returns
    (num_frames, n//2 + 1). Iterative radix-2 decimation-in-time,
    vectorized across frames.
    """
    num, n = frames.shape
    if n == 1:
        return np.abs(frames).astype(np.float64)
    z = frames[:, _bitrev(n)].astype(np.complex128)
    tw_full = _twiddles(n)
    size = 2
    while size <= n:
        half = size // 2
        tw = tw_full[:: n // size][:half]
        view = z.reshape(num, n // size, size)
        t = view[:, :, half:] * tw
        view[:, :, half:] = view[:, :, :half] - t
        view[:, :, :half] += t
        size *= 2
    return np.abs(z[:, : n // 2 + 1])


def _gather_index(n: int, taps: int) -> np.ndarray:
    return (2 * np.arange(n // 2)[:, None] + np.arange(taps)[None, :]) % n


def dwt_analysis(x: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    """One circular analysis step: (approx, detail), each len(x)//2."""
    gathered = x[_gather_index(len(x), len(lo))]
    return gathered @ lo, gathered @ hi


def dwt_synthesis(a: np.ndarray, d: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    """Inverse of one analysis step; returns 2*len(a) samples."""
    half = len(a)
    n = 2 * half
    x = np.zeros(n)
    base = 2 * np.arange(half)
    # for fixed m the target indices are all distinct, so += is safe
    for m in range(len(lo)):
        x[(base + m) % n] += a * lo[m] + d * hi[m]
    return x


def soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    return np.sign(x) * np.maximum(np.abs(x) - t, 0.0)
