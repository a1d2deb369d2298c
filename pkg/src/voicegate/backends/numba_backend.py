"""Numba-compiled implementations of the hot DSP kernels.

Same contracts as ``numpy_backend``; scalar loops compiled with ``@njit``.
Compiled code is cached on disk, so the JIT cost is paid once per machine.
"""

import math

import numpy as np
from numba import njit

NAME = "numba"


@njit(cache=True)
def _fft_mag_batch_impl(frames, out):
    num, n = frames.shape
    bits = 0
    while (1 << bits) < n:
        bits += 1
    rev = np.zeros(n, dtype=np.int64)
    for i in range(1, n):
        rev[i] = (rev[i >> 1] >> 1) | ((i & 1) << (bits - 1))
    half_n = n // 2
    tw_re = np.empty(half_n)
    tw_im = np.empty(half_n)
    for j in range(half_n):
        ang = -2.0 * math.pi * j / n
        tw_re[j] = math.cos(ang)
        tw_im[j] = math.sin(ang)
    re = np.empty(n)
    im = np.empty(n)
    for f in range(num):
        for i in range(n):
            re[i] = frames[f, rev[i]]
            im[i] = 0.0
        size = 2
        while size <= n:
            half = size // 2
            stride = n // size
            for start in range(0, n, size):
                for j in range(half):
                    wr = tw_re[j * stride]
                    wi = tw_im[j * stride]
                    i1 = start + j
                    i2 = i1 + half
                    tr = wr * re[i2] - wi * im[i2]
                    ti = wr * im[i2] + wi * re[i2]
                    re[i2] = re[i1] - tr
                    im[i2] = im[i1] - ti
                    re[i1] += tr
                    im[i1] += ti
            size *= 2
        for i in range(half_n + 1):
            out[f, i] = math.sqrt(re[i] * re[i] + im[i] * im[i])


def fft_magnitude_batch(frames: np.ndarray) -> np.ndarray:
    frames = np.ascontiguousarray(frames, dtype=np.float64)
    num, n = frames.shape
    out = np.empty((num, n // 2 + 1))
    if n == 1:
        return np.abs(frames)
    _fft_mag_batch_impl(frames, out)
    return out


@njit(cache=True)
def _dwt_analysis_impl(x, lo, hi, a, d):
    n = x.shape[0]
    half = n // 2
    taps = lo.shape[0]
    for k in range(half):
        sa = 0.0
        sd = 0.0
        for m in range(taps):
            v = x[(2 * k + m) % n]
            sa += lo[m] * v
            sd += hi[m] * v
        a[k] = sa
        d[k] = sd


def dwt_analysis(x: np.ndarray, lo: np.ndarray, hi: np.ndarray):
    x = np.ascontiguousarray(x, dtype=np.float64)
    half = len(x) // 2
    a = np.empty(half)
    d = np.empty(half)
    _dwt_analysis_impl(x, lo, hi, a, d)
    return a, d


@njit(cache=True)
def _dwt_synthesis_impl(a, d, lo, hi, x):
    half = a.shape[0]
    n = 2 * half
    taps = lo.shape[0]
    for i in range(n):
        x[i] = 0.0
    for k in range(half):
        for m in range(taps):
            i = (2 * k + m) % n
            x[i] += a[k] * lo[m] + d[k] * hi[m]


def dwt_synthesis(a: np.ndarray, d: np.ndarray, lo: np.ndarray, hi: np.ndarray) -> np.ndarray:
    a = np.ascontiguousarray(a, dtype=np.float64)
    d = np.ascontiguousarray(d, dtype=np.float64)
    x = np.empty(2 * len(a))
    _dwt_synthesis_impl(a, d, lo, hi, x)
    return x


@njit(cache=True)
def _soft_threshold_impl(x, t, out):
    for i in range(x.shape[0]):
        v = x[i]
        mag = abs(v) - t
        if mag < 0.0:
            mag = 0.0
        out[i] = mag if v >= 0.0 else -mag
    return out


def soft_threshold(x: np.ndarray, t: float) -> np.ndarray:
    x = np.ascontiguousarray(x, dtype=np.float64)
    out = np.empty_like(x)
    _soft_threshold_impl(x, float(t), out)
    return out
