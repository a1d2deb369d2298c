"""MFCC feature extraction.

Stage order: pre-emphasis -> frame blocking -> Hamming window -> FFT
magnitude spectrum -> triangular mel filterbank -> log energies -> DCT
cepstra -> sinusoidal liftering. All stages are pure functions;
``extract_mfcc`` composes them.
"""

import hashlib
from dataclasses import dataclass

import numpy as np

from .audio_io import Signal
from .backends import active_backend
from .errors import ConfigError, ResolutionError, ShapeError, TooShortError

LOG_FLOOR = 1e-10  # applied before ln so silent frames stay finite


@dataclass(frozen=True)
class MfccConfig:
    """Front-end parameters. ``fmax_hz=None`` means the Nyquist frequency."""

    preemphasis_k: float = 0.97
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    num_filters: int = 20
    num_ceps: int = 13
    lifter_l: int = 22
    fmin_hz: float = 0.0
    fmax_hz: float | None = None

    def __post_init__(self):
        if not 0.0 <= self.preemphasis_k < 1.0:
            raise ConfigError(f"pre-emphasis coefficient must be in [0, 1), got {self.preemphasis_k}")
        if self.frame_ms <= 0:
            raise ConfigError("frame_ms must be positive")
        if not 0 < self.hop_ms <= self.frame_ms:
            raise ConfigError("hop_ms must be in (0, frame_ms]")
        if self.num_filters < 1:
            raise ConfigError("num_filters must be >= 1")
        if not 1 <= self.num_ceps <= self.num_filters:
            raise ConfigError("num_ceps must be in [1, num_filters]")
        if self.lifter_l < 0:
            raise ConfigError("lifter_l must be >= 0")
        if self.fmin_hz < 0:
            raise ConfigError("fmin_hz must be >= 0")
        if self.fmax_hz is not None and self.fmax_hz <= self.fmin_hz:
            raise ConfigError("fmax_hz must exceed fmin_hz")

    def fingerprint(self) -> str:
        text = "|".join(
            f"{name}={getattr(self, name)!r}"
            for name in (
                "preemphasis_k",
                "frame_ms",
                "hop_ms",
                "num_filters",
                "num_ceps",
                "lifter_l",
                "fmin_hz",
                "fmax_hz",
            )
        )
        return hashlib.sha256(text.encode()).hexdigest()


@dataclass
class FrameMatrix:
    frames: np.ndarray  # (num_frames, frame_len)
    frame_len: int
    hop: int


@dataclass
class MelFilterbank:
    weights: np.ndarray  # (num_filters, fft_size//2 + 1), unit peak per row
    center_freqs_hz: np.ndarray


@dataclass
class MfccMatrix:
    coeffs: np.ndarray  # (num_frames, num_ceps), liftered
    config_fingerprint: str

    @property
    def num_frames(self) -> int:
        return self.coeffs.shape[0]


def preemphasize(samples: np.ndarray, k: float) -> np.ndarray:
    """First-order high-pass difference: out[n] = in[n] - k*in[n-1].

    The first sample, which the difference leaves undefined, is scaled by
    (1 - k) so constant signals are attenuated uniformly.
    """
    if not 0.0 <= k < 1.0:
        raise ConfigError(f"pre-emphasis coefficient must be in [0, 1), got {k}")
    x = np.asarray(samples, dtype=np.float64)
    out = np.empty_like(x)
    out[0] = (1.0 - k) * x[0]
    out[1:] = x[1:] - k * x[:-1]
    return out


def frame_blocks(samples: np.ndarray, sample_rate_hz: int, frame_ms: float, hop_ms: float) -> FrameMatrix:
    """Slice a signal into overlapping frames; trailing partial frames drop."""
    x = np.asarray(samples, dtype=np.float64)
    frame_len = int(round(sample_rate_hz * frame_ms / 1000.0))
    hop = int(round(sample_rate_hz * hop_ms / 1000.0))
    if frame_len < 1 or hop < 1:
        raise ConfigError("frame and hop must span at least one sample")
    if len(x) < frame_len:
        raise TooShortError(f"signal of {len(x)} samples is shorter than one {frame_len}-sample frame")
    num_frames = (len(x) - frame_len) // hop + 1
    windows = np.lib.stride_tricks.sliding_window_view(x, frame_len)[::hop]
    return FrameMatrix(windows[:num_frames].copy(), frame_len, hop)


def hamming_window(frame_len: int) -> np.ndarray:
    """w(n) = 0.54 - 0.46 cos(2 pi n / (N-1))."""
    if frame_len < 2:
        raise ConfigError("window length must be >= 2")
    n = np.arange(frame_len)
    return 0.54 - 0.46 * np.cos(2.0 * np.pi * n / (frame_len - 1))


def next_pow2(n: int) -> int:
    return 1 << (n - 1).bit_length()


def magnitude_spectrum(frame: np.ndarray) -> np.ndarray:
    """|DFT| of a real frame zero-padded to the next power of two.

    Returns bins 0 .. fft_size/2 inclusive.
    """
    frame = np.asarray(frame, dtype=np.float64)
    if frame.size == 0:
        raise ShapeError("cannot take the spectrum of an empty frame")
    fft_size = next_pow2(len(frame))
    padded = np.zeros((1, fft_size))
    padded[0, : len(frame)] = frame
    return active_backend().fft_magnitude_batch(padded)[0]


def hz_to_mel(f_hz):
    """Mel pitch of a frequency: 2595 * log10(1 + f/700)."""
    f = np.asarray(f_hz, dtype=np.float64)
    if np.any(f < 0):
        raise ConfigError("frequency must be non-negative")
    result = 2595.0 * np.log10(1.0 + f / 700.0)
    return float(result) if np.isscalar(f_hz) else result


def mel_to_hz(mel):
    m = np.asarray(mel, dtype=np.float64)
    result = 700.0 * (10.0 ** (m / 2595.0) - 1.0)
    return float(result) if np.isscalar(mel) else result


def build_filterbank(
    num_filters: int,
    fft_size: int,
    sample_rate_hz: int,
    fmin_hz: float = 0.0,
    fmax_hz: float | None = None,
) -> MelFilterbank:
    """Triangular filters with centers uniformly spaced on the mel axis.

    num_filters + 2 boundary points are placed uniformly in mel between
    fmin and fmax, mapped back to Hz, and snapped to the nearest FFT bin;
    filter m rises over [boundary m, boundary m+1] and falls over
    [boundary m+1, boundary m+2] with unit peak height.
    """
    if num_filters < 1:
        raise ConfigError("num_filters must be >= 1")
    nyquist = sample_rate_hz / 2.0
    if fmax_hz is None:
        fmax_hz = nyquist
    if not 0 <= fmin_hz < fmax_hz:
        raise ConfigError("need 0 <= fmin_hz < fmax_hz")
    if fmax_hz > nyquist:
        raise ConfigError(f"fmax_hz {fmax_hz} exceeds the Nyquist frequency {nyquist}")

    n_bins = fft_size // 2 + 1
    mel_points = np.linspace(hz_to_mel(fmin_hz), hz_to_mel(fmax_hz), num_filters + 2)
    hz_points = mel_to_hz(mel_points)
    bin_points = np.round(hz_points / sample_rate_hz * fft_size).astype(int)
    bin_points = np.clip(bin_points, 0, n_bins - 1)

    weights = np.zeros((num_filters, n_bins))
    for m in range(num_filters):
        left, center, right = bin_points[m], bin_points[m + 1], bin_points[m + 2]
        if left == center == right:
            raise ResolutionError(
                f"filter {m} collapses to a single FFT bin; "
                "reduce num_filters or increase the FFT size"
            )
        for k in range(left, center):
            weights[m, k] = (k - left) / (center - left)
        for k in range(center, right):
            weights[m, k] = (right - k) / (right - center)
        weights[m, center] = 1.0
    center_freqs = bin_points[1:-1] * sample_rate_hz / fft_size
    return MelFilterbank(weights, center_freqs.astype(np.float64))


def log_filterbank_energies(spectrum: np.ndarray, fb: MelFilterbank) -> np.ndarray:
    """ln of each filter's inner product with a magnitude spectrum, floored."""
    spectrum = np.asarray(spectrum, dtype=np.float64)
    if spectrum.shape[-1] != fb.weights.shape[1]:
        raise ShapeError(
            f"spectrum width {spectrum.shape[-1]} does not match filterbank width {fb.weights.shape[1]}"
        )
    return np.log(np.maximum(spectrum @ fb.weights.T, LOG_FLOOR))


def dct_basis(num_filters: int, num_ceps: int) -> np.ndarray:
    """Rows i = 1..num_ceps of sqrt(2/M) cos(pi*i/M * (j - 1/2)), j = 1..M."""
    i = np.arange(1, num_ceps + 1)[:, None]
    j = np.arange(1, num_filters + 1)[None, :]
    return np.sqrt(2.0 / num_filters) * np.cos(np.pi * i / num_filters * (j - 0.5))


def dct_cepstra(log_energies: np.ndarray, num_ceps: int) -> np.ndarray:
    """Cepstral coefficients C_1..C_N of the log filterbank energies.

    The index starts at 1, so no energy (C_0) term is included.
    """
    m = np.asarray(log_energies, dtype=np.float64)
    num_filters = m.shape[-1]
    if num_ceps > num_filters:
        raise ConfigError(f"num_ceps {num_ceps} exceeds num_filters {num_filters}")
    return m @ dct_basis(num_filters, num_ceps).T


def lifter_weights(num_ceps: int, lifter_l: int) -> np.ndarray:
    if lifter_l < 0:
        raise ConfigError("lifter parameter must be >= 0")
    if lifter_l == 0:
        return np.ones(num_ceps)
    n = np.arange(num_ceps)
    return 1.0 + (lifter_l / 2.0) * np.sin(np.pi * n / lifter_l)


def lifter(cepstra: np.ndarray, lifter_l: int) -> np.ndarray:
    """Sinusoidally re-weight cepstra; L = 0 is the identity."""
    c = np.asarray(cepstra, dtype=np.float64)
    return c * lifter_weights(c.shape[-1], lifter_l)


def extract_mfcc(signal: Signal, config: MfccConfig | None = None) -> MfccMatrix:
    """Liftered MFCCs for every frame of a signal.

    Deterministic: identical input and config give a bit-identical matrix.
    """
    if config is None:
        config = MfccConfig()
    emphasized = preemphasize(signal.samples, config.preemphasis_k)
    fm = frame_blocks(emphasized, signal.sample_rate_hz, config.frame_ms, config.hop_ms)
    windowed = fm.frames * hamming_window(fm.frame_len)

    fft_size = next_pow2(fm.frame_len)
    padded = np.zeros((windowed.shape[0], fft_size))
    padded[:, : fm.frame_len] = windowed
    mags = active_backend().fft_magnitude_batch(padded)

    fb = build_filterbank(
        config.num_filters, fft_size, signal.sample_rate_hz, config.fmin_hz, config.fmax_hz
    )
    log_fbe = log_filterbank_energies(mags, fb)
    cepstra = dct_cepstra(log_fbe, config.num_ceps)
    return MfccMatrix(lifter(cepstra, config.lifter_l), config.fingerprint())
