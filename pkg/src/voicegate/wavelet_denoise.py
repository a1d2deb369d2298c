"""Multi-level wavelet denoising with a universal soft threshold.

Orthogonal DWT (Mallat cascade) with circular convolution at block edges;
odd-length inputs are padded to even length at each level by mirroring the
final sample (half-sample symmetric extension). Detail coefficients are
soft-thresholded at T = sigma * sqrt(2 ln N) with sigma estimated from the
finest detail level by the robust MAD rule.
"""

import math
from dataclasses import dataclass, field

import numpy as np

from .audio_io import Signal
from .backends import active_backend
from .errors import ConfigError, DepthError, StructureError

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)

# orthonormal scaling (lowpass) filters; highpass follows by QMF mirror
FAMILIES: dict[str, np.ndarray] = {
    "haar": np.array([1.0, 1.0]) / _SQRT2,
    "db4": np.array([1.0 + _SQRT3, 3.0 + _SQRT3, 3.0 - _SQRT3, 1.0 - _SQRT3]) / (4.0 * _SQRT2),
}

MAD_SCALE = 0.6745  # Gaussian consistency constant for the median estimator


def filter_pair(family: str) -> tuple[np.ndarray, np.ndarray]:
    """Analysis (lowpass, highpass) filter pair for a wavelet family."""
    try:
        lo = FAMILIES[family]
    except KeyError:
        raise ConfigError(
            f"unknown wavelet family {family!r}; supported: {', '.join(sorted(FAMILIES))}"
        ) from None
    taps = len(lo)
    hi = np.array([(-1.0) ** m * lo[taps - 1 - m] for m in range(taps)])
    return lo, hi


@dataclass(frozen=True)
class WaveletConfig:
    family: str = "db4"
    levels: int = 4
    threshold_rule: str = "universal"
    threshold_mode: str = "soft"

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(
                f"unknown wavelet family {self.family!r}; supported: {', '.join(sorted(FAMILIES))}"
            )
        if self.levels < 1:
            raise ConfigError(f"decomposition levels must be >= 1, got {self.levels}")
        if self.threshold_rule != "universal":
            raise ConfigError(f"unsupported threshold rule: {self.threshold_rule!r}")
        if self.threshold_mode != "soft":
            raise ConfigError(f"unsupported threshold mode: {self.threshold_mode!r}")


@dataclass
class WaveletDecomposition:
    """Coefficient pyramid: ``details[0]`` is the finest level.

    ``original_length`` remembers the pre-padding input length so the
    inverse can trim each level back.
    """

    approximation: np.ndarray
    details: list[np.ndarray] = field(default_factory=list)
    original_length: int = 0


def _check_depth(length: int, levels: int):
    if length < 2**levels:
        raise DepthError(
            f"signal of {length} samples is too short for {levels} levels "
            f"(needs at least {2**levels})"
        )


def _pad_even(x: np.ndarray) -> np.ndarray:
    if len(x) % 2:
        return np.concatenate([x, x[-1:]])
    return x


def dwt_forward(signal: Signal, config: WaveletConfig) -> WaveletDecomposition:
    """Forward multi-level transform of a signal's samples."""
    x = np.asarray(signal.samples, dtype=np.float64)
    _check_depth(len(x), config.levels)
    lo, hi = filter_pair(config.family)
    backend = active_backend()
    details: list[np.ndarray] = []
    current = x
    for _ in range(config.levels):
        current = _pad_even(current)
        current, detail = backend.dwt_analysis(current, lo, hi)
        details.append(detail)
    return WaveletDecomposition(current, details, len(x))


def _level_lengths(original_length: int, levels: int) -> list[int]:
    lengths = [original_length]
    for _ in range(levels - 1):
        lengths.append((lengths[-1] + 1) // 2)
    return lengths


def dwt_inverse(decomp: WaveletDecomposition, config: WaveletConfig) -> np.ndarray:
    """Reconstruct samples from a decomposition produced with ``config``."""
    if len(decomp.details) != config.levels:
        raise StructureError(
            f"decomposition has {len(decomp.details)} detail levels, "
            f"config expects {config.levels}"
        )
    lo, hi = filter_pair(config.family)
    backend = active_backend()
    lengths = _level_lengths(decomp.original_length, config.levels)
    current = np.asarray(decomp.approximation, dtype=np.float64)
    for detail, length in zip(reversed(decomp.details), reversed(lengths)):
        if len(detail) != len(current):
            raise StructureError(
                f"detail level of {len(detail)} coefficients cannot pair with "
                f"an approximation of {len(current)}"
            )
        current = backend.dwt_synthesis(current, detail, lo, hi)[:length]
    return current


def universal_threshold(finest_details: np.ndarray, n_samples: int) -> float:
    """VisuShrink threshold sigma*sqrt(2 ln N), sigma from the MAD of the finest details."""
    sigma = float(np.median(np.abs(finest_details))) / MAD_SCALE
    return sigma * math.sqrt(2.0 * math.log(n_samples))


def denoise(signal: Signal, config: WaveletConfig | None = None) -> Signal:
    """Soft-threshold every detail level and reconstruct.

    Output length equals input length; the approximation band is left
    untouched, so constant signals pass through unchanged.
    """
    if config is None:
        config = WaveletConfig()
    decomp = dwt_forward(signal, config)
    threshold = universal_threshold(decomp.details[0], len(signal.samples))
    backend = active_backend()
    decomp.details = [backend.soft_threshold(d, threshold) for d in decomp.details]
    return Signal(dwt_inverse(decomp, config), signal.sample_rate_hz)
