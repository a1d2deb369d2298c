"""Flat key = value pipeline configuration with strict key checking.

One PipelineConfig carries every tunable: front-end (MFCC), denoising
(wavelet), classifier (k), and evaluation (folds, seed, k sweep). The
fingerprint covers only the keys that change feature vectors, so models
remember exactly which front-end produced their points.
"""

import hashlib
from dataclasses import dataclass, fields
from pathlib import Path

from .errors import ConfigError
from .mfcc import MfccConfig
from .wavelet_denoise import WaveletConfig

# keys that alter the numbers a clip maps to; classifier and evaluation
# settings deliberately excluded
FEATURE_KEYS = (
    "preemphasis_k",
    "frame_ms",
    "hop_ms",
    "num_filters",
    "num_ceps",
    "lifter_l",
    "fmin_hz",
    "fmax_hz",
    "denoise",
    "wavelet_family",
    "wavelet_levels",
    "wavelet_threshold_rule",
    "wavelet_threshold_mode",
)


@dataclass(frozen=True)
class PipelineConfig:
    preemphasis_k: float = 0.97
    frame_ms: float = 25.0
    hop_ms: float = 10.0
    num_filters: int = 20
    num_ceps: int = 13
    lifter_l: int = 22
    fmin_hz: float = 0.0
    fmax_hz: float | None = None  # None means the Nyquist frequency
    denoise: bool = True
    wavelet_family: str = "db4"
    wavelet_levels: int = 4
    wavelet_threshold_rule: str = "universal"
    wavelet_threshold_mode: str = "soft"
    k: int = 3
    folds: int = 5
    seed: int = 0
    k_values: tuple[int, ...] = (2, 3, 4, 5, 6)
    confidence_threshold: float = 0.0  # 0 disables the optional vote gate

    def __post_init__(self):
        self.mfcc()  # delegates front-end validation
        self.wavelet()
        if self.k < 1:
            raise ConfigError("k must be >= 1")
        if self.folds < 2:
            raise ConfigError("folds must be >= 2")
        if not self.k_values or any(k < 1 for k in self.k_values):
            raise ConfigError("k_values must be a non-empty list of positive integers")
        if not 0.0 <= self.confidence_threshold <= 1.0:
            raise ConfigError("confidence_threshold must be in [0, 1]")

    def mfcc(self) -> MfccConfig:
        return MfccConfig(
            preemphasis_k=self.preemphasis_k,
            frame_ms=self.frame_ms,
            hop_ms=self.hop_ms,
            num_filters=self.num_filters,
            num_ceps=self.num_ceps,
            lifter_l=self.lifter_l,
            fmin_hz=self.fmin_hz,
            fmax_hz=self.fmax_hz,
        )

    def wavelet(self) -> WaveletConfig:
        return WaveletConfig(
            family=self.wavelet_family,
            levels=self.wavelet_levels,
            threshold_rule=self.wavelet_threshold_rule,
            threshold_mode=self.wavelet_threshold_mode,
        )

    def fingerprint(self) -> str:
        """sha256 over the feature-affecting keys only."""
        text = "|".join(f"{key}={getattr(self, key)!r}" for key in FEATURE_KEYS)
        return hashlib.sha256(text.encode()).hexdigest()

    def to_dict(self) -> dict:
        d = {}
        for f in fields(self):
            value = getattr(self, f.name)
            d[f.name] = list(value) if isinstance(value, tuple) else value
        return d


def config_from_dict(d: dict) -> PipelineConfig:
    known = {f.name for f in fields(PipelineConfig)}
    unknown = set(d) - known
    if unknown:
        raise ConfigError(f"unknown config keys: {sorted(unknown)}")
    kwargs = dict(d)
    if "k_values" in kwargs:
        kwargs["k_values"] = tuple(int(k) for k in kwargs["k_values"])
    return PipelineConfig(**kwargs)


def _parse_bool(text: str) -> bool:
    lowered = text.lower()
    if lowered in ("true", "yes", "1", "on"):
        return True
    if lowered in ("false", "no", "0", "off"):
        return False
    raise ConfigError(f"expected a boolean, got {text!r}")


def _parse_fmax(text: str) -> float | None:
    if text.lower() == "nyquist":
        return None
    return float(text)


def _parse_k_values(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(part.strip()) for part in text.split(",") if part.strip())
    except ValueError as exc:
        raise ConfigError(f"k_values must be comma-separated integers, got {text!r}") from exc


_PARSERS = {
    "preemphasis_k": float,
    "frame_ms": float,
    "hop_ms": float,
    "num_filters": int,
    "num_ceps": int,
    "lifter_l": int,
    "fmin_hz": float,
    "fmax_hz": _parse_fmax,
    "denoise": _parse_bool,
    "wavelet_family": str,
    "wavelet_levels": int,
    "wavelet_threshold_rule": str,
    "wavelet_threshold_mode": str,
    "k": int,
    "folds": int,
    "seed": int,
    "k_values": _parse_k_values,
    "confidence_threshold": float,
}


def parse_config(text: str) -> PipelineConfig:
    """Parse `key = value` lines; # starts a comment; unknown keys reject."""
    values: dict = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"line {lineno}: expected 'key = value', got {raw!r}")
        key, _, value = line.partition("=")
        key = key.strip()
        value = value.strip()
        if key not in _PARSERS:
            raise ConfigError(f"line {lineno}: unknown key {key!r}")
        if key in values:
            raise ConfigError(f"line {lineno}: duplicate key {key!r}")
        try:
            values[key] = _PARSERS[key](value)
        except ConfigError:
            raise
        except ValueError as exc:
            raise ConfigError(f"line {lineno}: bad value for {key}: {value!r}") from exc
    return PipelineConfig(**values)


def format_config(config: PipelineConfig) -> str:
    """Render a config as parse_config input; round-trips semantically."""
    lines = []
    for f in fields(PipelineConfig):
        value = getattr(config, f.name)
        if f.name == "fmax_hz" and value is None:
            text = "nyquist"
        elif isinstance(value, bool):
            text = "true" if value else "false"
        elif isinstance(value, tuple):
            text = ",".join(str(v) for v in value)
        else:
            text = str(value)
        lines.append(f"{f.name} = {text}")
    return "\n".join(lines) + "\n"


def load_config(path: str | Path) -> PipelineConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigError(f"cannot read config file {path}: {exc}") from exc
    return parse_config(text)


def save_config(config: PipelineConfig, path: str | Path) -> None:
    Path(path).write_text(format_config(config))
