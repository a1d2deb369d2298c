"""Deterministic synthetic voice corpus: one harmonic voice per speaker.

Each speaker gets a distinct fundamental and formant-like spectral
envelope; each clip adds seeded pitch jitter, random harmonic phases, and
white noise. The same seed always produces byte-identical WAV trees.
"""

import struct
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .errors import ConfigError

PCM16_FULL_SCALE = 32768.0
PEAK_AMPLITUDE = 0.7  # headroom so quantization never clips


@dataclass(frozen=True)
class SynthConfig:
    speakers: int = 5
    train_clips: int = 40
    test_clips: int = 10
    clip_seconds: float = 1.0
    sample_rate_hz: int = 16000
    seed: int = 0
    distinct_voices: bool = True  # False: every speaker shares one voice (chance-level control)
    noise_level: float = 0.02

    def __post_init__(self):
        if self.speakers < 1 or self.train_clips < 1 or self.test_clips < 0:
            raise ConfigError("speakers and train_clips must be >= 1, test_clips >= 0")
        if self.clip_seconds <= 0 or self.sample_rate_hz <= 0:
            raise ConfigError("clip_seconds and sample_rate_hz must be positive")
        if self.noise_level < 0:
            raise ConfigError("noise_level must be >= 0")


@dataclass(frozen=True)
class VoiceProfile:
    f0_hz: float
    formants_hz: tuple[float, ...]
    formant_bw_hz: tuple[float, ...]


def voice_profile(index: int) -> VoiceProfile:
    """Voice for speaker `index`: geometric pitch ladder, shifting formants."""
    return VoiceProfile(
        f0_hz=110.0 * 1.25**index,
        formants_hz=(450.0 + 160.0 * index, 1250.0 + 240.0 * index, 2600.0 + 210.0 * index),
        formant_bw_hz=(180.0, 260.0, 320.0),
    )


def _envelope(freqs_hz: np.ndarray, profile: VoiceProfile) -> np.ndarray:
    env = np.zeros_like(freqs_hz)
    for center, bw in zip(profile.formants_hz, profile.formant_bw_hz):
        env += np.exp(-0.5 * ((freqs_hz - center) / bw) ** 2)
    return env + 0.05  # small floor keeps every harmonic audible


def generate_clip(
    profile: VoiceProfile,
    rng: np.random.Generator,
    clip_seconds: float,
    sample_rate_hz: int,
    noise_level: float,
) -> np.ndarray:
    """Harmonic series under the profile's envelope plus white noise."""
    n = int(round(clip_seconds * sample_rate_hz))
    t = np.arange(n) / sample_rate_hz
    f0 = profile.f0_hz * (1.0 + 0.01 * rng.standard_normal())
    max_freq = 0.45 * sample_rate_hz
    num_harmonics = max(1, int(max_freq / f0))
    harmonics = np.arange(1, num_harmonics + 1)
    freqs = harmonics * f0
    amps = _envelope(freqs, profile) / np.sqrt(harmonics)
    phases = rng.uniform(0.0, 2.0 * np.pi, size=num_harmonics)
    clip = (amps[:, None] * np.sin(2.0 * np.pi * freqs[:, None] * t + phases[:, None])).sum(axis=0)
    clip *= PEAK_AMPLITUDE / np.max(np.abs(clip))
    clip *= rng.uniform(0.7, 1.0)  # loudness varies clip to clip
    clip += noise_level * rng.standard_normal(n)
    return np.clip(clip, -1.0, 1.0)


def encode_wav_pcm16(samples: np.ndarray, sample_rate_hz: int) -> bytes:
    """Mono 16-bit PCM RIFF bytes; samples clipped to [-1, 1] first."""
    x = np.clip(np.asarray(samples, dtype=np.float64), -1.0, 1.0)
    pcm = np.clip(np.round(x * PCM16_FULL_SCALE), -32768, 32767).astype("<i2")
    data = pcm.tobytes()
    header = struct.pack(
        "<4sI4s4sIHHIIHH4sI",
        b"RIFF",
        36 + len(data),
        b"WAVE",
        b"fmt ",
        16,
        1,  # PCM
        1,  # mono
        sample_rate_hz,
        sample_rate_hz * 2,
        2,
        16,
        b"data",
        len(data),
    )
    return header + data


def generate_corpus(out_dir: str | Path, config: SynthConfig | None = None) -> list[Path]:
    """Write `<out>/train/<speaker>/clipNNN.wav` and `<out>/test/...`.

    Test clips are numbered after the training clips so the two sides never
    share a clip id. Returns the written paths in sorted order.
    """
    if config is None:
        config = SynthConfig()
    out_dir = Path(out_dir)
    speaker_seeds = np.random.SeedSequence(config.seed).spawn(config.speakers)
    written: list[Path] = []
    for s in range(config.speakers):
        profile = voice_profile(s if config.distinct_voices else 0)
        speaker = f"s{s + 1:02d}"
        clip_seeds = speaker_seeds[s].spawn(config.train_clips + config.test_clips)
        for c, clip_seed in enumerate(clip_seeds):
            split = "train" if c < config.train_clips else "test"
            clip = generate_clip(
                profile,
                np.random.default_rng(clip_seed),
                config.clip_seconds,
                config.sample_rate_hz,
                config.noise_level,
            )
            path = out_dir / split / speaker / f"clip{c:03d}.wav"
            path.parent.mkdir(parents=True, exist_ok=True)
            path.write_bytes(encode_wav_pcm16(clip, config.sample_rate_hz))
            written.append(path)
    return sorted(written)
