"""WAV decoding and corpus loading.

Decodes RIFF/WAVE containers holding 8/16/24-bit integer PCM or 32-bit
float samples, downmixes to mono, and normalizes amplitudes to [-1, 1].
A corpus is a directory tree ``<root>/<speaker_id>/*.wav``.
"""

import struct
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .errors import ConfigError, EmptyAudioError, EmptyCorpusError, UnsupportedWavError, WavFormatError

_FORMAT_PCM = 0x0001
_FORMAT_IEEE_FLOAT = 0x0003
_FORMAT_EXTENSIBLE = 0xFFFE


@dataclass
class Signal:
    """Mono sample sequence with its sample rate.

    Samples are float64 in [-1, 1]; empty signals are rejected because no
    pipeline stage accepts them.
    """

    samples: np.ndarray
    sample_rate_hz: int

    def __post_init__(self):
        self.samples = np.asarray(self.samples, dtype=np.float64)
        if self.samples.ndim != 1:
            raise ConfigError("signal samples must be one-dimensional")
        if self.samples.size == 0:
            raise EmptyAudioError("signal holds no samples")
        if self.sample_rate_hz <= 0:
            raise ConfigError(f"sample rate must be positive, got {self.sample_rate_hz}")

    def duration_s(self) -> float:
        return len(self.samples) / self.sample_rate_hz


@dataclass
class LabeledClip:
    signal: Signal
    speaker_id: str
    source_path: str

    def __post_init__(self):
        if not self.speaker_id:
            raise ConfigError("speaker_id must be non-empty")

    @property
    def clip_id(self) -> str:
        return self.source_path


@dataclass
class SkippedClip:
    """Diagnostic for a corpus file that could not be decoded."""

    path: str
    speaker_id: str
    reason: str


@dataclass
class CorpusLoad:
    clips: list[LabeledClip]
    skipped: list[SkippedClip] = field(default_factory=list)
    speaker_dirs: list[str] = field(default_factory=list)


def _parse_fmt(chunk: bytes) -> tuple[int, int, int, int]:
    if len(chunk) < 16:
        raise WavFormatError("fmt chunk truncated")
    audio_format, channels, sample_rate, _byte_rate, block_align, bits = struct.unpack(
        "<HHIIHH", chunk[:16]
    )
    if audio_format == _FORMAT_EXTENSIBLE:
        # actual format is the leading word of the SubFormat GUID
        if len(chunk) < 26:
            raise WavFormatError("extensible fmt chunk truncated")
        audio_format = struct.unpack("<H", chunk[24:26])[0]
    if channels < 1:
        raise WavFormatError("channel count must be at least 1")
    if sample_rate <= 0:
        raise WavFormatError("sample rate must be positive")
    return audio_format, channels, sample_rate, bits


def _decode_samples(data: bytes, audio_format: int, bits: int) -> np.ndarray:
    if audio_format == _FORMAT_PCM:
        if bits == 8:
            return (np.frombuffer(data, dtype=np.uint8).astype(np.float64) - 128.0) / 128.0
        if bits == 16:
            usable = len(data) - len(data) % 2
            return np.frombuffer(data[:usable], dtype="<i2").astype(np.float64) / 32768.0
        if bits == 24:
            usable = len(data) - len(data) % 3
            raw = np.frombuffer(data[:usable], dtype=np.uint8).reshape(-1, 3).astype(np.int32)
            value = raw[:, 0] | (raw[:, 1] << 8) | (raw[:, 2] << 16)
            value = np.where(value & 0x800000, value - (1 << 24), value)
            return value.astype(np.float64) / 8388608.0
        raise UnsupportedWavError(f"unsupported PCM bit depth: {bits}")
    if audio_format == _FORMAT_IEEE_FLOAT:
        if bits != 32:
            raise UnsupportedWavError(f"unsupported float bit depth: {bits}")
        usable = len(data) - len(data) % 4
        # float WAVs may overshoot full scale; clamp to keep the amplitude invariant
        return np.clip(np.frombuffer(data[:usable], dtype="<f4").astype(np.float64), -1.0, 1.0)
    raise UnsupportedWavError(f"unsupported WAV codec tag: 0x{audio_format:04X}")


def decode_wav(data: bytes) -> Signal:
    """Decode a RIFF/WAVE byte string into a normalized mono Signal.

    Multi-channel audio is downmixed by the arithmetic mean of channels.
    Integer samples are scaled by the negative full-scale magnitude of
    their type so that -1.0 is reachable and +1.0 is never exceeded.
    """
    if len(data) < 12 or data[0:4] != b"RIFF" or data[8:12] != b"WAVE":
        raise WavFormatError("not a RIFF/WAVE container")

    fmt = None
    payload = None
    pos = 12
    while pos + 8 <= len(data):
        chunk_id = data[pos : pos + 4]
        (size,) = struct.unpack("<I", data[pos + 4 : pos + 8])
        body = data[pos + 8 : pos + 8 + size]
        if len(body) < size:
            raise WavFormatError(f"chunk {chunk_id!r} truncated")
        if chunk_id == b"fmt ":
            fmt = _parse_fmt(body)
        elif chunk_id == b"data":
            payload = body
        pos += 8 + size + (size & 1)  # chunks are word-aligned

    if fmt is None:
        raise WavFormatError("missing fmt chunk")
    if payload is None or len(payload) == 0:
        raise EmptyAudioError("WAV data chunk holds no samples")

    audio_format, channels, sample_rate, bits = fmt
    flat = _decode_samples(payload, audio_format, bits)
    usable = len(flat) - len(flat) % channels
    if usable == 0:
        raise EmptyAudioError("WAV data chunk holds no complete frame")
    mono = flat[:usable].reshape(-1, channels).mean(axis=1)
    return Signal(mono, sample_rate)


def load_wav(path) -> Signal:
    return decode_wav(Path(path).read_bytes())


def load_corpus(root_dir) -> CorpusLoad:
    """Load every decodable clip under ``<root>/<speaker_id>/*.wav``.

    Clips are ordered lexicographically by path, so repeated calls on an
    unchanged tree return the same sequence. Files that fail to decode are
    recorded as skip diagnostics rather than aborting the load.
    """
    root = Path(root_dir)
    if not root.is_dir():
        raise EmptyCorpusError(f"corpus root does not exist: {root}")
    speaker_dirs = sorted(p for p in root.iterdir() if p.is_dir())
    if not speaker_dirs:
        raise EmptyCorpusError(f"no speaker subdirectories under {root}")

    clips: list[LabeledClip] = []
    skipped: list[SkippedClip] = []
    for speaker_dir in speaker_dirs:
        for wav_path in sorted(speaker_dir.glob("*.wav")):
            rel = wav_path.relative_to(root).as_posix()
            try:
                signal = decode_wav(wav_path.read_bytes())
            except (WavFormatError, EmptyAudioError, OSError) as exc:
                skipped.append(SkippedClip(rel, speaker_dir.name, str(exc)))
                continue
            clips.append(LabeledClip(signal, speaker_dir.name, rel))
    if not clips:
        raise EmptyCorpusError(f"no decodable clips under {root}")
    return CorpusLoad(clips, skipped, [p.name for p in speaker_dirs])
