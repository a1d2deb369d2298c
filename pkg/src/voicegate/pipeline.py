"""End-to-end clip featurization: denoise, extract MFCCs, pool to one vector."""

import numpy as np

from .audio_io import LabeledClip, Signal
from .config import PipelineConfig
from .errors import VoicegateError
from .features import ClipFeature, FeatureDataset
from .mfcc import extract_mfcc
from .features import pool_mean_std
from .wavelet_denoise import denoise


def featurize(signal: Signal, config: PipelineConfig) -> np.ndarray:
    """One pooled feature vector for a signal under the given config."""
    if config.denoise:
        signal = denoise(signal, config.wavelet())
    return pool_mean_std(extract_mfcc(signal, config.mfcc()))


def clip_to_feature(clip: LabeledClip, config: PipelineConfig) -> ClipFeature:
    return ClipFeature(
        vector=featurize(clip.signal, config),
        speaker_id=clip.speaker_id,
        clip_id=clip.clip_id,
        config_fingerprint=config.fingerprint(),
    )


def corpus_to_dataset(clips: list[LabeledClip], config: PipelineConfig) -> FeatureDataset:
    """Featurize every clip; a failing clip aborts, named in the error."""
    features = []
    for clip in clips:
        try:
            features.append(clip_to_feature(clip, config))
        except VoicegateError as exc:
            raise type(exc)(f"clip {clip.clip_id}: {exc}") from exc
    return FeatureDataset(features)
