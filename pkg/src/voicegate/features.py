"""Clip-level feature vectors pooled from frame-level MFCC matrices."""

from dataclasses import dataclass, field

import numpy as np

from .errors import EmptyFeatureError, ShapeError
from .mfcc import MfccMatrix


@dataclass
class ClipFeature:
    """A fixed-length vector summarizing one clip, plus its provenance."""

    vector: np.ndarray
    speaker_id: str
    clip_id: str
    config_fingerprint: str = ""

    def __post_init__(self):
        self.vector = np.asarray(self.vector, dtype=np.float64)
        if self.vector.ndim != 1 or self.vector.size == 0:
            raise EmptyFeatureError("feature vector must be a non-empty 1-D array")


@dataclass
class FeatureDataset:
    """A stack of clip features sharing one extraction configuration."""

    features: list[ClipFeature] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.features)

    def matrix(self) -> np.ndarray:
        if not self.features:
            raise EmptyFeatureError("dataset holds no features")
        dims = {f.vector.shape[0] for f in self.features}
        if len(dims) != 1:
            raise ShapeError(f"mixed feature dimensions in dataset: {sorted(dims)}")
        return np.stack([f.vector for f in self.features])

    def labels(self) -> list[str]:
        return [f.speaker_id for f in self.features]

    def clip_ids(self) -> list[str]:
        return [f.clip_id for f in self.features]


def pool_mean_std(mfcc: MfccMatrix) -> np.ndarray:
    """Concatenate per-coefficient mean and standard deviation over frames.

    Standard deviation uses the population convention (ddof=0) so a
    single-frame clip pools to zeros rather than NaN. Output length is
    2 * num_ceps; the result is order-invariant over frames.
    """
    coeffs = mfcc.coeffs
    if coeffs.shape[0] == 0:
        raise EmptyFeatureError("cannot pool an MFCC matrix with zero frames")
    means = coeffs.mean(axis=0)
    stds = coeffs.std(axis=0, ddof=0)
    return np.concatenate([means, stds])
