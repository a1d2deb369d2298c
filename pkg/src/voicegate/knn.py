"""k-nearest-neighbour speaker classification over pooled feature vectors."""

from dataclasses import dataclass, field

import numpy as np

from .errors import ConfigError, ShapeError
from .features import FeatureDataset


@dataclass
class Prediction:
    """One classification outcome with its vote diagnostics."""

    label: str
    vote_fraction: float  # winning votes / k, always >= 1/k
    tied_vote: bool  # True when two or more labels split the top vote count
    neighbor_ids: list[str] = field(default_factory=list)
    neighbor_distances: list[float] = field(default_factory=list)  # ascending


@dataclass
class SpeakerModel:
    """Memorized training points; kNN learns nothing beyond storage."""

    vectors: np.ndarray  # (num_clips, dim)
    labels: list[str]
    clip_ids: list[str]
    label_set: list[str]  # sorted distinct labels, the final tie-break order
    k: int = 3
    config_fingerprint: str = ""

    def __post_init__(self):
        self.vectors = np.asarray(self.vectors, dtype=np.float64)
        if self.vectors.ndim != 2:
            raise ShapeError("training vectors must form a 2-D matrix")
        if self.vectors.shape[0] != len(self.labels):
            raise ShapeError(f"{self.vectors.shape[0]} vectors but {len(self.labels)} labels")
        if len(self.clip_ids) != len(self.labels):
            raise ShapeError("clip_ids and labels must be parallel")
        if not 1 <= self.k <= self.vectors.shape[0]:
            raise ConfigError(f"k must be in [1, {self.vectors.shape[0]}], got {self.k}")
        if self.label_set != sorted(set(self.labels)):
            raise ConfigError("label_set must be the sorted distinct labels of the points")


def euclidean_distance(a: np.ndarray, b: np.ndarray) -> float:
    """Plain L2 distance between two equal-length vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise ShapeError(f"shape mismatch: {a.shape} vs {b.shape}")
    return float(np.sqrt(np.sum((a - b) ** 2)))


def fit(dataset: FeatureDataset, k: int = 3) -> SpeakerModel:
    """Build a model by memorizing the dataset verbatim."""
    if len(dataset) == 0:
        raise ConfigError("cannot fit a model on an empty dataset")
    labels = dataset.labels()
    fingerprints = {f.config_fingerprint for f in dataset.features}
    fingerprint = fingerprints.pop() if len(fingerprints) == 1 else ""
    return SpeakerModel(
        vectors=dataset.matrix(),
        labels=labels,
        clip_ids=dataset.clip_ids(),
        label_set=sorted(set(labels)),
        k=k,
        config_fingerprint=fingerprint,
    )


def predict(model: SpeakerModel, vector: np.ndarray) -> Prediction:
    """Majority vote over the k nearest training vectors.

    Distance ties resolve by training insertion order (stable sort). Vote
    ties go to the tied label with the closest single member; if that too
    is tied, the earliest such label in label_set order wins.
    """
    vector = np.asarray(vector, dtype=np.float64)
    if vector.shape != (model.vectors.shape[1],):
        raise ShapeError(
            f"query has shape {vector.shape} but the model stores "
            f"{model.vectors.shape[1]}-dim vectors"
        )
    dists = np.sqrt(np.sum((model.vectors - vector) ** 2, axis=1))
    order = np.argsort(dists, kind="stable")[: model.k]
    neighbor_labels = [model.labels[i] for i in order]

    counts: dict[str, int] = {}
    for lab in neighbor_labels:
        counts[lab] = counts.get(lab, 0) + 1
    top = max(counts.values())
    tied = sorted(lab for lab, c in counts.items() if c == top)

    if len(tied) == 1:
        winner = tied[0]
    else:
        # closest single member among the tied labels; tied is already in
        # label_set order so min() keeps the earliest label on a dead heat
        best = {
            lab: min(float(dists[i]) for i in order if model.labels[i] == lab)
            for lab in tied
        }
        winner = min(tied, key=lambda lab: best[lab])

    return Prediction(
        label=winner,
        vote_fraction=top / model.k,
        tied_vote=len(tied) > 1,
        neighbor_ids=[model.clip_ids[i] for i in order],
        neighbor_distances=[float(dists[i]) for i in order],
    )


def predict_batch(model: SpeakerModel, vectors: np.ndarray) -> list[Prediction]:
    vectors = np.asarray(vectors, dtype=np.float64)
    if vectors.ndim != 2:
        raise ShapeError("batch prediction expects a 2-D matrix")
    return [predict(model, v) for v in vectors]
