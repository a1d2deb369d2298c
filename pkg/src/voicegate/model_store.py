"""Versioned JSON persistence for trained speaker models.

The file header repeats the config fingerprint; loading recomputes it from
the embedded config and refuses on any disagreement, so a model can never
be used with a front-end other than the one that built it.
"""

import json
import os
import tempfile
from datetime import datetime, timezone
from pathlib import Path

from .config import PipelineConfig, config_from_dict
from .errors import ConfigError, FingerprintMismatchError, ModelFormatError
from .knn import SpeakerModel

MODEL_FORMAT_VERSION = 1


def save_model(model: SpeakerModel, config: PipelineConfig, path: str | Path) -> None:
    """Atomic write (temp file + rename); deterministic except created_at."""
    path = Path(path)
    payload = {
        "format_version": MODEL_FORMAT_VERSION,
        "fingerprint": config.fingerprint(),
        "config": config.to_dict(),
        "k": model.k,
        "label_set": model.label_set,
        "labels": model.labels,
        "clip_ids": model.clip_ids,
        "points": model.vectors.tolist(),
        "created_at": datetime.now(timezone.utc).isoformat(),
    }
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp_name, path)
    except BaseException:
        os.unlink(tmp_name)
        raise


def load_model(path: str | Path) -> tuple[SpeakerModel, PipelineConfig]:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise ModelFormatError(f"cannot read model file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ModelFormatError(f"model file {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise ModelFormatError(f"model file {path} does not hold an object")
    if payload.get("format_version") != MODEL_FORMAT_VERSION:
        raise ModelFormatError(
            f"unsupported model format version {payload.get('format_version')!r} in {path}"
        )
    try:
        config = config_from_dict(payload["config"])
        fingerprint = payload["fingerprint"]
        model = SpeakerModel(
            vectors=payload["points"],
            labels=list(payload["labels"]),
            clip_ids=list(payload["clip_ids"]),
            label_set=list(payload["label_set"]),
            k=int(payload["k"]),
            config_fingerprint=fingerprint,
        )
    except FingerprintMismatchError:
        raise
    except (KeyError, TypeError, ValueError, ConfigError) as exc:
        raise ModelFormatError(f"model file {path} is malformed: {exc}") from exc
    if config.fingerprint() != fingerprint:
        raise FingerprintMismatchError(
            f"model file {path}: header fingerprint does not match the embedded config"
        )
    return model, config
