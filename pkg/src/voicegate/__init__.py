"""Speaker identification toolkit: wavelet denoising, MFCC features,
kNN voting, cross-validation evaluation, and a claim-verification flow."""

from .access_control import (
    AccessDecision,
    CredentialStore,
    Outcome,
    decide,
    verify_password,
)
from .audio_io import LabeledClip, Signal, decode_wav, load_corpus, load_wav
from .backends import available_backends, backend_name, set_backend
from .config import PipelineConfig, load_config, parse_config, save_config
from .errors import VoicegateError
from .evaluation import (
    EvalReport,
    holdout_cv,
    kfold_cv,
    render_report,
    sweep_neighbors,
)
from .features import ClipFeature, FeatureDataset, pool_mean_std
from .knn import Prediction, SpeakerModel, euclidean_distance, fit, predict
from .mfcc import MfccConfig, MfccMatrix, extract_mfcc
from .model_store import load_model, save_model
from .pipeline import clip_to_feature, corpus_to_dataset, featurize
from .synth import SynthConfig, generate_corpus
from .wavelet_denoise import (
    WaveletConfig,
    WaveletDecomposition,
    denoise,
    dwt_forward,
    dwt_inverse,
)

__version__ = "0.1.0"

__all__ = [
    "AccessDecision",
    "ClipFeature",
    "CredentialStore",
    "EvalReport",
    "FeatureDataset",
    "LabeledClip",
    "MfccConfig",
    "MfccMatrix",
    "Outcome",
    "PipelineConfig",
    "Prediction",
    "Signal",
    "SpeakerModel",
    "SynthConfig",
    "VoicegateError",
    "WaveletConfig",
    "WaveletDecomposition",
    "available_backends",
    "backend_name",
    "clip_to_feature",
    "corpus_to_dataset",
    "decide",
    "decode_wav",
    "denoise",
    "dwt_forward",
    "dwt_inverse",
    "euclidean_distance",
    "extract_mfcc",
    "featurize",
    "fit",
    "generate_corpus",
    "holdout_cv",
    "kfold_cv",
    "load_config",
    "load_corpus",
    "load_model",
    "load_wav",
    "parse_config",
    "pool_mean_std",
    "predict",
    "render_report",
    "save_config",
    "save_model",
    "set_backend",
    "sweep_neighbors",
    "verify_password",
    "__version__",
]
