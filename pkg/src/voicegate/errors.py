"""Exception hierarchy used across the toolkit."""


class VoicegateError(Exception):
    """Base class for all toolkit errors."""


class WavFormatError(VoicegateError):
    """Malformed RIFF/WAVE container."""


class UnsupportedWavError(WavFormatError):
    """WAV codec or sample layout outside the supported set."""


class EmptyAudioError(VoicegateError):
    """WAV data chunk holds no samples."""


class EmptyCorpusError(VoicegateError):
    """Corpus directory has no speaker subdirectories or no decodable clips."""


class ConfigError(VoicegateError, ValueError):
    """Parameter value outside its allowed range or an unknown config key."""


class ShapeError(VoicegateError, ValueError):
    """Mismatched array dimensions between related inputs."""


class DepthError(VoicegateError):
    """Signal too short for the requested wavelet decomposition depth."""


class StructureError(VoicegateError):
    """Wavelet decomposition inconsistent with the config it is paired with."""


class TooShortError(VoicegateError):
    """Signal shorter than a single analysis frame."""


class EmptyFeatureError(VoicegateError):
    """Feature pooling requested on a matrix with zero frames."""


class ResolutionError(ConfigError):
    """Filterbank has more filters than distinct FFT bins can support."""


class InsufficientDataError(VoicegateError):
    """Dataset too small to stratify into the requested folds."""


class LeakageError(VoicegateError):
    """Train and test sets share clip ids."""


class UnknownSpeakerError(VoicegateError):
    """Speaker id absent from the model or credential store."""


class ModelFormatError(VoicegateError):
    """Model file unreadable or of an unsupported version."""


class CredentialFormatError(VoicegateError):
    """Credential store file unreadable or of an unsupported version."""


class FingerprintMismatchError(VoicegateError):
    """Stored config fingerprint disagrees with the config that is present."""
