"""Claim-verification access flow: voice match grants, mismatch falls back
to a salted-password check, failed password denies.

The credential store never holds or logs a plaintext password; digests are
iterated PBKDF2 with a per-entry random salt and are compared in constant
time.
"""

import hashlib
import hmac
import json
import os
import secrets
import tempfile
from dataclasses import dataclass, field
from datetime import datetime, timezone
from enum import Enum
from pathlib import Path

from .audio_io import Signal
from .config import PipelineConfig
from .errors import CredentialFormatError, UnknownSpeakerError
from .knn import SpeakerModel, predict
from .pipeline import featurize

HASH_SCHEME_ID = "pbkdf2-hmac-sha256-100000"
PBKDF2_ITERATIONS = 100_000
SALT_LEN = 16
STORE_FORMAT_VERSION = 1


class Outcome(Enum):
    GRANTED = "Granted"
    PASSWORD_REQUIRED = "PasswordRequired"
    GRANTED_BY_PASSWORD = "GrantedByPassword"
    DENIED = "Denied"


@dataclass
class AccessDecision:
    outcome: Outcome
    claimed_id: str
    predicted_id: str
    vote_fraction: float
    audit_note: str = ""


@dataclass
class CredentialEntry:
    salt: bytes
    digest: bytes
    hash_scheme_id: str = HASH_SCHEME_ID


@dataclass
class CredentialStore:
    """speaker_id -> salted digest. Mutations must come from a single writer."""

    entries: dict[str, CredentialEntry] = field(default_factory=dict)

    def enroll(self, speaker_id: str, password: str) -> None:
        """Set or replace a credential; a fresh random salt every time."""
        salt = secrets.token_bytes(SALT_LEN)
        self.entries[speaker_id] = CredentialEntry(salt, _digest(password, salt))


def _digest(password: str, salt: bytes) -> bytes:
    return hashlib.pbkdf2_hmac("sha256", password.encode(), salt, PBKDF2_ITERATIONS)


def verify_password(store: CredentialStore, speaker_id: str, password_attempt: str) -> Outcome:
    """Constant-time digest comparison; never raises on a wrong password."""
    entry = store.entries.get(speaker_id)
    if entry is None:
        raise UnknownSpeakerError(f"no credential enrolled for {speaker_id!r}")
    if entry.hash_scheme_id != HASH_SCHEME_ID:
        raise CredentialFormatError(f"unsupported hash scheme {entry.hash_scheme_id!r}")
    attempt = _digest(password_attempt, entry.salt)
    if hmac.compare_digest(entry.digest, attempt):
        return Outcome.GRANTED_BY_PASSWORD
    return Outcome.DENIED


def decide(
    model: SpeakerModel,
    claimed_id: str,
    clip: Signal,
    config: PipelineConfig,
) -> AccessDecision:
    """Voice check of a claimed identity: match grants, mismatch asks for
    a password (the decision is PasswordRequired; the caller runs the
    password step).

    An optional vote-fraction gate (config.confidence_threshold > 0) can
    demand a password even on a match; it never turns a mismatch into a
    grant.
    """
    if claimed_id not in model.label_set:
        raise UnknownSpeakerError(f"claimed id {claimed_id!r} is not enrolled in the model")
    prediction = predict(model, featurize(clip, config))
    matched = prediction.label == claimed_id
    confident = (
        config.confidence_threshold == 0.0
        or prediction.vote_fraction >= config.confidence_threshold
    )
    outcome = Outcome.GRANTED if matched and confident else Outcome.PASSWORD_REQUIRED
    note = f"vote_fraction={prediction.vote_fraction:.3f} tied={prediction.tied_vote}"
    if matched and not confident:
        note += " below_confidence_threshold"
    return AccessDecision(outcome, claimed_id, prediction.label, prediction.vote_fraction, note)


def complete_with_password(
    decision: AccessDecision, store: CredentialStore, password_attempt: str
) -> AccessDecision:
    """Resolve a PasswordRequired decision into GrantedByPassword or Denied."""
    outcome = verify_password(store, decision.claimed_id, password_attempt)
    return AccessDecision(
        outcome=outcome,
        claimed_id=decision.claimed_id,
        predicted_id=decision.predicted_id,
        vote_fraction=decision.vote_fraction,
        audit_note=decision.audit_note + " password_attempted",
    )


def save_store(store: CredentialStore, path: str | Path) -> None:
    """Write the store atomically with owner-only permissions."""
    path = Path(path)
    payload = {
        "format_version": STORE_FORMAT_VERSION,
        "entries": {
            speaker: {
                "salt": entry.salt.hex(),
                "digest": entry.digest.hex(),
                "hash_scheme_id": entry.hash_scheme_id,
            }
            for speaker, entry in store.entries.items()
        },
    }
    fd, tmp_name = tempfile.mkstemp(dir=path.parent, prefix=path.name, suffix=".tmp")
    try:
        os.fchmod(fd, 0o600)
        with os.fdopen(fd, "w") as fh:
            json.dump(payload, fh, indent=2, sort_keys=True)
            fh.write("\n")
        os.replace(tmp_name, path)
    except BaseException:
        os.unlink(tmp_name)
        raise


def load_store(path: str | Path) -> CredentialStore:
    try:
        payload = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CredentialFormatError(f"cannot read credential store {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CredentialFormatError(f"credential store {path} is not valid JSON: {exc}") from exc
    if not isinstance(payload, dict) or payload.get("format_version") != STORE_FORMAT_VERSION:
        raise CredentialFormatError(f"unsupported credential store version in {path}")
    entries = {}
    try:
        for speaker, raw in payload["entries"].items():
            entries[speaker] = CredentialEntry(
                salt=bytes.fromhex(raw["salt"]),
                digest=bytes.fromhex(raw["digest"]),
                hash_scheme_id=raw["hash_scheme_id"],
            )
    except (KeyError, TypeError, ValueError) as exc:
        raise CredentialFormatError(f"credential store {path} is malformed: {exc}") from exc
    return CredentialStore(entries)


def append_audit(path: str | Path, decision: AccessDecision, timestamp: str | None = None) -> None:
    """Append one `timestamp,claimed_id,predicted_id,outcome` line."""
    if timestamp is None:
        timestamp = datetime.now(timezone.utc).isoformat()
    line = f"{timestamp},{decision.claimed_id},{decision.predicted_id},{decision.outcome.value}\n"
    with open(path, "a") as fh:
        fh.write(line)
