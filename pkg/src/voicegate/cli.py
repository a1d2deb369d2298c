"""Batch command line: train, identify, evaluate, extract, synth, passwd.

Exit codes: 0 success or access granted, 1 identity mismatch or denial,
2 command-line usage error, 3 unreadable or unsuitable input data.
"""

import argparse
import csv
import getpass
import os
import sys
from pathlib import Path

from . import access_control, model_store, synth
from .audio_io import load_corpus, load_wav
from .config import PipelineConfig, load_config
from .errors import FingerprintMismatchError, VoicegateError
from .evaluation import render_report, save_report, sweep_neighbors
from .knn import fit, predict
from .mfcc import extract_mfcc
from .pipeline import corpus_to_dataset, featurize
from .wavelet_denoise import denoise

EXIT_OK = 0
EXIT_MISMATCH = 1
EXIT_USAGE = 2
EXIT_DATA = 3

CONFIG_ENV_VAR = "VOICEGATE_CONFIG"


def _resolve_config(path_arg: str | None) -> PipelineConfig:
    path = path_arg or os.environ.get(CONFIG_ENV_VAR)
    return load_config(path) if path else PipelineConfig()


def _load_labeled_corpus(root: str, config: PipelineConfig):
    """Corpus -> dataset, reporting skipped clips and empty speakers."""
    corpus = load_corpus(root)
    for skipped in corpus.skipped:
        print(f"skipping {skipped.path}: {skipped.reason}", file=sys.stderr)
    surviving = {clip.speaker_id for clip in corpus.clips}
    dead = sorted(set(corpus.speaker_dirs) - surviving)
    if dead:
        raise VoicegateError(f"no decodable clips for speaker(s): {', '.join(dead)}")
    return corpus_to_dataset(corpus.clips, config)


def cmd_train(args: argparse.Namespace) -> int:
    config = _resolve_config(args.config)
    dataset = _load_labeled_corpus(args.corpus_dir, config)
    k = args.k if args.k is not None else config.k
    model = fit(dataset, k)
    model_store.save_model(model, config, args.model_out)
    print(
        f"trained: {model.vectors.shape[0]} clips, {len(model.label_set)} speakers, "
        f"k={model.k} -> {args.model_out}"
    )
    return EXIT_OK


def _check_fingerprint(model_config: PipelineConfig, config_arg: str | None) -> None:
    if config_arg is None and CONFIG_ENV_VAR not in os.environ:
        return
    active = _resolve_config(config_arg)
    if active.fingerprint() != model_config.fingerprint():
        raise FingerprintMismatchError(
            "the active config's feature settings differ from the ones the model "
            "was trained with; retrain or drop the --config override"
        )


def cmd_identify(args: argparse.Namespace) -> int:
    model, model_config = model_store.load_model(args.model)
    _check_fingerprint(model_config, args.config)
    signal = load_wav(args.wav)

    if args.claim is None:
        prediction = predict(model, featurize(signal, model_config))
        print(f"predicted: {prediction.label} vote_fraction={prediction.vote_fraction:.2f}")
        return EXIT_OK

    decision = access_control.decide(model, args.claim, signal, model_config)
    if decision.outcome is access_control.Outcome.GRANTED:
        final = decision
    elif args.no_interactive:
        print(f"Denied (predicted {decision.predicted_id}; password required, non-interactive)")
        if args.audit_log:
            access_control.append_audit(args.audit_log, decision)
        return EXIT_MISMATCH
    elif args.credentials is None:
        print(f"Denied (predicted {decision.predicted_id}; no credential store given)")
        if args.audit_log:
            access_control.append_audit(args.audit_log, decision)
        return EXIT_MISMATCH
    else:
        store = access_control.load_store(args.credentials)
        if args.password_stdin:
            password = sys.stdin.readline().rstrip("\n")
        else:
            password = getpass.getpass(f"password for {args.claim}: ")
        final = access_control.complete_with_password(decision, store, password)

    print(f"{final.outcome.value} (claimed {final.claimed_id}, predicted {final.predicted_id}, "
          f"vote {final.vote_fraction:.2f})")
    if args.audit_log:
        access_control.append_audit(args.audit_log, final)
    granted = final.outcome in (
        access_control.Outcome.GRANTED,
        access_control.Outcome.GRANTED_BY_PASSWORD,
    )
    return EXIT_OK if granted else EXIT_MISMATCH


def cmd_evaluate(args: argparse.Namespace) -> int:
    config = _resolve_config(args.config)
    k_values = (
        [int(part) for part in args.k_values.split(",") if part.strip()]
        if args.k_values
        else list(config.k_values)
    )
    folds = args.folds if args.folds is not None else config.folds
    seed = args.seed if args.seed is not None else config.seed

    root = Path(args.corpus_dir)
    if (root / "train").is_dir() and (root / "test").is_dir():
        dataset = _load_labeled_corpus(root / "train", config)
        test_set = _load_labeled_corpus(root / "test", config)
    else:
        dataset = _load_labeled_corpus(root, config)
        test_set = None

    report = sweep_neighbors(dataset, k_values, folds, seed, test_set=test_set)
    print(render_report(report))
    save_report(report, args.report_out, config.to_dict())
    print(f"report written to {args.report_out}")
    return EXIT_OK


def cmd_extract(args: argparse.Namespace) -> int:
    config = _resolve_config(args.config)
    signal = load_wav(args.wav)
    if config.denoise:
        signal = denoise(signal, config.wavelet())
    matrix = extract_mfcc(signal, config.mfcc())
    clip_id = args.wav
    with open(args.csv_out, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["clip_id", "frame_index"] + [f"c{i}" for i in range(1, config.num_ceps + 1)])
        for index, row in enumerate(matrix.coeffs):
            writer.writerow([clip_id, index] + [repr(float(value)) for value in row])
    print(f"{matrix.num_frames} frames x {config.num_ceps} coefficients -> {args.csv_out}")
    return EXIT_OK


def cmd_synth(args: argparse.Namespace) -> int:
    written = synth.generate_corpus(
        args.out_dir,
        synth.SynthConfig(
            speakers=args.speakers,
            train_clips=args.train,
            test_clips=args.test,
            clip_seconds=args.clip_seconds,
            sample_rate_hz=args.sample_rate,
            seed=args.seed,
            distinct_voices=not args.identical_voices,
        ),
    )
    print(f"wrote {len(written)} clips under {args.out_dir}")
    return EXIT_OK


def cmd_passwd(args: argparse.Namespace) -> int:
    store_path = Path(args.store)
    store = access_control.load_store(store_path) if store_path.exists() else access_control.CredentialStore()
    if args.password_stdin:
        password = sys.stdin.readline().rstrip("\n")
    else:
        password = getpass.getpass(f"new password for {args.speaker_id}: ")
    store.enroll(args.speaker_id, password)
    access_control.save_store(store, store_path)
    print(f"credential stored for {args.speaker_id}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="voicegate",
        description="Speaker identification with wavelet denoising, MFCC features, and kNN voting.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="featurize a corpus and write a model file")
    train.add_argument("corpus_dir")
    train.add_argument("model_out")
    train.add_argument("--config", help=f"config file (falls back to ${CONFIG_ENV_VAR})")
    train.add_argument("--k", type=int, help="neighbor count stored in the model")
    train.set_defaults(func=cmd_train)

    identify = sub.add_parser("identify", help="predict a clip's speaker, optionally check a claim")
    identify.add_argument("model")
    identify.add_argument("wav")
    identify.add_argument("--config", help="config file; must match the model's feature settings")
    identify.add_argument("--claim", help="claimed speaker id; triggers the access flow")
    identify.add_argument("--credentials", help="credential store for the password fallback")
    identify.add_argument("--no-interactive", action="store_true", help="never prompt; deny on mismatch")
    identify.add_argument("--password-stdin", action="store_true", help="read the password from stdin")
    identify.add_argument("--audit-log", help="append the decision to this file")
    identify.set_defaults(func=cmd_identify)

    evaluate = sub.add_parser("evaluate", help="k-fold and holdout accuracy over a corpus")
    evaluate.add_argument("corpus_dir", help="flat speaker dirs, or train/ + test/ subdirs")
    evaluate.add_argument("--config", help=f"config file (falls back to ${CONFIG_ENV_VAR})")
    evaluate.add_argument("--k-values", help="comma-separated neighbor counts, e.g. 2,3,4,5,6")
    evaluate.add_argument("--folds", type=int)
    evaluate.add_argument("--seed", type=int)
    evaluate.add_argument("--report-out", default="eval_report.json")
    evaluate.set_defaults(func=cmd_evaluate)

    extract = sub.add_parser("extract", help="write a clip's MFCC matrix as CSV")
    extract.add_argument("wav")
    extract.add_argument("csv_out")
    extract.add_argument("--config", help=f"config file (falls back to ${CONFIG_ENV_VAR})")
    extract.set_defaults(func=cmd_extract)

    synth_cmd = sub.add_parser("synth", help="generate the deterministic synthetic corpus")
    synth_cmd.add_argument("out_dir")
    synth_cmd.add_argument("--speakers", type=int, default=5)
    synth_cmd.add_argument("--train", type=int, default=40)
    synth_cmd.add_argument("--test", type=int, default=10)
    synth_cmd.add_argument("--seed", type=int, default=0)
    synth_cmd.add_argument("--sample-rate", type=int, default=16000)
    synth_cmd.add_argument("--clip-seconds", type=float, default=1.0)
    synth_cmd.add_argument(
        "--identical-voices",
        action="store_true",
        help="give every speaker the same voice (chance-level control corpus)",
    )
    synth_cmd.set_defaults(func=cmd_synth)

    passwd = sub.add_parser("passwd", help="enroll or replace a speaker's password")
    passwd.add_argument("store")
    passwd.add_argument("speaker_id")
    passwd.add_argument("--password-stdin", action="store_true", help="read the password from stdin")
    passwd.set_defaults(func=cmd_passwd)

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except VoicegateError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA


def entrypoint() -> None:
    sys.exit(main())


if __name__ == "__main__":
    sys.exit(main())
