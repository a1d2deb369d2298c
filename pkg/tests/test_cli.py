"""End-to-end command-line tests driven in process through main(argv)."""

import csv
import io
import json
import os
import stat
import sys

import pytest

from conftest import encode_wav, sine_wave
from voicegate.cli import (
    CONFIG_ENV_VAR,
    EXIT_DATA,
    EXIT_MISMATCH,
    EXIT_OK,
    EXIT_USAGE,
    main,
)
from voicegate.config import PipelineConfig, format_config, save_config

os.environ.pop(CONFIG_ENV_VAR, None)  # a leaked config would skew every run


@pytest.fixture(scope="module")
def corpus(tmp_path_factory):
    """Small deterministic corpus: 3 speakers x (6 train + 2 test) x 0.5 s."""
    root = tmp_path_factory.mktemp("corpus")
    code = main(
        [
            "synth",
            str(root),
            "--speakers",
            "3",
            "--train",
            "6",
            "--test",
            "2",
            "--clip-seconds",
            "0.5",
        ]
    )
    assert code == EXIT_OK
    return root


@pytest.fixture(scope="module")
def model_file(corpus, tmp_path_factory):
    path = tmp_path_factory.mktemp("model") / "model.json"
    assert main(["train", str(corpus / "train"), str(path)]) == EXIT_OK
    return path


class TestSynth:
    def test_reports_written_count(self, corpus, capsys):
        code = main(["synth", str(corpus.parent / "again"), "--speakers", "2", "--train", "2",
                     "--test", "1", "--clip-seconds", "0.2"])
        assert code == EXIT_OK
        assert "wrote 6 clips" in capsys.readouterr().out

    def test_layout_exists(self, corpus):
        assert (corpus / "train" / "s01" / "clip000.wav").is_file()
        assert (corpus / "test" / "s03" / "clip007.wav").is_file()

    def test_identical_voices_flag(self, tmp_path, capsys):
        code = main(["synth", str(tmp_path), "--speakers", "2", "--train", "1", "--test", "0",
                     "--clip-seconds", "0.2", "--identical-voices"])
        assert code == EXIT_OK
        assert "wrote 2 clips" in capsys.readouterr().out


class TestTrain:
    def test_reports_counts(self, corpus, tmp_path, capsys):
        code = main(["train", str(corpus / "train"), str(tmp_path / "m.json")])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "trained: 18 clips, 3 speakers, k=3" in out
        assert (tmp_path / "m.json").is_file()

    def test_deterministic_modulo_timestamp(self, corpus, tmp_path):
        main(["train", str(corpus / "train"), str(tmp_path / "a.json")])
        main(["train", str(corpus / "train"), str(tmp_path / "b.json")])
        a = json.loads((tmp_path / "a.json").read_text())
        b = json.loads((tmp_path / "b.json").read_text())
        a.pop("created_at"), b.pop("created_at")
        assert a == b

    def test_k_flag_overrides_config(self, corpus, tmp_path):
        main(["train", str(corpus / "train"), str(tmp_path / "m.json"), "--k", "5"])
        assert json.loads((tmp_path / "m.json").read_text())["k"] == 5

    def test_corrupt_clip_skipped_with_diagnostic(self, corpus, tmp_path, capsys):
        import shutil

        broken = tmp_path / "broken"
        shutil.copytree(corpus / "train", broken)
        (broken / "s01" / "junk.wav").write_bytes(b"not a wav file")
        code = main(["train", str(broken), str(tmp_path / "m.json")])
        captured = capsys.readouterr()
        assert code == EXIT_OK
        assert "skipping" in captured.err and "junk.wav" in captured.err
        assert "trained: 18 clips" in captured.out  # the junk clip contributed nothing

    def test_speaker_with_no_decodable_clips_errors(self, corpus, tmp_path, capsys):
        import shutil

        broken = tmp_path / "broken"
        shutil.copytree(corpus / "train", broken)
        for wav in (broken / "s02").glob("*.wav"):
            wav.write_bytes(b"garbage")
        code = main(["train", str(broken), str(tmp_path / "m.json")])
        assert code == EXIT_DATA
        assert "s02" in capsys.readouterr().err

    def test_missing_corpus_dir_is_data_error(self, tmp_path, capsys):
        code = main(["train", str(tmp_path / "absent"), str(tmp_path / "m.json")])
        assert code == EXIT_DATA
        assert "error:" in capsys.readouterr().err


class TestIdentify:
    def test_plain_prediction(self, corpus, model_file, capsys):
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert out.startswith("predicted: s01")
        assert "vote_fraction=" in out

    def test_all_test_clips_identified(self, corpus, model_file, capsys):
        for clip in sorted((corpus / "test").rglob("*.wav")):
            speaker = clip.parent.name
            assert main(["identify", str(model_file), str(clip)]) == EXIT_OK
            assert f"predicted: {speaker}" in capsys.readouterr().out

    def test_true_claim_granted(self, corpus, model_file, capsys):
        clip = corpus / "test" / "s02" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip), "--claim", "s02"])
        assert code == EXIT_OK
        assert "Granted" in capsys.readouterr().out

    def test_false_claim_denied_non_interactive(self, corpus, model_file, capsys):
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(
            ["identify", str(model_file), str(clip), "--claim", "s03", "--no-interactive"]
        )
        assert code == EXIT_MISMATCH
        out = capsys.readouterr().out
        assert "Denied" in out and "predicted s01" in out

    def test_false_claim_without_store_denied(self, corpus, model_file, capsys):
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip), "--claim", "s03"])
        assert code == EXIT_MISMATCH
        assert "no credential store" in capsys.readouterr().out

    def test_unknown_claim_is_data_error(self, corpus, model_file, capsys):
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip), "--claim", "s99"])
        assert code == EXIT_DATA
        assert "not enrolled" in capsys.readouterr().err

    def _enroll(self, tmp_path, monkeypatch, speaker, password):
        store = tmp_path / "creds.json"
        monkeypatch.setattr(sys, "stdin", io.StringIO(password + "\n"))
        assert main(["passwd", str(store), speaker, "--password-stdin"]) == EXIT_OK
        return store

    def test_password_fallback_grants(self, corpus, model_file, tmp_path, monkeypatch, capsys):
        store = self._enroll(tmp_path, monkeypatch, "s03", "correct horse")
        clip = corpus / "test" / "s01" / "clip006.wav"
        monkeypatch.setattr(sys, "stdin", io.StringIO("correct horse\n"))
        code = main(
            ["identify", str(model_file), str(clip), "--claim", "s03",
             "--credentials", str(store), "--password-stdin"]
        )
        assert code == EXIT_OK
        assert "GrantedByPassword" in capsys.readouterr().out

    def test_password_fallback_wrong_password_denies(
        self, corpus, model_file, tmp_path, monkeypatch, capsys
    ):
        store = self._enroll(tmp_path, monkeypatch, "s03", "correct horse")
        clip = corpus / "test" / "s01" / "clip006.wav"
        monkeypatch.setattr(sys, "stdin", io.StringIO("wrong guess\n"))
        code = main(
            ["identify", str(model_file), str(clip), "--claim", "s03",
             "--credentials", str(store), "--password-stdin"]
        )
        assert code == EXIT_MISMATCH
        assert "Denied" in capsys.readouterr().out

    def test_audit_log_lines(self, corpus, model_file, tmp_path, capsys):
        log = tmp_path / "audit.log"
        clip = corpus / "test" / "s01" / "clip006.wav"
        main(["identify", str(model_file), str(clip), "--claim", "s01", "--audit-log", str(log)])
        main(["identify", str(model_file), str(clip), "--claim", "s03", "--no-interactive",
              "--audit-log", str(log)])
        capsys.readouterr()
        lines = log.read_text().splitlines()
        assert len(lines) == 2
        first, second = (line.split(",") for line in lines)
        assert first[1:] == ["s01", "s01", "Granted"]
        assert second[1:] == ["s03", "s01", "PasswordRequired"]

    def test_matching_config_accepted(self, corpus, model_file, tmp_path, capsys):
        cfg = tmp_path / "match.cfg"
        save_config(PipelineConfig(), cfg)
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip), "--config", str(cfg)])
        assert code == EXIT_OK
        capsys.readouterr()

    def test_mismatched_config_refused(self, corpus, model_file, tmp_path, capsys):
        cfg = tmp_path / "drifted.cfg"
        save_config(PipelineConfig(num_filters=30), cfg)
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip), "--config", str(cfg)])
        assert code == EXIT_DATA
        assert "feature settings differ" in capsys.readouterr().err

    def test_env_config_mismatch_refused(self, corpus, model_file, tmp_path, monkeypatch, capsys):
        cfg = tmp_path / "drifted.cfg"
        save_config(PipelineConfig(frame_ms=20.0), cfg)
        monkeypatch.setenv(CONFIG_ENV_VAR, str(cfg))
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip)])
        assert code == EXIT_DATA
        capsys.readouterr()

    def test_non_feature_config_change_accepted(self, corpus, model_file, tmp_path, capsys):
        cfg = tmp_path / "harmless.cfg"
        save_config(PipelineConfig(folds=7, seed=42), cfg)
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(model_file), str(clip), "--config", str(cfg)])
        assert code == EXIT_OK
        capsys.readouterr()

    def test_missing_model_is_data_error(self, corpus, tmp_path, capsys):
        clip = corpus / "test" / "s01" / "clip006.wav"
        code = main(["identify", str(tmp_path / "absent.json"), str(clip)])
        assert code == EXIT_DATA
        capsys.readouterr()


class TestEvaluate:
    def test_split_corpus_layout(self, corpus, tmp_path, capsys):
        report = tmp_path / "report.json"
        code = main(["evaluate", str(corpus), "--report-out", str(report)])
        assert code == EXIT_OK
        out = capsys.readouterr().out
        assert "neighbors" in out and "k-fold %" in out and "holdout %" in out
        assert f"report written to {report}" in out
        payload = json.loads(report.read_text())
        assert set(payload["per_k"]) == {"2", "3", "4", "5", "6"}
        assert payload["config"]["num_filters"] == 20

    def test_flat_corpus_layout(self, corpus, tmp_path, capsys):
        report = tmp_path / "report.json"
        code = main(["evaluate", str(corpus / "train"), "--report-out", str(report),
                     "--k-values", "1,3", "--folds", "3"])
        assert code == EXIT_OK
        payload = json.loads(report.read_text())
        assert set(payload["per_k"]) == {"1", "3"}
        assert payload["fold_count"] == 3
        capsys.readouterr()

    def test_report_is_deterministic(self, corpus, tmp_path, capsys):
        a, b = tmp_path / "a.json", tmp_path / "b.json"
        main(["evaluate", str(corpus), "--report-out", str(a)])
        main(["evaluate", str(corpus), "--report-out", str(b)])
        capsys.readouterr()
        assert a.read_bytes() == b.read_bytes()

    def test_synthetic_accuracy_is_high(self, corpus, tmp_path, capsys):
        report = tmp_path / "report.json"
        main(["evaluate", str(corpus), "--report-out", str(report)])
        capsys.readouterr()
        payload = json.loads(report.read_text())
        best = payload["per_k"][str(payload["best_k"])]
        assert best["kfold_accuracy"] >= 0.9
        assert best["holdout_accuracy"] >= 0.9


class TestExtract:
    def test_csv_shape_and_header(self, tmp_path, capsys):
        wav = tmp_path / "tone.wav"
        wav.write_bytes(encode_wav(sine_wave(440.0, 0.2, 16000), 16000))
        out = tmp_path / "feat.csv"
        code = main(["extract", str(wav), str(out)])
        assert code == EXIT_OK
        with open(out, newline="") as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["clip_id", "frame_index"] + [f"c{i}" for i in range(1, 14)]
        # 0.2 s at 16 kHz: (3200 - 400) // 160 + 1 frames
        assert len(rows) == 1 + 18
        assert rows[1][0] == str(wav)
        assert [int(r[1]) for r in rows[1:]] == list(range(18))
        for cell in rows[1][2:]:
            float(cell)  # repr round-trips
        assert "18 frames x 13 coefficients" in capsys.readouterr().out

    def test_rerun_is_byte_identical(self, tmp_path, capsys):
        wav = tmp_path / "tone.wav"
        wav.write_bytes(encode_wav(sine_wave(300.0, 0.3, 16000), 16000))
        main(["extract", str(wav), str(tmp_path / "a.csv")])
        main(["extract", str(wav), str(tmp_path / "b.csv")])
        capsys.readouterr()
        assert (tmp_path / "a.csv").read_bytes() == (tmp_path / "b.csv").read_bytes()

    def test_config_changes_output(self, tmp_path, capsys):
        wav = tmp_path / "tone.wav"
        wav.write_bytes(encode_wav(sine_wave(440.0, 0.2, 16000), 16000))
        cfg = tmp_path / "alt.cfg"
        save_config(PipelineConfig(num_ceps=8, denoise=False), cfg)
        code = main(["extract", str(wav), str(tmp_path / "alt.csv"), "--config", str(cfg)])
        assert code == EXIT_OK
        with open(tmp_path / "alt.csv", newline="") as fh:
            header = next(csv.reader(fh))
        assert header == ["clip_id", "frame_index"] + [f"c{i}" for i in range(1, 9)]
        capsys.readouterr()

    def test_unreadable_wav_is_data_error(self, tmp_path, capsys):
        wav = tmp_path / "junk.wav"
        wav.write_bytes(b"RIFFjunk")
        code = main(["extract", str(wav), str(tmp_path / "out.csv")])
        assert code == EXIT_DATA
        assert "error:" in capsys.readouterr().err


class TestPasswd:
    def test_store_created_with_tight_permissions(self, tmp_path, monkeypatch, capsys):
        store = tmp_path / "creds.json"
        monkeypatch.setattr(sys, "stdin", io.StringIO("hunter2\n"))
        code = main(["passwd", str(store), "alice", "--password-stdin"])
        assert code == EXIT_OK
        assert "credential stored for alice" in capsys.readouterr().out
        assert stat.S_IMODE(os.stat(store).st_mode) == 0o600
        assert "hunter2" not in store.read_text()

    def test_enrolling_twice_replaces(self, tmp_path, monkeypatch, capsys):
        store = tmp_path / "creds.json"
        monkeypatch.setattr(sys, "stdin", io.StringIO("first\n"))
        main(["passwd", str(store), "alice", "--password-stdin"])
        before = json.loads(store.read_text())["entries"]["alice"]
        monkeypatch.setattr(sys, "stdin", io.StringIO("second\n"))
        main(["passwd", str(store), "alice", "--password-stdin"])
        after = json.loads(store.read_text())["entries"]["alice"]
        assert before != after
        capsys.readouterr()


class TestUsage:
    def test_no_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main([])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()

    def test_unknown_subcommand_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["frobnicate"])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()

    def test_missing_argument_is_usage_error(self, capsys):
        with pytest.raises(SystemExit) as exc:
            main(["train", "only-corpus"])
        assert exc.value.code == EXIT_USAGE
        capsys.readouterr()
