# tests/test_cli.py

import io
import json

import pytest

from src.python.cli import EXIT_DOMAIN_ERROR, EXIT_OK, EXIT_USAGE, run
from src.python.utils.constants import SCHEMA_VERSION
from src.python.utils.wav_io import synth_wav

@pytest.fixture(autouse=True)
def in_tmp(tmp_path, monkeypatch):
    """Keeps the rotating log directory out of the checkout."""
    monkeypatch.chdir(tmp_path)

def _run(*argv: str) -> tuple[int, str]:
    out = io.StringIO()
    code = run(list(argv), out)
    return code, out.getvalue()

# --- score / det ---

def test_score_writes_report(worked_files, tmp_path):
    """Scoring the worked example writes a rounded report and prints the summary."""
    report_path = tmp_path / "report.json"
    code, out = _run("score", "--key", worked_files["key"], "--answer", worked_files["answer"],
                     "--report", str(report_path))

    assert code == EXIT_OK
    assert out.startswith("Task 1: 6 trials (3 target, 3 nontarget)")
    doc = json.loads(report_path.read_text(encoding='utf-8'))
    assert doc["min_dcf_norm"] == 0.666667
    assert doc["eer"] == 0.333333
    assert doc["eer_percent"] == 33.33

def test_score_json_line(worked_files, tmp_path):
    """--json prints one schema-versioned line instead of the summary."""
    code, out = _run("score", "--json", "--key", worked_files["key"], "--answer", worked_files["answer"],
                     "--report", str(tmp_path / "report.json"), "--det", str(tmp_path / "det.csv"))

    assert code == EXIT_OK
    (line,) = out.splitlines()
    doc = json.loads(line)
    assert doc["schema_version"] == SCHEMA_VERSION
    assert doc["det_csv_path"] == str(tmp_path / "det.csv")
    assert (tmp_path / "det.csv").read_text(encoding='utf-8').count('\n') == 9

def test_score_with_custom_costs(worked_files, tmp_path):
    """Cost parameters are read as C_MISS,C_FA,P_TARGET."""
    code, _ = _run("score", "--key", worked_files["key"], "--answer", worked_files["answer"],
                   "--params", "1,1,0.5", "--report", str(tmp_path / "report.json"))
    assert code == EXIT_OK

def test_score_count_mismatch(worked_files, tmp_path):
    """An answer with the wrong number of lines is a domain error with its code on stdout."""
    short = tmp_path / "short.txt"
    short.write_text("0.1\n0.2\n", encoding='utf-8')
    code, out = _run("score", "--json", "--key", worked_files["key"], "--answer", str(short),
                     "--report", str(tmp_path / "report.json"))

    assert code == EXIT_DOMAIN_ERROR
    doc = json.loads(out)
    assert doc["ok"] is False
    assert doc["error"]["code"] == "CountMismatch"
    assert not (tmp_path / "report.json").exists()

def test_usage_errors():
    """Missing flags, unknown slices and bad parameter lists are usage errors."""
    assert _run("score")[0] == EXIT_USAGE
    assert _run("score", "--key", "k", "--answer", "a", "--report", "r", "--slices", "colour")[0] == EXIT_USAGE
    assert _run("score", "--key", "k", "--answer", "a", "--report", "r", "--params", "1,2")[0] == EXIT_USAGE
    assert _run("synth", "--task", "3", "--seed", "1", "--out", "x")[0] == EXIT_USAGE
    assert _run()[0] == EXIT_USAGE

def test_det_export(worked_files, tmp_path):
    """The DET command writes the header and one row per operating point."""
    det_path = tmp_path / "det.csv"
    code, out = _run("det", "--key", worked_files["key"], "--answer", worked_files["answer"], "--out", str(det_path))

    assert code == EXIT_OK
    assert "8 DET points" in out
    lines = det_path.read_text(encoding='utf-8').splitlines()
    assert lines[0] == "threshold,p_miss,p_fa"
    assert len(lines) == 9

# --- validate ---

def test_validate_ok(worked_files):
    """A well-formed archive validates."""
    code, out = _run("validate", "--task", "1", "--trials", worked_files["trials"], worked_files["zip"])

    assert code == EXIT_OK
    assert out.splitlines()[0] == "OK"

def test_validate_invalid(worked_files, tmp_path):
    """A broken archive lists its issues and exits with a domain error."""
    broken = tmp_path / "broken.zip"
    broken.write_bytes(b"PK but not really")
    code, out = _run("validate", "--json", "--task", "1", "--trials", worked_files["trials"], str(broken))

    assert code == EXIT_DOMAIN_ERROR
    doc = json.loads(out)
    assert doc["ok"] is False
    assert [e["code"] for e in doc["errors"]] == ["NotAZip"]

def test_validate_unreadable_archive(worked_files, tmp_path):
    """A path that does not exist is reported, not raised."""
    code, _ = _run("validate", "--task", "1", "--trials", worked_files["trials"], str(tmp_path / "nope.zip"))
    assert code == EXIT_DOMAIN_ERROR

# --- synth / keygen ---

def test_synth_then_keygen(tmp_path):
    """The key rebuilt from a generated corpus equals the one it shipped with."""
    out_dir = tmp_path / "corpus"
    code, out = _run("synth", "--task", "1", "--seed", "7", "--speakers", "12", "--with-submission",
                     "--out", str(out_dir))
    assert code == EXIT_OK
    assert out.startswith("Task 1 corpus (seed 7)")
    assert (out_dir / "submission.zip").is_file()

    key_path = tmp_path / "rebuilt.tsv"
    code, out = _run("keygen", "--json", "--task", "1",
                     "--labels", str(out_dir / "docs" / "train_labels.txt"),
                     "--enrollment", str(out_dir / "docs" / "model_enrollment.txt"),
                     "--trials", str(out_dir / "docs" / "trials.txt"),
                     "--meta", str(out_dir / "utterance_meta.tsv"),
                     "--out", str(key_path))

    assert code == EXIT_OK
    doc = json.loads(out)
    assert doc["overlap_speakers"] == []
    assert key_path.read_bytes() == (out_dir / "trial_key.tsv").read_bytes()

    code, out = _run("validate", "--task", "1", "--trials", str(out_dir / "docs" / "trials.txt"),
                     str(out_dir / "submission.zip"))
    assert code == EXIT_OK

def test_synth_is_reproducible(tmp_path):
    """Two runs with one seed write identical manifests."""
    _run("synth", "--task", "2", "--seed", "3", "--cap", "NON=20", "--out", str(tmp_path / "a"))
    _run("synth", "--task", "2", "--seed", "3", "--cap", "NON=20", "--out", str(tmp_path / "b"))

    first = (tmp_path / "a" / "manifest.json").read_bytes()
    assert first == (tmp_path / "b" / "manifest.json").read_bytes()
    assert json.loads(first)["spec"]["caps"] == {"NON": 20}

def test_synth_infeasible(tmp_path):
    """A corpus too small for the task is a domain error."""
    code, _ = _run("synth", "--task", "1", "--seed", "1", "--speakers", "0", "--out", str(tmp_path / "x"))
    assert code == EXIT_DOMAIN_ERROR

# --- audit ---

def test_audit_reports_violations(tmp_path):
    """A too-short test file fails the audit; the JSON report is written alongside."""
    wav_dir = tmp_path / "wav"
    (wav_dir / "enrollment").mkdir(parents=True)
    (wav_dir / "evaluation").mkdir(parents=True)
    for file_id in ("enr_1", "enr_2"):
        (wav_dir / "enrollment" / f"{file_id}.wav").write_bytes(synth_wav([("tone", 2.015)], sample_rate=16000))
    (wav_dir / "evaluation" / "evl_1.wav").write_bytes(synth_wav([("tone", 0.5)], sample_rate=16000))
    enrollment = tmp_path / "model_enrollment.txt"
    enrollment.write_text("model-id enroll-file-ids ...\nmodel_00000 enr_1 enr_2\n", encoding='utf-8')
    report_path = tmp_path / "audit.json"

    code, out = _run("audit", "--task", "2", "--enrollment", str(enrollment), "--wav-dir", str(wav_dir),
                     "--report", str(report_path))

    assert code == EXIT_DOMAIN_ERROR
    assert "test-duration" in out
    assert "evl_1" in out
    assert report_path.is_file()

    code, out = _run("audit", "--task", "2", "--enrollment", str(enrollment), "--wav-dir", str(wav_dir),
                     "--slack", "1.0")
    assert code == EXIT_OK
    assert out.startswith("No violations")
