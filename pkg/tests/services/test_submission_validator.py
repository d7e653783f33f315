# tests/services/test_submission_validator.py

import zipfile

import pytest

from conftest import BASELINE_METADATA, make_zip, td_key
from src.python.formats.answer import parse_answer
from src.python.formats.metadata import parse_metadata
from src.python.services.scorer import score_answer
from src.python.services.submission_validator import (
    inspect_archive, open_submission_zip, training_data_warnings, validate_submission
)
from src.python.utils.constants import ErrorCode, SUBMISSION_ERROR_CODES, TaskType, TrialType
from src.python.utils.exceptions import CodedError, SubmissionError

GOOD_ANSWER = "0.9\n-0.4\n0.1\n"

def _archive(answer: str | None = GOOD_ANSWER, metadata: str | None = BASELINE_METADATA, **extra) -> bytes:
    entries = {}
    if answer is not None:
        entries["answer.txt"] = answer
    if metadata is not None:
        entries["metadata"] = metadata
    entries.update(extra)
    return make_zip(entries)

# One malformed archive per error code, answering the three-trial list
MALFORMED_CORPUS = {
    "not-a-zip": (b"this is a text file, not an archive", {ErrorCode.NOT_A_ZIP}),
    "empty-upload": (b"", {ErrorCode.NOT_A_ZIP}),
    "missing-answer": (_archive(answer=None), {ErrorCode.MISSING_ANSWER_FILE}),
    "missing-metadata": (_archive(metadata=None), {ErrorCode.MISSING_METADATA_FILE}),
    "directory-entry": (_archive(**{"extra/": None}), {ErrorCode.CONTAINS_DIRECTORIES}),
    "extra-file": (_archive(**{"notes.md": "fusion of three systems"}), {ErrorCode.UNEXPECTED_ENTRIES}),
    "nested": (make_zip({"submission/answer.txt": GOOD_ANSWER, "submission/metadata": BASELINE_METADATA}),
               {ErrorCode.FILES_NOT_AT_ROOT}),
    "short-answer": (_archive(answer="0.9\n-0.4\n"), {ErrorCode.COUNT_MISMATCH}),
    "non-numeric": (_archive(answer="0.9\nhigh\n0.1\n"), {ErrorCode.NON_NUMERIC_SCORE}),
    "non-finite": (_archive(answer="0.9\nnan\n0.1\n"), {ErrorCode.NON_FINITE_SCORE}),
    "header": (_archive(answer="model-id evaluation-file-id\n" + GOOD_ANSWER), {ErrorCode.HEADER_LINE_PRESENT}),
    "no-description": (_archive(metadata="fused-systems-count: 1\n"), {ErrorCode.MISSING_KEY}),
    "fused-word": (_archive(metadata="public-description: x\nfused-systems-count: two\n"),
                   {ErrorCode.NON_INTEGER_FUSED_COUNT}),
    "fused-zero": (_archive(metadata="public-description: x\nfused-systems-count: 0\n"),
                   {ErrorCode.FUSED_COUNT_OUT_OF_RANGE}),
    "duplicate-key": (_archive(metadata=BASELINE_METADATA + "fused-systems-count: 2\n"), {ErrorCode.DUPLICATE_KEY}),
    "colonless-metadata": (_archive(metadata=BASELINE_METADATA + "fused with care\n"), {ErrorCode.MALFORMED_LINE}),
}

@pytest.fixture
def three_keys(three_trials):
    types = [TrialType.TC, TrialType.IW, TrialType.IC]
    return [td_key(t.model_id, t.test_id, trial_type) for t, trial_type in zip(three_trials, types)]

def test_corpus_covers_every_code():
    """Each submission error code has a malformed archive exercising it."""
    covered = set().union(*(codes for _, codes in MALFORMED_CORPUS.values()))
    assert covered == set(SUBMISSION_ERROR_CODES)

def test_valid_submission(three_trials):
    """A well-formed archive yields the scores in trial order and the metadata."""
    result = validate_submission(_archive(), three_trials)

    assert result.ok
    assert result.errors == ()
    assert result.payload.answer.tolist() == [0.9, -0.4, 0.1]
    assert result.payload.metadata.fused_systems_count == 1

@pytest.mark.parametrize("name", sorted(MALFORMED_CORPUS))
def test_malformed_archives(name, three_trials):
    """Every malformed archive is rejected with exactly its expected codes."""
    data, expected = MALFORMED_CORPUS[name]
    result = validate_submission(data, three_trials)

    assert not result.ok
    assert result.payload is None
    assert {issue.code for issue in result.errors} == expected

@pytest.mark.parametrize("name", sorted(MALFORMED_CORPUS) + ["valid"])
def test_validator_and_scorer_agree(name, three_trials, three_keys):
    """An archive validates exactly when the strict open/parse/score path accepts it."""
    data = _archive() if name == "valid" else MALFORMED_CORPUS[name][0]
    result = validate_submission(data, three_trials)

    try:
        answer_text, metadata_text = open_submission_zip(data)
        scores = parse_answer(answer_text, len(three_trials))
        parse_metadata(metadata_text)
        score_answer(scores, three_keys)
        scored = True
    except CodedError:
        scored = False

    assert result.ok == scored

def test_defects_are_collected_together(three_trials):
    """Layout, answer and metadata defects of one archive are all reported."""
    data = make_zip({
        "answer.txt": "0.9\nhigh\n",
        "metadata": "fused-systems-count: many\n",
        "readme.txt": "hello",
    })
    codes = [issue.code for issue in validate_submission(data, three_trials).errors]

    assert set(codes) == {ErrorCode.UNEXPECTED_ENTRIES, ErrorCode.NON_NUMERIC_SCORE, ErrorCode.COUNT_MISMATCH,
                          ErrorCode.MISSING_KEY, ErrorCode.NON_INTEGER_FUSED_COUNT}

def test_issue_locations(three_trials):
    """Issues point at the archive entry and line."""
    result = validate_submission(MALFORMED_CORPUS["non-numeric"][0], three_trials)
    assert [issue.location for issue in result.errors] == ["answer.txt:2"]

    result = validate_submission(MALFORMED_CORPUS["nested"][0], three_trials)
    assert sorted(issue.location for issue in result.errors) == ["submission/answer.txt", "submission/metadata"]

def test_names_are_case_sensitive(three_trials):
    """``Answer.txt`` is not ``answer.txt``."""
    data = make_zip({"Answer.txt": GOOD_ANSWER, "metadata": BASELINE_METADATA})
    codes = {issue.code for issue in validate_submission(data, three_trials).errors}
    assert codes == {ErrorCode.UNEXPECTED_ENTRIES, ErrorCode.MISSING_ANSWER_FILE}

def test_stored_entries_and_bom_are_accepted(three_trials):
    """Uncompressed entries and a UTF-8 byte order mark are fine."""
    data = make_zip({"answer.txt": "\ufeff" + GOOD_ANSWER, "metadata": BASELINE_METADATA},
                    compression=zipfile.ZIP_STORED)
    assert validate_submission(data, three_trials).ok

def test_other_compression_methods_are_refused(three_trials):
    """Only stored and deflate entries may be submitted."""
    data = make_zip({"answer.txt": GOOD_ANSWER, "metadata": BASELINE_METADATA}, compression=zipfile.ZIP_BZIP2)
    codes = {issue.code for issue in validate_submission(data, three_trials).errors}
    assert ErrorCode.UNEXPECTED_ENTRIES in codes

def test_uncompressed_size_limit(three_trials):
    """An archive expanding beyond the limit is refused before extraction."""
    result = validate_submission(_archive(), three_trials, max_uncompressed_bytes=10)
    assert [issue.code for issue in result.errors] == [ErrorCode.UNEXPECTED_ENTRIES]

def test_validation_is_deterministic(three_trials):
    """The same bytes always give the same report."""
    data = MALFORMED_CORPUS["duplicate-key"][0]
    assert validate_submission(data, three_trials).to_dict() == validate_submission(data, three_trials).to_dict()

def test_open_submission_zip_raises_with_every_issue():
    """The strict opener carries all layout issues in one exception."""
    with pytest.raises(SubmissionError) as excinfo:
        open_submission_zip(make_zip({"notes.md": "x"}))

    codes = {issue.code for issue in excinfo.value.issues}
    assert codes == {ErrorCode.UNEXPECTED_ENTRIES, ErrorCode.MISSING_ANSWER_FILE, ErrorCode.MISSING_METADATA_FILE}

def test_inspect_archive_extracts_texts():
    """Root entries come back decoded."""
    texts, issues = inspect_archive(_archive())
    assert issues == []
    assert texts["answer.txt"] == GOOD_ANSWER

# --- Training condition ---

def test_training_data_outside_fixed_condition(three_trials):
    """Corpora outside the task's fixed condition are warnings, not errors."""
    metadata = BASELINE_METADATA + "training-data: VoxCeleb1, voxceleb2, In-house Farsi\n"
    result = validate_submission(_archive(metadata=metadata), three_trials, task=TaskType.TEXT_DEPENDENT)

    assert result.ok
    assert len(result.warnings) == 1
    assert "In-house Farsi" in result.warnings[0]
    assert result.payload.metadata.training_data == ("VoxCeleb1", "voxceleb2", "In-house Farsi")

def test_training_data_per_task():
    """DeepMine Task 1 data belongs to Task 1's condition only."""
    assert training_data_warnings(("DeepMine Task 1",), TaskType.TEXT_DEPENDENT) == []
    assert len(training_data_warnings(("DeepMine Task 1",), TaskType.TEXT_INDEPENDENT)) == 1
