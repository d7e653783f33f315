# tests/formats/test_enrollment.py

import pytest

from src.python.formats.enrollment import parse_enrollment, write_enrollment
from src.python.utils.constants import ErrorCode, Headers, TaskType
from src.python.utils.exceptions import FormatError
from src.python.utils.types import EnrollmentRecordTD, EnrollmentRecordTI

TD_HEADER = Headers.ENROLLMENT_TD + "\n"
TI_HEADER = Headers.ENROLLMENT_TI + "\n"

def test_parse_td_record():
    """A Task 1 line yields the model, its phrase and three enrollment ids."""
    records = parse_enrollment(TD_HEADER + "model_00000 07 enr_007492 enr_023277 enr_012882\n", TaskType.TEXT_DEPENDENT)

    assert records == [EnrollmentRecordTD("model_00000", "07", ("enr_007492", "enr_023277", "enr_012882"))]

def test_parse_ti_record_with_five_utterances():
    """A Task 2 line may list any number of enrollment utterances."""
    line = "model_15008 enr_177720 enr_334136 enr_226306 enr_057733 enr_190105\n"
    records = parse_enrollment(TI_HEADER + line, "TI")

    assert len(records) == 1
    assert isinstance(records[0], EnrollmentRecordTI)
    assert len(records[0].enrollment_ids) == 5
    assert records[0].enrollment_ids[0] == "enr_177720"

def test_header_only_file_is_empty():
    """A file holding only the header has no records."""
    assert parse_enrollment(TD_HEADER, 1) == []
    assert parse_enrollment(TI_HEADER, 2) == []

def test_empty_file_needs_header():
    """Without even a header line the file is rejected."""
    with pytest.raises(FormatError) as excinfo:
        parse_enrollment("", TaskType.TEXT_DEPENDENT)
    assert excinfo.value.code is ErrorCode.MISSING_HEADER
    assert excinfo.value.line_no == 1

def test_td_column_count_is_strict():
    """Task 1 lines need exactly five columns; the error names the line."""
    content = TD_HEADER + "model_00000 07 enr_1 enr_2 enr_3\nmodel_00001 07 enr_4 enr_5\n"
    with pytest.raises(FormatError) as excinfo:
        parse_enrollment(content, TaskType.TEXT_DEPENDENT)
    assert excinfo.value.code is ErrorCode.MALFORMED_LINE
    assert excinfo.value.line_no == 3

def test_ti_needs_one_enrollment_id():
    """A Task 2 line with only a model id is malformed."""
    with pytest.raises(FormatError) as excinfo:
        parse_enrollment(TI_HEADER + "model_00000\n", TaskType.TEXT_INDEPENDENT)
    assert excinfo.value.code is ErrorCode.MALFORMED_LINE

def test_invalid_phrase_id():
    """Phrase ids outside 01..10 are rejected."""
    with pytest.raises(FormatError) as excinfo:
        parse_enrollment(TD_HEADER + "model_00000 11 enr_1 enr_2 enr_3\n", TaskType.TEXT_DEPENDENT)
    assert excinfo.value.code is ErrorCode.INVALID_PHRASE_ID

def test_duplicate_model_id():
    """A model id may appear only once per file."""
    content = TI_HEADER + "model_00000 enr_1\nmodel_00000 enr_2\n"
    with pytest.raises(FormatError) as excinfo:
        parse_enrollment(content, TaskType.TEXT_INDEPENDENT)
    assert excinfo.value.code is ErrorCode.DUPLICATE_MODEL_ID
    assert excinfo.value.line_no == 3

def test_repeated_enrollment_id_within_record():
    """A model cannot list the same utterance twice."""
    with pytest.raises(FormatError) as excinfo:
        parse_enrollment(TI_HEADER + "model_00000 enr_1 enr_1\n", TaskType.TEXT_INDEPENDENT)
    assert excinfo.value.code is ErrorCode.DUPLICATE_FILE_ID

def test_liberal_whitespace_and_crlf():
    """Tabs, repeated spaces, CRLF endings and blank lines are all accepted."""
    content = TD_HEADER.replace("\n", "\r\n") + "model_00000\t07  enr_1 \tenr_2 enr_3\r\n\r\n"
    records = parse_enrollment(content, TaskType.TEXT_DEPENDENT)

    assert records[0].enrollment_ids == ("enr_1", "enr_2", "enr_3")

def test_unexpected_header_is_discarded_with_warning():
    """A first line that is not the documented header is still consumed, with a warning."""
    warnings: list[str] = []
    content = "model_00009 enr_9\nmodel_00000 enr_1\n"
    records = parse_enrollment(content, TaskType.TEXT_INDEPENDENT, warnings)

    assert [r.model_id for r in records] == ["model_00000"]
    assert len(warnings) == 1
    assert warnings[0].startswith("MissingHeader:")

def test_write_is_canonical():
    """Rewriting parsed input yields single spaces and LF endings, and parses back equal."""
    content = TD_HEADER + "model_00000   07\tenr_1 enr_2 enr_3\r\nmodel_00001 01 enr_4 enr_5 enr_6\n"
    records = parse_enrollment(content, TaskType.TEXT_DEPENDENT)
    text = write_enrollment(records, TaskType.TEXT_DEPENDENT)

    assert text == TD_HEADER + "model_00000 07 enr_1 enr_2 enr_3\nmodel_00001 01 enr_4 enr_5 enr_6\n"
    assert parse_enrollment(text, TaskType.TEXT_DEPENDENT) == records
