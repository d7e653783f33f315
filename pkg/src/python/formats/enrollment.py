# src/python/formats/enrollment.py

from .line_reader import read_table, render_table
from ..utils.constants import (
    ErrorCode, FileNames, Headers, PHRASES, TD_ENROLLMENT_COUNT, TaskType
)
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import EnrollmentRecord, EnrollmentRecordTD, EnrollmentRecordTI

logger = get_logger(__name__)

def parse_enrollment(content: str, task: TaskType | int | str,
                     warnings: list[str] | None = None) -> list[EnrollmentRecord]:
    """
    Parses a ``model_enrollment.txt`` file.

    Task 1 lines carry ``model-id phrase-id`` and exactly three enrollment ids.
    Task 2 lines carry a model id followed by one or more enrollment ids.

    :param content: The file content.
    :type content: str
    :param task: Which task's layout to expect.
    :type task: :py:class:`~src.python.utils.constants.TaskType`
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The records in file order.
    :rtype: list[EnrollmentRecord]
    :raises FormatError: ``MalformedLine``, ``DuplicateModelId``, ``InvalidPhraseId``
        or ``DuplicateFileId``.
    """
    task = TaskType.parse(task)
    header = Headers.ENROLLMENT_TD if task is TaskType.TEXT_DEPENDENT else Headers.ENROLLMENT_TI
    rows = read_table(content, header, FileNames.ENROLLMENT, warnings)

    records: list[EnrollmentRecord] = []
    seen_models: set[str] = set()

    for row in rows:
        fields = row.fields
        if task is TaskType.TEXT_DEPENDENT:
            if len(fields) != 2 + TD_ENROLLMENT_COUNT:
                raise FormatError(ErrorCode.MALFORMED_LINE,
                                  f"Expected {2 + TD_ENROLLMENT_COUNT} columns, found {len(fields)}",
                                  line_no=row.line_no, source=FileNames.ENROLLMENT)
            model_id, phrase_id = fields[0], fields[1]
            if phrase_id not in PHRASES:
                raise FormatError(ErrorCode.INVALID_PHRASE_ID,
                                  f"Phrase id {phrase_id!r} is not one of 01..10",
                                  line_no=row.line_no, source=FileNames.ENROLLMENT)
            record = EnrollmentRecordTD(model_id, phrase_id, tuple(fields[2:]))
        else:
            if len(fields) < 2:
                raise FormatError(ErrorCode.MALFORMED_LINE,
                                  "Expected a model id and at least one enrollment id",
                                  line_no=row.line_no, source=FileNames.ENROLLMENT)
            model_id = fields[0]
            record = EnrollmentRecordTI(model_id, tuple(fields[1:]))

        if len(set(record.enrollment_ids)) != len(record.enrollment_ids):
            raise FormatError(ErrorCode.DUPLICATE_FILE_ID,
                              f"Model {model_id!r} lists the same enrollment file twice",
                              line_no=row.line_no, source=FileNames.ENROLLMENT)
        if model_id in seen_models:
            raise FormatError(ErrorCode.DUPLICATE_MODEL_ID, f"Model id {model_id!r} appears twice",
                              line_no=row.line_no, source=FileNames.ENROLLMENT)
        seen_models.add(model_id)
        records.append(record)

    logger.info(f"Parsed {len(records)} {task.short_name} enrollment records.")
    return records

def write_enrollment(records: list[EnrollmentRecord], task: TaskType | int | str) -> str:
    """
    Renders enrollment records in the canonical single-space layout.

    :param records: Records of a single task.
    :type records: list[EnrollmentRecord]
    :param task: The task, selects the header line.
    :type task: :py:class:`~src.python.utils.constants.TaskType`

    :returns: The file content.
    :rtype: str
    """
    task = TaskType.parse(task)
    if task is TaskType.TEXT_DEPENDENT:
        rows = [(r.model_id, r.phrase_id, *r.enrollment_ids) for r in records]
        return render_table(Headers.ENROLLMENT_TD, rows)
    rows = [(r.model_id, *r.enrollment_ids) for r in records]
    return render_table(Headers.ENROLLMENT_TI, rows)
