# src/python/formats/train_labels.py

from .line_reader import read_table, render_table
from ..utils.constants import ErrorCode, FileNames, Headers, PHRASES, TaskType
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import TrainLabel, TrainLabelTD, TrainLabelTI

logger = get_logger(__name__)

def parse_train_labels(content: str, task: TaskType | int | str,
                       warnings: list[str] | None = None) -> list[TrainLabel]:
    """
    Parses a ``train_labels.txt`` file: three columns for Task 1
    (file, speaker, phrase), two for Task 2 (file, speaker).

    :param content: The file content.
    :type content: str
    :param task: Which task's layout to expect.
    :type task: :py:class:`~src.python.utils.constants.TaskType`
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The labels in file order.
    :rtype: list[TrainLabel]
    :raises FormatError: ``MalformedLine``, ``InvalidPhraseId`` or ``DuplicateFileId``.
    """
    task = TaskType.parse(task)
    td = task is TaskType.TEXT_DEPENDENT
    header = Headers.TRAIN_LABELS_TD if td else Headers.TRAIN_LABELS_TI
    expected_columns = 3 if td else 2

    labels: list[TrainLabel] = []
    seen_files: set[str] = set()

    for row in read_table(content, header, FileNames.TRAIN_LABELS, warnings):
        fields = row.fields
        if len(fields) != expected_columns:
            raise FormatError(ErrorCode.MALFORMED_LINE,
                              f"Expected {expected_columns} columns, found {len(fields)}",
                              line_no=row.line_no, source=FileNames.TRAIN_LABELS)
        if fields[0] in seen_files:
            raise FormatError(ErrorCode.DUPLICATE_FILE_ID, f"File id {fields[0]!r} appears twice",
                              line_no=row.line_no, source=FileNames.TRAIN_LABELS)
        seen_files.add(fields[0])

        if td:
            if fields[2] not in PHRASES:
                raise FormatError(ErrorCode.INVALID_PHRASE_ID,
                                  f"Phrase id {fields[2]!r} is not one of 01..10",
                                  line_no=row.line_no, source=FileNames.TRAIN_LABELS)
            labels.append(TrainLabelTD(fields[0], fields[1], fields[2]))
        else:
            labels.append(TrainLabelTI(fields[0], fields[1]))

    logger.info(f"Parsed {len(labels)} {task.short_name} train labels.")
    return labels

def write_train_labels(labels: list[TrainLabel], task: TaskType | int | str) -> str:
    """
    Renders train labels in the canonical layout.

    :param labels: Labels of a single task.
    :type labels: list[TrainLabel]
    :param task: The task, selects header and column count.
    :type task: :py:class:`~src.python.utils.constants.TaskType`

    :returns: The file content.
    :rtype: str
    """
    if TaskType.parse(task) is TaskType.TEXT_DEPENDENT:
        return render_table(Headers.TRAIN_LABELS_TD,
                            [(l.file_id, l.speaker_id, l.phrase_id) for l in labels])
    return render_table(Headers.TRAIN_LABELS_TI, [(l.file_id, l.speaker_id) for l in labels])
