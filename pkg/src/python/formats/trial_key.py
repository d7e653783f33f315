# src/python/formats/trial_key.py

from .line_reader import read_table, render_table
from ..utils.constants import ErrorCode, FileNames, Headers, Partition, TrialType
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import TrialKey

logger = get_logger(__name__)

_TARGET_FLAGS = {"0": False, "1": True}

def parse_key(content: str, warnings: list[str] | None = None) -> list[TrialKey]:
    """
    Parses the toolkit's tab-separated answer key.

    Every row must be internally consistent: ``is-target`` agrees with the
    trial type, Task 1 rows carry partition ``none`` and Task 2 rows one of
    ``same-lang``/``cross-lang``. A key never mixes the two tasks.

    :param content: The file content.
    :type content: str
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The key rows in file order.
    :rtype: list[:py:class:`~src.python.utils.types.TrialKey`]
    :raises FormatError: ``MalformedLine`` on any inconsistent row.
    """
    keys: list[TrialKey] = []
    task = None

    for row in read_table(content, Headers.KEY, FileNames.KEY, warnings):
        def fail(message: str) -> FormatError:
            return FormatError(ErrorCode.MALFORMED_LINE, message, line_no=row.line_no, source=FileNames.KEY)

        if len(row.fields) != 5:
            raise fail(f"Expected 5 columns, found {len(row.fields)}")
        model_id, test_id, type_text, flag_text, partition_text = row.fields
        try:
            trial_type = TrialType(type_text)
            partition = Partition(partition_text)
        except ValueError as e:
            raise fail(f"Unknown trial type or partition in {row.raw!r}") from e
        if flag_text not in _TARGET_FLAGS:
            raise fail(f"is-target must be 0 or 1, found {flag_text!r}")

        key = TrialKey(model_id, test_id, trial_type, _TARGET_FLAGS[flag_text], partition)
        if key.is_target != trial_type.is_target:
            raise fail(f"is-target={flag_text} contradicts trial type {trial_type.value}")
        if trial_type in (TrialType.TRG, TrialType.NON):
            if partition is Partition.NONE:
                raise fail("Task 2 rows need partition same-lang or cross-lang")
        elif partition is not Partition.NONE:
            raise fail("Task 1 rows carry partition none")

        if task is None:
            task = key.task
        elif key.task is not task:
            raise fail("Key mixes Task 1 and Task 2 rows")
        keys.append(key)

    logger.info(f"Parsed {len(keys)} key rows.")
    return keys

def write_key(keys: list[TrialKey]) -> str:
    """
    Renders key rows as tab-separated text under the canonical header.

    :param keys: Key rows aligned to a trial list.
    :type keys: list[:py:class:`~src.python.utils.types.TrialKey`]

    :returns: The file content.
    :rtype: str
    """
    rows = [(k.model_id, k.test_id, k.trial_type.value, "1" if k.is_target else "0", k.partition.value)
            for k in keys]
    return render_table(Headers.KEY, rows, separator='\t')
