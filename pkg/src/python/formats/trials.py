# src/python/formats/trials.py

from .line_reader import read_table, render_table
from ..utils.constants import ErrorCode, FileNames, Headers
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import Trial

logger = get_logger(__name__)

def parse_trials(content: str, warnings: list[str] | None = None) -> list[Trial]:
    """
    Parses a ``trials.txt`` file. Line order defines answer alignment.

    :param content: The file content.
    :type content: str
    :param warnings: Optional collector for nonfatal notes (a first line that is
        not the canonical header is still consumed as the header).
    :type warnings: list[str] or None

    :returns: The trials in file order.
    :rtype: list[:py:class:`~src.python.utils.types.Trial`]
    :raises FormatError: ``MalformedLine`` when a line does not have two fields.
    """
    trials = []
    for row in read_table(content, Headers.TRIALS, FileNames.TRIALS, warnings):
        if len(row.fields) != 2:
            raise FormatError(ErrorCode.MALFORMED_LINE,
                              f"Expected 'model-id evaluation-file-id', found {len(row.fields)} field(s)",
                              line_no=row.line_no, source=FileNames.TRIALS)
        trials.append(Trial(row.fields[0], row.fields[1]))

    logger.info(f"Parsed {len(trials)} trials.")
    return trials

def write_trials(trials: list[Trial]) -> str:
    """
    Renders trials in the canonical layout.

    :param trials: The trial list.
    :type trials: list[:py:class:`~src.python.utils.types.Trial`]

    :returns: The file content.
    :rtype: str
    """
    return render_table(Headers.TRIALS, [(t.model_id, t.test_id) for t in trials])
