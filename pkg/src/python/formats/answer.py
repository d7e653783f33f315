# src/python/formats/answer.py

import re

import numpy as np

from .line_reader import split_lines, tokenize
from ..utils.constants import ErrorCode, FileNames, Headers
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import ScoreVector, ValidationIssue

logger = get_logger(__name__)

_SCORE = re.compile(r'[+-]?(?:\d+(?:\.\d*)?|\.\d+)(?:[eE][+-]?\d+)?')
_NON_FINITE = re.compile(r'[+-]?(?:nan|inf|infinity)', re.IGNORECASE)

MAX_ISSUES_PER_CODE = 20
"""Per-line issues of one code beyond this are summarised in a single extra issue."""

def _location(line_no: int) -> str:
    return f"{FileNames.ANSWER}:{line_no}"

def scan_answer(content: str, expected_count: int) -> tuple[ScoreVector | None, list[ValidationIssue]]:
    """
    Reads an ``answer.txt`` and collects every defect instead of stopping at
    the first one.

    One score per line, no header, at most one trailing newline. A line equal to
    the trial-file header is reported as ``HeaderLinePresent`` and does not count
    towards the number of scores.

    :param content: The file content.
    :type content: str
    :param expected_count: Number of trials the answer must cover.
    :type expected_count: int

    :returns: The read-only score vector (None when any issue was found) and the issues.
    :rtype: tuple[ScoreVector or None, list[ValidationIssue]]
    """
    lines = split_lines(content)
    issues: list[ValidationIssue] = []
    per_code: dict[ErrorCode, int] = {}

    def report(code: ErrorCode, detail: str, line_no: int) -> None:
        per_code[code] = per_code.get(code, 0) + 1
        if per_code[code] <= MAX_ISSUES_PER_CODE:
            issues.append(ValidationIssue(code, detail, _location(line_no)))

    start = 0
    if lines and tokenize(lines[0]) == tokenize(Headers.TRIALS):
        issues.append(ValidationIssue(ErrorCode.HEADER_LINE_PRESENT,
                                      "The trial-file header must not be included in answer.txt",
                                      _location(1)))
        start = 1

    tokens: list[str] = []
    token_lines: list[int] = []
    for index in range(start, len(lines)):
        line_no = index + 1
        token = lines[index].strip(' \t')
        if _SCORE.fullmatch(token):
            tokens.append(token)
            token_lines.append(line_no)
        elif _NON_FINITE.fullmatch(token):
            report(ErrorCode.NON_FINITE_SCORE, f"Score {token!r} is not finite", line_no)
        elif token == "":
            report(ErrorCode.NON_NUMERIC_SCORE, "Blank line where a score is expected", line_no)
        else:
            report(ErrorCode.NON_NUMERIC_SCORE, f"{token!r} is not a number", line_no)

    values = np.array(tokens, dtype=np.float64) if tokens else np.empty(0, dtype=np.float64)
    overflow = np.flatnonzero(~np.isfinite(values))
    if overflow.size:
        # Grammar-valid tokens such as 1e999 overflow to infinity
        for position in overflow[:MAX_ISSUES_PER_CODE]:
            report(ErrorCode.NON_FINITE_SCORE,
                   f"Score {tokens[position]!r} overflows double precision", token_lines[position])

    for code, count in per_code.items():
        if count > MAX_ISSUES_PER_CODE:
            issues.append(ValidationIssue(code, f"{count - MAX_ISSUES_PER_CODE} further line(s) "
                                          f"with the same problem", FileNames.ANSWER))

    n_scores = len(lines) - start
    if n_scores != expected_count:
        issues.append(ValidationIssue(ErrorCode.COUNT_MISMATCH,
                                      f"Found {n_scores} score line(s) for {expected_count} trial(s); "
                                      "all of the trials must be scored",
                                      FileNames.ANSWER))

    if issues:
        logger.debug(f"answer.txt scan found {len(issues)} issue(s)")
        return None, issues

    values.setflags(write=False)
    return values, []

def parse_answer(content: str, expected_count: int) -> ScoreVector:
    """
    Strict variant of :py:func:`scan_answer` that raises on the first defect.

    :param content: The file content.
    :type content: str
    :param expected_count: Number of trials the answer must cover.
    :type expected_count: int

    :returns: Scores in line order, read-only.
    :rtype: ScoreVector
    :raises FormatError: Carrying the first issue's code.
    """
    scores, issues = scan_answer(content, expected_count)
    if issues:
        first = issues[0]
        line_no = int(first.location.rsplit(':', 1)[1]) if ':' in first.location else 0
        raise FormatError(first.code, first.detail, line_no=line_no, source=FileNames.ANSWER)
    return scores

def write_answer(scores: ScoreVector | list[float]) -> str:
    """
    Renders scores one per line using the shortest round-tripping decimal form.

    :param scores: The scores in trial order.
    :type scores: ScoreVector or list[float]

    :returns: The file content (empty for an empty vector).
    :rtype: str
    """
    if len(scores) == 0:
        return ""
    return '\n'.join(repr(float(s)) for s in scores) + '\n'
