# src/python/formats/line_reader.py

import re
from dataclasses import dataclass

from ..utils.constants import ErrorCode
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger

logger = get_logger(__name__)

_FIELD_SEPARATOR = re.compile(r'[ \t]+')

@dataclass(frozen=True)
class SourceLine:
    """One nonblank input line split into fields, with its 1-based number."""
    line_no: int
    fields: tuple[str, ...]
    raw: str

def split_lines(content: str) -> list[str]:
    """
    Splits text on LF, removing one trailing CR per line so CRLF input reads the
    same as LF input.

    :param content: Whole file content.
    :type content: str
    :returns: The physical lines, without terminators.
    :rtype: list[str]
    """
    if content == "":
        return []
    lines = content.split('\n')
    if lines[-1] == "":
        lines.pop()
    return [line[:-1] if line.endswith('\r') else line for line in lines]

def tokenize(line: str) -> tuple[str, ...]:
    """
    Splits a line on any run of ASCII spaces or tabs.

    :param line: One physical line.
    :type line: str
    :returns: The nonempty fields.
    :rtype: tuple[str, ...]
    """
    stripped = line.strip(' \t')
    if not stripped:
        return ()
    return tuple(_FIELD_SEPARATOR.split(stripped))

def read_table(content: str, header: str, source: str,
               warnings: list[str] | None = None) -> list[SourceLine]:
    """
    Reads a header-led whitespace table. The first line is always consumed as
    the header; when it does not match the canonical header text it is still
    discarded, and a ``MissingHeader`` note is added to ``warnings``.
    Blank lines are skipped.

    :param content: Whole file content.
    :type content: str
    :param header: The canonical header line.
    :type header: str
    :param source: File name used in messages.
    :type source: str
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The data lines in file order.
    :rtype: list[:py:class:`SourceLine`]
    :raises FormatError: ``MissingHeader`` when the file has no lines at all.
    """
    lines = split_lines(content)
    first_index = next((i for i, line in enumerate(lines) if line.strip(' \t')), None)
    if first_index is None:
        raise FormatError(ErrorCode.MISSING_HEADER, "File is empty, a header line is required",
                          line_no=1, source=source)

    header_fields = tokenize(lines[first_index])
    if header_fields != tokenize(header):
        note = (f"{ErrorCode.MISSING_HEADER.value}: first line of {source} "
                f"({' '.join(header_fields)!r}) is not the expected header; discarded as header")
        logger.warning(note)
        if warnings is not None:
            warnings.append(note)

    rows = []
    for index in range(first_index + 1, len(lines)):
        fields = tokenize(lines[index])
        if fields:
            rows.append(SourceLine(line_no=index + 1, fields=fields, raw=lines[index]))

    logger.debug(f"Read {len(rows)} data lines from {source}")
    return rows

def render_table(header: str, rows: list[tuple[str, ...]], separator: str = ' ') -> str:
    """
    Canonical rendering: header, then one line per row, fields joined by a
    single separator, LF line endings, trailing newline.

    :param header: The header line.
    :type header: str
    :param rows: Field tuples.
    :type rows: list[tuple[str, ...]]
    :param separator: Field separator, a single space unless tab-separated.
    :type separator: str

    :returns: The file content.
    :rtype: str
    """
    out = [header]
    out.extend(separator.join(row) for row in rows)
    return '\n'.join(out) + '\n'
