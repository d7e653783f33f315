# src/python/formats/metadata.py

import re

from .line_reader import split_lines
from ..utils.constants import ErrorCode, FileNames, MetadataKeys
from ..utils.exceptions import FormatError
from ..utils.logger import get_logger
from ..utils.types import SubmissionMetadata, ValidationIssue

logger = get_logger(__name__)

_INTEGER = re.compile(r'[+-]?\d+')
_KNOWN_KEYS = (MetadataKeys.DESCRIPTION, MetadataKeys.FUSED_COUNT, MetadataKeys.TRAINING_DATA)

def _location(line_no: int) -> str:
    return f"{FileNames.METADATA}:{line_no}"

def scan_metadata(content: str, warnings: list[str] | None = None
                  ) -> tuple[SubmissionMetadata | None, list[ValidationIssue]]:
    """
    Reads a submission ``metadata`` file of ``key: value`` lines and collects
    every defect.

    The key is everything before the first colon. Blank lines are ignored,
    lines without a colon are ``MalformedLine`` issues and unknown keys are
    kept as warnings.

    :param content: The file content.
    :type content: str
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The metadata (None when any issue was found) and the issues.
    :rtype: tuple[SubmissionMetadata or None, list[ValidationIssue]]
    """
    notes = warnings if warnings is not None else []
    issues: list[ValidationIssue] = []
    values: dict[str, tuple[str, int]] = {}
    unknown: list[str] = []

    for index, line in enumerate(split_lines(content)):
        line_no = index + 1
        if not line.strip():
            continue
        if ':' not in line:
            issues.append(ValidationIssue(ErrorCode.MALFORMED_LINE,
                                          "Line is not a 'key: value' pair", _location(line_no)))
            continue
        key, value = line.split(':', 1)
        key, value = key.strip(), value.strip()
        if key in values:
            issues.append(ValidationIssue(ErrorCode.DUPLICATE_KEY,
                                          f"Key {key!r} appears more than once", _location(line_no)))
            continue
        values[key] = (value, line_no)
        if key not in _KNOWN_KEYS:
            unknown.append(key)
            notes.append(f"{_location(line_no)}: unknown key {key!r} ignored")

    description = values.get(MetadataKeys.DESCRIPTION)
    if description is None or description[0] == "":
        issues.append(ValidationIssue(ErrorCode.MISSING_KEY,
                                      f"'{MetadataKeys.DESCRIPTION}' is missing or empty",
                                      _location(description[1]) if description else FileNames.METADATA))

    fused_count = None
    fused = values.get(MetadataKeys.FUSED_COUNT)
    if fused is None:
        issues.append(ValidationIssue(ErrorCode.MISSING_KEY,
                                      f"'{MetadataKeys.FUSED_COUNT}' is missing", FileNames.METADATA))
    elif not _INTEGER.fullmatch(fused[0]):
        issues.append(ValidationIssue(ErrorCode.NON_INTEGER_FUSED_COUNT,
                                      f"{fused[0]!r} is not an integer", _location(fused[1])))
    elif int(fused[0]) < 1:
        issues.append(ValidationIssue(ErrorCode.FUSED_COUNT_OUT_OF_RANGE,
                                      f"Fused systems count {fused[0]} is below 1", _location(fused[1])))
    else:
        fused_count = int(fused[0])

    training_data: tuple[str, ...] = ()
    if MetadataKeys.TRAINING_DATA in values:
        training_data = tuple(part.strip() for part in values[MetadataKeys.TRAINING_DATA][0].split(',')
                              if part.strip())

    for note in notes:
        logger.warning(note)

    if issues:
        return None, issues

    return SubmissionMetadata(
        public_description=description[0],
        fused_systems_count=fused_count,
        training_data=training_data,
        unknown_keys=tuple(unknown),
    ), []

def parse_metadata(content: str, warnings: list[str] | None = None) -> SubmissionMetadata:
    """
    Strict variant of :py:func:`scan_metadata` that raises on the first defect.

    :param content: The file content.
    :type content: str
    :param warnings: Optional collector for nonfatal notes.
    :type warnings: list[str] or None

    :returns: The parsed metadata.
    :rtype: :py:class:`~src.python.utils.types.SubmissionMetadata`
    :raises FormatError: ``MalformedLine``, ``MissingKey``, ``DuplicateKey``, ``NonIntegerFusedCount``
        or ``FusedCountOutOfRange``.
    """
    metadata, issues = scan_metadata(content, warnings)
    if issues:
        first = issues[0]
        line_no = int(first.location.rsplit(':', 1)[1]) if ':' in first.location else 0
        raise FormatError(first.code, first.detail, line_no=line_no, source=FileNames.METADATA)
    return metadata

def write_metadata(metadata: SubmissionMetadata) -> str:
    """
    Renders metadata as ``key: value`` lines. Unknown keys are not carried over.

    :param metadata: The metadata to render.
    :type metadata: :py:class:`~src.python.utils.types.SubmissionMetadata`

    :returns: The file content.
    :rtype: str
    """
    lines = [f"{MetadataKeys.DESCRIPTION}: {metadata.public_description}",
             f"{MetadataKeys.FUSED_COUNT}: {metadata.fused_systems_count}"]
    if metadata.training_data:
        lines.append(f"{MetadataKeys.TRAINING_DATA}: {', '.join(metadata.training_data)}")
    return '\n'.join(lines) + '\n'
