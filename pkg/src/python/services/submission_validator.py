# src/python/services/submission_validator.py

import io
import posixpath
import zipfile

from ..formats.answer import scan_answer
from ..formats.metadata import scan_metadata
from ..utils.constants import ErrorCode, FileNames, FIXED_TRAINING_SETS, TaskType
from ..utils.exceptions import SubmissionError
from ..utils.logger import get_logger
from ..utils.types import SubmissionPayload, Trial, ValidationIssue, ValidationResult

logger = get_logger(__name__)

DEFAULT_MAX_UNCOMPRESSED_BYTES = 256 * 1024 * 1024
REQUIRED_ENTRIES = (FileNames.ANSWER, FileNames.METADATA)
ACCEPTED_COMPRESSION = (zipfile.ZIP_STORED, zipfile.ZIP_DEFLATED)

def _decode(raw: bytes) -> str:
    # A UTF-8 BOM is dropped, undecodable bytes surface later as non-numeric scores
    return raw.decode('utf-8-sig', errors='replace')

def inspect_archive(data: bytes, max_uncompressed_bytes: int = DEFAULT_MAX_UNCOMPRESSED_BYTES
                    ) -> tuple[dict[str, str], list[ValidationIssue]]:
    """
    Checks the archive layout and extracts the root-level required entries.

    Only ``answer.txt`` and ``metadata`` may be present, at the root, matched
    case-sensitively. Directory entries, nested files, extra files, encrypted
    entries, unsafe paths and compression methods other than stored/deflate are
    all reported. Every problem is collected.

    :param data: The archive bytes.
    :type data: bytes
    :param max_uncompressed_bytes: Upper bound on the summed uncompressed size.
    :type max_uncompressed_bytes: int

    :returns: Texts of the required entries that could be read, and the issues.
    :rtype: tuple[dict[str, str], list[ValidationIssue]]
    """
    issues: list[ValidationIssue] = []
    if not data:
        return {}, [ValidationIssue(ErrorCode.NOT_A_ZIP, "The upload is empty")]

    try:
        archive = zipfile.ZipFile(io.BytesIO(data))
    except (zipfile.BadZipFile, zipfile.LargeZipFile, ValueError) as e:
        logger.info(f"Upload is not a readable ZIP archive: {e}")
        return {}, [ValidationIssue(ErrorCode.NOT_A_ZIP, f"Not a readable ZIP archive ({e})")]

    texts: dict[str, str] = {}
    with archive:
        infos = archive.infolist()
        root_entries: dict[str, zipfile.ZipInfo] = {}
        nested_required: set[str] = set()
        seen_names: set[str] = set()

        total_size = sum(info.file_size for info in infos)
        if total_size > max_uncompressed_bytes:
            return {}, [ValidationIssue(ErrorCode.UNEXPECTED_ENTRIES,
                                        f"Archive expands to {total_size} bytes, above the "
                                        f"{max_uncompressed_bytes}-byte limit")]

        for info in infos:
            name = info.filename
            if name in seen_names:
                issues.append(ValidationIssue(ErrorCode.UNEXPECTED_ENTRIES, "Duplicate entry name", name))
                continue
            seen_names.add(name)

            if info.is_dir():
                issues.append(ValidationIssue(ErrorCode.CONTAINS_DIRECTORIES,
                                              "The archive must not contain folders", name))
                continue
            parts = name.split('/')
            if '\\' in name or name.startswith('/') or '..' in parts:
                issues.append(ValidationIssue(ErrorCode.UNEXPECTED_ENTRIES, "Unsafe entry path", name))
                continue
            if info.flag_bits & 0x1:
                issues.append(ValidationIssue(ErrorCode.UNEXPECTED_ENTRIES, "Encrypted entries are not accepted", name))
                continue
            if info.compress_type not in ACCEPTED_COMPRESSION:
                issues.append(ValidationIssue(ErrorCode.UNEXPECTED_ENTRIES,
                                              f"Compression method {info.compress_type} is not accepted", name))
                continue

            if name in REQUIRED_ENTRIES:
                root_entries[name] = info
            elif posixpath.basename(name) in REQUIRED_ENTRIES:
                nested_required.add(posixpath.basename(name))
                issues.append(ValidationIssue(ErrorCode.FILES_NOT_AT_ROOT,
                                              "Required files must be at the root of the archive", name))
            else:
                issues.append(ValidationIssue(ErrorCode.UNEXPECTED_ENTRIES,
                                              "Only answer.txt and metadata may be submitted", name))

        for required, code in ((FileNames.ANSWER, ErrorCode.MISSING_ANSWER_FILE),
                               (FileNames.METADATA, ErrorCode.MISSING_METADATA_FILE)):
            if required in root_entries:
                try:
                    texts[required] = _decode(archive.read(root_entries[required]))
                except (zipfile.BadZipFile, OSError, RuntimeError) as e:
                    issues.append(ValidationIssue(ErrorCode.NOT_A_ZIP, f"Entry cannot be extracted ({e})", required))
            elif required not in nested_required:
                issues.append(ValidationIssue(code, f"'{required}' is missing from the archive root"))

    return texts, issues

def open_submission_zip(data: bytes, max_uncompressed_bytes: int = DEFAULT_MAX_UNCOMPRESSED_BYTES
                        ) -> tuple[str, str]:
    """
    Extracts ``answer.txt`` and ``metadata`` from a submission archive.

    :param data: The archive bytes.
    :type data: bytes
    :param max_uncompressed_bytes: Upper bound on the summed uncompressed size.
    :type max_uncompressed_bytes: int

    :returns: ``(answer_text, metadata_text)``.
    :rtype: tuple[str, str]
    :raises SubmissionError: Carrying every layout issue found.
    """
    texts, issues = inspect_archive(data, max_uncompressed_bytes)
    if issues:
        raise SubmissionError(issues)
    return texts[FileNames.ANSWER], texts[FileNames.METADATA]

def training_data_warnings(declared: tuple[str, ...], task: TaskType) -> list[str]:
    """
    Notes for corpora declared in ``training-data`` that are outside the task's
    fixed training condition.

    :param declared: Corpus names from the metadata.
    :type declared: tuple[str, ...]
    :param task: The task the submission is for.
    :type task: :py:class:`~src.python.utils.constants.TaskType`

    :rtype: list[str]
    """
    allowed = {name.casefold() for name in FIXED_TRAINING_SETS[task]}
    return [f"training-data: {corpus!r} is outside the fixed training condition of Task {int(task)}"
            for corpus in declared if corpus.casefold() not in allowed]

def validate_submission(data: bytes, trials: list[Trial], task: TaskType | int | str | None = None,
                        max_uncompressed_bytes: int = DEFAULT_MAX_UNCOMPRESSED_BYTES) -> ValidationResult:
    """
    Validates an archive against the trial list it answers.

    Layout, answer and metadata are checked independently, so defects in one do
    not hide defects in another. A result carries a payload only when no issue
    was found.

    :param data: The archive bytes.
    :type data: bytes
    :param trials: The official trial list.
    :type trials: list[:py:class:`~src.python.utils.types.Trial`]
    :param task: The task, enables training-condition warnings when given.
    :type task: :py:class:`~src.python.utils.constants.TaskType` or None
    :param max_uncompressed_bytes: Upper bound on the summed uncompressed size.
    :type max_uncompressed_bytes: int

    :rtype: :py:class:`~src.python.utils.types.ValidationResult`
    """
    texts, issues = inspect_archive(data, max_uncompressed_bytes)
    warnings: list[str] = []

    answer = None
    if FileNames.ANSWER in texts:
        answer, answer_issues = scan_answer(texts[FileNames.ANSWER], len(trials))
        issues.extend(answer_issues)

    metadata = None
    if FileNames.METADATA in texts:
        metadata, metadata_issues = scan_metadata(texts[FileNames.METADATA], warnings)
        issues.extend(metadata_issues)
        if metadata is not None and task is not None:
            warnings.extend(training_data_warnings(metadata.training_data, TaskType.parse(task)))

    if issues or answer is None or metadata is None:
        logger.info(f"Submission rejected with {len(issues)} issue(s): "
                    f"{sorted({issue.code.value for issue in issues})}")
        return ValidationResult(payload=None, errors=tuple(issues), warnings=tuple(warnings))

    logger.info(f"Submission valid: {answer.size} scores, {metadata.fused_systems_count} fused system(s).")
    return ValidationResult(payload=SubmissionPayload(answer, metadata, tuple(warnings)),
                            errors=(), warnings=tuple(warnings))
