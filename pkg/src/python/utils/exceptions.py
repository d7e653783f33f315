# src/python/utils/exceptions.py

from typing import TYPE_CHECKING

from .constants import ErrorCode

if TYPE_CHECKING:
    from .types import ValidationIssue

class ApplicationError(Exception):
    """
    Base class for all custom exceptions in the toolkit.

    All specific exceptions should inherit from this class.
    """
    def __init__(self, message: str, original_exception: Exception = None) -> None:
        """
        Initializes the custom error.

        :param message: The user-friendly error message.
        :type message: str
        :param original_exception: The underlying system exception (optional).
        :type original_exception: Exception

        :rtype: None
        """
        super().__init__(message)
        self.original_exception = original_exception
        self.user_message = message

class CodedError(ApplicationError):
    """
    An :py:class:`ApplicationError` that carries a machine-readable
    :py:class:`~src.python.utils.constants.ErrorCode`.
    """
    def __init__(self, code: ErrorCode, message: str, original_exception: Exception = None) -> None:
        """
        :param code: The error code.
        :type code: :py:class:`~src.python.utils.constants.ErrorCode`
        :param message: The user-friendly error message.
        :type message: str
        :param original_exception: The underlying system exception (optional).
        :type original_exception: Exception

        :rtype: None
        """
        super().__init__(f"{code.value}: {message}", original_exception)
        self.code = code
        self.detail = message

class FormatError(CodedError):
    """
    Raised when a challenge text file does not follow its documented format.

    Every instance carries the 1-based line number the problem was found on
    (0 when the problem concerns the file as a whole).
    """
    def __init__(self, code: ErrorCode, message: str, line_no: int = 0,
                 source: str = "") -> None:
        """
        :param code: The error code.
        :type code: ErrorCode
        :param message: What is wrong with the line.
        :type message: str
        :param line_no: 1-based line number, 0 for whole-file problems.
        :type line_no: int
        :param source: Name of the file or entry being parsed.
        :type source: str

        :rtype: None
        """
        where = f"{source}:{line_no}" if source else f"line {line_no}"
        super().__init__(code, f"{message} ({where})")
        self.line_no = line_no
        self.source = source
        self.detail = message

class TrialSemanticsError(CodedError):
    """
    Raised when trials, models and ground-truth metadata cannot be joined into
    a key, or when trial generation is impossible.
    """
    pass

class MetricsError(CodedError):
    """
    Raised when a detection metric cannot be computed (no targets, no nontargets,
    misaligned inputs, or nothing to export).
    """
    pass

class SubmissionError(CodedError):
    """
    Raised when a submission archive cannot be opened. Carries every issue found.
    """
    def __init__(self, issues: 'list[ValidationIssue]') -> None:
        """
        :param issues: All issues detected, at least one.
        :type issues: list[ValidationIssue]

        :rtype: None
        """
        first = issues[0]
        super().__init__(first.code, first.detail)
        self.issues = list(issues)

class SynthError(CodedError):
    """Raised when a synthetic corpus specification cannot be realised."""
    pass

class AudioError(CodedError):
    """Raised when a WAV file cannot be decoded."""
    pass

class ServiceError(CodedError):
    """
    Raised by the leaderboard service. Carries the HTTP status the API layer
    should answer with.
    """
    def __init__(self, code: ErrorCode, message: str, http_status: int) -> None:
        """
        :param code: The error code.
        :type code: ErrorCode
        :param message: The user-friendly message.
        :type message: str
        :param http_status: HTTP status code for the response.
        :type http_status: int

        :rtype: None
        """
        super().__init__(code, message)
        self.http_status = http_status

class JournalError(ApplicationError):
    """
    Raised for issues with the submission journal or the archive store, such as
    unwritable data directories or corrupt journal lines.
    """
    pass

class ConfigurationError(ApplicationError):
    """
    Raised when there is an issue loading or parsing settings
    (e.g., malformed JSON/YAML, file permissions, invalid values).
    """
    pass
