# src/python/utils/constants.py

from enum import Enum, IntEnum

class TaskType(IntEnum):
    """
    The two challenge tasks. The integer value is the task number used on the
    command line and in the HTTP routes.
    """
    TEXT_DEPENDENT = 1
    """Task 1: speaker and pass-phrase are both verified."""
    TEXT_INDEPENDENT = 2
    """Task 2: only the speaker is verified."""

    @classmethod
    def parse(cls, value: 'str | int | TaskType') -> 'TaskType':
        """
        Accepts ``1``/``2``, ``"1"``/``"2"`` or the short names ``"TD"``/``"TI"``.

        :param value: The task designator.
        :type value: str or int or TaskType
        :returns: The matching task.
        :rtype: TaskType
        :raises ValueError: If the designator is unknown.
        """
        if isinstance(value, TaskType):
            return value
        text = str(value).strip().upper()
        aliases = {'1': cls.TEXT_DEPENDENT, 'TD': cls.TEXT_DEPENDENT,
                   '2': cls.TEXT_INDEPENDENT, 'TI': cls.TEXT_INDEPENDENT}
        if text not in aliases:
            raise ValueError(f"Unknown task: {value!r}")
        return aliases[text]

    @property
    def short_name(self) -> str:
        """``TD`` or ``TI``."""
        return 'TD' if self is TaskType.TEXT_DEPENDENT else 'TI'

class TrialType(str, Enum):
    """
    Ground-truth trial labels. Task 1 uses the four text-dependent types,
    Task 2 uses the plain target/nontarget pair.
    """
    TC = "TC"
    """Target-Correct: target speaker, correct pass-phrase. The only Task 1 target."""
    TW = "TW"
    """Target-Wrong: target speaker, wrong pass-phrase."""
    IC = "IC"
    """Imposter-Correct: imposter, correct pass-phrase."""
    IW = "IW"
    """Imposter-Wrong: imposter, wrong pass-phrase."""
    TRG = "TRG"
    """Task 2 target trial."""
    NON = "NON"
    """Task 2 nontarget trial."""

    @property
    def is_target(self) -> bool:
        """True for the types counted as target trials."""
        return self in (TrialType.TC, TrialType.TRG)

TD_TRIAL_TYPES = (TrialType.TC, TrialType.TW, TrialType.IC, TrialType.IW)
TI_TRIAL_TYPES = (TrialType.TRG, TrialType.NON)

class Partition(str, Enum):
    """Task 2 trial partitions. Task 1 trials always carry ``none``."""
    NONE = "none"
    SAME_LANG = "same-lang"
    CROSS_LANG = "cross-lang"

class Language(str, Enum):
    FA = "fa"
    EN = "en"

class Gender(str, Enum):
    MALE = "m"
    FEMALE = "f"

PHRASES: dict[str, str] = {
    "01": "sedaye man neshandahandeye hoviyyate man ast.",
    "02": "sedaye har kas monhaser be fard ast.",
    "03": "hoviyyate man ra ba sedaye man tayid kon.",
    "04": "sedaye man ramze obure man ast.",
    "05": "baniadam azaye yekdigarand.",
    "06": "My voice is my password.",
    "07": "OK Google.",
    "08": "Artificial intelligence is for real.",
    "09": "Actions speak louder than words.",
    "10": "There is no such thing as a free lunch.",
}
"""The fixed Task 1 phrase set: five Persian (transliterated) then five English."""

def phrase_language(phrase_id: str) -> Language:
    """
    Returns the language a Task 1 phrase is spoken in.

    :param phrase_id: Two-digit phrase id, ``"01"`` to ``"10"``.
    :type phrase_id: str
    :returns: ``fa`` for 01-05, ``en`` for 06-10.
    :rtype: Language
    :raises KeyError: If the phrase id is not in the fixed set.
    """
    if phrase_id not in PHRASES:
        raise KeyError(phrase_id)
    return Language.FA if int(phrase_id) <= 5 else Language.EN

TD_ENROLLMENT_COUNT = 3
"""Task 1 models are enrolled from exactly three utterances."""

ENROLLMENT_MIN_SECONDS = 4.0
ENROLLMENT_MAX_SECONDS = 180.0
TEST_MIN_SECONDS = 1.0
TEST_MAX_SECONDS = 8.0

SCHEMA_VERSION = 1
"""Version stamped into every machine-readable JSON document the toolkit emits."""

FIXED_TRAINING_SETS: dict[TaskType, tuple[str, ...]] = {
    TaskType.TEXT_DEPENDENT: ("VoxCeleb1", "VoxCeleb2", "LibriSpeech",
                              "Mozilla Common Voice Farsi", "DeepMine Task 1"),
    TaskType.TEXT_INDEPENDENT: ("VoxCeleb1", "VoxCeleb2", "LibriSpeech",
                                "Mozilla Common Voice Farsi", "DeepMine Task 2"),
}
"""Corpora allowed under each task's fixed training condition."""

class FileNames:
    """Literal names of the files the evaluation plan documents."""
    ENROLLMENT = "model_enrollment.txt"
    TRIALS = "trials.txt"
    TRAIN_LABELS = "train_labels.txt"
    ANSWER = "answer.txt"
    METADATA = "metadata"
    KEY = "trial_key.tsv"
    UTTERANCE_META = "utterance_meta.tsv"
    MANIFEST = "manifest.json"

class Headers:
    """Canonical header lines written by the toolkit's writers."""
    ENROLLMENT_TD = "model-id phrase-id enroll-file-id1 enroll-file-id2 enroll-file-id3"
    ENROLLMENT_TI = "model-id enroll-file-ids ..."
    TRIALS = "model-id evaluation-file-id"
    TRAIN_LABELS_TD = "train-file-id speaker-id phrase-id"
    TRAIN_LABELS_TI = "train-file-id speaker-id"
    KEY = "model-id\ttest-file-id\ttrial-type\tis-target\tpartition"
    UTTERANCE_META = "utt-id\tspeaker-id\tphrase-id\tlanguage\tgender"

class MetadataKeys:
    DESCRIPTION = "public-description"
    FUSED_COUNT = "fused-systems-count"
    TRAINING_DATA = "training-data"

class SubmissionStatus(str, Enum):
    QUEUED = "queued"
    SCORED = "scored"
    REJECTED = "rejected"

class ErrorCode(str, Enum):
    """
    Closed set of machine-readable error codes raised or reported by the toolkit.
    """
    # --- Text formats ---
    MALFORMED_LINE = "MalformedLine"
    MISSING_HEADER = "MissingHeader"
    DUPLICATE_MODEL_ID = "DuplicateModelId"
    DUPLICATE_FILE_ID = "DuplicateFileId"
    INVALID_PHRASE_ID = "InvalidPhraseId"
    # --- Submission taxonomy ---
    NOT_A_ZIP = "NotAZip"
    MISSING_ANSWER_FILE = "MissingAnswerFile"
    MISSING_METADATA_FILE = "MissingMetadataFile"
    CONTAINS_DIRECTORIES = "ContainsDirectories"
    UNEXPECTED_ENTRIES = "UnexpectedEntries"
    FILES_NOT_AT_ROOT = "FilesNotAtRoot"
    COUNT_MISMATCH = "CountMismatch"
    NON_NUMERIC_SCORE = "NonNumericScore"
    NON_FINITE_SCORE = "NonFiniteScore"
    HEADER_LINE_PRESENT = "HeaderLinePresent"
    MISSING_KEY = "MissingKey"
    NON_INTEGER_FUSED_COUNT = "NonIntegerFusedCount"
    FUSED_COUNT_OUT_OF_RANGE = "FusedCountOutOfRange"
    DUPLICATE_KEY = "DuplicateKey"
    # --- Trial semantics ---
    UNKNOWN_MODEL_ID = "UnknownModelId"
    UNKNOWN_TEST_ID = "UnknownTestId"
    UNKNOWN_ENROLLMENT_ID = "UnknownEnrollmentId"
    MISSING_PHRASE = "MissingPhrase"
    MISSING_GENDER = "MissingGender"
    EMPTY_RESULT = "EmptyResult"
    # --- Metrics / scoring ---
    DEGENERATE_KEY = "DegenerateKey"
    EMPTY_SWEEP = "EmptySweep"
    LENGTH_MISMATCH = "LengthMismatch"
    EMPTY_SLICE = "EmptySlice"
    # --- Synthetic corpora ---
    INFEASIBLE_SPEC = "InfeasibleSpec"
    # --- Audio ---
    NOT_RIFF = "NotRiff"
    UNSUPPORTED_CODEC = "UnsupportedCodec"
    TRUNCATED_DATA = "TruncatedData"
    MISSING_FILE = "MissingFile"
    # --- Service ---
    QUOTA_EXCEEDED = "QuotaExceeded"
    UNAUTHORIZED = "Unauthorized"
    UNKNOWN_TASK = "UnknownTask"
    NOT_FOUND = "NotFound"

SUBMISSION_ERROR_CODES = frozenset({
    ErrorCode.NOT_A_ZIP, ErrorCode.MISSING_ANSWER_FILE, ErrorCode.MISSING_METADATA_FILE,
    ErrorCode.CONTAINS_DIRECTORIES, ErrorCode.UNEXPECTED_ENTRIES, ErrorCode.FILES_NOT_AT_ROOT,
    ErrorCode.COUNT_MISMATCH, ErrorCode.NON_NUMERIC_SCORE, ErrorCode.NON_FINITE_SCORE,
    ErrorCode.HEADER_LINE_PRESENT, ErrorCode.MISSING_KEY, ErrorCode.NON_INTEGER_FUSED_COUNT,
    ErrorCode.FUSED_COUNT_OUT_OF_RANGE, ErrorCode.DUPLICATE_KEY, ErrorCode.MALFORMED_LINE,
})
"""The codes a submission validation report may contain."""

class SliceDimension(str, Enum):
    """Ways a score report can be broken down."""
    OVERALL = "overall"
    TRIAL_TYPE = "trial-type"
    PARTITION = "partition"
    PHRASE = "phrase"
    LANGUAGE = "language"

class RateKind(str, Enum):
    """Which error rate a trial-type slice reports."""
    MISS = "miss"
    FALSE_ALARM = "false-alarm"

SLICE_OK = "ok"
