# src/python/utils/types.py

from dataclasses import dataclass, field
from datetime import datetime
from typing import Any, TypedDict

import numpy as np
import numpy.typing as npt

from .constants import (
    ErrorCode, Gender, Language, Partition, SCHEMA_VERSION, SubmissionStatus, TaskType, TrialType
)

ScoreVector = npt.NDArray[np.float64]
"""
:py:class:`numpy.ndarray` of ``float64``: LLR scores aligned one-to-one with a trial list.
Vectors returned by the parsers are read-only.
"""

# --- Text format records ---

@dataclass(frozen=True)
class EnrollmentRecordTD:
    """
    One Task 1 model: a phrase and exactly three enrollment utterances.
    """
    model_id: str
    phrase_id: str
    enrollment_ids: tuple[str, str, str]

@dataclass(frozen=True)
class EnrollmentRecordTI:
    """
    One Task 2 model: one or more enrollment utterances.
    """
    model_id: str
    enrollment_ids: tuple[str, ...]

EnrollmentRecord = EnrollmentRecordTD | EnrollmentRecordTI

@dataclass(frozen=True)
class Trial:
    """A (model, test utterance) pair. Its position in the trial file is significant."""
    model_id: str
    test_id: str

@dataclass(frozen=True)
class TrainLabelTD:
    file_id: str
    speaker_id: str
    phrase_id: str

@dataclass(frozen=True)
class TrainLabelTI:
    file_id: str
    speaker_id: str

TrainLabel = TrainLabelTD | TrainLabelTI

@dataclass(frozen=True)
class SubmissionMetadata:
    """
    Parsed ``metadata`` file of a submission archive.

    ``training_data`` holds the optional corpus declaration, ``unknown_keys`` the
    keys the toolkit does not interpret (kept as warnings).
    """
    public_description: str
    fused_systems_count: int
    training_data: tuple[str, ...] = ()
    unknown_keys: tuple[str, ...] = ()

# --- Ground truth ---

@dataclass(frozen=True)
class UtteranceMeta:
    """
    Ground-truth sidecar row for one utterance. ``phrase_id`` is present only for
    text-dependent utterances.
    """
    utterance_id: str
    speaker_id: str
    phrase_id: str | None
    language: Language
    gender: Gender | None = None

@dataclass(frozen=True)
class TrialKey:
    """
    Ground truth for one trial.

    Task 1: ``is_target`` iff ``trial_type`` is TC, ``partition`` is ``none``.
    Task 2: ``is_target`` iff ``trial_type`` is TRG.
    """
    model_id: str
    test_id: str
    trial_type: TrialType
    is_target: bool
    partition: Partition = Partition.NONE

    @property
    def task(self) -> TaskType:
        """The task this key row belongs to, inferred from its trial type."""
        if self.trial_type in (TrialType.TRG, TrialType.NON):
            return TaskType.TEXT_INDEPENDENT
        return TaskType.TEXT_DEPENDENT

# --- Validation ---

@dataclass(frozen=True)
class ValidationIssue:
    """
    One defect found in a submission. ``location`` names the archive entry and,
    where applicable, the 1-based line (``"answer.txt:4"``).
    """
    code: ErrorCode
    detail: str
    location: str = ""

    def to_dict(self) -> dict[str, str]:
        return {"code": self.code.value, "detail": self.detail, "location": self.location}

    @classmethod
    def from_dict(cls, data: dict[str, str]) -> 'ValidationIssue':
        return cls(ErrorCode(data["code"]), data["detail"], data.get("location", ""))

@dataclass(frozen=True)
class SubmissionPayload:
    """A scoreable submission: answer aligned with the trial list, valid metadata."""
    answer: ScoreVector
    metadata: SubmissionMetadata
    warnings: tuple[str, ...] = ()

@dataclass(frozen=True)
class ValidationResult:
    """
    Outcome of validating one archive: either a payload or a nonempty error list.
    """
    payload: SubmissionPayload | None
    errors: tuple[ValidationIssue, ...] = ()
    warnings: tuple[str, ...] = ()

    @property
    def ok(self) -> bool:
        return self.payload is not None and not self.errors

    def to_dict(self) -> dict[str, Any]:
        return {
            "schema_version": SCHEMA_VERSION,
            "ok": self.ok,
            "n_scores": int(self.payload.answer.size) if self.payload is not None else None,
            "errors": [issue.to_dict() for issue in self.errors],
            "warnings": list(self.warnings),
        }

# --- Metrics ---

@dataclass(frozen=True)
class DetCostParams:
    """
    Detection cost parameters. Defaults are the challenge's constants:
    C_Miss = 10, C_FalseAlarm = 1, P_Target = 0.01.
    """
    c_miss: float = 10.0
    c_fa: float = 1.0
    p_target: float = 0.01

    def __post_init__(self) -> None:
        if not self.c_miss > 0 or not self.c_fa > 0:
            raise ValueError("c_miss and c_fa must be positive")
        if not 0.0 < self.p_target < 1.0:
            raise ValueError("p_target must lie strictly between 0 and 1")

@dataclass(frozen=True)
class OperatingPoint:
    """
    A point of the DET sweep: scores ``>= threshold`` are accepted.
    """
    threshold: float
    p_miss: float
    p_fa: float

@dataclass(frozen=True)
class SliceResult:
    """
    Outcome for one slice of a breakdown report.

    Sub-problem slices fill ``min_dcf_norm``/``eer``; Task 1 trial-type slices fill
    ``rate`` (miss rate for TC, false-alarm rate otherwise) at the overall
    minDCF threshold. ``status`` is ``ok`` or ``EmptySlice``.
    """
    dimension: str
    label: str
    n_trials: int
    n_target: int
    n_nontarget: int
    status: str = "ok"
    min_dcf_norm: float | None = None
    eer: float | None = None
    rate: float | None = None
    rate_kind: str | None = None
    detail: str = ""

@dataclass(frozen=True)
class MetricsReport:
    """
    Scoring result for one answer against one key.
    """
    min_dcf_norm: float
    eer: float
    argmin_threshold: float
    n_target: int
    n_nontarget: int
    det_points: tuple[OperatingPoint, ...] = ()
    breakdowns: dict[str, dict[str, SliceResult]] = field(default_factory=dict)
    task: TaskType | None = None

    @property
    def n_trials(self) -> int:
        return self.n_target + self.n_nontarget

# --- Audio ---

@dataclass(frozen=True)
class WavInfo:
    """
    Decoded RIFF/WAVE header. ``n_samples`` counts sample frames (per channel).
    """
    sample_rate: int
    channels: int
    bits_per_sample: int
    n_samples: int

    @property
    def duration(self) -> float:
        return self.n_samples / self.sample_rate

@dataclass(frozen=True)
class VadParams:
    """Energy VAD settings: frame length, frame shift, threshold below the loudest frame."""
    frame_ms: float = 25.0
    shift_ms: float = 10.0
    threshold_db: float = 30.0

    def __post_init__(self) -> None:
        if not self.frame_ms > 0 or not self.shift_ms > 0:
            raise ValueError("frame_ms and shift_ms must be positive")
        if self.shift_ms > self.frame_ms:
            raise ValueError("shift_ms cannot exceed frame_ms")
        if self.threshold_db < 0:
            raise ValueError("threshold_db must be nonnegative")

@dataclass(frozen=True)
class FileAudit:
    """Measured durations of one audio file."""
    file_id: str
    role: str
    duration: float
    net_speech: float
    channels: int = 1

@dataclass(frozen=True)
class ModelAudit:
    """Net enrollment speech of one model, summed over its utterances."""
    model_id: str
    n_utterances: int
    net_speech: float

@dataclass(frozen=True)
class AuditViolation:
    """
    One broken corpus rule. ``kind`` is a short rule name such as
    ``enrollment-duration`` or an error code such as ``MissingFile``.
    """
    kind: str
    subject: str
    detail: str

@dataclass(frozen=True)
class AuditReport:
    files: tuple[FileAudit, ...]
    models: tuple[ModelAudit, ...]
    violations: tuple[AuditViolation, ...]
    warnings: tuple[str, ...] = ()

# --- Service ---

class LeaderboardEntryDict(TypedDict):
    """
    :py:class:`~typing.TypedDict`: JSON shape of one leaderboard row.
    """
    rank: int
    team_id: str
    best_min_dcf_norm: float
    best_eer: float
    submission_count: int
    last_improved_at: str

@dataclass(frozen=True)
class LeaderboardEntry:
    team_id: str
    best_min_dcf_norm: float
    best_eer: float
    submission_count: int
    last_improved_at: datetime

@dataclass(frozen=True)
class FrozenNotice:
    """Returned instead of rankings once the leaderboard freeze is in effect."""
    freeze_at: datetime

@dataclass(frozen=True)
class SubmissionRecord:
    """
    A received archive and everything known about it.

    ``status == scored`` implies ``metrics``; ``status == rejected`` implies a
    nonempty ``errors`` list.
    """
    submission_id: str
    team_id: str
    task: TaskType
    received_at: datetime
    status: SubmissionStatus
    archive_sha256: str
    errors: tuple[ValidationIssue, ...] = ()
    metrics: dict[str, Any] | None = None
    metadata: SubmissionMetadata | None = None
    warnings: tuple[str, ...] = ()
