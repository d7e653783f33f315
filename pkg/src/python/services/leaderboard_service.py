# src/python/services/leaderboard_service.py

import hmac
import threading
import uuid
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from datetime import datetime, timezone
from typing import Any, Callable, Mapping

from ..formats.trial_key import parse_key
from ..journal_connector import JournalConnector
from ..repository.archive_repository import ArchiveRepository
from ..repository.submission_repository import SubmissionRepository
from ..utils.constants import ErrorCode, SliceDimension, SubmissionStatus, TaskType
from ..utils.event_bus import EventBus, receiver
from ..utils.events import Events
from ..utils.exceptions import (
    ApplicationError, CodedError, ConfigurationError, FormatError, JournalError, ServiceError
)
from ..utils.file_utils import read_text
from ..utils.logger import get_logger
from ..utils.timestamps import format_timestamp, utc_day_start
from ..utils.types import (
    FrozenNotice, LeaderboardEntry, LeaderboardEntryDict, SubmissionRecord, Trial, TrialKey,
    ValidationIssue
)
from .scorer import SliceSpec, breakdown_report, report_to_dict
from .submission_validator import validate_submission

logger = get_logger(__name__)

def utc_now() -> datetime:
    return datetime.now(timezone.utc)

def load_task_keys(settings: Mapping[str, Any]) -> dict[TaskType, list[TrialKey]]:
    """
    Reads the trial keys named by ``key_task1``/``key_task2``. Tasks without a
    configured key are not served.

    :param settings: Loaded settings.
    :type settings: Mapping[str, Any]

    :rtype: dict[TaskType, list[TrialKey]]
    :raises ConfigurationError: If a configured key cannot be read or belongs to the other task.
    """
    keys: dict[TaskType, list[TrialKey]] = {}
    for task, setting in ((TaskType.TEXT_DEPENDENT, "key_task1"), (TaskType.TEXT_INDEPENDENT, "key_task2")):
        path = settings.get(setting)
        if not path:
            continue
        try:
            rows = parse_key(read_text(path))
        except (FormatError, ApplicationError) as e:
            raise ConfigurationError(f"Trial key for Task {int(task)} cannot be loaded from '{path}'.", e) from e
        if rows and rows[0].task is not task:
            raise ConfigurationError(f"'{path}' is a Task {int(rows[0].task)} key, configured for Task {int(task)}.")
        keys[task] = rows
        logger.info(f"Loaded Task {int(task)} key: {len(rows)} trials from {path}.")
    return keys

def entry_to_dict(entry: LeaderboardEntry, rank: int) -> LeaderboardEntryDict:
    return {
        "rank": rank,
        "team_id": entry.team_id,
        "best_min_dcf_norm": entry.best_min_dcf_norm,
        "best_eer": entry.best_eer,
        "submission_count": entry.submission_count,
        "last_improved_at": format_timestamp(entry.last_improved_at),
    }

class LeaderboardService:
    """
    Admits, scores and ranks submissions for both tasks.

    * Quota check, admission and the journal append for one (team, task) run in
      a critical section of their own; validation happens before it and scoring
      after it.
    * Records live in a copy-on-write mapping, so readers never take a lock.
    * Leaderboards are cached per task and dropped when a submission is scored.
    """

    _SLICES = {
        TaskType.TEXT_DEPENDENT: [SliceSpec(SliceDimension.TRIAL_TYPE)],
        TaskType.TEXT_INDEPENDENT: [SliceSpec(SliceDimension.PARTITION)],
    }

    def __init__(self, settings: Mapping[str, Any], keys: Mapping[TaskType, list[TrialKey]] | None = None,
                 bus: EventBus | None = None, clock: Callable[[], datetime] = utc_now) -> None:
        """
        Builds the repositories. Nothing is read from disk until :py:meth:`start`.

        :param settings: Output of :py:meth:`~src.python.services.settings_manager.SettingsManager.load_settings`.
        :type settings: Mapping[str, Any]
        :param keys: Trial keys per task; read from the configured paths when omitted.
        :type keys: Mapping[TaskType, list[TrialKey]] or None
        :param bus: Event bus for lifecycle notifications; a private one when omitted.
        :type bus: :py:class:`~src.python.utils.event_bus.EventBus` or None
        :param clock: Source of the current UTC time.
        :type clock: Callable[[], datetime]

        :rtype: None
        """
        self.settings = dict(settings)
        self.clock = clock
        self.bus = bus or EventBus()
        self.bus.register_instance(self)

        self.keys = dict(keys) if keys is not None else load_task_keys(self.settings)
        self._trials = {task: [Trial(k.model_id, k.test_id) for k in rows] for task, rows in self.keys.items()}

        self.journal = JournalConnector(self.settings["data_dir"])
        self.submission_repo = SubmissionRepository(self.journal)
        self.archive_repo = ArchiveRepository(self.settings["data_dir"])

        self._records: dict[str, SubmissionRecord] = {}
        self._records_lock = threading.Lock()
        self._admission_locks: dict[tuple[str, TaskType], threading.Lock] = {}
        self._admission_guard = threading.Lock()
        self._leaderboards: dict[TaskType, tuple[dict[str, SubmissionRecord], tuple[LeaderboardEntry, ...]]] = {}
        self._executor = ThreadPoolExecutor(max_workers=max(1, self.settings.get("scoring_workers", 1)),
                                            thread_name_prefix="scoring")
        self._started = False

    # --- Lifecycle ---

    def start(self) -> None:
        """
        Opens the journal, replays it and queues every submission that was
        admitted but never scored.

        :rtype: None
        :raises JournalError: If the journal cannot be opened or is corrupt.
        """
        self.journal.connect()
        records = self.submission_repo.load_all()
        with self._records_lock:
            self._records = records
        self._leaderboards.clear()
        self._started = True

        pending = [r for r in records.values() if r.status is SubmissionStatus.QUEUED]
        for record in pending:
            self._executor.submit(self._rescore, record)
        logger.info(f"Leaderboard service started: {len(records)} records, {len(pending)} to rescore.")

    def close(self) -> None:
        """
        Waits for queued scoring, then closes the journal.

        :rtype: None
        """
        self.bus.publish(Events.SERVICE_SHUTDOWN_INITIATED, {})
        self._executor.shutdown(wait=True)
        self.journal.close()
        self._started = False
        logger.info("Leaderboard service stopped.")

    @receiver(Events.SERVICE_SHUTDOWN_INITIATED)
    def disconnect_from_bus(self, data: dict) -> None:
        """
        Unregisters this instance from the event bus.

        :param data: Empty payload.
        :type data: dict
        :rtype: None
        """
        self.bus.unregister_instance(self)
        logger.info("LeaderboardService unregistered from Event Bus.")

    # --- Lookups ---

    def resolve_task(self, task: TaskType | int | str) -> TaskType:
        try:
            task = TaskType.parse(task)
        except ValueError as e:
            raise ServiceError(ErrorCode.UNKNOWN_TASK, f"Unknown task {task!r}", 404) from e
        if task not in self.keys:
            raise ServiceError(ErrorCode.UNKNOWN_TASK, f"Task {int(task)} is not open on this server", 404)
        return task

    def authenticate(self, token: str | None) -> str:
        """
        Resolves a bearer token to its team.

        :param token: The token, without the ``Bearer`` prefix.
        :type token: str or None

        :returns: The team id.
        :rtype: str
        :raises ServiceError: ``Unauthorized`` (401) for a missing or unknown token.
        """
        if token:
            for team_id, team_token in self.settings.get("teams", {}).items():
                if hmac.compare_digest(team_token.encode('utf-8'), token.encode('utf-8')):
                    return team_id
        raise ServiceError(ErrorCode.UNAUTHORIZED, "Missing or invalid bearer token", 401)

    def _counted(self, record: SubmissionRecord) -> bool:
        return record.status is not SubmissionStatus.REJECTED or self.settings.get("rejected_consume_quota", True)

    def _used(self, team_id: str, task: TaskType, now: datetime) -> int:
        day_start = utc_day_start(now)
        return sum(1 for r in self._records.values()
                   if r.team_id == team_id and r.task is task and day_start <= r.received_at <= now
                   and self._counted(r))

    def enforce_quota(self, team_id: str, task: TaskType | int | str, now: datetime | None = None) -> int:
        """
        Submissions the team may still make for the task in the current UTC day.

        :param team_id: The team.
        :type team_id: str
        :param task: The task.
        :type task: TaskType or int or str
        :param now: Reference time, the service clock when omitted.
        :type now: datetime or None

        :returns: ``max(0, daily_quota - used)``.
        :rtype: int
        """
        task = TaskType.parse(task)
        now = now or self.clock()
        return max(0, self.settings["daily_quota"] - self._used(team_id, task, now))

    # --- Writes ---

    def _admission_lock(self, team_id: str, task: TaskType) -> threading.Lock:
        with self._admission_guard:
            return self._admission_locks.setdefault((team_id, task), threading.Lock())

    def _commit(self, record: SubmissionRecord) -> None:
        """Journals a record, then publishes it to readers."""
        self.submission_repo.save(record)
        with self._records_lock:
            records = dict(self._records)
            records[record.submission_id] = record
            self._records = records

    def submit(self, team_id: str, task: TaskType | int | str, data: bytes) -> SubmissionRecord:
        """
        Validates, admits and scores one archive.

        Small keys are scored before returning; larger ones return a ``queued``
        record and are scored in the background.

        :param team_id: The authenticated team.
        :type team_id: str
        :param task: The task.
        :type task: TaskType or int or str
        :param data: The archive bytes.
        :type data: bytes

        :returns: The journalled record (``scored``, ``queued`` or ``rejected``).
        :rtype: :py:class:`~src.python.utils.types.SubmissionRecord`
        :raises ServiceError: ``UnknownTask`` (404) or ``QuotaExceeded`` (429).
        :raises JournalError: If the record cannot be persisted.
        """
        if not self._started:
            raise JournalError("The leaderboard service has not been started.")
        task = self.resolve_task(task)
        result = validate_submission(data, self._trials[task], task, self.settings["max_archive_bytes"])

        with self._admission_lock(team_id, task):
            now = self.clock()
            if self.enforce_quota(team_id, task, now) <= 0:
                logger.info(f"Team {team_id} exceeded the Task {int(task)} quota.")
                raise ServiceError(ErrorCode.QUOTA_EXCEEDED,
                                   f"At most {self.settings['daily_quota']} submissions per UTC day", 429)
            digest = self.archive_repo.store(data)
            record = SubmissionRecord(
                submission_id=uuid.uuid4().hex,
                team_id=team_id,
                task=task,
                received_at=now,
                status=SubmissionStatus.QUEUED if result.ok else SubmissionStatus.REJECTED,
                archive_sha256=digest,
                errors=result.errors,
                metadata=result.payload.metadata if result.payload is not None else None,
                warnings=result.warnings,
            )
            self._commit(record)

        if not result.ok:
            logger.info(f"Submission {record.submission_id} from {team_id} rejected.")
            return record

        if len(self.keys[task]) <= self.settings["sync_scoring_max_trials"]:
            return self._score(record, result.payload.answer)
        self._executor.submit(self._score, record, result.payload.answer)
        logger.info(f"Submission {record.submission_id} queued for background scoring.")
        return record

    def _score(self, record: SubmissionRecord, scores) -> SubmissionRecord:
        task = record.task
        try:
            report = breakdown_report(scores, self.keys[task], slices=self._SLICES[task])
        except CodedError as e:
            logger.error(f"Scoring failed for {record.submission_id}: {e}")
            outcome = replace(record, status=SubmissionStatus.REJECTED,
                              errors=(ValidationIssue(e.code, e.detail),))
            self._commit(outcome)
            return outcome

        outcome = replace(record, status=SubmissionStatus.SCORED, metrics=report_to_dict(report, decimals=None))
        self._commit(outcome)
        logger.info(f"Submission {record.submission_id} scored: minDCF={report.min_dcf_norm:.6f}")
        self.bus.publish(Events.SUBMISSION_SCORED, {'task': task, 'submission_id': record.submission_id})
        return outcome

    def _rescore(self, record: SubmissionRecord) -> SubmissionRecord | None:
        """Finishes a submission left queued by a previous process."""
        if record.task not in self.keys:
            logger.error(f"Cannot rescore {record.submission_id}: Task {int(record.task)} has no key.")
            return None
        try:
            data = self.archive_repo.load(record.archive_sha256)
        except JournalError:
            logger.error(f"Cannot rescore {record.submission_id}: archive missing.", exc_info=True)
            return None
        result = validate_submission(data, self._trials[record.task], record.task, self.settings["max_archive_bytes"])
        if not result.ok:
            outcome = replace(record, status=SubmissionStatus.REJECTED, errors=result.errors)
            self._commit(outcome)
            return outcome
        return self._score(record, result.payload.answer)

    # --- Reads ---

    def get_submission(self, team_id: str, submission_id: str,
                       task: TaskType | int | str | None = None) -> SubmissionRecord:
        """
        Returns one of the team's own records.

        :param team_id: The authenticated team.
        :type team_id: str
        :param submission_id: The submission id.
        :type submission_id: str
        :param task: When given, the record must belong to this task.
        :type task: TaskType or int or str or None

        :rtype: :py:class:`~src.python.utils.types.SubmissionRecord`
        :raises ServiceError: ``NotFound`` (404) or ``Unauthorized`` (401).
        """
        record = self._records.get(submission_id)
        if record is None or (task is not None and record.task is not self.resolve_task(task)):
            raise ServiceError(ErrorCode.NOT_FOUND, f"No submission {submission_id!r}", 404)
        if record.team_id != team_id:
            raise ServiceError(ErrorCode.UNAUTHORIZED, "The submission belongs to another team", 401)
        return record

    def list_submissions(self, team_id: str, task: TaskType | int | str) -> list[SubmissionRecord]:
        """
        The team's records for a task, oldest first.

        :rtype: list[:py:class:`~src.python.utils.types.SubmissionRecord`]
        """
        task = self.resolve_task(task)
        return sorted((r for r in self._records.values() if r.team_id == team_id and r.task is task),
                      key=lambda r: r.received_at)

    def _rank(self, task: TaskType, records: dict[str, SubmissionRecord]) -> tuple[LeaderboardEntry, ...]:
        decimals = self.settings["leaderboard_decimals"]
        counts: dict[str, int] = {}
        best: dict[str, SubmissionRecord] = {}
        for record in records.values():
            if record.task is not task:
                continue
            counts[record.team_id] = counts.get(record.team_id, 0) + 1
            if record.status is not SubmissionStatus.SCORED:
                continue
            key = (record.metrics["min_dcf_norm"], record.metrics["eer"], record.received_at)
            current = best.get(record.team_id)
            if current is None or key < (current.metrics["min_dcf_norm"], current.metrics["eer"], current.received_at):
                best[record.team_id] = record

        ordered = sorted(best.values(), key=lambda r: (r.metrics["min_dcf_norm"], r.metrics["eer"],
                                                       r.received_at, r.team_id))
        return tuple(LeaderboardEntry(
            team_id=r.team_id,
            best_min_dcf_norm=round(r.metrics["min_dcf_norm"], decimals),
            best_eer=round(r.metrics["eer"], decimals),
            submission_count=counts[r.team_id],
            last_improved_at=r.received_at,
        ) for r in ordered)

    def get_leaderboard(self, task: TaskType | int | str,
                        now: datetime | None = None) -> list[LeaderboardEntry] | FrozenNotice:
        """
        Current ranking for a task, or a notice once the freeze is in effect.

        Ranking key: best minDCF ascending, then the EER of that submission, then
        the earlier time the team reached it.

        :param task: The task.
        :type task: TaskType or int or str
        :param now: Reference time, the service clock when omitted.
        :type now: datetime or None

        :rtype: list[LeaderboardEntry] or FrozenNotice
        :raises ServiceError: ``UnknownTask`` (404).
        """
        task = self.resolve_task(task)
        now = now or self.clock()
        freeze_at = self.settings.get("freeze_at")
        if freeze_at is not None and now >= freeze_at:
            return FrozenNotice(freeze_at)
        records = self._records
        cached = self._leaderboards.get(task)
        # a ranking is valid only for the snapshot it was computed from
        if cached is not None and cached[0] is records:
            return list(cached[1])
        entries = self._rank(task, records)
        self._leaderboards[task] = (records, entries)
        return list(entries)
