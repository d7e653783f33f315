# src/python/repository/submission_repository.py

from typing import Any

from ..journal_connector import JournalConnector
from ..utils.constants import SubmissionStatus, TaskType
from ..utils.exceptions import JournalError
from ..utils.logger import get_logger
from ..utils.timestamps import format_timestamp, parse_timestamp
from ..utils.types import SubmissionMetadata, SubmissionRecord, ValidationIssue

logger = get_logger(__name__)

RECORD_ENTRY = "record"

def metadata_to_dict(metadata: SubmissionMetadata) -> dict[str, Any]:
    return {
        "public_description": metadata.public_description,
        "fused_systems_count": metadata.fused_systems_count,
        "training_data": list(metadata.training_data),
        "unknown_keys": list(metadata.unknown_keys),
    }

def record_to_dict(record: SubmissionRecord) -> dict[str, Any]:
    """
    JSON form of a record, as journalled and as returned to the owning team.

    :param record: The record.
    :type record: :py:class:`~src.python.utils.types.SubmissionRecord`

    :rtype: dict[str, Any]
    """
    return {
        "submission_id": record.submission_id,
        "team_id": record.team_id,
        "task": int(record.task),
        "received_at": format_timestamp(record.received_at),
        "status": record.status.value,
        "archive_sha256": record.archive_sha256,
        "errors": [issue.to_dict() for issue in record.errors],
        "metrics": record.metrics,
        "metadata": metadata_to_dict(record.metadata) if record.metadata is not None else None,
        "warnings": list(record.warnings),
    }

def record_from_dict(data: dict[str, Any]) -> SubmissionRecord:
    """
    Inverse of :py:func:`record_to_dict`.

    :rtype: :py:class:`~src.python.utils.types.SubmissionRecord`
    :raises JournalError: If a field is missing or invalid.
    """
    try:
        metadata = data.get("metadata")
        return SubmissionRecord(
            submission_id=data["submission_id"],
            team_id=data["team_id"],
            task=TaskType(int(data["task"])),
            received_at=parse_timestamp(data["received_at"]),
            status=SubmissionStatus(data["status"]),
            archive_sha256=data["archive_sha256"],
            errors=tuple(ValidationIssue.from_dict(issue) for issue in data.get("errors", [])),
            metrics=data.get("metrics"),
            metadata=SubmissionMetadata(
                metadata["public_description"], int(metadata["fused_systems_count"]),
                tuple(metadata.get("training_data", ())), tuple(metadata.get("unknown_keys", ()))
            ) if metadata else None,
            warnings=tuple(data.get("warnings", ())),
        )
    except (KeyError, ValueError, TypeError) as e:
        logger.error(f"Invalid journalled record: {data!r}", exc_info=True)
        raise JournalError("A journalled submission record is invalid.", e) from e

class SubmissionRepository:
    """
    Persists submission records in the append-only journal.

    A record is journalled once on admission and again on every status change;
    replay keeps the latest state of each submission.
    """
    def __init__(self, journal: JournalConnector) -> None:
        """
        :param journal: An open journal.
        :type journal: :py:class:`~src.python.journal_connector.JournalConnector`

        :rtype: None
        """
        self.journal = journal
        logger.debug("SubmissionRepository initialized.")

    def save(self, record: SubmissionRecord) -> None:
        """
        Journals the current state of a record. Returns once it is on disk.

        :param record: The record.
        :type record: :py:class:`~src.python.utils.types.SubmissionRecord`

        :rtype: None
        :raises JournalError: If the append fails.
        """
        self.journal.append({"entry": RECORD_ENTRY, "record": record_to_dict(record)})
        logger.debug(f"Journalled submission {record.submission_id} as {record.status.value}.")

    def load_all(self) -> dict[str, SubmissionRecord]:
        """
        Replays the journal.

        :returns: Latest record per submission id, in first-admission order.
        :rtype: dict[str, SubmissionRecord]
        :raises JournalError: On corrupt entries.
        """
        records: dict[str, SubmissionRecord] = {}
        for entry in self.journal.replay():
            if entry.get("entry") != RECORD_ENTRY:
                logger.warning(f"Skipping unknown journal entry type {entry.get('entry')!r}.")
                continue
            record = record_from_dict(entry.get("record") or {})
            records[record.submission_id] = record
        logger.info(f"Loaded {len(records)} submission records from the journal.")
        return records
