# src/python/journal_connector.py

import json
import os
import threading
from typing import Any

from .utils.exceptions import JournalError
from .utils.logger import get_logger

logger = get_logger(__name__)

JOURNAL_FILE = "journal.jsonl"

class JournalConnector:
    """
    Handles the file handle, durability and replay of the append-only
    submission journal (one JSON object per line).

    This class is solely responsible for journal access, while Repositories
    decide what the entries mean.
    """
    def __init__(self, data_dir: str) -> None:
        """
        Initializes paths. Does not open the journal immediately.

        :param data_dir: Root of the service's persistent data.
        :type data_dir: str

        :rtype: None
        """
        self.data_dir = data_dir
        self.journal_path = os.path.join(data_dir, JOURNAL_FILE)
        self._lock = threading.Lock()
        self._handle = None

    def connect(self) -> bool:
        """
        Opens the journal for appending, creating the data directory if needed.
        A final line left without its newline is repaired first.

        :returns: True if the journal is open.
        :rtype: bool
        :raises JournalError: If the directory or file cannot be opened.
        """
        try:
            os.makedirs(self.data_dir, exist_ok=True)
            self._repair_tail()
            self._handle = open(self.journal_path, 'ab')
            logger.info(f"Successfully opened journal at: {self.journal_path}")
            return True
        except OSError as e:
            logger.error(f"Journal open error at {self.journal_path}: {e}", exc_info=True)
            self._handle = None
            raise JournalError(f"Failed to open the journal at '{self.journal_path}'.", e) from e

    def _repair_tail(self) -> None:
        """
        Makes the file end on a newline before anything is appended.

        A parseable final line gets its missing newline. A torn one is cut
        back to the last complete line.

        :rtype: None
        :raises OSError: If the file cannot be read or rewritten.
        """
        if not os.path.exists(self.journal_path):
            return
        with open(self.journal_path, 'r+b') as f:
            raw = f.read()
            if not raw or raw.endswith(b'\n'):
                return
            cut = raw.rfind(b'\n') + 1
            tail = raw[cut:]
            try:
                json.loads(tail)
            except (json.JSONDecodeError, UnicodeDecodeError):
                logger.warning(f"Truncating incomplete final journal line ({len(tail)} bytes).")
                f.truncate(cut)
            else:
                logger.warning("Final journal line had no newline; completing it.")
                f.write(b'\n')
            f.flush()
            os.fsync(f.fileno())

    def close(self) -> None:
        """
        Closes the journal safely.

        :rtype: None
        """
        with self._lock:
            if self._handle:
                try:
                    self._handle.close()
                    logger.info("Journal closed successfully.")
                except OSError as e:
                    logger.error(f"Error closing journal: {e}", exc_info=True)
                finally:
                    self._handle = None

    @property
    def is_connected(self) -> bool:
        return self._handle is not None

    def append(self, entry: dict[str, Any]) -> None:
        """
        Appends one entry and forces it to disk before returning.

        :param entry: A JSON-serialisable mapping.
        :type entry: dict[str, Any]

        :rtype: None
        :raises JournalError: If the journal is closed or the write fails.
        """
        line = (json.dumps(entry, sort_keys=True, separators=(',', ':')) + '\n').encode('utf-8')
        with self._lock:
            if not self._handle:
                raise JournalError("Journal not connected for append.")
            try:
                self._handle.write(line)
                self._handle.flush()
                os.fsync(self._handle.fileno())
            except OSError as e:
                logger.error(f"Journal append failed: {e}", exc_info=True)
                raise JournalError("Error appending to the journal.", e) from e

    def replay(self) -> list[dict[str, Any]]:
        """
        Reads every entry in append order.

        A final line cut short by a crash (no newline, not parseable) is dropped
        with a warning. Any other unparseable line is corruption.

        :returns: The entries.
        :rtype: list[dict[str, Any]]
        :raises JournalError: On a corrupt line or read failure.
        """
        if not os.path.exists(self.journal_path):
            return []
        try:
            with open(self.journal_path, 'rb') as f:
                raw = f.read()
        except OSError as e:
            logger.error(f"Journal read failed: {e}", exc_info=True)
            raise JournalError(f"Failed to read the journal at '{self.journal_path}'.", e) from e

        lines = raw.split(b'\n')
        tail = lines.pop()
        entries: list[dict[str, Any]] = []
        for line_no, line in enumerate(lines, start=1):
            if not line.strip():
                continue
            try:
                entries.append(json.loads(line))
            except (json.JSONDecodeError, UnicodeDecodeError) as e:
                logger.error(f"Corrupt journal line {line_no}", exc_info=True)
                raise JournalError(f"Journal line {line_no} is corrupt.", e) from e

        if tail.strip():
            try:
                entries.append(json.loads(tail))
            except (json.JSONDecodeError, UnicodeDecodeError):
                logger.warning(f"Dropping incomplete final journal line ({len(tail)} bytes).")

        logger.info(f"Replayed {len(entries)} journal entries.")
        return entries
