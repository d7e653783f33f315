# src/python/repository/archive_repository.py

import hashlib
import os

from ..utils.exceptions import ApplicationError, JournalError
from ..utils.file_utils import atomic_write_bytes
from ..utils.logger import get_logger

logger = get_logger(__name__)

ARCHIVE_DIR = "archives"

class ArchiveRepository:
    """
    Content-addressed store for raw submission archives:
    ``<data_dir>/archives/<first two hex digits>/<sha256>.zip``.

    Identical uploads share one file.
    """
    def __init__(self, data_dir: str) -> None:
        """
        :param data_dir: Root of the service's persistent data.
        :type data_dir: str

        :rtype: None
        """
        self.root = os.path.join(data_dir, ARCHIVE_DIR)
        logger.debug("ArchiveRepository initialized.")

    def path_for(self, sha256: str) -> str:
        return os.path.join(self.root, sha256[:2], f"{sha256}.zip")

    def store(self, data: bytes) -> str:
        """
        Stores an archive unless an identical one is present.

        :param data: The archive bytes.
        :type data: bytes

        :returns: The SHA-256 hex digest identifying the archive.
        :rtype: str
        :raises JournalError: If the archive cannot be written.
        """
        digest = hashlib.sha256(data).hexdigest()
        path = self.path_for(digest)
        if os.path.exists(path):
            logger.debug(f"Archive {digest} already stored.")
            return digest
        try:
            atomic_write_bytes(path, data)
        except ApplicationError as e:
            raise JournalError(f"Failed to store archive {digest}.", e) from e
        logger.info(f"Stored archive {digest} ({len(data)} bytes).")
        return digest

    def load(self, sha256: str) -> bytes:
        """
        Loads an archive and checks its digest.

        :param sha256: The archive digest.
        :type sha256: str

        :rtype: bytes
        :raises JournalError: If the archive is missing or its content does not match.
        """
        path = self.path_for(sha256)
        try:
            with open(path, 'rb') as f:
                data = f.read()
        except OSError as e:
            logger.error(f"Archive {sha256} cannot be read", exc_info=True)
            raise JournalError(f"Archive {sha256} is missing from the store.", e) from e
        if hashlib.sha256(data).hexdigest() != sha256:
            raise JournalError(f"Archive {sha256} does not match its digest.")
        return data
