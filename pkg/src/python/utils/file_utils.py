# src/python/utils/file_utils.py

import os
import tempfile

from .exceptions import ApplicationError
from .logger import get_logger

logger = get_logger(__name__)

def atomic_write_bytes(path: str, data: bytes) -> None:
    """
    Writes ``data`` to ``path`` through a temporary file in the same directory
    followed by a rename, so readers never observe a truncated file.

    :param path: Destination file path.
    :type path: str
    :param data: The full file content.
    :type data: bytes

    :rtype: None
    :raises ApplicationError: If the file cannot be written.
    """
    directory = os.path.dirname(os.path.abspath(path))
    tmp_path = None
    try:
        os.makedirs(directory, exist_ok=True)
        fd, tmp_path = tempfile.mkstemp(prefix='.tmp-', dir=directory)
        with os.fdopen(fd, 'wb') as f:
            f.write(data)
            f.flush()
            os.fsync(f.fileno())
        os.replace(tmp_path, path)
        tmp_path = None
        logger.debug(f"Wrote {len(data)} bytes to {path}")
    except OSError as e:
        logger.error(f"Failed to write {path}", exc_info=True)
        raise ApplicationError(f"Could not write output file '{path}'.", original_exception=e) from e
    finally:
        if tmp_path is not None and os.path.exists(tmp_path):
            os.remove(tmp_path)

def atomic_write_text(path: str, text: str) -> None:
    """
    UTF-8 text variant of :py:func:`atomic_write_bytes`. Line endings are written
    exactly as given (no platform translation).

    :param path: Destination file path.
    :type path: str
    :param text: The full file content.
    :type text: str

    :rtype: None
    """
    atomic_write_bytes(path, text.encode('utf-8'))

def read_text(path: str) -> str:
    """
    Reads a UTF-8 text file without newline translation, so CRLF files reach the
    parsers unchanged.

    :param path: File path.
    :type path: str
    :returns: File content.
    :rtype: str
    :raises ApplicationError: If the file cannot be read.
    """
    try:
        with open(path, 'r', encoding='utf-8', newline='') as f:
            return f.read()
    except (OSError, UnicodeDecodeError) as e:
        logger.error(f"Failed to read {path}: {e}")
        raise ApplicationError(f"Could not read input file '{path}'.", original_exception=e) from e
