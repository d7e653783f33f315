# src/python/utils/logger.py

import logging
import os
import sys
from logging.handlers import RotatingFileHandler

LOG_DIR = 'logs'
LOG_FILE_NAME = 'evalkit.log'
LOG_MAX_BYTES = 5 * 1024 * 1024  # 5 MB
LOG_BACKUP_COUNT = 5

def setup_logger(debug_mode: bool | None = None, log_dir: str = LOG_DIR, 
                 console: bool = True) -> logging.Logger:
    """
    Configures and returns the toolkit's root logger.

    A rotating file handler always receives the detailed format. When ``console`` 
    is set, a stderr handler with the short format is attached as well, so CLI 
    users see warnings and errors without opening the log file.

    :param debug_mode: If True, sets logging to DEBUG. Defaults to INFO.
    :type debug_mode: bool or None
    :param log_dir: Directory that holds the rotating log file.
    :type log_dir: str
    :param console: Attach a stderr handler.
    :type console: bool

    :returns: The configured root logger instance.
    :rtype: :py:class:`~logging.Logger`
    """
    log_level = logging.DEBUG if debug_mode is True else logging.INFO

    logger = logging.getLogger()
    logger.setLevel(log_level)

    if logger.hasHandlers():
        return logger

    file_formatter = logging.Formatter(
        '%(asctime)s - %(levelname)s - %(name)s - %(funcName)s - %(message)s'
    )
    console_formatter = logging.Formatter(
        '[%(levelname)s] %(message)s'
    )

    try:
        os.makedirs(log_dir, exist_ok=True)
        file_handler = RotatingFileHandler(
            os.path.join(log_dir, LOG_FILE_NAME),
            maxBytes=LOG_MAX_BYTES,
            backupCount=LOG_BACKUP_COUNT,
            encoding='utf-8'
        )
        file_handler.setLevel(log_level)
        file_handler.setFormatter(file_formatter)
        logger.addHandler(file_handler)
    except OSError:
        # Read-only working directories still get console logging
        pass

    if console:
        console_handler = logging.StreamHandler(sys.stderr)
        console_handler.setLevel(logging.DEBUG if debug_mode else logging.WARNING)
        console_handler.setFormatter(console_formatter)
        logger.addHandler(console_handler)

    return logger

def get_logger(name: str | None = None) -> logging.Logger:
    """
    Retrieves a named logger. If no name is given, returns the root logger.
    
    :param name: The name of the logger (e.g., __name__).
    :type name: str or None

    :returns: The logger instance.
    :rtype: :py:class:`~logging.Logger`
    """
    return logging.getLogger(name)
