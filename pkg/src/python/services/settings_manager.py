# src/python/services/settings_manager.py

import json
import os
from datetime import datetime, timezone
from typing import Any, Mapping

import yaml

from ..utils.exceptions import ConfigurationError
from ..utils.logger import get_logger
from ..utils.resource_path import get_resource_path
from ..utils.timestamps import parse_timestamp

logger = get_logger(__name__)

def parse_bind(text: str) -> tuple[str, int]:
    """
    Splits ``host:port``.

    :rtype: tuple[str, int]
    :raises ValueError: If the port is missing or not an integer.
    """
    host, sep, port = text.strip().rpartition(':')
    if not sep:
        raise ValueError(f"Expected host:port, got {text!r}")
    return host or "127.0.0.1", int(port)

def _as_bool(text: str) -> bool:
    return text.strip().lower() in ("1", "true", "yes", "on")

class SettingsManager:
    """
    Loads the leaderboard service settings.

    Sources, in increasing precedence:
    1. The packaged **default settings** file ``config/default_settings.json``.
    2. An optional **user settings** file (JSON, or YAML for ``.yaml``/``.yml``),
       which only needs the values that differ from the defaults.
    3. ``EVALKIT_*`` environment variables.

    Relative paths in a user file are resolved against that file's directory.
    """

    _DEFAULT_FILE = os.path.join('config', 'default_settings.json')

    ENV_OVERRIDES: dict[str, tuple[str, Any]] = {
        "EVALKIT_DATA_DIR": ("data_dir", str),
        "EVALKIT_DAILY_QUOTA": ("daily_quota", int),
        "EVALKIT_FREEZE_AT": ("freeze_at", str),
        "EVALKIT_KEY_TASK1": ("key_task1", str),
        "EVALKIT_KEY_TASK2": ("key_task2", str),
        "EVALKIT_BIND": ("bind", str),
        "EVALKIT_DEBUG": ("debug_mode", _as_bool),
    }
    """Environment variable -> (setting, converter)."""

    _PATH_KEYS = ("data_dir", "key_task1", "key_task2")

    def __init__(self, user_file: str | None = None, environ: Mapping[str, str] | None = None,
                 default_file: str | None = None) -> None:
        """
        :param user_file: Optional user settings file.
        :type user_file: str or None
        :param environ: Environment to read overrides from, ``os.environ`` when omitted.
        :type environ: Mapping[str, str] or None
        :param default_file: Alternative defaults file (tests).
        :type default_file: str or None

        :rtype: None
        """
        self.user_file = user_file
        self.environ = os.environ if environ is None else environ
        self.default_file = default_file or get_resource_path(self._DEFAULT_FILE)
        logger.debug("SettingsManager initialized successfully.")

    def load_settings(self) -> dict[str, Any]:
        """
        Loads the settings by merging defaults, user file and environment.

        :returns: A dictionary containing the complete, validated settings.
        :rtype: dict[str, Any]
        :raises ConfigurationError: On unreadable or invalid configuration.
        """
        logger.debug("Attempting to load settings.")

        # 1. Load Defaults (must exist and be valid)
        merged = self.get_default_settings()

        # 2. Load User Overrides
        if self.user_file:
            user_settings = self._load_file(self.user_file)
            base_dir = os.path.dirname(os.path.abspath(self.user_file))
            for key in self._PATH_KEYS:
                value = user_settings.get(key)
                if isinstance(value, str) and value and not os.path.isabs(value):
                    user_settings[key] = os.path.join(base_dir, value)
            merged.update(user_settings)

        # 3. Environment overrides win
        for variable, (key, convert) in self.ENV_OVERRIDES.items():
            if variable in self.environ:
                try:
                    merged[key] = convert(self.environ[variable])
                except ValueError as e:
                    logger.error(f"Invalid value for {variable}: {self.environ[variable]!r}")
                    raise ConfigurationError(f"Environment variable {variable} has an invalid value.", e) from e
                logger.info(f"Setting '{key}' overridden by {variable}.")

        self._validate(merged)
        logger.info(f"Settings loaded and merged successfully. Keys: {len(merged)}.")
        return merged

    def get_default_settings(self) -> dict[str, Any]:
        """
        Directly loads and returns only the default settings.

        :returns: A dictionary containing only the default settings.
        :rtype: dict[str, Any]
        """
        return self._load_file(self.default_file)

    def _validate(self, settings: dict[str, Any]) -> None:
        """
        Checks and normalises values in place: ``freeze_at`` becomes an aware
        datetime, ``bind`` a ``(host, port)`` pair.

        :raises ConfigurationError: On any invalid value.
        """
        try:
            if not isinstance(settings.get("daily_quota"), int) or settings["daily_quota"] < 0:
                raise ValueError("daily_quota must be a nonnegative integer")
            for key in ("sync_scoring_max_trials", "leaderboard_decimals", "max_archive_bytes", "scoring_workers"):
                if not isinstance(settings.get(key), int) or settings[key] < 0:
                    raise ValueError(f"{key} must be a nonnegative integer")
            teams = settings.get("teams") or {}
            if not isinstance(teams, dict) or not all(isinstance(k, str) and isinstance(v, str) and v
                                                      for k, v in teams.items()):
                raise ValueError("teams must map team ids to nonempty tokens")
            if len(set(teams.values())) != len(teams):
                raise ValueError("team tokens must be unique")
            settings["teams"] = dict(teams)

            freeze = settings.get("freeze_at")
            if isinstance(freeze, str):
                settings["freeze_at"] = parse_timestamp(freeze)
            elif isinstance(freeze, datetime):
                settings["freeze_at"] = freeze if freeze.tzinfo else freeze.replace(tzinfo=timezone.utc)
            elif freeze is not None:
                raise ValueError("freeze_at must be an RFC 3339 timestamp")

            if isinstance(settings.get("bind"), str):
                settings["bind"] = parse_bind(settings["bind"])
        except (ValueError, TypeError) as e:
            logger.critical(f"Invalid configuration: {e}")
            raise ConfigurationError(f"Invalid configuration: {e}", e) from e

    def _load_file(self, file_path: str) -> dict[str, Any]:
        """
        Internal helper to load a JSON or YAML mapping.

        :param file_path: The path to the settings file.
        :type file_path: str

        :returns: The file's mapping.
        :rtype: dict[str, Any]
        :raises ConfigurationError: If the file is missing, unreadable or malformed.
        """
        try:
            with open(file_path, 'r', encoding='utf-8') as f:
                if file_path.endswith(('.yaml', '.yml')):
                    content = yaml.safe_load(f) or {}
                else:
                    content = json.load(f)
        except FileNotFoundError as e:
            logger.critical(f"Settings file is missing: {file_path}")
            raise ConfigurationError(f"Settings file not found: {file_path}", e) from e
        except (json.JSONDecodeError, yaml.YAMLError) as e:
            logger.critical(f"FATAL: Format error in settings file: {file_path}.", exc_info=True)
            raise ConfigurationError(f"Configuration file is corrupt: {file_path}", e) from e
        except OSError as e:
            logger.critical(f"FATAL: Failed to read file: {file_path}.", exc_info=True)
            raise ConfigurationError(f"Failed to access configuration file: {file_path}", e) from e

        if not isinstance(content, dict):
            raise ConfigurationError(f"Configuration file must hold a mapping: {file_path}")
        logger.debug(f"Successfully loaded settings from: {file_path}. Keys: {list(content.keys())}")
        return content
