# src/python/utils/timestamps.py

from datetime import datetime, timezone

def parse_timestamp(text: str) -> datetime:
    """
    Parses an RFC 3339 timestamp. A timestamp without offset is taken as UTC.

    :param text: e.g. ``2021-03-20T00:00:00Z``.
    :type text: str
    :rtype: datetime
    :raises ValueError: If the text is not a timestamp.
    """
    value = datetime.fromisoformat(text.strip())
    if value.tzinfo is None:
        value = value.replace(tzinfo=timezone.utc)
    return value.astimezone(timezone.utc)

def format_timestamp(value: datetime) -> str:
    """RFC 3339 in UTC with a ``Z`` suffix and microseconds."""
    return value.astimezone(timezone.utc).strftime('%Y-%m-%dT%H:%M:%S.%fZ')

def utc_day_start(value: datetime) -> datetime:
    """UTC midnight at or before ``value``."""
    return value.astimezone(timezone.utc).replace(hour=0, minute=0, second=0, microsecond=0)
