# src/python/utils/events.py

from enum import Enum

class Events(str, Enum):
    """
    Centralized registry of all event topics.
    Using string enum provides both type safety and string compatibility.
    """

    # Submission lifecycle
    SUBMISSION_SCORED = "submission.scored"

    # Service lifecycle
    SERVICE_SHUTDOWN_INITIATED = "service.shutdown_initiated"
