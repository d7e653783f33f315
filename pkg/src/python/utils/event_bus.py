# src/python/utils/event_bus.py

import threading
from functools import wraps
from typing import Any, Callable

from .events import Events
from .logger import get_logger

logger = get_logger(__name__)

def receiver(topic: str | Events):
    """
    Decorator to mark a method as an event subscriber.

    Methods decorated with this function are flagged with metadata that allows
    the :class:`EventBus` to automatically register them using
    :meth:`EventBus.register_instance`.

    :param topic: The event topic string or member of the :class:`Events` enum
                  to subscribe to.
    :type topic: str or Events

    :return: A decorator function that adds ``_event_subscriptions`` metadata
             to the method.
    :rtype: Callable

    .. note::
        This decorator does not subscribe the method immediately. Subscription
        occurs when :meth:`EventBus.register_instance` is called on the object
        containing the decorated method.
    """
    def decorator(func):
        if not hasattr(func, '_event_subscriptions'):
            func._event_subscriptions = []
        func._event_subscriptions.append(topic)

        @wraps(func)
        def wrapper(*args, **kwargs):
            return func(*args, **kwargs)
        wrapper._event_subscriptions = func._event_subscriptions
        return wrapper
    return decorator

class EventBus:
    """
    Topic-based publish/subscribe hub that lets observers follow the submission
    pipeline (scoring workers, service shutdown) without coupling to it.

    Dispatch is synchronous on the publishing thread. Subscriber lists are
    copied under a lock before dispatch, so publishing from worker threads is safe.

    Usage:
        bus.subscribe(Events.SUBMISSION_SCORED, my_callback)
        bus.publish(Events.SUBMISSION_SCORED, data={'task': 1, 'submission_id': '...'})
        bus.unsubscribe(Events.SUBMISSION_SCORED, my_callback)
    """

    def __init__(self) -> None:
        self._lock = threading.Lock()
        self._subscribers: dict[str, list[Callable]] = {}

    @staticmethod
    def _topic(topic: str | Events) -> str:
        return topic.value if isinstance(topic, Events) else topic

    def publish(self, topic: str | Events, data: Any = None) -> None:
        """
        Publish an event to all subscribers of a topic.

        :param topic: Event topic (use Events enum for type safety)
        :type topic: str or Events
        :param data: Event payload (can be any type)
        :type data: Any

        :rtype: None
        """
        topic_str = self._topic(topic)
        with self._lock:
            callbacks = list(self._subscribers.get(topic_str, []))

        logger.debug(f"Event published: {topic_str}")

        for callback in callbacks:
            try:
                callback(data)
            except Exception as e:
                logger.error(
                    f"Error in subscriber {callback.__qualname__} for topic '{topic_str}': {e}",
                    exc_info=True
                )

    def subscribe(self, topic: str | Events, callback: Callable[[object], None]) -> None:
        """
        Subscribe to an event topic.

        :param topic: Event topic to listen for
        :type topic: str or Events
        :param callback: Function to call when event occurs (receives data payload)
        :type callback: Callable[[object], None]

        :rtype: None
        """
        topic_str = self._topic(topic)
        with self._lock:
            callbacks = self._subscribers.setdefault(topic_str, [])
            if callback not in callbacks:
                callbacks.append(callback)
                logger.debug(f"Subscribed {callback.__qualname__} to '{topic_str}'")

    def unsubscribe(self, topic: str | Events, callback: Callable[[object], None]) -> None:
        """
        Unsubscribe from an event topic.

        :param topic: Event topic to unsubscribe from
        :type topic: str or Events
        :param callback: The callback function to remove
        :type callback: Callable[[object], None]

        :rtype: None
        """
        topic_str = self._topic(topic)
        with self._lock:
            if callback in self._subscribers.get(topic_str, []):
                self._subscribers[topic_str].remove(callback)

    def register_instance(self, obj: Any) -> None:
        """
        Scans an object for methods decorated with @receiver and subscribes them.

        :param obj: The object for methods.
        :type: obj: Any

        :rtype: None
        """
        for attr_name in dir(obj):
            attr = getattr(obj, attr_name, None)
            for topic in getattr(attr, '_event_subscriptions', ()):
                self.subscribe(topic, attr)

    def unregister_instance(self, obj: Any) -> None:
        """
        Removes all subscriptions whose callback is a bound method of ``obj``.

        :param obj: The object to remove all subscriptions for.
        :type obj: Any

        :rtype: None
        """
        with self._lock:
            for topic, callbacks in self._subscribers.items():
                self._subscribers[topic] = [cb for cb in callbacks
                                            if getattr(cb, '__self__', None) is not obj]
