# src/python/api/http_server.py

import json
import re
from datetime import timedelta
from http import HTTPStatus
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Any, Callable

from ..repository.submission_repository import record_to_dict
from ..services.leaderboard_service import LeaderboardService, entry_to_dict
from ..utils._version import __version__
from ..utils.constants import ErrorCode, SubmissionStatus
from ..utils.exceptions import ApplicationError, ServiceError
from ..utils.logger import get_logger
from ..utils.timestamps import format_timestamp, utc_day_start
from ..utils.types import FrozenNotice

logger = get_logger(__name__)

API_PREFIX = "/api/v1"
ZIP_CONTENT_TYPES = ("application/zip", "application/x-zip-compressed")
DRAIN_LIMIT_BYTES = 1 << 20

def _error_body(code: str, message: str) -> dict[str, Any]:
    return {"error": {"code": code, "message": message}}

class ApiRequestHandler(BaseHTTPRequestHandler):
    """
    Routes the JSON API onto a :py:class:`~src.python.services.leaderboard_service.LeaderboardService`.

    Routes:
    * ``POST /api/v1/tasks/{t}/submissions`` (``application/zip`` body)
    * ``GET  /api/v1/tasks/{t}/submissions`` and ``.../submissions/{id}``
    * ``GET  /api/v1/tasks/{t}/leaderboard``
    * ``GET  /api/v1/health``
    """
    server_version = f"evalkit/{__version__}"
    protocol_version = "HTTP/1.1"

    server: 'EvalkitHTTPServer'

    _GET_ROUTES: list[tuple[re.Pattern, str]] = [
        (re.compile(rf"^{API_PREFIX}/health$"), "_health"),
        (re.compile(rf"^{API_PREFIX}/tasks/(?P<task>[^/]+)/submissions$"), "_list_submissions"),
        (re.compile(rf"^{API_PREFIX}/tasks/(?P<task>[^/]+)/submissions/(?P<submission_id>[^/]+)$"), "_get_submission"),
        (re.compile(rf"^{API_PREFIX}/tasks/(?P<task>[^/]+)/leaderboard$"), "_leaderboard"),
    ]
    _POST_ROUTES: list[tuple[re.Pattern, str]] = [
        (re.compile(rf"^{API_PREFIX}/tasks/(?P<task>[^/]+)/submissions$"), "_submit"),
    ]

    @property
    def service(self) -> LeaderboardService:
        return self.server.service

    # --- Plumbing ---

    def log_message(self, format: str, *args: Any) -> None:
        logger.debug(f"{self.address_string()} - {format % args}")

    def _send_json(self, status: int, body: Any, headers: dict[str, str] | None = None) -> None:
        payload = json.dumps(body, sort_keys=True).encode('utf-8')
        self.send_response(status)
        self.send_header("Content-Type", "application/json")
        self.send_header("Content-Length", str(len(payload)))
        for name, value in (headers or {}).items():
            self.send_header(name, value)
        self.end_headers()
        self.wfile.write(payload)

    def _bearer_token(self) -> str | None:
        header = self.headers.get("Authorization", "")
        scheme, _, token = header.partition(' ')
        return token.strip() if scheme.lower() == "bearer" else None

    def _dispatch(self, routes: list[tuple[re.Pattern, str]]) -> None:
        path = self.path.split('?', 1)[0]
        for pattern, handler_name in routes:
            match = pattern.match(path)
            if match:
                handler: Callable[..., None] = getattr(self, handler_name)
                try:
                    handler(**match.groupdict())
                except ServiceError as e:
                    headers = self._retry_after() if e.code is ErrorCode.QUOTA_EXCEEDED else None
                    self._send_json(e.http_status, _error_body(e.code.value, e.detail), headers)
                except ApplicationError as e:
                    logger.error(f"Request {self.command} {path} failed: {e}", exc_info=True)
                    self._send_json(HTTPStatus.INTERNAL_SERVER_ERROR,
                                    _error_body("InternalError", e.user_message))
                return
        self._send_json(HTTPStatus.NOT_FOUND, _error_body(ErrorCode.NOT_FOUND.value, f"No route for {path}"))

    def _retry_after(self) -> dict[str, str]:
        now = self.service.clock()
        seconds = (utc_day_start(now) + timedelta(days=1) - now).total_seconds()
        return {"Retry-After": str(max(1, int(seconds)))}

    def do_GET(self) -> None:
        self._dispatch(self._GET_ROUTES)

    def do_POST(self) -> None:
        if not any(pattern.match(self.path.split('?', 1)[0]) for pattern, _ in self._POST_ROUTES):
            # unrouted bodies are never read
            self.close_connection = True
        self._dispatch(self._POST_ROUTES)

    # --- Endpoints ---

    def _health(self) -> None:
        self._send_json(HTTPStatus.OK, {"status": "ok", "version": __version__,
                                        "tasks": sorted(int(t) for t in self.service.keys)})

    def _submit(self, task: str) -> None:
        try:
            length = int(self.headers.get("Content-Length") or 0)
        except ValueError:
            length = -1
        if length < 0 or length > self.service.settings["max_archive_bytes"]:
            self.close_connection = True
            if 0 < length <= DRAIN_LIMIT_BYTES:
                # small bodies are drained so the client reads the 413
                self.rfile.read(length)
            self._send_json(HTTPStatus.REQUEST_ENTITY_TOO_LARGE,
                            _error_body(ErrorCode.NOT_A_ZIP.value, "Upload size missing or above the limit"))
            return
        # the body is read before any answer so the connection stays usable
        data = self.rfile.read(length) if length > 0 else b""

        team_id = self.service.authenticate(self._bearer_token())
        self.service.resolve_task(task)

        content_type = self.headers.get("Content-Type", "").split(';', 1)[0].strip().lower()
        if content_type not in ZIP_CONTENT_TYPES:
            self._send_json(HTTPStatus.UNSUPPORTED_MEDIA_TYPE,
                            _error_body(ErrorCode.NOT_A_ZIP.value, "Body must be sent as application/zip"))
            return

        record = self.service.submit(team_id, task, data)
        status = HTTPStatus.UNPROCESSABLE_ENTITY if record.status is SubmissionStatus.REJECTED else HTTPStatus.CREATED
        self._send_json(status, record_to_dict(record),
                        {"Location": f"{API_PREFIX}/tasks/{int(record.task)}/submissions/{record.submission_id}"})

    def _get_submission(self, task: str, submission_id: str) -> None:
        team_id = self.service.authenticate(self._bearer_token())
        record = self.service.get_submission(team_id, submission_id, task)
        self._send_json(HTTPStatus.OK, record_to_dict(record))

    def _list_submissions(self, task: str) -> None:
        team_id = self.service.authenticate(self._bearer_token())
        records = self.service.list_submissions(team_id, task)
        self._send_json(HTTPStatus.OK, {
            "task": int(records[0].task) if records else int(self.service.resolve_task(task)),
            "remaining_today": self.service.enforce_quota(team_id, task),
            "submissions": [record_to_dict(r) for r in records],
        })

    def _leaderboard(self, task: str) -> None:
        board = self.service.get_leaderboard(task)
        task_number = int(self.service.resolve_task(task))
        if isinstance(board, FrozenNotice):
            self._send_json(HTTPStatus.OK, {"task": task_number, "frozen": True,
                                            "freeze_at": format_timestamp(board.freeze_at)})
            return
        self._send_json(HTTPStatus.OK, {"task": task_number, "frozen": False,
                                        "entries": [entry_to_dict(e, rank) for rank, e in enumerate(board, start=1)]})

class EvalkitHTTPServer(ThreadingHTTPServer):
    """One thread per request; the service carries all shared state."""
    daemon_threads = True

    def __init__(self, address: tuple[str, int], service: LeaderboardService) -> None:
        """
        :param address: ``(host, port)``; port 0 picks a free port.
        :type address: tuple[str, int]
        :param service: A started leaderboard service.
        :type service: :py:class:`~src.python.services.leaderboard_service.LeaderboardService`

        :rtype: None
        """
        self.service = service
        super().__init__(address, ApiRequestHandler)

    @property
    def url(self) -> str:
        host, port = self.server_address[:2]
        return f"http://{host}:{port}"

def run_server(service: LeaderboardService, host: str, port: int) -> None:
    """
    Serves until interrupted, then stops the service cleanly.

    :param service: A started leaderboard service.
    :type service: :py:class:`~src.python.services.leaderboard_service.LeaderboardService`
    :param host: Bind address.
    :type host: str
    :param port: Bind port.
    :type port: int

    :rtype: None
    """
    server = EvalkitHTTPServer((host, port), service)
    logger.info(f"Leaderboard API listening on {server.url}")
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        logger.info("Interrupted, shutting down.")
    finally:
        server.server_close()
        service.close()
