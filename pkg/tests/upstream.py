"""Minimal controllable HTTP upstream for fetcher and gateway tests."""

from __future__ import annotations

import threading
import time
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from typing import Callable, Dict, Optional, Tuple

# A route maps a path to either static (status, headers, body) or a callable
# returning that triple; callables may inspect/advance shared test state.
Route = Callable[[], Tuple[int, Dict[str, str], bytes]]


class FakeUpstream:
    def __init__(self):
        self.routes: Dict[str, Route] = {}
        self.hits: Dict[str, int] = {}
        self._lock = threading.Lock()

        upstream = self

        class Handler(BaseHTTPRequestHandler):
            protocol_version = "HTTP/1.1"

            def do_GET(self):
                path = self.path.split("?", 1)[0]
                with upstream._lock:
                    upstream.hits[path] = upstream.hits.get(path, 0) + 1
                    route = upstream.routes.get(path)
                if route is None:
                    status, headers, body = 404, {}, b"not here"
                else:
                    status, headers, body = route()
                self.send_response(status)
                for k, v in headers.items():
                    self.send_header(k, v)
                self.send_header("Content-Length", str(len(body)))
                self.end_headers()
                self.wfile.write(body)

            def log_message(self, *args):
                pass

        self.server = ThreadingHTTPServer(("127.0.0.1", 0), Handler)
        self.server.daemon_threads = True
        self.thread = threading.Thread(target=self.server.serve_forever, daemon=True)
        self.thread.start()

    @property
    def base_url(self) -> str:
        return f"http://127.0.0.1:{self.server.server_address[1]}"

    def url(self, path: str) -> str:
        return self.base_url + path

    def set_static(
        self,
        path: str,
        body: bytes,
        status: int = 200,
        content_type: Optional[str] = "text/javascript",
    ) -> None:
        headers = {"Content-Type": content_type} if content_type else {}
        self.routes[path] = lambda: (status, headers, body)

    def set_redirect(self, path: str, location: str, status: int = 302) -> None:
        self.routes[path] = lambda: (status, {"Location": location}, b"")

    def set_slow(self, path: str, delay: float, body: bytes = b"late") -> None:
        def route():
            time.sleep(delay)
            return 200, {}, body
        self.routes[path] = route

    def hit_count(self, path: str) -> int:
        with self._lock:
            return self.hits.get(path, 0)

    def close(self) -> None:
        self.server.shutdown()
        self.server.server_close()
