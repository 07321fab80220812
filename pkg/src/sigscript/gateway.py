"""Verifying HTTP gateway: fetch governed resources, verify, serve only on Pass.

Request pipeline for ``GET /v1/resource?url=...``: match the trust rule,
consult the verified cache, fetch on miss, verify, then either serve the
verified bytes with permissive CORS headers or fall back to the local copy.
Ungoverned URLs are refused outright (404) - this is not an open proxy.

Status mapping: 400 malformed request, 404 no governing rule, 403
verification failure without a usable fallback, 502 upstream fetch failure.
"""

from __future__ import annotations

import json
import logging
import signal
import threading
from dataclasses import dataclass
from http.server import BaseHTTPRequestHandler, ThreadingHTTPServer
from pathlib import Path
from typing import Dict, Optional, Tuple, Union
from urllib.parse import parse_qs, urlparse

from .envelope import MalformedSignatureLine, parse_envelope
from .fetcher import (
    DEFAULT_CACHE_TTL_SECONDS,
    DEFAULT_MAX_SIZE_BYTES,
    DEFAULT_TIMEOUT_SECONDS,
    FetchError,
    FetchLimits,
    VerifiedCache,
    fetch,
)
from .trust import (
    FailureReason,
    NoMatchingRule,
    PolicyParseError,
    TrustPolicy,
    TrustRule,
    load_policy,
    match_rule,
    verify_resource,
)
from .crypto import KeyLoadError, sha256_digest

logger = logging.getLogger("sigscript.gateway")

DEFAULT_CONTENT_TYPE = "text/javascript"


class GatewayConfigError(ValueError):
    """Config file missing, malformed, or inconsistent."""


@dataclass(frozen=True)
class GatewayConfig:
    policy_path: str
    listen_addr: str = "127.0.0.1:8799"
    cache_ttl_seconds: float = DEFAULT_CACHE_TTL_SECONDS
    fetch_timeout_seconds: float = DEFAULT_TIMEOUT_SECONDS
    max_body_bytes: int = DEFAULT_MAX_SIZE_BYTES
    fallback_root: Optional[str] = None

    @property
    def host(self) -> str:
        return self.listen_addr.rsplit(":", 1)[0]

    @property
    def port(self) -> int:
        try:
            return int(self.listen_addr.rsplit(":", 1)[1])
        except (IndexError, ValueError) as err:
            raise GatewayConfigError(f"listen_addr {self.listen_addr!r} is not host:port") from err

    @classmethod
    def from_file(cls, path: Union[str, Path]) -> "GatewayConfig":
        path = Path(path)
        try:
            doc = json.loads(path.read_bytes())
        except OSError as err:
            raise GatewayConfigError(f"{path}: cannot read config ({err})") from err
        except json.JSONDecodeError as err:
            raise GatewayConfigError(f"{path}: config is not valid JSON ({err})") from err
        if not isinstance(doc, dict):
            raise GatewayConfigError(f"{path}: config must be a JSON object")

        known = {
            "listen_addr": str,
            "policy_path": str,
            "cache_ttl_seconds": (int, float),
            "fetch_timeout_seconds": (int, float),
            "max_body_bytes": int,
            "fallback_root": str,
        }
        for key, value in doc.items():
            if key not in known:
                raise GatewayConfigError(f"{path}: unknown config key {key!r}")
            if not isinstance(value, known[key]) or isinstance(value, bool):
                raise GatewayConfigError(f"{path}: config key {key!r} has wrong type")
        if "policy_path" not in doc:
            raise GatewayConfigError(f"{path}: config requires policy_path")

        base = path.parent
        policy_path = str(base / doc["policy_path"])
        fallback_root = str(base / doc["fallback_root"]) if "fallback_root" in doc else None
        config = cls(
            policy_path=policy_path,
            listen_addr=doc.get("listen_addr", cls.listen_addr),
            cache_ttl_seconds=float(doc.get("cache_ttl_seconds", DEFAULT_CACHE_TTL_SECONDS)),
            fetch_timeout_seconds=float(
                doc.get("fetch_timeout_seconds", DEFAULT_TIMEOUT_SECONDS)
            ),
            max_body_bytes=doc.get("max_body_bytes", DEFAULT_MAX_SIZE_BYTES),
            fallback_root=fallback_root,
        )
        config.port  # validate listen_addr shape early
        return config


@dataclass(frozen=True)
class Response:
    status: int
    body: bytes
    headers: Tuple[Tuple[str, str], ...] = ()


def _json_response(status: int, payload: Dict[str, object]) -> Response:
    return Response(
        status=status,
        body=json.dumps(payload).encode("utf-8"),
        headers=(("Content-Type", "application/json"), ("Cache-Control", "no-store")),
    )


class GatewayApp:
    """Request-handling core, independent of the HTTP server plumbing.

    The policy snapshot is immutable and swapped atomically on reload; a
    failed reload keeps the previous snapshot serving.
    """

    def __init__(self, config: GatewayConfig):
        self.config = config
        self._policy: Optional[TrustPolicy] = None
        self._reload_lock = threading.Lock()
        self.cache = VerifiedCache(ttl_seconds=config.cache_ttl_seconds)
        self.limits = FetchLimits(
            timeout=config.fetch_timeout_seconds, max_size=config.max_body_bytes
        )
        # Startup contract: a gateway never starts serving without a policy.
        self._policy = load_policy(config.policy_path)

    @property
    def policy(self) -> Optional[TrustPolicy]:
        return self._policy

    def reload_policy(self) -> Tuple[bool, Optional[str]]:
        """Re-read the policy file; on any error the old snapshot stays live."""
        with self._reload_lock:
            try:
                fresh = load_policy(self.config.policy_path)
            except (PolicyParseError, KeyLoadError) as err:
                logger.warning("policy reload failed, keeping previous snapshot: %s", err)
                return False, str(err)
            self._policy = fresh
            logger.info("policy reloaded: %d rules", len(fresh.rules))
            return True, None

    # -- request handlers ---------------------------------------------------

    def handle_health(self) -> Response:
        if self._policy is None:
            return Response(503, b"no policy loaded\n", (("Content-Type", "text/plain"),))
        return Response(200, b"ok\n", (("Content-Type", "text/plain"),))

    def handle_reload(self) -> Response:
        ok, error = self.reload_policy()
        if ok:
            return _json_response(200, {"status": "ok", "rules": len(self._policy.rules)})
        return _json_response(500, {"status": "error", "error": error})

    def handle_resource(self, query_string: str) -> Response:
        params = parse_qs(query_string)
        values = params.get("url")
        if not values or not values[0]:
            return _json_response(400, {"error": "bad_request", "detail": "missing url parameter"})
        url = values[0]
        parsed = urlparse(url)
        if parsed.scheme not in ("http", "https") or not parsed.netloc:
            return _json_response(
                400, {"error": "bad_request", "detail": "url must be absolute http(s)"}
            )

        policy = self._policy
        if policy is None:
            return _json_response(503, {"error": "no_policy"})
        try:
            rule = match_rule(policy, url)
        except NoMatchingRule:
            return _json_response(404, {"error": "no_matching_rule", "url": url})

        cached = self.cache.get(url)
        if cached is not None:
            return self._pass_response(
                cached.data, cached.content_type, cached.mode, cached.satisfied_key_ids
            )

        try:
            resource = fetch(url, self.limits)
        except FetchError as err:
            # Fetch failure is not a verdict; the loader owns that fallback.
            logger.info("fetch failed for %s: %s", url, err)
            return _json_response(502, {"error": "fetch_failed", "detail": str(err)})

        verdict = verify_resource(rule, resource.data)
        if verdict.passed:
            self.cache.put(
                url,
                resource.data,
                digest_hex=sha256_digest(resource.data).hex,
                content_type=resource.content_type,
                mode=verdict.mode,
                satisfied_key_ids=verdict.satisfied_key_ids,
            )
            return self._pass_response(
                resource.data, resource.content_type, verdict.mode, verdict.satisfied_key_ids
            )

        logger.info("verification failed for %s: %s", url, verdict.reason.value)
        fallback = self._fallback_response(rule, verdict.reason)
        if fallback is not None:
            return fallback
        return _json_response(
            403, {"error": "verification_failed", "reason": verdict.reason.value}
        )

    # -- helpers ------------------------------------------------------------

    def _pass_response(
        self,
        data: bytes,
        content_type: Optional[str],
        mode: str,
        key_ids: Tuple[str, ...],
    ) -> Response:
        verdict = f"pass; keys={','.join(key_ids)}; mode={mode}"
        return Response(
            status=200,
            body=data,
            headers=(
                ("Content-Type", content_type or DEFAULT_CONTENT_TYPE),
                ("Access-Control-Allow-Origin", "*"),
                ("X-Sig-Verdict", verdict),
                ("Cache-Control", f"max-age={int(self.config.cache_ttl_seconds)}"),
            ),
        )

    def _fallback_response(self, rule: TrustRule, reason: FailureReason) -> Optional[Response]:
        data = self._read_fallback(rule)
        if data is None:
            return None
        return Response(
            status=200,
            body=data,
            headers=(
                ("Content-Type", DEFAULT_CONTENT_TYPE),
                ("Access-Control-Allow-Origin", "*"),
                ("X-Sig-Verdict", f"fallback; reason={reason.value}"),
                ("Cache-Control", "no-store"),
            ),
        )

    def _read_fallback(self, rule: TrustRule) -> Optional[bytes]:
        """Local fallback bytes for the rule, or None when unavailable/untrusted.

        The file is mapped by the fallback URL's path under fallback_root and
        is never fetched remotely. A signed local copy must still verify under
        the rule; an unsigned one is operator-trusted as deployed.
        """
        if rule.fallback_url is None or self.config.fallback_root is None:
            return None
        relative = urlparse(rule.fallback_url).path.lstrip("/")
        if not relative:
            return None
        root = Path(self.config.fallback_root).resolve()
        candidate = (root / relative).resolve()
        if not candidate.is_relative_to(root) or not candidate.is_file():
            return None
        try:
            data = candidate.read_bytes()
        except OSError as err:
            logger.warning("fallback file %s unreadable: %s", candidate, err)
            return None

        try:
            env = parse_envelope(data)
        except MalformedSignatureLine:
            logger.warning("fallback file %s has a corrupt signature line", candidate)
            return None
        if env.signatures and not verify_resource(rule, data).passed:
            logger.warning("fallback file %s fails verification under its rule", candidate)
            return None
        return data


class _Handler(BaseHTTPRequestHandler):
    server_version = "sigscript-gateway"
    protocol_version = "HTTP/1.1"

    @property
    def app(self) -> GatewayApp:
        return self.server.app  # type: ignore[attr-defined]

    def _send(self, response: Response) -> None:
        self.send_response(response.status)
        for name, value in response.headers:
            self.send_header(name, value)
        self.send_header("Content-Length", str(len(response.body)))
        self.end_headers()
        self.wfile.write(response.body)

    def do_GET(self) -> None:  # noqa: N802 (BaseHTTPRequestHandler API)
        parsed = urlparse(self.path)
        if parsed.path == "/v1/resource":
            self._send(self.app.handle_resource(parsed.query))
        elif parsed.path == "/healthz":
            self._send(self.app.handle_health())
        else:
            self._send(_json_response(404, {"error": "not_found"}))

    def do_POST(self) -> None:  # noqa: N802
        parsed = urlparse(self.path)
        # Drain any request body so keep-alive connections stay in sync.
        length = int(self.headers.get("Content-Length") or 0)
        if length:
            self.rfile.read(length)
        if parsed.path == "/v1/admin/reload":
            self._send(self.app.handle_reload())
        else:
            self._send(_json_response(404, {"error": "not_found"}))

    def log_message(self, format: str, *args) -> None:
        logger.debug("%s - %s", self.address_string(), format % args)


class GatewayServer(ThreadingHTTPServer):
    daemon_threads = True

    def __init__(self, app: GatewayApp):
        self.app = app
        super().__init__((app.config.host, app.config.port), _Handler)

    @property
    def bound_port(self) -> int:
        return self.server_address[1]


def run(config: GatewayConfig) -> int:
    """Blocking entry point: load policy, bind, serve until interrupted."""
    app = GatewayApp(config)
    server = GatewayServer(app)
    if threading.current_thread() is threading.main_thread() and hasattr(signal, "SIGHUP"):
        signal.signal(signal.SIGHUP, lambda *_: app.reload_policy())
    logger.info(
        "gateway listening on %s:%d (%d rules)",
        config.host,
        server.bound_port,
        len(app.policy.rules),
    )
    try:
        server.serve_forever()
    except KeyboardInterrupt:
        pass
    finally:
        server.server_close()
    return 0
