"""Remote resource retrieval with limits, plus the verified-content cache.

The fetcher asks for identity encoding so the bytes on the wire are the bytes
that were signed, follows at most 5 redirect hops, and aborts mid-stream once
a body exceeds the size limit. Partial bodies never escape.

The cache holds only content that already passed verification (callers
enforce that precondition); entries are keyed by URL plus the digest of the
verified bytes, so a re-signed upstream update coexists with the old entry
until the TTL expires.
"""

from __future__ import annotations

import threading
import time
from dataclasses import dataclass
from typing import Dict, Optional, Tuple
from urllib.parse import urlparse

import requests

DEFAULT_TIMEOUT_SECONDS = 10.0
DEFAULT_MAX_SIZE_BYTES = 10 * 1024 * 1024
DEFAULT_CACHE_TTL_SECONDS = 300.0
MAX_REDIRECTS = 5
_CHUNK = 64 * 1024


class FetchError(Exception):
    """Base for all retrieval failures."""


class SchemeRejected(FetchError):
    pass


class FetchTimeout(FetchError):
    pass


class TooLarge(FetchError):
    pass


class UpstreamStatus(FetchError):
    def __init__(self, status_code: int):
        super().__init__(f"upstream returned status {status_code}")
        self.status_code = status_code


@dataclass(frozen=True)
class FetchLimits:
    timeout: float = DEFAULT_TIMEOUT_SECONDS
    max_size: int = DEFAULT_MAX_SIZE_BYTES


@dataclass(frozen=True)
class FetchedResource:
    url: str  # final URL after redirects
    data: bytes
    content_type: Optional[str]
    fetched_at: float


def fetch(url: str, limits: FetchLimits = FetchLimits()) -> FetchedResource:
    """Retrieve the full body of ``url`` within the given limits."""
    parsed = urlparse(url)
    if parsed.scheme not in ("http", "https"):
        raise SchemeRejected(f"scheme {parsed.scheme!r} not allowed")
    if not parsed.netloc:
        raise FetchError(f"url {url!r} has no host")

    with requests.Session() as session:
        session.max_redirects = MAX_REDIRECTS
        try:
            resp = session.get(
                url,
                stream=True,
                timeout=limits.timeout,
                headers={"Accept-Encoding": "identity"},
                allow_redirects=True,
            )
        except requests.Timeout as err:
            raise FetchTimeout(f"fetch of {url} timed out after {limits.timeout}s") from err
        except requests.TooManyRedirects as err:
            raise FetchError(f"{url}: more than {MAX_REDIRECTS} redirects") from err
        except requests.RequestException as err:
            raise FetchError(f"{url}: {err}") from err

        with resp:
            if not 200 <= resp.status_code < 300:
                raise UpstreamStatus(resp.status_code)
            chunks = []
            total = 0
            try:
                for chunk in resp.iter_content(_CHUNK):
                    total += len(chunk)
                    if total > limits.max_size:
                        raise TooLarge(f"{url}: body exceeds {limits.max_size} bytes")
                    chunks.append(chunk)
            except requests.Timeout as err:
                raise FetchTimeout(f"fetch of {url} timed out after {limits.timeout}s") from err
            except requests.RequestException as err:
                raise FetchError(f"{url}: body read failed ({err})") from err

    return FetchedResource(
        url=resp.url,
        data=b"".join(chunks),
        content_type=resp.headers.get("Content-Type"),
        fetched_at=time.time(),
    )


@dataclass(frozen=True)
class CacheEntry:
    url: str
    digest_hex: str
    data: bytes
    content_type: Optional[str]
    expires_at: float
    # verdict metadata recorded at insert time, replayed on cache hits
    mode: str = "signed"
    satisfied_key_ids: Tuple[str, ...] = ()


class VerifiedCache:
    """In-memory TTL cache for verified bytes. Thread-safe.

    Callers must only ``put`` content that verified as Pass; the cache itself
    never re-checks. Expired entries behave exactly like misses.
    """

    def __init__(self, ttl_seconds: float = DEFAULT_CACHE_TTL_SECONDS):
        self.ttl_seconds = ttl_seconds
        self._lock = threading.Lock()
        # url -> digest_hex -> entry; dict order doubles as insert recency
        self._entries: Dict[str, Dict[str, CacheEntry]] = {}

    def get(self, url: str, digest_hex: Optional[str] = None) -> Optional[CacheEntry]:
        """Latest unexpired entry for ``url``; exact entry when a digest is given."""
        now = time.monotonic()
        with self._lock:
            per_url = self._entries.get(url)
            if not per_url:
                return None
            for key in [k for k, e in per_url.items() if e.expires_at <= now]:
                del per_url[key]
            if not per_url:
                del self._entries[url]
                return None
            if digest_hex is not None:
                return per_url.get(digest_hex)
            return next(reversed(per_url.values()))

    def put(
        self,
        url: str,
        data: bytes,
        digest_hex: str,
        content_type: Optional[str] = None,
        mode: str = "signed",
        satisfied_key_ids: Tuple[str, ...] = (),
    ) -> CacheEntry:
        entry = CacheEntry(
            url=url,
            digest_hex=digest_hex,
            data=data,
            content_type=content_type,
            expires_at=time.monotonic() + self.ttl_seconds,
            mode=mode,
            satisfied_key_ids=satisfied_key_ids,
        )
        with self._lock:
            per_url = self._entries.setdefault(url, {})
            per_url.pop(digest_hex, None)  # reinsert to refresh recency
            per_url[digest_hex] = entry
        return entry

    def clear(self) -> None:
        with self._lock:
            self._entries.clear()
