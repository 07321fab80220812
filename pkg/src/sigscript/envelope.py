"""Signature envelope: leading ``//JSSignature:`` comment lines over an opaque payload.

Wire grammar (normative):

    signature-line = "//JSSignature:" [key-id ":"] base64 [CR] LF
    key-id         = 1*32(ALPHA / DIGIT / "-" / "_")

A signed file is zero or more signature lines followed by arbitrary payload
bytes. Layering is onion-style: the signature on line ``i`` covers every byte
after that line's terminator, which includes any later signature lines.

Payload bytes are never transformed here. The one tolerance on parse is a
single optional CR before the LF of a signature line (stripped from the line,
never from the payload), so the header survives text-mode transfers without
ambiguating what was signed.
"""

from __future__ import annotations

import base64
import re
from dataclasses import dataclass, field
from typing import Optional, Tuple

SIGNATURE_PREFIX = b"//JSSignature:"

#: The only signature algorithm in this format version.
ALGORITHM_RSA_SHA256 = "RSA-SHA256"

_KEY_ID_RE = re.compile(r"^[A-Za-z0-9_-]{1,32}$")
_BASE64_RE = re.compile(r"^[A-Za-z0-9+/]+={0,2}$")


class MalformedSignatureLine(ValueError):
    """A line starts with the signature prefix but violates the grammar.

    Raised instead of treating the file as unsigned: a broken header line
    signals corruption, not absence of a signature.
    """


class IndexOutOfRange(IndexError):
    """Signature index beyond the parsed signature lines."""


def _validate_key_id(key_id: str) -> None:
    if not _KEY_ID_RE.match(key_id):
        raise MalformedSignatureLine(
            f"key id must be 1-32 chars of [A-Za-z0-9_-], got {key_id!r}"
        )


def _validate_b64(sig_b64: str) -> bytes:
    if not _BASE64_RE.match(sig_b64) or len(sig_b64) % 4 != 0:
        raise MalformedSignatureLine(f"invalid base64 signature text {sig_b64!r}")
    decoded = base64.b64decode(sig_b64, validate=True)
    # Canonical form only: reject set padding bits in the final group, which
    # would let two distinct lines decode to the same signature bytes.
    if base64.b64encode(decoded) != sig_b64.encode("ascii"):
        raise MalformedSignatureLine("non-canonical base64 in signature text")
    return decoded


@dataclass(frozen=True)
class SignatureLine:
    """One parsed or to-be-rendered signature comment line."""

    sig_b64: str
    key_id: Optional[str] = None
    algorithm: str = ALGORITHM_RSA_SHA256

    def __post_init__(self) -> None:
        if self.algorithm != ALGORITHM_RSA_SHA256:
            raise ValueError(f"unsupported signature algorithm {self.algorithm!r}")
        if self.key_id is not None:
            _validate_key_id(self.key_id)
        _validate_b64(self.sig_b64)

    @property
    def signature(self) -> bytes:
        """Decoded signature bytes."""
        return base64.b64decode(self.sig_b64, validate=True)

    def render(self) -> bytes:
        """The exact wire form of this line, LF-terminated."""
        middle = f"{self.key_id}:" if self.key_id is not None else ""
        return SIGNATURE_PREFIX + middle.encode("ascii") + self.sig_b64.encode("ascii") + b"\n"

    @classmethod
    def from_signature(cls, raw: bytes, key_id: Optional[str] = None) -> "SignatureLine":
        return cls(sig_b64=base64.b64encode(raw).decode("ascii"), key_id=key_id)


@dataclass(frozen=True)
class SignatureEnvelope:
    """Parsed signed resource: signature lines (outermost first) + raw payload."""

    signatures: Tuple[SignatureLine, ...] = ()
    payload: bytes = b""
    # Byte offset, in the original file, where each signature's coverage
    # starts (the byte after that line's LF). Empty when constructed by hand;
    # serialize()/parse round trips re-derive it.
    _coverage_starts: Tuple[int, ...] = field(default=(), repr=False, compare=False)

    def serialize(self) -> bytes:
        return b"".join(line.render() for line in self.signatures) + self.payload


def _parse_line_body(body: bytes) -> SignatureLine:
    try:
        text = body.decode("ascii")
    except UnicodeDecodeError as err:
        raise MalformedSignatureLine("signature line is not ASCII") from err
    if ":" in text:
        key_id, _, sig_b64 = text.partition(":")
        _validate_key_id(key_id)
    else:
        key_id, sig_b64 = None, text
    if not sig_b64:
        raise MalformedSignatureLine("empty signature field")
    _validate_b64(sig_b64)
    return SignatureLine(sig_b64=sig_b64, key_id=key_id)


def parse_envelope(file_bytes: bytes) -> SignatureEnvelope:
    """Split a file into its signature lines and untouched payload.

    Consumes the maximal run of leading signature lines; everything after is
    payload, byte for byte. Zero signatures is a valid result. A leading line
    that carries the prefix but breaks the grammar (including a missing LF
    terminator) raises :class:`MalformedSignatureLine`.
    """
    lines = []
    starts = []
    pos = 0
    while file_bytes.startswith(SIGNATURE_PREFIX, pos):
        nl = file_bytes.find(b"\n", pos)
        if nl == -1:
            raise MalformedSignatureLine("signature line lacks a LF terminator")
        raw_line = file_bytes[pos:nl]
        if raw_line.endswith(b"\r"):
            raw_line = raw_line[:-1]
        lines.append(_parse_line_body(raw_line[len(SIGNATURE_PREFIX):]))
        pos = nl + 1
        starts.append(pos)
    return SignatureEnvelope(
        signatures=tuple(lines),
        payload=file_bytes[pos:],
        _coverage_starts=tuple(starts),
    )


def attach_signature(file_bytes: bytes, line: SignatureLine) -> bytes:
    """Prepend a rendered signature line; the new line becomes the outermost layer."""
    return line.render() + file_bytes


def strip_signatures(file_bytes: bytes) -> bytes:
    """Payload with every leading signature line removed (verbatim bytes)."""
    return parse_envelope(file_bytes).payload


def covered_bytes(file_bytes: bytes, index: int) -> bytes:
    """Bytes covered by the signature at ``index``: everything after its line.

    Works on the original file bytes, so CRLF quirks inside inner signature
    lines stay exactly as signed.
    """
    envelope = parse_envelope(file_bytes)
    if not 0 <= index < len(envelope.signatures):
        raise IndexOutOfRange(
            f"signature index {index} out of range ({len(envelope.signatures)} present)"
        )
    return file_bytes[envelope._coverage_starts[index]:]
