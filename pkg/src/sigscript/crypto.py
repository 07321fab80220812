"""Digesting, RSA key handling, and the sign/verify primitives.

Signatures are RSASSA-PKCS1-v1_5 over SHA-256 of the covered bytes, via the
``cryptography`` package (OpenSSL). PKCS#1 v1.5 signing is deterministic:
same key + same bytes -> identical signature. Verification is strict; any
malformed or mismatched signature is a clean ``False``, never an exception.

Key files are PEM: private keys as PKCS#8 (``BEGIN PRIVATE KEY``), public
keys as SubjectPublicKeyInfo (``BEGIN PUBLIC KEY``). A key id, when used, is
carried alongside the key (CLI flag or policy field), not inside the PEM.
"""

from __future__ import annotations

import hashlib
from dataclasses import dataclass
from pathlib import Path
from typing import Optional, Union

from cryptography.exceptions import InvalidSignature
from cryptography.hazmat.primitives import hashes, serialization
from cryptography.hazmat.primitives.asymmetric import padding, rsa

from .envelope import SignatureLine, _validate_key_id

SUPPORTED_KEY_BITS = (2048, 3072, 4096)
_PUBLIC_EXPONENT = 65537


class UnsupportedKeySize(ValueError):
    """Key size outside the supported set (2048/3072/4096 bits)."""


class KeyLoadError(ValueError):
    """PEM file unreadable, unparsable, or not an acceptable RSA key."""


class KeyInvalid(ValueError):
    """Key object unusable for the requested operation."""


@dataclass(frozen=True)
class Digest:
    """A SHA-256 digest, exactly 32 bytes."""

    data: bytes

    def __post_init__(self) -> None:
        if len(self.data) != 32:
            raise ValueError(f"SHA-256 digest must be 32 bytes, got {len(self.data)}")

    @property
    def hex(self) -> str:
        return self.data.hex()


def sha256_digest(data: bytes) -> Digest:
    return Digest(hashlib.sha256(data).digest())


def _check_bits(bits: int) -> None:
    if bits not in SUPPORTED_KEY_BITS:
        raise UnsupportedKeySize(
            f"key size {bits} not supported (choose one of {SUPPORTED_KEY_BITS})"
        )


@dataclass(frozen=True)
class PublicKey:
    key: rsa.RSAPublicKey
    key_id: Optional[str] = None

    def __post_init__(self) -> None:
        _check_bits(self.key.key_size)
        if self.key_id is not None:
            _validate_key_id(self.key_id)

    @property
    def bits(self) -> int:
        return self.key.key_size

    @property
    def signature_size(self) -> int:
        """Signature length in bytes forced by the modulus."""
        return self.key.key_size // 8

    @property
    def fingerprint(self) -> str:
        """Short stable identifier: sha256 of the SPKI DER, first 16 hex chars."""
        der = self.key.public_bytes(
            serialization.Encoding.DER,
            serialization.PublicFormat.SubjectPublicKeyInfo,
        )
        return hashlib.sha256(der).hexdigest()[:16]

    @property
    def effective_id(self) -> str:
        """key_id when assigned, else the fingerprint."""
        return self.key_id if self.key_id is not None else self.fingerprint

    def to_pem(self) -> bytes:
        return self.key.public_bytes(
            serialization.Encoding.PEM,
            serialization.PublicFormat.SubjectPublicKeyInfo,
        )


@dataclass(frozen=True)
class PrivateKey:
    key: rsa.RSAPrivateKey
    key_id: Optional[str] = None

    def __post_init__(self) -> None:
        _check_bits(self.key.key_size)
        if self.key_id is not None:
            _validate_key_id(self.key_id)

    @property
    def bits(self) -> int:
        return self.key.key_size

    def public_key(self) -> PublicKey:
        return PublicKey(self.key.public_key(), key_id=self.key_id)

    def to_pem(self) -> bytes:
        return self.key.private_bytes(
            serialization.Encoding.PEM,
            serialization.PrivateFormat.PKCS8,
            serialization.NoEncryption(),
        )


@dataclass(frozen=True)
class KeyPair:
    private: PrivateKey
    public: PublicKey


def generate_keypair(bits: int, key_id: Optional[str] = None) -> KeyPair:
    _check_bits(bits)
    key = rsa.generate_private_key(public_exponent=_PUBLIC_EXPONENT, key_size=bits)
    private = PrivateKey(key, key_id=key_id)
    return KeyPair(private=private, public=private.public_key())


def sign_payload(priv: PrivateKey, covered: bytes) -> SignatureLine:
    """Sign ``covered`` bytes; key_id is copied from the key onto the line."""
    try:
        raw = priv.key.sign(covered, padding.PKCS1v15(), hashes.SHA256())
    except Exception as err:  # pragma: no cover - corrupt key material
        raise KeyInvalid(f"signing failed: {err}") from err
    return SignatureLine.from_signature(raw, key_id=priv.key_id)


def verify_payload(pub: PublicKey, covered: bytes, line: SignatureLine) -> bool:
    """True iff ``line`` is a valid RSASSA-PKCS1-v1_5/SHA-256 signature over ``covered``."""
    raw = line.signature
    if len(raw) != pub.signature_size:
        return False
    try:
        pub.key.verify(raw, covered, padding.PKCS1v15(), hashes.SHA256())
        return True
    except InvalidSignature:
        return False
    except Exception:
        return False


def load_private_key(path: Union[str, Path], key_id: Optional[str] = None) -> PrivateKey:
    pem = _read_key_file(path)
    try:
        key = serialization.load_pem_private_key(pem, password=None)
    except Exception as err:
        raise KeyLoadError(f"{path}: not a readable PEM private key ({err})") from err
    if not isinstance(key, rsa.RSAPrivateKey):
        raise KeyLoadError(f"{path}: not an RSA private key")
    try:
        return PrivateKey(key, key_id=key_id)
    except UnsupportedKeySize as err:
        raise KeyLoadError(f"{path}: {err}") from err


def load_public_key(path: Union[str, Path], key_id: Optional[str] = None) -> PublicKey:
    pem = _read_key_file(path)
    try:
        key = serialization.load_pem_public_key(pem)
    except Exception as err:
        raise KeyLoadError(f"{path}: not a readable PEM public key ({err})") from err
    if not isinstance(key, rsa.RSAPublicKey):
        raise KeyLoadError(f"{path}: not an RSA public key")
    try:
        return PublicKey(key, key_id=key_id)
    except UnsupportedKeySize as err:
        raise KeyLoadError(f"{path}: {err}") from err


def _read_key_file(path: Union[str, Path]) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as err:
        raise KeyLoadError(f"{path}: cannot read key file ({err})") from err
