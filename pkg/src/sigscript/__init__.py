"""Integrity toolchain for third-party scripts carrying first-line signature comments.

Providers sign with `sigscript sign`; consumers verify with the CLI, the
verifying gateway, or the browser loader before a single byte is treated as
code.
"""

from .envelope import (
    ALGORITHM_RSA_SHA256,
    MalformedSignatureLine,
    SignatureEnvelope,
    SignatureLine,
    attach_signature,
    covered_bytes,
    parse_envelope,
    strip_signatures,
)
from .crypto import (
    Digest,
    KeyLoadError,
    KeyPair,
    PrivateKey,
    PublicKey,
    UnsupportedKeySize,
    generate_keypair,
    load_private_key,
    load_public_key,
    sha256_digest,
    sign_payload,
    verify_payload,
)
from .trust import (
    FailureReason,
    NoMatchingRule,
    PolicyParseError,
    TrustPolicy,
    TrustRule,
    VerificationVerdict,
    load_policy,
    match_rule,
    verify_resource,
)

__version__ = "0.1.0"

__all__ = [
    "ALGORITHM_RSA_SHA256",
    "Digest",
    "FailureReason",
    "KeyLoadError",
    "KeyPair",
    "MalformedSignatureLine",
    "NoMatchingRule",
    "PolicyParseError",
    "PrivateKey",
    "PublicKey",
    "SignatureEnvelope",
    "SignatureLine",
    "TrustPolicy",
    "TrustRule",
    "UnsupportedKeySize",
    "VerificationVerdict",
    "attach_signature",
    "covered_bytes",
    "generate_keypair",
    "load_policy",
    "load_private_key",
    "load_public_key",
    "match_rule",
    "parse_envelope",
    "sha256_digest",
    "sign_payload",
    "strip_signatures",
    "verify_payload",
    "verify_resource",
]
