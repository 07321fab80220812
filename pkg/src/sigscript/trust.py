"""Trust policy and the execute/block verdict.

A policy is a list of rules. Each rule governs a URL pattern and pins the
verification basis: public keys with a signature threshold, a legacy SHA-256
digest for unsigned resources, or both. Verification is fail-closed: every
path that is not an explicit signature-threshold or exact-digest success is a
Fail verdict with a machine-readable reason.

Signed mode takes precedence: a file carrying any parsed signature line is
never evaluated against the legacy digest.
"""

from __future__ import annotations

import enum
import json
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Optional, Tuple, Union
from urllib.parse import urlparse

from .crypto import KeyLoadError, PublicKey, load_public_key, sha256_digest, verify_payload
from .envelope import MalformedSignatureLine, covered_bytes, parse_envelope

MODE_SIGNED = "signed"
MODE_LEGACY = "legacy"


class NoMatchingRule(LookupError):
    """URL not governed by any rule; callers must refuse, not proxy openly."""


class PolicyParseError(ValueError):
    """Policy document malformed or violating a rule invariant."""


class FailureReason(str, enum.Enum):
    NO_MATCHING_RULE = "NoMatchingRule"
    SIGNATURE_MISSING = "SignatureMissing"
    SIGNATURE_INVALID = "SignatureInvalid"
    THRESHOLD_NOT_MET = "ThresholdNotMet"
    DIGEST_MISMATCH = "DigestMismatch"
    MALFORMED = "Malformed"


_HEX_DIGEST_LEN = 64
_HEX_CHARS = set("0123456789abcdef")


def _validate_pattern(pattern: str) -> None:
    wildcard = pattern.endswith("*")
    if "*" in (pattern[:-1] if wildcard else pattern):
        raise ValueError(f"pattern {pattern!r}: '*' is only allowed as the final character")
    prefix = pattern[:-1] if wildcard else pattern
    parsed = urlparse(prefix)
    if parsed.scheme not in ("http", "https") or not parsed.netloc:
        raise ValueError(f"pattern {pattern!r}: must be an absolute http(s) URL")
    if wildcard and not parsed.path:
        # Forbid host-prefix wildcards like https://cdn.x* which would also
        # match https://cdn.xevil.example/.
        raise ValueError(f"pattern {pattern!r}: wildcard requires a path after the host")


def _normalize_digest(value: str) -> str:
    digest = value.lower()
    if len(digest) != _HEX_DIGEST_LEN or not set(digest) <= _HEX_CHARS:
        raise ValueError(f"legacy digest must be {_HEX_DIGEST_LEN} hex chars")
    return digest


@dataclass(frozen=True)
class TrustRule:
    """Pinned verification basis for one URL pattern."""

    url_pattern: str
    pinned_keys: Tuple[PublicKey, ...] = ()
    required_signatures: Optional[int] = None  # default: 1 with keys, else 0
    legacy_digest: Optional[str] = None
    fallback_url: Optional[str] = None

    def __post_init__(self) -> None:
        _validate_pattern(self.url_pattern)
        if self.required_signatures is None:
            object.__setattr__(self, "required_signatures", 1 if self.pinned_keys else 0)
        if self.required_signatures < 0:
            raise ValueError("required_signatures must be >= 0")
        if self.required_signatures > len(self.pinned_keys):
            raise ValueError(
                "required_signatures exceeds the number of pinned keys "
                f"({self.required_signatures} > {len(self.pinned_keys)})"
            )
        if self.legacy_digest is not None:
            object.__setattr__(self, "legacy_digest", _normalize_digest(self.legacy_digest))
        if not self.pinned_keys and self.legacy_digest is None:
            raise ValueError("rule needs pinned keys or a legacy digest")
        if self.fallback_url is not None:
            parsed = urlparse(self.fallback_url)
            if not parsed.scheme or not parsed.netloc:
                raise ValueError(f"fallback_url {self.fallback_url!r} must be absolute")

    def matches(self, url: str) -> bool:
        if self.url_pattern.endswith("*"):
            return url.startswith(self.url_pattern[:-1])
        return url == self.url_pattern


@dataclass(frozen=True)
class TrustPolicy:
    """Immutable snapshot of rules; reloads swap in a whole new snapshot."""

    rules: Tuple[TrustRule, ...] = ()


@dataclass(frozen=True)
class VerificationVerdict:
    outcome: str  # "pass" | "fail"
    mode: Optional[str] = None  # "signed" | "legacy"
    satisfied_key_ids: Tuple[str, ...] = ()
    reason: Optional[FailureReason] = None

    @property
    def passed(self) -> bool:
        return self.outcome == "pass"

    def to_dict(self) -> Dict[str, object]:
        return {
            "outcome": self.outcome,
            "mode": self.mode,
            "satisfied_key_ids": list(self.satisfied_key_ids),
            "reason": self.reason.value if self.reason else None,
        }


def _verdict_pass(mode: str, key_ids: Tuple[str, ...] = ()) -> VerificationVerdict:
    return VerificationVerdict(outcome="pass", mode=mode, satisfied_key_ids=key_ids)

def _verdict_fail(reason: FailureReason, mode: Optional[str] = None) -> VerificationVerdict:
    return VerificationVerdict(outcome="fail", mode=mode, reason=reason)


def match_rule(policy: TrustPolicy, url: str) -> TrustRule:
    """Most specific matching rule: longest pattern wins, then declaration order."""
    best: Optional[TrustRule] = None
    for rule in policy.rules:
        if rule.matches(url) and (best is None or len(rule.url_pattern) > len(best.url_pattern)):
            best = rule
    if best is None:
        raise NoMatchingRule(f"no rule governs {url!r}")
    return best


def verify_resource(rule: TrustRule, file_bytes: bytes) -> VerificationVerdict:
    """Verdict for a resource under one rule. Never raises; failures are verdicts.

    Signed mode: each signature layer is checked over its covered bytes.
    Bare lines are tried against every pinned key; a line carrying a key id
    only against the key with that id. A pinned key can satisfy the threshold
    at most once. Threshold 0 is still evaluated as 1 here - signed mode never
    passes without at least one verified signature.
    """
    try:
        env = parse_envelope(file_bytes)
    except MalformedSignatureLine:
        return _verdict_fail(FailureReason.MALFORMED, MODE_SIGNED)

    if env.signatures:
        satisfied: Dict[int, str] = {}
        for i, line in enumerate(env.signatures):
            covered = covered_bytes(file_bytes, i)
            for j, key in enumerate(rule.pinned_keys):
                if j in satisfied:
                    continue
                if line.key_id is not None and key.key_id != line.key_id:
                    continue
                if verify_payload(key, covered, line):
                    satisfied[j] = key.effective_id
                    break
        needed = max(1, rule.required_signatures)
        if len(satisfied) >= needed:
            return _verdict_pass(MODE_SIGNED, tuple(satisfied.values()))
        if needed == 1:
            return _verdict_fail(FailureReason.SIGNATURE_INVALID, MODE_SIGNED)
        return _verdict_fail(FailureReason.THRESHOLD_NOT_MET, MODE_SIGNED)

    if rule.legacy_digest is not None:
        if sha256_digest(file_bytes).hex == rule.legacy_digest:
            return _verdict_pass(MODE_LEGACY)
        return _verdict_fail(FailureReason.DIGEST_MISMATCH, MODE_LEGACY)

    return _verdict_fail(FailureReason.SIGNATURE_MISSING, MODE_SIGNED)


# Policy file format: JSON, paths relative to the policy file.
# {"rules": [{"url_pattern": ..., "pinned_keys": ["k.pub.pem", ...],
#             "key_ids": [...], "required_signatures": 1,
#             "legacy_digest_sha256": ..., "fallback_url": ...}]}

def load_policy(path: Union[str, Path]) -> TrustPolicy:
    path = Path(path)
    try:
        raw = path.read_bytes()
    except OSError as err:
        raise PolicyParseError(f"{path}: cannot read policy file ({err})") from err
    return load_policy_data(raw, base_dir=path.parent)


def load_policy_data(document: bytes, base_dir: Union[str, Path] = ".") -> TrustPolicy:
    base_dir = Path(base_dir)
    try:
        doc = json.loads(document)
    except json.JSONDecodeError as err:
        raise PolicyParseError(f"policy is not valid JSON: {err}") from err
    if not isinstance(doc, dict) or not isinstance(doc.get("rules"), list):
        raise PolicyParseError('policy must be an object with a "rules" list')

    rules: List[TrustRule] = []
    for i, entry in enumerate(doc["rules"]):
        where = f"rules[{i}]"
        if not isinstance(entry, dict):
            raise PolicyParseError(f"{where}: rule must be an object")
        rules.append(_load_rule(entry, where, base_dir))
    return TrustPolicy(rules=tuple(rules))


def _load_rule(entry: dict, where: str, base_dir: Path) -> TrustRule:
    pattern = entry.get("url_pattern")
    if not isinstance(pattern, str):
        raise PolicyParseError(f"{where}.url_pattern: required string")

    key_paths = entry.get("pinned_keys", [])
    if not isinstance(key_paths, list) or not all(isinstance(p, str) for p in key_paths):
        raise PolicyParseError(f"{where}.pinned_keys: must be a list of file paths")
    key_ids = entry.get("key_ids")
    if key_ids is not None:
        if (
            not isinstance(key_ids, list)
            or len(key_ids) != len(key_paths)
            or not all(k is None or isinstance(k, str) for k in key_ids)
        ):
            raise PolicyParseError(
                f"{where}.key_ids: must align one-to-one with pinned_keys"
            )
    else:
        key_ids = [None] * len(key_paths)

    keys = []
    for key_path, key_id in zip(key_paths, key_ids):
        resolved = base_dir / key_path
        try:
            keys.append(load_public_key(resolved, key_id=key_id))
        except KeyLoadError:
            raise
        except ValueError as err:
            raise PolicyParseError(f"{where}.pinned_keys ({key_path}): {err}") from err

    required = entry.get("required_signatures")
    if required is not None and (not isinstance(required, int) or isinstance(required, bool)):
        raise PolicyParseError(f"{where}.required_signatures: must be an integer")

    legacy = entry.get("legacy_digest_sha256")
    if legacy is not None and not isinstance(legacy, str):
        raise PolicyParseError(f"{where}.legacy_digest_sha256: must be a hex string")
    fallback = entry.get("fallback_url")
    if fallback is not None and not isinstance(fallback, str):
        raise PolicyParseError(f"{where}.fallback_url: must be a string")

    try:
        return TrustRule(
            url_pattern=pattern,
            pinned_keys=tuple(keys),
            required_signatures=required,
            legacy_digest=legacy,
            fallback_url=fallback,
        )
    except ValueError as err:
        raise PolicyParseError(f"{where}: {err}") from err
