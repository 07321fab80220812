"""Acceptance suite: one test per release criterion, pass/fail line printed each.

Run with `pytest tests/test_acceptance.py -v -s` to see the report lines.
"""

import json
import random
import statistics
import time

import pytest
import requests

from sigscript.cli import main
from sigscript.crypto import sign_payload
from sigscript.envelope import attach_signature, parse_envelope
from sigscript.gateway import GatewayApp, GatewayConfig
from sigscript.trust import FailureReason, TrustRule, verify_resource

from reference_sha256 import sha256_reference_hex
from test_gateway import RunningGateway
from upstream import FakeUpstream


RESULTS = []  # echoed in the terminal summary by conftest


def report(name: str, ok: bool, detail: str = "") -> None:
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"ACCEPTANCE {name}: {status}{suffix}"
    RESULTS.append(line)
    print(line)
    assert ok, f"{name}{suffix}"


def make_js_fixture(size: int, seed: int = 0x82E) -> bytes:
    """Deterministic minified-library-lookalike of exactly `size` bytes."""
    rng = random.Random(seed)
    chunks = [b"/*! fixture v1.0 | (c) nobody */\n"]
    total = len(chunks[0])
    names = "abcdefghijklmnopqrstuvwxyz"
    while total < size:
        stmt = (
            f"var {rng.choice(names)}{rng.randrange(1000)}="
            f"function(a,b){{return a{rng.choice('+-*^&|')}b&{rng.randrange(0xFFFF)};}};"
        ).encode()
        chunks.append(stmt)
        total += len(stmt)
    blob = b"".join(chunks)[:size]
    return blob[:-1] + b"\n" if size > 0 else blob


FIXTURE_82_2_KIB = int(82.2 * 1024)  # the benchmark payload size


# -- criterion 1: round-trip completeness ------------------------------------

def test_round_trip_completeness(tmp_path, pem_dir):
    """1,000 random payloads (0 B..256 KiB): CLI sign then verify exits 0."""
    rng = random.Random(0xC1)
    key = str(pem_dir / "alpha.priv.pem")
    pub = str(pem_dir / "alpha.pub.pem")
    src = tmp_path / "payload.bin"
    signed = tmp_path / "payload.signed.bin"

    failures = 0
    for i in range(1000):
        size = rng.randrange(0, 256 * 1024 + 1)
        src.write_bytes(rng.randbytes(size))
        if main(["sign", "--key", key, str(src), "-o", str(signed)]) != 0:
            failures += 1
            continue
        if main(["verify", "--pub", pub, str(signed)]) != 0:
            failures += 1
    report("round-trip completeness", failures == 0, f"{1000 - failures}/1000 round trips")


# -- criterion 2: tamper soundness --------------------------------------------

def mutate(data: bytes, rng: random.Random) -> bytes:
    """One random single-bit flip or single-byte substitution (always a change)."""
    pos = rng.randrange(len(data))
    out = bytearray(data)
    if rng.random() < 0.5:
        out[pos] ^= 1 << rng.randrange(8)
    else:
        out[pos] = (out[pos] + rng.randrange(1, 256)) % 256
    return bytes(out)


def test_tamper_soundness(tmp_path, keypair_a, keypair_anon, pem_dir):
    """10,000 post-signing mutations (payload or signature line): 100% must fail."""
    rng = random.Random(0x7A3B)
    rule = TrustRule(url_pattern="https://cdn.x/*", pinned_keys=(keypair_a.public, keypair_anon.public))
    bases = []
    for size in (64, 1024, 8192):
        payload = rng.randbytes(size)
        for pair in (keypair_a, keypair_anon):  # labeled and bare lines
            bases.append(attach_signature(payload, sign_payload(pair.private, payload)))
        assert all(verify_resource(rule, base).passed for base in bases)

    survived = 0
    for _ in range(10_000):
        mutated = mutate(rng.choice(bases), rng)
        if verify_resource(rule, mutated).passed:
            survived += 1

    # spot-check the same property through the CLI surface
    pub_a = str(pem_dir / "alpha.pub.pem")
    pub_anon = str(pem_dir / "anon.pub.pem")
    target = tmp_path / "mutated.bin"
    for _ in range(100):
        target.write_bytes(mutate(rng.choice(bases), rng))
        if main(["verify", "--pub", pub_a, "--pub", pub_anon, str(target)]) == 0:
            survived += 1

    report("tamper soundness", survived == 0, f"{10_100 - survived}/10100 mutations rejected")


# -- criterion 3: digest oracle equivalence -----------------------------------

def test_digest_oracle_equivalence(tmp_path, capsys):
    """cmd_digest == independent SHA-256 on 1,000 random inputs + standard vectors."""
    rng = random.Random(0xD16)
    target = tmp_path / "input.bin"

    def cli_digest(data: bytes) -> str:
        target.write_bytes(data)
        assert main(["digest", str(target)]) == 0
        return capsys.readouterr().out.strip()

    mismatches = 0
    for data in (b"", b"abc"):
        if cli_digest(data) != sha256_reference_hex(data):
            mismatches += 1
    sizes = (
        [rng.randrange(0, 2048) for _ in range(850)]
        + [rng.randrange(2048, 16384) for _ in range(140)]
        + [rng.randrange(16384, 65536 + 1) for _ in range(10)]
    )
    for size in sizes:
        data = rng.randbytes(size)
        if cli_digest(data) != sha256_reference_hex(data):
            mismatches += 1
    report("digest oracle equivalence", mismatches == 0, "1002/1002 exact matches")


# -- criterion 4: verification latency ----------------------------------------

def test_verification_latency(keypair_a):
    """Median native verification of the 82.2 KiB fixture over 1,000 runs <= 30 ms."""
    payload = make_js_fixture(FIXTURE_82_2_KIB)
    assert len(payload) == FIXTURE_82_2_KIB
    signed = attach_signature(payload, sign_payload(keypair_a.private, payload))
    rule = TrustRule(url_pattern="https://cdn.x/*", pinned_keys=(keypair_a.public,))

    for _ in range(10):  # warmup
        assert verify_resource(rule, signed).passed

    samples = []
    for _ in range(1000):
        start = time.perf_counter()
        verdict = verify_resource(rule, signed)
        samples.append(time.perf_counter() - start)
        assert verdict.passed
    median_ms = statistics.median(samples) * 1000
    report(
        "verification latency",
        median_ms <= 30.0,
        f"median {median_ms:.3f} ms over 1000 runs, gate 30 ms",
    )


# -- criterion 5: gateway fail-closed ------------------------------------------

def test_gateway_fail_closed(tmp_path, keypair_a, pem_dir):
    """>=500 requests against a tampering upstream: no `pass` verdict ever carries
    non-verifying bytes; tampered+fallback serves the fallback; ungoverned 404s."""
    rng = random.Random(0x6A7E)
    payload = make_js_fixture(4096, seed=5)
    clean = attach_signature(payload, sign_payload(keypair_a.private, payload))
    fallback_bytes = b"/* trusted local copy */\n"

    upstream = FakeUpstream()
    fallback_dir = tmp_path / "fallback"
    fallback_dir.mkdir()
    (fallback_dir / "lib.js").write_bytes(fallback_bytes)

    policy = {
        "rules": [
            {
                "url_pattern": upstream.url("/plain.js"),
                "pinned_keys": [str(pem_dir / "alpha.pub.pem")],
                "key_ids": ["alpha"],
                "required_signatures": 1,
            },
            {
                "url_pattern": upstream.url("/withfb.js"),
                "pinned_keys": [str(pem_dir / "alpha.pub.pem")],
                "key_ids": ["alpha"],
                "required_signatures": 1,
                "fallback_url": "https://local.site/lib.js",
            },
        ]
    }
    (tmp_path / "policy.json").write_text(json.dumps(policy))
    (tmp_path / "config.json").write_text(
        json.dumps(
            {
                "listen_addr": "127.0.0.1:0",
                "policy_path": "policy.json",
                "cache_ttl_seconds": 0,
                "fetch_timeout_seconds": 5,
                "max_body_bytes": 1048576,
                "fallback_root": str(fallback_dir),
            }
        )
    )
    gw = RunningGateway(GatewayApp(GatewayConfig.from_file(tmp_path / "config.json")))
    rule = TrustRule(url_pattern="https://any.x/*", pinned_keys=(keypair_a.public,))

    violations = []
    totals = {"requests": 0, "pass": 0, "fallback": 0, "blocked": 0, "ungoverned": 0}
    try:
        for i in range(620):
            totals["requests"] += 1
            if i % 6 == 5:
                resp = requests.get(
                    f"{gw.base}/v1/resource",
                    params={"url": upstream.url(f"/ungoverned-{i}.js")},
                )
                totals["ungoverned"] += 1
                if resp.status_code != 404:
                    violations.append(f"ungoverned url not refused (status {resp.status_code})")
                continue

            path = "/withfb.js" if i % 2 else "/plain.js"
            tamper = rng.choice(["clean", "bitflip", "strip", "swap", "garbage"])
            if tamper == "clean":
                body = clean
            elif tamper == "bitflip":
                body = mutate(clean, rng)
            elif tamper == "strip":
                body = payload  # signature line removed entirely
            elif tamper == "swap":
                evil = payload + b"window.exfiltrate();\n"
                body = attach_signature(evil, parse_envelope(clean).signatures[0])
            else:
                body = rng.randbytes(512)
            upstream.set_static(path, body)

            resp = requests.get(f"{gw.base}/v1/resource", params={"url": upstream.url(path)})
            verdict = resp.headers.get("X-Sig-Verdict", "")

            if verdict.startswith("pass"):
                totals["pass"] += 1
                if not verify_resource(rule, resp.content).passed:
                    violations.append(f"pass verdict with non-verifying bytes (mode {tamper})")
                if tamper != "clean" and resp.content != clean:
                    violations.append(f"pass verdict for tampered upstream (mode {tamper})")
            elif verdict.startswith("fallback"):
                totals["fallback"] += 1
                if path != "/withfb.js":
                    violations.append("fallback served for a rule without fallback")
                if resp.content != fallback_bytes:
                    violations.append("fallback response is not the local fallback bytes")
            else:
                totals["blocked"] += 1
                if resp.status_code not in (403, 502):
                    violations.append(f"unexpected status {resp.status_code} for {tamper}")
                if tamper == "clean":
                    violations.append("clean upstream was blocked")

            if tamper == "clean" and not verdict.startswith("pass"):
                violations.append("clean upstream did not produce a pass verdict")
            if tamper != "clean":
                if path == "/withfb.js" and not verdict.startswith("fallback"):
                    violations.append(f"tampered ({tamper}) with fallback rule served {verdict!r}")
                if path == "/plain.js" and resp.status_code != 403:
                    violations.append(f"tampered ({tamper}) without fallback gave {resp.status_code}")
    finally:
        gw.close()
        upstream.close()

    # sanity: the adversarial mix actually exercised every branch
    assert totals["requests"] >= 500
    assert min(totals["pass"], totals["fallback"], totals["blocked"], totals["ungoverned"]) > 0
    report(
        "gateway fail-closed",
        not violations,
        f"{totals['requests']} requests, {totals['pass']} pass / {totals['fallback']} fallback / "
        f"{totals['blocked']} blocked / {totals['ungoverned']} refused; "
        + (f"violations: {violations[:3]}" if violations else "0 violations"),
    )


# -- criterion 6: multi-signature threshold -------------------------------------

def test_multi_signature_threshold(keypair_a, keypair_b):
    """2-of-2 passes; removing either layer fails with ThresholdNotMet."""
    payload = make_js_fixture(2048, seed=6)
    inner_signed = attach_signature(payload, sign_payload(keypair_a.private, payload))
    both = attach_signature(inner_signed, sign_payload(keypair_b.private, inner_signed))
    rule = TrustRule(
        url_pattern="https://cdn.x/*",
        pinned_keys=(keypair_a.public, keypair_b.public),
        required_signatures=2,
    )

    ok = verify_resource(rule, both).passed

    outer_line, inner_line = parse_envelope(both).signatures
    without_outer = inner_signed
    without_inner = attach_signature(payload, outer_line)

    v_outer = verify_resource(rule, without_outer)
    v_inner = verify_resource(rule, without_inner)
    ok = ok and not v_outer.passed and v_outer.reason is FailureReason.THRESHOLD_NOT_MET
    ok = ok and not v_inner.passed and v_inner.reason is FailureReason.THRESHOLD_NOT_MET
    report(
        "multi-signature threshold",
        ok,
        f"2-of-2 pass; minus outer -> {v_outer.reason.value}; minus inner -> {v_inner.reason.value}",
    )


# -- criterion 7: legacy digest mode --------------------------------------------

def test_legacy_mode(tmp_path):
    """Unsigned fixture with pinned digest passes; one-byte change fails DigestMismatch."""
    payload = make_js_fixture(4096, seed=7)
    rule = TrustRule(
        url_pattern="https://cdn.x/*",
        legacy_digest=sha256_reference_hex(payload),  # pinned via the independent oracle
    )
    good = verify_resource(rule, payload)

    corrupted = bytearray(payload)
    corrupted[100] ^= 0xFF
    bad = verify_resource(rule, bytes(corrupted))

    ok = (
        good.passed
        and good.mode == "legacy"
        and not bad.passed
        and bad.reason is FailureReason.DIGEST_MISMATCH
    )
    report(
        "legacy digest mode",
        ok,
        f"pinned digest pass; one-byte change -> {bad.reason.value}",
    )
