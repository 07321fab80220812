#!/usr/bin/env python3
"""Regenerate the shared conformance corpus by driving the sigscript CLI.

Every expected verdict in the manifest is produced by `sigscript verify
--json`, never written by hand; consumers (e.g. the browser loader) must
reproduce these verdicts exactly.

Usage: python3 tools/make_conformance.py [OUT_DIR]   (default: conformance/)
"""

import json
import shutil
import subprocess
import sys
from pathlib import Path

CLI = [sys.executable, "-m", "sigscript"]


def run(*args, expect=0):
    proc = subprocess.run([*CLI, *args], capture_output=True, text=True)
    if expect is not None and proc.returncode != expect:
        raise SystemExit(f"command {' '.join(args)} exited {proc.returncode}: {proc.stderr}")
    return proc


def cli_verdict(path, pub=None, legacy_digest=None):
    args = ["verify", "--json"]
    if pub:
        args += ["--pub", str(pub)]
    if legacy_digest:
        args += ["--legacy-digest", legacy_digest]
    proc = run(*args, str(path), expect=None)
    if proc.returncode not in (0, 1):
        raise SystemExit(f"verify errored on {path}: {proc.stderr}")
    return json.loads(proc.stdout)


def main():
    out = Path(sys.argv[1]) if len(sys.argv) > 1 else Path(__file__).resolve().parents[1] / "conformance"
    if out.exists():
        shutil.rmtree(out)
    keys = out / "keys"
    vectors = out / "vectors"
    keys.mkdir(parents=True)
    vectors.mkdir()

    for name in ("signer1", "signer2"):
        run(
            "keygen",
            "--bits", "2048",
            "--out-priv", str(keys / f"{name}.priv.pem"),
            "--out-pub", str(keys / f"{name}.pub.pem"),
        )
    priv1, pub1 = keys / "signer1.priv.pem", keys / "signer1.pub.pem"
    priv2 = keys / "signer2.priv.pem"

    payload = (
        b"/*! demo-widget 1.0 */\n"
        b"(function (root) {\n"
        b"  root.demoWidget = { version: '1.0', answer: function () { return 42; } };\n"
        b"})(globalThis);\n"
    )
    utf8_payload = "// localized 例え ✓ \U0001f512\nconst label = 'élément';\n".encode("utf-8")

    plain = vectors / "plain.js"
    plain.write_bytes(payload)

    def sign(src, dest, key, key_id=None):
        args = ["sign", "--key", str(key)]
        if key_id:
            args += ["--key-id", key_id]
        run(*args, str(src), "-o", str(dest))
        return dest

    signed_ok = sign(plain, vectors / "signed-ok.js", priv1)
    sign(plain, vectors / "signed-wrong-key.js", priv2)
    sign(signed_ok, vectors / "two-layer-outer-valid.js", priv2)  # inner=signer1
    inner2 = sign(plain, vectors / "_tmp_inner2.js", priv2)
    sign(inner2, vectors / "two-layer-inner-hidden.js", priv1)  # outer=signer1
    inner2.unlink()
    sign(plain, vectors / "keyid-labeled.js", priv1, key_id="signer1")

    tampered_payload = bytearray(signed_ok.read_bytes())
    tampered_payload[-10] ^= 0x20
    (vectors / "tampered-payload.js").write_bytes(bytes(tampered_payload))

    signed = signed_ok.read_bytes()
    line_end = signed.index(b"\n")
    sig_line = bytearray(signed[:line_end])
    pos = len(b"//JSSignature:") + 5
    sig_line[pos] = ord("B") if sig_line[pos] != ord("B") else ord("C")
    (vectors / "tampered-sig-line.js").write_bytes(bytes(sig_line) + signed[line_end:])

    crlf = signed[:line_end] + b"\r" + signed[line_end:]
    (vectors / "crlf-sig-line.js").write_bytes(crlf)

    (vectors / "malformed-line.js").write_bytes(b"//JSSignature:%%%not-base64%%%\n" + payload)
    (vectors / "unsigned.js").write_bytes(payload)
    (vectors / "empty.js").write_bytes(b"")
    (vectors / "comment-first-payload.js").write_bytes(b"// looks like a comment\n" + payload)
    sign(vectors / "comment-first-payload.js", vectors / "signed-comment-payload.js", priv1)

    utf8_plain = vectors / "utf8-unsigned.js"
    utf8_plain.write_bytes(utf8_payload)
    sign(utf8_plain, vectors / "utf8-signed.js", priv1)
    utf8_plain.unlink()

    digest_of = lambda p: run("digest", str(p)).stdout.strip()

    cases = [
        ("signed-ok", "signed-ok.js", pub1, None),
        ("signed-wrong-key", "signed-wrong-key.js", pub1, None),
        ("two-layer-outer-valid", "two-layer-outer-valid.js", pub1, None),
        ("two-layer-inner-hidden", "two-layer-inner-hidden.js", pub1, None),
        ("keyid-labeled", "keyid-labeled.js", pub1, None),
        ("tampered-payload", "tampered-payload.js", pub1, None),
        ("tampered-sig-line", "tampered-sig-line.js", pub1, None),
        ("crlf-sig-line", "crlf-sig-line.js", pub1, None),
        ("malformed-line", "malformed-line.js", pub1, None),
        ("unsigned-with-key", "unsigned.js", pub1, None),
        ("empty-with-key", "empty.js", pub1, None),
        ("signed-comment-payload", "signed-comment-payload.js", pub1, None),
        ("utf8-signed", "utf8-signed.js", pub1, None),
        ("legacy-ok", "unsigned.js", None, digest_of(vectors / "unsigned.js")),
        ("legacy-mismatch", "unsigned.js", None, "0" * 64),
        ("legacy-ignored-when-signed", "signed-wrong-key.js", pub1,
         digest_of(vectors / "signed-wrong-key.js")),
    ]

    manifest = {"generator": "sigscript CLI", "vectors": []}
    for name, file_name, pub, legacy in cases:
        expected = cli_verdict(vectors / file_name, pub=pub, legacy_digest=legacy)
        entry = {"name": name, "file": f"vectors/{file_name}", "expected": expected}
        if pub:
            entry["public_key"] = f"keys/{Path(pub).name}"
        if legacy:
            entry["legacy_digest"] = legacy
        manifest["vectors"].append(entry)

    (out / "manifest.json").write_text(json.dumps(manifest, indent=2) + "\n")
    print(f"wrote {len(manifest['vectors'])} vectors to {out}")


if __name__ == "__main__":
    main()
