"""Command-line tool: key generation, signing, verification, and the gateway.

Exit codes are pipeline-friendly: 0 success/Pass, 1 verification Fail (or a
corrupt envelope in inspect/strip), 2 usage or I/O errors. ``serve`` exits 1
on startup config failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from pathlib import Path
from typing import List, Optional

from . import gateway as gateway_mod
from .crypto import (
    KeyLoadError,
    UnsupportedKeySize,
    generate_keypair,
    load_private_key,
    load_public_key,
    sha256_digest,
    sign_payload,
)
from .envelope import (
    MalformedSignatureLine,
    attach_signature,
    covered_bytes,
    parse_envelope,
    strip_signatures,
)
from .trust import TrustRule, verify_resource

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_USAGE = 2

# Ad-hoc rules built by `verify` are not bound to any real URL.
_CLI_RULE_PATTERN = "https://cli.invalid/*"


def _err(message: str) -> None:
    print(f"sigscript: {message}", file=sys.stderr)


def _read_file(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as err:
        raise SystemExit(_io_error(f"cannot read {path}: {err}"))


def _io_error(message: str) -> int:
    _err(message)
    return EXIT_USAGE


def _write_atomic(path: Path, data: bytes, mode: Optional[int] = None) -> None:
    fd, tmp_name = tempfile.mkstemp(dir=str(path.parent or Path(".")), prefix=".tmp-")
    try:
        with os.fdopen(fd, "wb") as tmp:
            tmp.write(data)
        if mode is not None:
            os.chmod(tmp_name, mode)
        os.replace(tmp_name, path)
    except BaseException:
        try:
            os.unlink(tmp_name)
        except OSError:
            pass
        raise


def _write_output(data: bytes, out: Optional[str]) -> None:
    if out is None:
        sys.stdout.buffer.write(data)
        sys.stdout.buffer.flush()
    else:
        _write_atomic(Path(out), data)


def cmd_keygen(args: argparse.Namespace) -> int:
    for target in (args.out_priv, args.out_pub):
        if Path(target).exists() and not args.force:
            return _io_error(f"{target} exists, refusing to overwrite (use --force)")
    try:
        pair = generate_keypair(args.bits, key_id=args.key_id)
    except (UnsupportedKeySize, ValueError) as err:
        return _io_error(str(err))
    try:
        _write_atomic(Path(args.out_priv), pair.private.to_pem(), mode=0o600)
        _write_atomic(Path(args.out_pub), pair.public.to_pem())
    except OSError as err:
        return _io_error(f"cannot write key files: {err}")
    print(f"wrote {args.out_priv} (private, {args.bits} bits) and {args.out_pub}", file=sys.stderr)
    return EXIT_OK


def cmd_sign(args: argparse.Namespace) -> int:
    try:
        priv = load_private_key(args.key, key_id=args.key_id)
    except (KeyLoadError, ValueError) as err:
        return _io_error(str(err))
    data = _read_file(args.input)
    signed = attach_signature(data, sign_payload(priv, data))
    try:
        _write_output(signed, args.output)
    except OSError as err:
        return _io_error(f"cannot write output: {err}")
    return EXIT_OK


def cmd_verify(args: argparse.Namespace) -> int:
    if not args.pub and args.legacy_digest is None:
        return _io_error("need at least one --pub or a --legacy-digest")
    try:
        keys = tuple(load_public_key(p) for p in args.pub)
    except KeyLoadError as err:
        return _io_error(str(err))
    try:
        rule = TrustRule(
            url_pattern=_CLI_RULE_PATTERN,
            pinned_keys=keys,
            required_signatures=args.require,
            legacy_digest=args.legacy_digest,
        )
    except ValueError as err:
        return _io_error(str(err))

    data = _read_file(args.file)
    verdict = verify_resource(rule, data)
    if args.json:
        print(json.dumps(verdict.to_dict()))
    if verdict.passed:
        keys_note = f", keys={','.join(verdict.satisfied_key_ids)}" if verdict.satisfied_key_ids else ""
        _err(f"verdict: pass (mode={verdict.mode}{keys_note})")
        return EXIT_OK
    _err(f"verdict: fail (reason={verdict.reason.value})")
    return EXIT_FAIL


def cmd_digest(args: argparse.Namespace) -> int:
    data = _read_file(args.file)
    print(sha256_digest(data).hex)
    return EXIT_OK


def cmd_inspect(args: argparse.Namespace) -> int:
    data = _read_file(args.file)
    try:
        env = parse_envelope(data)
    except MalformedSignatureLine as err:
        _err(f"corrupt signature line: {err}")
        return EXIT_FAIL
    count = len(env.signatures)
    print(f"{count} signature{'s' if count != 1 else ''}")
    for i, line in enumerate(env.signatures):
        print(
            f"layer {i}: key_id={line.key_id or '-'} "
            f"algorithm={line.algorithm} "
            f"sig_bytes={len(line.signature)} "
            f"covered_bytes={len(covered_bytes(data, i))}"
        )
    print(f"payload_bytes={len(env.payload)}")
    return EXIT_OK


def cmd_strip(args: argparse.Namespace) -> int:
    data = _read_file(args.file)
    try:
        payload = strip_signatures(data)
    except MalformedSignatureLine as err:
        _err(f"corrupt signature line: {err}")
        return EXIT_FAIL
    try:
        _write_output(payload, args.output)
    except OSError as err:
        return _io_error(f"cannot write output: {err}")
    return EXIT_OK


def cmd_serve(args: argparse.Namespace) -> int:
    config_path = args.config or os.environ.get("SIGSCRIPT_CONFIG")
    if not config_path:
        _err("no config: pass --config or set SIGSCRIPT_CONFIG")
        return 1
    try:
        config = gateway_mod.GatewayConfig.from_file(config_path)
        return gateway_mod.run(config)
    except (gateway_mod.GatewayConfigError, KeyLoadError, OSError) as err:
        _err(f"gateway startup failed: {err}")
        return 1
    except Exception as err:  # PolicyParseError et al. carry their own context
        _err(f"gateway startup failed: {err}")
        return 1


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="sigscript",
        description="Sign and verify scripts carrying first-line signature comments.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("keygen", help="generate an RSA key pair as PEM files")
    p.add_argument("--bits", type=int, choices=(2048, 3072, 4096), default=2048)
    p.add_argument("--out-priv", required=True, metavar="PATH")
    p.add_argument("--out-pub", required=True, metavar="PATH")
    p.add_argument("--key-id", default=None)
    p.add_argument("--force", action="store_true", help="overwrite existing files")
    p.set_defaults(func=cmd_keygen)

    p = sub.add_parser("sign", help="prepend a signature line to a file")
    p.add_argument("--key", required=True, metavar="PRIV.pem")
    p.add_argument("--key-id", default=None)
    p.add_argument("input", metavar="IN")
    p.add_argument("-o", "--output", default=None, metavar="OUT")
    p.set_defaults(func=cmd_sign)

    p = sub.add_parser("verify", help="verify a file against public keys or a digest")
    p.add_argument("--pub", action="append", default=[], metavar="PUB.pem")
    p.add_argument("--require", type=int, default=None, metavar="K",
                   help="signatures required (default 1 when keys are given)")
    p.add_argument("--legacy-digest", default=None, metavar="HEX")
    p.add_argument("--json", action="store_true", help="machine-readable verdict on stdout")
    p.add_argument("file", metavar="FILE")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("digest", help="print the SHA-256 of a file")
    p.add_argument("file", metavar="FILE")
    p.set_defaults(func=cmd_digest)

    p = sub.add_parser("inspect", help="list signature layers without verifying")
    p.add_argument("file", metavar="FILE")
    p.set_defaults(func=cmd_inspect)

    p = sub.add_parser("strip", help="remove all signature lines")
    p.add_argument("file", metavar="FILE")
    p.add_argument("-o", "--output", default=None, metavar="OUT")
    p.set_defaults(func=cmd_strip)

    p = sub.add_parser("serve", help="run the verifying gateway")
    p.add_argument("--config", default=None, metavar="PATH")
    p.set_defaults(func=cmd_serve)

    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    try:
        return args.func(args)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else EXIT_USAGE
    except KeyboardInterrupt:
        return 130


if __name__ == "__main__":
    sys.exit(main())
