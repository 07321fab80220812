import base64

import pytest
from hypothesis import assume, given, settings
from hypothesis import strategies as st

from sigscript.envelope import (
    SIGNATURE_PREFIX,
    IndexOutOfRange,
    MalformedSignatureLine,
    SignatureEnvelope,
    SignatureLine,
    attach_signature,
    covered_bytes,
    parse_envelope,
    strip_signatures,
)


def make_line(raw=b"\x01" * 256, key_id=None):
    return SignatureLine.from_signature(raw, key_id=key_id)


FAKE_SIG_B64 = base64.b64encode(b"\x5a" * 256).decode()


class TestParse:
    def test_single_signature_before_minified_library(self):
        data = (
            f"//JSSignature:{FAKE_SIG_B64}\n".encode()
            + b"/*! jQuery v2.1.1 */\n!function(a,b){}();\n"
        )
        env = parse_envelope(data)
        assert len(env.signatures) == 1
        assert env.payload.startswith(b"/*! jQuery")

    def test_unsigned_file(self):
        env = parse_envelope(b"var x=1;")
        assert env.signatures == ()
        assert env.payload == b"var x=1;"

    def test_bad_base64_is_corruption_not_unsigned(self):
        with pytest.raises(MalformedSignatureLine):
            parse_envelope(b"//JSSignature:!!!\ncode")

    def test_empty_file(self):
        env = parse_envelope(b"")
        assert env.signatures == ()
        assert env.payload == b""

    def test_payload_comments_not_consumed(self):
        env = parse_envelope(b"// plain comment\nvar x;\n")
        assert env.signatures == ()
        assert env.payload == b"// plain comment\nvar x;\n"

    def test_key_id_segment(self):
        env = parse_envelope(f"//JSSignature:cdn-01:{FAKE_SIG_B64}\nx".encode())
        assert env.signatures[0].key_id == "cdn-01"
        assert env.signatures[0].sig_b64 == FAKE_SIG_B64

    def test_unterminated_signature_line(self):
        with pytest.raises(MalformedSignatureLine):
            parse_envelope(f"//JSSignature:{FAKE_SIG_B64}".encode())

    def test_crlf_tolerated_on_signature_line_only(self):
        data = f"//JSSignature:{FAKE_SIG_B64}\r\npayload\r\n".encode()
        env = parse_envelope(data)
        assert env.signatures[0].sig_b64 == FAKE_SIG_B64
        assert env.payload == b"payload\r\n"

    @pytest.mark.parametrize(
        "body",
        [
            b"",  # no signature text at all
            b"x" * 33 + b":" + FAKE_SIG_B64.encode(),  # key id too long
            b"bad id:" + FAKE_SIG_B64.encode(),  # key id charset
            b"a:b:" + FAKE_SIG_B64.encode(),  # second colon lands in base64
            b"AAA",  # not a multiple of 4
            b"A A A A=",  # whitespace
            b"AAA=AAAA",  # padding inside
            b"-_-_",  # url-safe alphabet
            b"AC==",  # non-canonical: set padding bits
            "é:AAAA".encode("utf-8"),  # non-ASCII
        ],
    )
    def test_grammar_violations(self, body):
        with pytest.raises(MalformedSignatureLine):
            parse_envelope(b"//JSSignature:" + body + b"\ncode")

    def test_prefix_maximality_stops_at_first_non_signature_line(self):
        line = make_line()
        data = line.render() + b"// not a signature\n" + line.render()
        env = parse_envelope(data)
        assert len(env.signatures) == 1
        assert env.payload == b"// not a signature\n" + line.render()


class TestAttachStrip:
    def test_attach_prepends(self):
        line = make_line()
        assert attach_signature(b"a", line) == line.render() + b"a"

    def test_attach_twice_outermost_is_latest(self):
        first = make_line(b"\x01" * 256, key_id="a")
        second = make_line(b"\x02" * 256, key_id="b")
        data = attach_signature(attach_signature(b"payload", first), second)
        env = parse_envelope(data)
        assert [l.key_id for l in env.signatures] == ["b", "a"]
        assert env.payload == b"payload"

    def test_strip_inverts_attach(self):
        payload = b"function f() { return 42; }\n"
        assert strip_signatures(attach_signature(payload, make_line())) == payload

    def test_strip_unsigned_is_identity(self):
        assert strip_signatures(b"var x=1;") == b"var x=1;"

    def test_strip_removes_all_layers(self):
        data = attach_signature(attach_signature(b"p", make_line()), make_line(b"\x07" * 256))
        assert strip_signatures(data) == b"p"


class TestCoveredBytes:
    def test_single_layer_covers_payload(self):
        data = attach_signature(b"payload", make_line())
        assert covered_bytes(data, 0) == b"payload"

    def test_onion_layering(self):
        inner = make_line(b"\x01" * 256, key_id="inner")
        outer = make_line(b"\x02" * 256, key_id="outer")
        data = attach_signature(attach_signature(b"payload", inner), outer)
        assert covered_bytes(data, 0) == inner.render() + b"payload"
        assert covered_bytes(data, 1) == b"payload"

    def test_covered_preserves_inner_crlf(self):
        # An inner line that arrived with CRLF stays CRLF inside the outer scope.
        inner_raw = b"//JSSignature:" + FAKE_SIG_B64.encode() + b"\r\n"
        data = make_line().render() + inner_raw + b"p"
        assert covered_bytes(data, 0) == inner_raw + b"p"
        assert covered_bytes(data, 1) == b"p"

    def test_index_out_of_range(self):
        data = attach_signature(b"p", make_line())
        with pytest.raises(IndexOutOfRange):
            covered_bytes(data, 1)
        with pytest.raises(IndexOutOfRange):
            covered_bytes(data, -1)


class TestSignatureLine:
    def test_render_shape(self):
        line = make_line(key_id="k1")
        rendered = line.render()
        assert rendered.startswith(b"//JSSignature:k1:")
        assert rendered.endswith(b"\n")
        # comment-safety: single-line comment, no embedded terminators
        assert b"\n" not in rendered[:-1]
        assert b"\r" not in rendered

    def test_rejects_bad_key_id(self):
        with pytest.raises(ValueError):
            make_line(key_id="has space")
        with pytest.raises(ValueError):
            make_line(key_id="x" * 33)

    def test_rejects_unknown_algorithm(self):
        with pytest.raises(ValueError):
            SignatureLine(sig_b64=FAKE_SIG_B64, algorithm="DSA-SHA1")

    def test_signature_roundtrip(self):
        raw = bytes(range(256))
        assert make_line(raw).signature == raw


key_ids = st.one_of(
    st.none(),
    st.text(
        alphabet="ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789-_",
        min_size=1,
        max_size=32,
    ),
)
lines = st.builds(make_line, st.binary(min_size=1, max_size=300), key_ids)
payloads = st.binary(max_size=512)


@given(
    st.builds(
        lambda ls, p: SignatureEnvelope(signatures=tuple(ls), payload=p),
        st.lists(lines, max_size=3),
        payloads,
    )
)
@settings(max_examples=200)
def test_round_trip_property(envelope):
    assume(not envelope.payload.startswith(SIGNATURE_PREFIX))
    assert parse_envelope(envelope.serialize()) == envelope


@given(payloads, lines)
@settings(max_examples=200)
def test_payload_preservation_property(payload, line):
    assume(not payload.startswith(SIGNATURE_PREFIX))
    assert strip_signatures(attach_signature(payload, line)) == payload


@given(payloads, lines)
@settings(max_examples=100)
def test_attached_line_parses_as_outermost(payload, line):
    assume(not payload.startswith(SIGNATURE_PREFIX))
    env = parse_envelope(attach_signature(payload, line))
    assert env.signatures[0] == line
