import pytest

from sigscript.crypto import generate_keypair


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    """Echo the acceptance criterion lines even when capture is on."""
    try:
        from test_acceptance import RESULTS
    except ImportError:
        return
    if RESULTS:
        terminalreporter.section("acceptance criteria")
        for line in RESULTS:
            terminalreporter.write_line(line)


@pytest.fixture(scope="session")
def keypair_a():
    return generate_keypair(2048, key_id="alpha")

@pytest.fixture(scope="session")
def keypair_b():
    return generate_keypair(2048, key_id="beta")

@pytest.fixture(scope="session")
def keypair_anon():
    # no key id: exercises bare signature lines
    return generate_keypair(2048)


@pytest.fixture(scope="session")
def pem_dir(tmp_path_factory, keypair_a, keypair_b, keypair_anon):
    """Directory of PEM files for all session keys."""
    d = tmp_path_factory.mktemp("keys")
    for name, pair in (("alpha", keypair_a), ("beta", keypair_b), ("anon", keypair_anon)):
        (d / f"{name}.priv.pem").write_bytes(pair.private.to_pem())
        (d / f"{name}.pub.pem").write_bytes(pair.public.to_pem())
    return d
