import numpy as np
import pytest

from safesip import ChipletIdentity, DeviceSecret, SecurityParams, SipAssembly, enroll

ACCEPTANCE_LINES = []


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture
def small_params():
    return SecurityParams(kappa=4, width=8)


def make_sip(n, seed, **kw):
    rng = np.random.default_rng(seed)
    ids = [ChipletIdentity(int(rng.integers(0, 1 << 32)), i, DeviceSecret(rng.bytes(32)))
           for i in range(n)]
    return SipAssembly.build(ids, **kw), rng


@pytest.fixture
def enrolled4(small_params):
    sip, rng = make_sip(4, 7)
    challenge = b"\x5a\xa5\x01\x02"
    enroll(sip, small_params, rng.bytes(16), challenge)
    return sip, rng, challenge


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
