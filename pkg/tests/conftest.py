import pytest

from pmkrsa import _backend
from pmkrsa.keystore import KeyBundle, KeyPair, gen_bundle
from pmkrsa.primegen import Drbg

SEED = bytes(range(32))


def pytest_configure(config):
    config._acceptance_lines = []


def pytest_terminal_summary(terminalreporter, config):
    lines = getattr(config, "_acceptance_lines", [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def report(request):
    """Record one pass/fail line for the acceptance summary."""

    def _report(criterion, passed, detail=""):
        status = "PASS" if passed is True else "FAIL" if passed is False else passed
        line = f"[{status}] {criterion}: {detail}"
        request.config._acceptance_lines.append(line)
        print(line)

    return _report


@pytest.fixture
def drbg():
    return Drbg(SEED)


@pytest.fixture
def toy_key():
    return KeyPair(N=3233, e=17, bits=12, d=2753, primes=(61, 53))


@pytest.fixture
def toy_bundle(toy_key):
    return KeyBundle(rows=(toy_key,), bits=12)


@pytest.fixture(scope="session")
def bundle_512x4():
    return gen_bundle(4, 512, Drbg(SEED))


@pytest.fixture(scope="session")
def bundle_512x1():
    return gen_bundle(1, 512, Drbg(bytes(32)))


KERNELS = [pytest.param(_backend.python_kernels, id="python")]
if _backend.compiled_kernels is not None:
    KERNELS.append(pytest.param(_backend.compiled_kernels, id="cython"))


@pytest.fixture(params=KERNELS)
def kernel(request):
    return request.param
