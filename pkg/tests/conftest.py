import pytest

from pmclev.materials import nanoparticle


@pytest.fixture(scope="session")
def sic():
    return nanoparticle("sic", 50e-9)


@pytest.fixture(scope="session")
def au():
    return nanoparticle("au", 50e-9)


@pytest.fixture(scope="session")
def si():
    return nanoparticle("si", 50e-9)


_ACCEPTANCE = pytest.StashKey[dict]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line for an acceptance criterion.

    Lines are printed immediately (visible with ``-s``) and repeated in the
    terminal summary.
    """
    store = request.config.stash.setdefault(_ACCEPTANCE, {})

    def record(number, passed, detail):
        line = f"ACCEPTANCE {number:>2}: {'PASS' if passed else 'FAIL'}  {detail}"
        store[number] = line
        print(line)
        return passed

    return record


def pytest_terminal_summary(terminalreporter, config):
    store = config.stash.get(_ACCEPTANCE, {})
    if store:
        terminalreporter.section("acceptance criteria")
        for n in sorted(store):
            terminalreporter.write_line(store[n])
