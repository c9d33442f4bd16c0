import numpy as np
import pytest

from triunitary.gates import TriUnitaryParams, triunitary_gate


@pytest.fixture
def rng():
    return np.random.default_rng(1234)


def random_tu(seed, phi=None):
    return triunitary_gate(TriUnitaryParams.random(np.random.default_rng(seed), phi=phi))


def equal_up_to_phase(a, b, tol=1e-10):
    a, b = np.asarray(a), np.asarray(b)
    k = np.argmax(np.abs(b))
    if abs(b.flat[k]) < 1e-12:
        return np.allclose(a, b, atol=tol)
    ph = a.flat[k] / b.flat[k]
    return abs(abs(ph) - 1) < tol and np.allclose(a, ph * b, atol=tol)


# -- acceptance report -------------------------------------------------------------------

ACCEPTANCE = {}


def report(number, ok, detail):
    """Record and print the outcome of an acceptance criterion."""
    line = f"criterion {number:>2}: {'PASS' if ok else 'FAIL'}  {detail}"
    ACCEPTANCE[number] = line
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for n in sorted(ACCEPTANCE):
            terminalreporter.write_line(ACCEPTANCE[n])
