import numpy as np
import pytest

from zqkernels.modarith import is_prime


def ntt_primes(bits, n, count=3):
    """Up to ``count`` primes in [2**(bits-1), 2**bits) that are 1 mod 2n, largest first."""
    step = 2 * n
    q = ((1 << bits) - 1) // step * step + 1
    out = []
    while q >= 1 << (bits - 1) and len(out) < count:
        if is_prime(q):
            out.append(q)
        q -= step
    return out


def prev_prime(x):
    x -= 1
    while not is_prime(x):
        x -= 1
    return x


def to_obj(a):
    """uint64 array -> object array of Python ints, for exact big-int oracles."""
    return np.asarray(a, dtype=np.uint64).astype(object)


@pytest.fixture
def rng():
    return np.random.default_rng(20211018)


# One line per acceptance criterion, filled in by test_acceptance.py and
# printed after the run so the verdicts show up without ``-s``.
ACCEPTANCE_LINES: list[str] = []


def report(criterion: str, ok: bool, detail: str) -> None:
    line = f"{'PASS' if ok else 'FAIL'}  {criterion}: {detail}"
    ACCEPTANCE_LINES.append(line)
    print(line)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
