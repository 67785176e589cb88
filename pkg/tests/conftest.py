import itertools
import random

import pytest

from qcnoise import kernels
from qcnoise.ring import RingElement


@pytest.fixture(params=kernels.available())
def backend(request):
    """Run a test once per available kernel backend."""
    prev = kernels.use(request.param)
    yield request.param
    kernels.use(prev)


def all_elements(n):
    return [RingElement(n, b) for b in range(1 << n)]


def naive_mul(a, b):
    """Schoolbook O(n^2) cyclic convolution on coefficient lists."""
    n = len(a)
    out = [0] * n
    for i in range(n):
        for j in range(n):
            out[(i + j) % n] ^= a[i] & b[j]
    return out


def brute_inverse(t):
    """Search every element for u with t * u = 1; None if there is none."""
    n = t.n
    ca = t.coeffs
    one = [1] + [0] * (n - 1)
    for bits in range(1 << n):
        u = RingElement(n, bits)
        if naive_mul(ca, u.coeffs) == one:
            return u
    return None


@pytest.fixture
def rng():
    return random.Random(0xC0FFEE)


def combos(*iterables):
    return list(itertools.product(*iterables))


def pytest_terminal_summary(terminalreporter):
    import sys

    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "LINES", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
