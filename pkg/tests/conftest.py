import os

import pytest

from intersective.number_field import FieldDesc

QQ = FieldDesc.rational()
GAUSS = FieldDesc.gaussian()
SQRT5 = FieldDesc.quadratic(5)


@pytest.fixture(params=["numba", "numpy"])
def backend(request, monkeypatch):
    """Run a test once per kernel path."""
    if request.param == "numpy":
        monkeypatch.setenv("INTERSECTIVE_DISABLE_NUMBA", "1")
    else:
        monkeypatch.delenv("INTERSECTIVE_DISABLE_NUMBA", raising=False)
    return request.param


def brute_roots(coeffs, a, b, c, t, n):
    """Residues x + y*w (0<=x<a, 0<=y<c) killing the polynomial mod the HNF
    lattice (a, b, c).  Plain loops, no shared code with the library."""
    found = []
    for x in range(a):
        for y in range(c):
            # Horner with (u, v) = u + v*w and w^2 = t*w + n
            u, v = 0, 0
            for ca, cb in reversed(coeffs):
                u, v = u * x + n * v * y, u * y + v * x + t * v * y
                u, v = u + ca, v + cb
            if v % c == 0 and (u - (v // c) * b) % a == 0:
                found.append((x, y))
    return sorted(found)


# one line per acceptance criterion, echoed after the run
ACCEPTANCE_LINES: list[str] = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
