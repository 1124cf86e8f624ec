import numpy as np
import pytest

from fermispin.rho import build_rho_pairing

# single-spin basis: index 0 = down, 1 = up
SX = np.array([[0, 1], [1, 0]], dtype=complex)
SY = np.array([[0, 1j], [-1j, 0]], dtype=complex)
SZ = np.diag([-1, 1]).astype(complex)
PAULI = {"x": SX, "y": SY, "z": SZ}


def pauli_on(n, spin, axis):
    """Dense Pauli operator on one spin; spin 0 is the least significant bit."""
    out = np.eye(1, dtype=complex)
    for k in reversed(range(n)):
        out = np.kron(out, PAULI[axis] if k == spin else np.eye(2))
    return out


def total_pauli(n, axis):
    return sum(pauli_on(n, k, axis) for k in range(n))


def total_spin_squared(n):
    return sum((total_pauli(n, a) / 2) @ (total_pauli(n, a) / 2) for a in "xyz")


def partial_transpose_reference(mat, n, part_b):
    """Entry-by-entry partial transpose, for cross-checking the tensor version."""
    mb = sum(1 << s for s in part_b)
    dim = 2**n
    out = np.empty_like(mat)
    for r in range(dim):
        for c in range(dim):
            out[(r & ~mb) | (c & mb), (c & ~mb) | (r & mb)] = mat[r, c]
    return out


_RHO_CACHE = {}


@pytest.fixture(scope="session")
def rho_of():
    def get(n):
        if n not in _RHO_CACHE:
            _RHO_CACHE[n] = build_rho_pairing(n)
        return _RHO_CACHE[n]

    return get


# acceptance criteria report one line each at the end of the run
ACCEPTANCE_RESULTS = []


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE_RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for line in sorted(ACCEPTANCE_RESULTS, key=lambda s: int(s.split()[1].rstrip(":"))):
        terminalreporter.write_line(line)
