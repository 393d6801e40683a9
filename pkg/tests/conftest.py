import numpy as np
import pytest

from rcsim.core import Circuit, Gate, GridLayout
from rcsim.ensembles import haar_unitary


def full_unitary(circuit: Circuit) -> np.ndarray:
    """2^n x 2^n unitary of a circuit, built entry by entry from the bit convention.

    Deliberately independent of the kernels: plain Python loops over basis
    indices, qubit q read as bit (n - q).
    """
    n = circuit.n
    dim = 1 << n
    total = np.eye(dim, dtype=np.complex128)
    for g in circuit.gates:
        a, b = g.qubits
        sa, sb = n - a, n - b
        u = np.zeros((dim, dim), dtype=np.complex128)
        for col in range(dim):
            cin = 2 * ((col >> sa) & 1) + ((col >> sb) & 1)
            rest = col & ~((1 << sa) | (1 << sb))
            for out in range(4):
                row = rest | ((out >> 1) << sa) | ((out & 1) << sb)
                u[row, col] = g.matrix[out, cin]
        total = u @ total
    return total


def random_general(n, m, rng):
    gates = []
    for _ in range(m):
        a, b = rng.choice(np.arange(1, n + 1), size=2, replace=False)
        gates.append(Gate((int(a), int(b)), haar_unitary(4, rng)))
    return Circuit(n, tuple(gates))


def random_grid(h, w, m, rng):
    layout = GridLayout(h, w)
    edges = layout.edges()
    gates = []
    for _ in range(m):
        a, b = edges[int(rng.integers(len(edges)))]
        if rng.integers(2):
            a, b = b, a
        gates.append(Gate((a, b), haar_unitary(4, rng)))
    return Circuit(h * w, tuple(gates), layout)


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)
