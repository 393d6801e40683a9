"""Feynman path-sum backend: ~4^m time, O(m + n) space.

Depth-first over gates; at each gate the four output settings of its two
bits are branched on, weighted by the matching matrix entry. Basis states are
int64 bitmasks, so up to 62 qubits fit.
"""
from __future__ import annotations

import numba
import numpy as np

from .core import Circuit, LayeredCircuit, as_index
from .errors import LimitExceeded

DEFAULT_MAX_GATES = 20
DEFAULT_MAX_PATHS = 10 ** 8
MAX_QUBITS = 62
PRUNE_ATOL = 1e-15


@numba.njit(cache=True, nogil=True)
def _paths(t, state, y, pa, pb, mats):
    if t == pa.shape[0]:
        return 1.0 + 0.0j if state == y else 0.0j
    a = pa[t]
    b = pb[t]
    col = 2 * ((state >> a) & 1) + ((state >> b) & 1)
    cleared = state & ~((np.int64(1) << a) | (np.int64(1) << b))
    acc = 0.0j
    for row in range(4):
        w = mats[t, row, col]
        if abs(w) < PRUNE_ATOL:
            continue
        nxt = cleared | (np.int64(row >> 1) << a) | (np.int64(row & 1) << b)
        acc += w * _paths(t + 1, nxt, y, pa, pb, mats)
    return acc


def amplitude_paths(circuit: Circuit | LayeredCircuit, x, y, *,
                    max_gates: int = DEFAULT_MAX_GATES,
                    max_paths: int = DEFAULT_MAX_PATHS,
                    force: bool = False) -> complex:
    """<y|C|x> as a sum over all 4^m gate-output paths."""
    circ = circuit.circuit if isinstance(circuit, LayeredCircuit) else circuit
    if circ.n > MAX_QUBITS:
        raise LimitExceeded(f"path backend supports at most {MAX_QUBITS} qubits, got {circ.n}")
    if circ.m > max_gates:
        raise LimitExceeded(f"{circ.m} gates exceed the path backend cap of {max_gates}")
    if 4 ** circ.m > max_paths and not force:
        raise LimitExceeded(
            f"4^{circ.m} = {4 ** circ.m} paths exceed {max_paths}; pass force=True to run anyway")
    xi, yi = as_index(circ.n, x), as_index(circ.n, y)
    if circ.m == 0:
        return 1.0 + 0j if xi == yi else 0j
    pa, pb, mats = circ.gate_arrays()
    return complex(_paths(0, np.int64(xi), np.int64(yi), pa, pb, mats))
