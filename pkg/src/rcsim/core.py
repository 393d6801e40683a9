"""Circuit, gate and state data model shared by every backend.

Conventions (frozen, the JSON file format depends on them):

* qubits are numbered 1..n and qubit 1 is the most significant bit of a basis
  index, so qubit ``q`` lives at bit position ``n - q``;
* a gate on the ordered pair ``(a, b)`` has a 4x4 matrix indexed by
  ``2 * bit_a + bit_b``;
* a grid of ``h`` rows and ``w`` columns places qubit ``q`` at cell
  ``((q - 1) // w + 1, (q - 1) % w + 1)``.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numba
import numpy as np

from .errors import CircuitError

UNITARY_ATOL = 1e-12


# --------------------------------------------------------------------------
# basis states
# --------------------------------------------------------------------------

def bits_to_index(bits: str) -> int:
    """Basis index of a bitstring written qubit-1-first."""
    if not bits or any(c not in "01" for c in bits):
        raise ValueError(f"not a bitstring: {bits!r}")
    return int(bits, 2)


def index_to_bits(index: int, n: int) -> str:
    if not 0 <= index < (1 << n):
        raise ValueError(f"index {index} out of range for {n} qubits")
    return format(index, f"0{n}b") if n else ""


@dataclass(frozen=True)
class BasisState:
    """Computational basis state ``|bits>`` on ``n`` qubits."""

    n: int
    index: int

    def __post_init__(self):
        if not 0 <= self.index < (1 << self.n):
            raise ValueError(f"index {self.index} out of range for {self.n} qubits")

    @classmethod
    def from_bits(cls, bits: str) -> "BasisState":
        return cls(len(bits), bits_to_index(bits))

    @property
    def bits(self) -> str:
        return index_to_bits(self.index, self.n)

    def bit(self, qubit: int) -> int:
        return (self.index >> (self.n - qubit)) & 1

    def __int__(self):
        return self.index

    def __index__(self):
        return self.index


def as_index(n: int, value) -> int:
    """Coerce a BasisState, bitstring or integer to a basis index on n qubits."""
    if isinstance(value, BasisState):
        if value.n != n:
            raise ValueError(f"basis state has {value.n} bits, circuit has {n} qubits")
        return value.index
    if isinstance(value, str):
        if len(value) != n:
            raise ValueError(f"bitstring {value!r} has {len(value)} bits, expected {n}")
        return bits_to_index(value)
    idx = int(value)
    if not 0 <= idx < (1 << n):
        raise ValueError(f"index {idx} out of range for {n} qubits")
    return idx


# --------------------------------------------------------------------------
# grid geometry
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class GridLayout:
    h: int
    w: int

    def __post_init__(self):
        if self.h < 1 or self.w < 1:
            raise CircuitError(f"grid dimensions must be positive, got {self.h}x{self.w}")

    @property
    def n(self) -> int:
        return self.h * self.w

    @classmethod
    def square(cls, n: int) -> "GridLayout":
        side = math.isqrt(n)
        if side * side != n:
            raise CircuitError(f"n must be a perfect square, got {n}")
        return cls(side, side)

    def cell(self, q: int) -> tuple[int, int]:
        return (q - 1) // self.w + 1, (q - 1) % self.w + 1

    def qubit(self, row: int, col: int) -> int:
        return (row - 1) * self.w + col

    def adjacent(self, a: int, b: int) -> bool:
        (ra, ca), (rb, cb) = self.cell(a), self.cell(b)
        return abs(ra - rb) + abs(ca - cb) == 1

    def neighbors(self, q: int) -> list[int]:
        r, c = self.cell(q)
        out = []
        for rr, cc in ((r - 1, c), (r, c - 1), (r, c + 1), (r + 1, c)):
            if 1 <= rr <= self.h and 1 <= cc <= self.w:
                out.append(self.qubit(rr, cc))
        return sorted(out)

    def edges(self) -> list[tuple[int, int]]:
        """All grid edges as (smaller, larger) qubit pairs, sorted."""
        out = []
        for q in range(1, self.n + 1):
            for p in self.neighbors(q):
                if p > q:
                    out.append((q, p))
        return sorted(out)


# --------------------------------------------------------------------------
# gates and circuits
# --------------------------------------------------------------------------

def unitarity_error(matrix: np.ndarray) -> float:
    m = np.asarray(matrix)
    return float(np.max(np.abs(m.conj().T @ m - np.eye(m.shape[0]))))


@dataclass(frozen=True, eq=False)
class Gate:
    """Two-qubit unitary on the ordered qubit pair ``qubits = (a, b)``."""

    qubits: tuple[int, int]
    matrix: np.ndarray

    def __post_init__(self):
        a, b = (int(q) for q in self.qubits)
        if a == b:
            raise CircuitError(f"gate acts twice on qubit {a}")
        if a < 1 or b < 1:
            raise CircuitError(f"qubit indices are 1-based, got {(a, b)}")
        mat = np.array(self.matrix, dtype=np.complex128)
        if mat.shape != (4, 4):
            raise CircuitError(f"gate matrix must be 4x4, got shape {mat.shape}")
        if not np.all(np.isfinite(mat)):
            raise CircuitError("gate matrix has non-finite entries")
        err = unitarity_error(mat)
        if err >= UNITARY_ATOL:
            raise CircuitError(f"gate matrix is not unitary (max |U^dag U - I| = {err:.3g})")
        mat.setflags(write=False)
        object.__setattr__(self, "qubits", (a, b))
        object.__setattr__(self, "matrix", mat)

    def adjoint(self) -> "Gate":
        return Gate(self.qubits, self.matrix.conj().T)

    def __repr__(self):
        return f"Gate{self.qubits}"


@dataclass(frozen=True, eq=False)
class Circuit:
    """Chronological list of two-qubit gates on n qubits, optionally on a grid."""

    n: int
    gates: tuple[Gate, ...] = ()
    layout: GridLayout | None = None

    def __post_init__(self):
        if self.n < 1:
            raise CircuitError(f"circuit needs at least one qubit, got n={self.n}")
        gates = tuple(self.gates)
        object.__setattr__(self, "gates", gates)
        if self.layout is not None and self.layout.n != self.n:
            raise CircuitError(
                f"grid {self.layout.h}x{self.layout.w} does not hold {self.n} qubits")
        for i, g in enumerate(gates):
            a, b = g.qubits
            if a > self.n or b > self.n:
                raise CircuitError(f"gate {i} acts on {g.qubits}, circuit has {self.n} qubits")
            if self.layout is not None and not self.layout.adjacent(a, b):
                raise CircuitError(f"gate {i} acts on non-adjacent grid qubits {g.qubits}")

    @property
    def m(self) -> int:
        return len(self.gates)

    def adjoint(self) -> "Circuit":
        """The inverse circuit: reversed order, each gate conjugate-transposed."""
        return Circuit(self.n, tuple(g.adjoint() for g in reversed(self.gates)), self.layout)

    def with_gates(self, gates: Iterable[Gate]) -> "Circuit":
        return Circuit(self.n, tuple(gates), self.layout)

    def gate_arrays(self) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
        """(bit position of a, bit position of b, stacked matrices) for the kernels."""
        pa = np.array([self.n - g.qubits[0] for g in self.gates], dtype=np.int64)
        pb = np.array([self.n - g.qubits[1] for g in self.gates], dtype=np.int64)
        mats = np.zeros((self.m, 4, 4), dtype=np.complex128)
        for i, g in enumerate(self.gates):
            mats[i] = g.matrix
        return pa, pb, mats

    def __repr__(self):
        grid = f", grid={self.layout.h}x{self.layout.w}" if self.layout else ""
        return f"Circuit(n={self.n}, m={self.m}{grid})"


# --------------------------------------------------------------------------
# layering
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class LayeredCircuit:
    """A circuit together with a partition of its gates into layers.

    ``bounds`` has d+1 entries; layer i (1-based) holds gates
    ``circuit.gates[bounds[i-1]:bounds[i]]``.
    """

    circuit: Circuit
    bounds: tuple[int, ...]

    def __post_init__(self):
        b = tuple(int(v) for v in self.bounds)
        object.__setattr__(self, "bounds", b)
        if not b or b[0] != 0 or b[-1] != self.circuit.m:
            raise CircuitError(f"layer bounds {b} do not cover {self.circuit.m} gates")
        for lo, hi in zip(b, b[1:]):
            if hi <= lo:
                raise CircuitError(f"empty or reversed layer in bounds {b}")
            used: set[int] = set()
            for g in self.circuit.gates[lo:hi]:
                if used.intersection(g.qubits):
                    raise CircuitError(f"layer [{lo}, {hi}) reuses a qubit")
                used.update(g.qubits)

    @property
    def n(self) -> int:
        return self.circuit.n

    @property
    def d(self) -> int:
        return len(self.bounds) - 1

    @property
    def layout(self) -> GridLayout | None:
        return self.circuit.layout

    @property
    def layers(self) -> list[tuple[int, int]]:
        """Layers as 1-based inclusive gate ranges [L_i, R_i]."""
        return [(lo + 1, hi) for lo, hi in zip(self.bounds, self.bounds[1:])]

    def layer_gates(self, i: int) -> tuple[Gate, ...]:
        return self.circuit.gates[self.bounds[i - 1]:self.bounds[i]]

    def slice(self, l: int, r: int) -> "LayeredCircuit":
        return slice_layers(self, l, r)


def layering(circuit: Circuit) -> LayeredCircuit:
    """Greedy earliest-fit layering.

    Each gate is placed in the layer right after the latest layer already
    holding a gate on one of its qubits. Gates that move ahead only commute
    past gates on disjoint qubits, so the returned (stably reordered) circuit
    implements the same unitary.
    """
    last = [0] * (circuit.n + 1)  # 1-based layer index of the last gate per qubit
    assigned = []
    for g in circuit.gates:
        a, b = g.qubits
        layer = max(last[a], last[b]) + 1
        last[a] = last[b] = layer
        assigned.append(layer)
    d = max(assigned, default=0)
    order = sorted(range(circuit.m), key=lambda i: (assigned[i], i))
    counts = np.bincount(np.array(assigned, dtype=np.int64), minlength=d + 1)[1:]
    bounds = (0, *np.cumsum(counts).tolist()) if d else (0,)
    return LayeredCircuit(circuit.with_gates(circuit.gates[i] for i in order), bounds)


def slice_layers(layered: LayeredCircuit, l: int, r: int) -> LayeredCircuit:
    """Sub-circuit made of layers l..r (1-based, inclusive)."""
    if not 1 <= l <= r <= layered.d:
        raise ValueError(f"layer range [{l}, {r}] outside 1..{layered.d}")
    lo, hi = layered.bounds[l - 1], layered.bounds[r]
    sub = layered.circuit.with_gates(layered.circuit.gates[lo:hi])
    return LayeredCircuit(sub, tuple(v - lo for v in layered.bounds[l - 1:r + 1]))


def as_layered(circuit: Circuit | LayeredCircuit) -> LayeredCircuit:
    return circuit if isinstance(circuit, LayeredCircuit) else layering(circuit)


# --------------------------------------------------------------------------
# state vectors
# --------------------------------------------------------------------------

@dataclass(frozen=True, eq=False)
class StateVector:
    n: int
    amps: np.ndarray = field(repr=False)

    def __post_init__(self):
        amps = np.asarray(self.amps, dtype=np.complex128)
        if amps.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} amplitudes, got shape {amps.shape}")
        object.__setattr__(self, "amps", amps)

    @classmethod
    def basis(cls, n: int, index=0) -> "StateVector":
        amps = np.zeros(1 << n, dtype=np.complex128)
        amps[as_index(n, index)] = 1.0
        return cls(n, amps)

    def norm(self) -> float:
        return float(np.sqrt(np.sum(np.abs(self.amps) ** 2)))

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amps) ** 2


@numba.njit(cache=True, nogil=True)
def _apply_2q_inplace(state, mat, pa, pb):
    """U on bit positions (pa, pb) in place, over the 2^(n-2) amplitude quadruples."""
    lo = min(pa, pb)
    hi = max(pa, pb)
    ia = np.int64(1) << pa
    ib = np.int64(1) << pb
    nq = state.shape[0] >> 2
    lo_mask = (np.int64(1) << lo) - 1
    hi_mask = (np.int64(1) << hi) - 1
    for g in range(nq):
        # insert zero bits at positions lo and then hi
        i = (g & lo_mask) | ((g >> lo) << (lo + 1))
        i = (i & hi_mask) | ((i >> hi) << (hi + 1))
        i0 = i
        i1 = i | ib
        i2 = i | ia
        i3 = i | ia | ib
        v0 = state[i0]
        v1 = state[i1]
        v2 = state[i2]
        v3 = state[i3]
        state[i0] = mat[0, 0] * v0 + mat[0, 1] * v1 + mat[0, 2] * v2 + mat[0, 3] * v3
        state[i1] = mat[1, 0] * v0 + mat[1, 1] * v1 + mat[1, 2] * v2 + mat[1, 3] * v3
        state[i2] = mat[2, 0] * v0 + mat[2, 1] * v1 + mat[2, 2] * v2 + mat[2, 3] * v3
        state[i3] = mat[3, 0] * v0 + mat[3, 1] * v1 + mat[3, 2] * v2 + mat[3, 3] * v3


@numba.njit(cache=True, nogil=True)
def _apply_gates_inplace(state, pa, pb, mats):
    for i in range(pa.shape[0]):
        _apply_2q_inplace(state, mats[i], pa[i], pb[i])


def apply_gate(state: StateVector, gate: Gate) -> StateVector:
    """Return ``(O (x) I) |state>`` for a two-qubit gate."""
    a, b = gate.qubits
    if a > state.n or b > state.n:
        raise CircuitError(f"gate on {gate.qubits} does not fit a {state.n}-qubit state")
    amps = state.amps.copy()
    _apply_2q_inplace(amps, gate.matrix, state.n - a, state.n - b)
    return StateVector(state.n, amps)


def circuit_from_pairs(n: int, pairs: Sequence[tuple[int, int]], matrices,
                       layout: GridLayout | None = None) -> Circuit:
    return Circuit(n, tuple(Gate(p, u) for p, u in zip(pairs, matrices)), layout)
