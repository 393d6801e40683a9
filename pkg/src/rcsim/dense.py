"""Schroedinger backend: the full 2^n state vector, about m * 2^n work.

This is the reference every other backend is checked against, and the
sampling engine of the honest HOG solver.
"""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field

import numpy as np

from .core import Circuit, LayeredCircuit, StateVector, _apply_gates_inplace, as_index, index_to_bits
from .errors import LimitExceeded
from .rng import as_generator

DEFAULT_MAX_QUBITS = 26


@dataclass(frozen=True, eq=False)
class ProbList:
    """The 2^n output probabilities |<x|C|0^n>|^2, indexed by basis index."""

    n: int
    probs: np.ndarray = field(repr=False)

    def __post_init__(self):
        probs = np.asarray(self.probs, dtype=np.float64)
        if probs.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} probabilities, got shape {probs.shape}")
        if np.any(probs < 0):
            raise ValueError("probabilities must be nonnegative")
        object.__setattr__(self, "probs", probs)

    def __len__(self):
        return self.probs.shape[0]

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["index", "bitstring", "probability"])
        for i, p in enumerate(self.probs):
            w.writerow([i, index_to_bits(i, self.n), repr(float(p))])
        return buf.getvalue()


def _circuit_of(circuit: Circuit | LayeredCircuit) -> Circuit:
    return circuit.circuit if isinstance(circuit, LayeredCircuit) else circuit


def _check_size(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise LimitExceeded(
            f"dense simulation of {n} qubits exceeds the {max_qubits}-qubit memory cap")


def evolve(circuit: Circuit | LayeredCircuit, initial=0, *,
           max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    """C|initial> by in-place gate application on the full state vector."""
    circ = _circuit_of(circuit)
    _check_size(circ.n, max_qubits)
    amps = np.zeros(1 << circ.n, dtype=np.complex128)
    amps[as_index(circ.n, initial)] = 1.0
    if circ.m:
        pa, pb, mats = circ.gate_arrays()
        _apply_gates_inplace(amps, pa, pb, mats)
    return StateVector(circ.n, amps)


def evolve_state(circuit: Circuit | LayeredCircuit, state: StateVector, *,
                 max_qubits: int = DEFAULT_MAX_QUBITS) -> StateVector:
    circ = _circuit_of(circuit)
    _check_size(circ.n, max_qubits)
    if state.n != circ.n:
        raise ValueError(f"state has {state.n} qubits, circuit has {circ.n}")
    amps = state.amps.copy()
    if circ.m:
        pa, pb, mats = circ.gate_arrays()
        _apply_gates_inplace(amps, pa, pb, mats)
    return StateVector(circ.n, amps)


def amplitude_dense(circuit: Circuit | LayeredCircuit, x, y, *,
                    max_qubits: int = DEFAULT_MAX_QUBITS) -> complex:
    """<y|C|x> read off the evolved state vector."""
    circ = _circuit_of(circuit)
    return complex(evolve(circ, x, max_qubits=max_qubits).amps[as_index(circ.n, y)])


def prob_list(circuit: Circuit | LayeredCircuit, *,
              max_qubits: int = DEFAULT_MAX_QUBITS) -> ProbList:
    state = evolve(circuit, 0, max_qubits=max_qubits)
    return ProbList(state.n, state.probabilities())


def sample_from_probs(probs: np.ndarray, k: int, rng) -> np.ndarray:
    """k i.i.d. indices drawn by inverse CDF over ``probs``."""
    if k < 1:
        raise ValueError(f"sample count must be >= 1, got {k}")
    cdf = np.cumsum(probs)
    u = as_generator(rng).random(k) * cdf[-1]
    idx = np.searchsorted(cdf, u, side="right")
    return np.minimum(idx, len(probs) - 1).astype(np.int64)


def sample_outputs(circuit: Circuit | LayeredCircuit, k: int, rng, *,
                   max_qubits: int = DEFAULT_MAX_QUBITS) -> np.ndarray:
    """k independent computational-basis measurements of C|0^n>, as basis indices."""
    return sample_from_probs(prob_list(circuit, max_qubits=max_qubits).probs, k, rng)
