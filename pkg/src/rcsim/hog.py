"""Heavy-output statistics and the HOG generate / verify loop.

A string is heavy for C when its output probability on C|0^n> is strictly
above the median of all 2^n output probabilities. A HOG instance asks for k
strings of which at least ceil(2k/3) are heavy.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field

import numpy as np

from .backends import amplitude
from .core import BasisState, Circuit, Gate, StateVector, as_index
from .dense import DEFAULT_MAX_QUBITS, ProbList, prob_list, sample_outputs
from .errors import CircuitError

NORM_ATOL = 1e-6
DEFAULT_K = 100

_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_I2 = np.eye(2, dtype=np.complex128)


def _values(probs) -> np.ndarray:
    return np.asarray(probs.probs if isinstance(probs, ProbList) else probs, dtype=np.float64)


def uphalf(values) -> float:
    """Sum of the largest N/2 of N values (stable descending sort, lower index first on ties)."""
    v = _values(values)
    if v.ndim != 1 or v.size < 2 or v.size % 2:
        raise ValueError(f"uphalf needs an even number >= 2 of values, got {v.size}")
    order = np.argsort(-v, kind="stable")
    return float(np.sum(v[order[: v.size // 2]]))


def _state_probs(state: StateVector) -> np.ndarray:
    p = state.probabilities()
    total = float(np.sum(p))
    if abs(total - 1.0) > NORM_ATOL:
        raise ValueError(f"state is not normalised: squared norm {total!r}")
    return p


def adv_state(state: StateVector) -> float:
    """Probability that measuring the state lands in the top half of outputs."""
    return uphalf(_state_probs(state))


def dev_state(state: StateVector) -> float:
    """L1 distance of the output distribution from uniform."""
    p = _state_probs(state)
    return float(np.sum(np.abs(p - 1.0 / p.size)))


def median_prob(probs) -> float:
    return float(np.median(_values(probs)))


def is_heavy(probs, z) -> bool:
    v = _values(probs)
    n = v.size.bit_length() - 1
    return bool(v[as_index(n, z)] > np.median(v))


def heavy_mask(probs) -> np.ndarray:
    v = _values(probs)
    return v > np.median(v)


@dataclass(frozen=True, eq=False)
class HogInstance:
    circuit: Circuit
    k: int = DEFAULT_K

    def __post_init__(self):
        if self.k < 1:
            raise ValueError(f"k must be >= 1, got {self.k}")


def pass_threshold(k: int) -> int:
    """ceil(2k/3) in integer arithmetic."""
    return (2 * k + 2) // 3


@dataclass(frozen=True, eq=False)
class HogVerdict:
    heavy_count: int
    k: int
    median: float
    passed: bool
    probs: np.ndarray = field(repr=False)

    def to_dict(self) -> dict:
        return {"heavy_count": self.heavy_count, "k": self.k,
                "median": self.median, "passed": self.passed}

    def summary(self) -> str:
        word = "PASS" if self.passed else "FAIL"
        return (f"{word}: {self.heavy_count}/{self.k} heavy "
                f"(need {pass_threshold(self.k)}), median {self.median:.6g}")


def hog_generate(instance: HogInstance, rng) -> list[BasisState]:
    """Honest solver: simulate C|0^n> and measure it k times."""
    n = instance.circuit.n
    return [BasisState(n, int(i)) for i in sample_outputs(instance.circuit, instance.k, rng)]


def hog_verify(instance: HogInstance, samples, backend: str = "dense", *,
               threads: int = 1, force: bool = False,
               max_dense_qubits: int = DEFAULT_MAX_QUBITS) -> HogVerdict:
    """Count heavy samples using exact output probabilities from ``backend``.

    The median comes from the full probability list when n fits the dense
    cap and is ln(2) * 2^-n otherwise.
    """
    circ = instance.circuit
    n = circ.n
    if len(samples) != instance.k:
        raise ValueError(f"expected {instance.k} samples, got {len(samples)}")
    idx = [as_index(n, z) for z in samples]

    full = prob_list(circ, max_qubits=max_dense_qubits) if n <= max_dense_qubits else None
    median = median_prob(full) if full is not None else math.log(2) * 2.0 ** -n
    if backend == "dense" and full is not None:
        probs = full.probs[idx]
    else:
        def one(z):
            return abs(amplitude(circ, 0, z, backend, force=force)) ** 2

        if threads > 1:
            with ThreadPoolExecutor(max_workers=threads) as pool:
                probs = np.array(list(pool.map(one, idx)))
        else:
            probs = np.array([one(z) for z in idx])
    heavy = int(np.count_nonzero(probs > median))
    return HogVerdict(heavy, instance.k, float(median),
                      heavy >= pass_threshold(instance.k), probs)


def absorb_not_gates(circuit: Circuit, z) -> Circuit:
    """C' with <0^n|C'|z> = <0^n|C|0^n>.

    Each flagged qubit's NOT is folded into the input side of the first gate
    touching it; a qubit no gate touches gets a standalone X (x) I gate in front.
    """
    n = circuit.n
    zi = as_index(n, z)
    gates = list(circuit.gates)
    front: list[Gate] = []
    for q in range(1, n + 1):
        if not (zi >> (n - q)) & 1:
            continue
        first = next((t for t, g in enumerate(gates) if q in g.qubits), None)
        if first is not None:
            g = gates[first]
            flip = np.kron(_X, _I2) if g.qubits[0] == q else np.kron(_I2, _X)
            gates[first] = Gate(g.qubits, g.matrix @ flip)
            continue
        if n < 2:
            raise CircuitError("cannot place a two-qubit NOT gate on a single qubit")
        if circuit.layout is not None:
            partner = circuit.layout.neighbors(q)[0]
        else:
            partner = q + 1 if q < n else q - 1
        front.append(Gate((q, partner), np.kron(_X, _I2)))
    if not front and zi == 0:
        return circuit
    return circuit.with_gates(front + gates)
