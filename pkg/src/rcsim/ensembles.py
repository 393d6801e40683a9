"""Haar-random unitaries and states, and the random circuit ensembles.

``mu_grid``: sqrt(n) x sqrt(n) grid; gate t <= n acts on qubit t and a
uniformly chosen grid neighbour, later gates on a uniformly chosen grid edge.
``mu_general``: every gate on a uniformly chosen unordered pair of qubits.
``nu_grid``: ``mu_grid`` conditioned on adv(C) >= threshold by rejection.
Every gate matrix is Haar distributed on U(4).
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np

from .core import Circuit, Gate, GridLayout, StateVector
from .errors import CircuitError, SamplingError
from .rng import as_generator

KINDS = ("grid", "general", "grid_conditional")
DEFAULT_THRESHOLD = 0.7
DEFAULT_MAX_ATTEMPTS = 1000


def haar_unitary(dim: int, rng) -> np.ndarray:
    """Haar-random dim x dim unitary (Ginibre matrix, QR, R-diagonal made positive)."""
    if dim not in (2, 4):
        raise ValueError(f"unsupported dimension {dim}; expected 2 or 4")
    gen = as_generator(rng)
    z = (gen.standard_normal((dim, dim)) + 1j * gen.standard_normal((dim, dim))) / math.sqrt(2)
    q, r = np.linalg.qr(z)
    d = np.diag(r)
    return q * (d / np.abs(d))


def haar_state(dim: int, rng) -> StateVector:
    """Haar-random pure state: 2*dim i.i.d. standard normals, normalised."""
    if dim < 2 or dim & (dim - 1):
        raise ValueError(f"dimension must be a power of two >= 2, got {dim}")
    gen = as_generator(rng)
    x = gen.standard_normal((dim, 2))
    amps = x[:, 0] + 1j * x[:, 1]
    amps /= np.sqrt(np.sum(x * x))
    return StateVector(dim.bit_length() - 1, amps)


def haar_states(dim: int, count: int, rng) -> np.ndarray:
    """``count`` Haar states as rows of a (count, dim) array, one batched draw."""
    gen = as_generator(rng)
    x = gen.standard_normal((count, dim, 2))
    amps = x[..., 0] + 1j * x[..., 1]
    return amps / np.sqrt(np.sum(x * x, axis=(1, 2)))[:, None]


def _grid_layout(n: int) -> GridLayout:
    if n < 4:
        raise CircuitError(f"grid ensembles need n >= 4, got {n}")
    return GridLayout.square(n)


def sample_mu_grid(n: int, m: int, rng) -> Circuit:
    layout = _grid_layout(n)
    if m < n:
        raise CircuitError(f"grid ensemble needs m >= n, got m={m} < n={n}")
    gen = as_generator(rng)
    edges = layout.edges()
    gates = []
    for t in range(1, m + 1):
        if t <= n:
            nbrs = layout.neighbors(t)
            pair = (t, nbrs[int(gen.integers(len(nbrs)))])
        else:
            pair = edges[int(gen.integers(len(edges)))]
        gates.append(Gate(pair, haar_unitary(4, gen)))
    return Circuit(n, tuple(gates), layout)


def sample_mu_general(n: int, m: int, rng) -> Circuit:
    if n < 2:
        raise CircuitError(f"general ensemble needs n >= 2, got {n}")
    if m < 1:
        raise CircuitError(f"general ensemble needs m >= 1, got {m}")
    gen = as_generator(rng)
    gates = []
    for _ in range(m):
        a = int(gen.integers(n))
        b = int(gen.integers(n - 1))
        b += b >= a
        gates.append(Gate((min(a, b) + 1, max(a, b) + 1), haar_unitary(4, gen)))
    return Circuit(n, tuple(gates))


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str
    n: int
    m: int
    threshold: float = DEFAULT_THRESHOLD
    max_attempts: int = DEFAULT_MAX_ATTEMPTS

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown ensemble kind {self.kind!r}; expected one of {KINDS}")
        if self.kind != "general":
            if math.isqrt(self.n) ** 2 != self.n:
                raise CircuitError(f"n must be a perfect square, got {self.n}")
            if self.m < self.n:
                raise CircuitError(f"grid ensemble needs m >= n, got m={self.m} < n={self.n}")
        # thresholds above 1 are accepted and simply exhaust max_attempts
        if self.threshold < 0:
            raise ValueError(f"threshold must be >= 0, got {self.threshold}")
        if self.max_attempts < 1:
            raise ValueError("max_attempts must be >= 1")


@dataclass(frozen=True, eq=False)
class ConditionalSample:
    circuit: Circuit
    attempts: int
    adv: float


def _dense_adv(circuit: Circuit) -> float:
    from .dense import prob_list
    from .hog import uphalf

    return uphalf(prob_list(circuit).probs)


def sample_nu_grid(spec: EnsembleSpec, rng,
                   adv_oracle: Callable[[Circuit], float] | None = None) -> ConditionalSample:
    """Draw from mu_grid until adv(C) >= spec.threshold."""
    if spec.kind != "grid_conditional":
        raise ValueError(f"sample_nu_grid needs kind='grid_conditional', got {spec.kind!r}")
    oracle = adv_oracle or _dense_adv
    gen = as_generator(rng)
    for attempt in range(1, spec.max_attempts + 1):
        circuit = sample_mu_grid(spec.n, spec.m, gen)
        adv = oracle(circuit)
        if adv >= spec.threshold:
            return ConditionalSample(circuit, attempt, adv)
    raise SamplingError(
        f"no circuit with adv >= {spec.threshold} in {spec.max_attempts} attempts "
        f"(threshold too high for n={spec.n}, m={spec.m}?)")


def sample(spec: EnsembleSpec, rng) -> Circuit:
    if spec.kind == "grid":
        return sample_mu_grid(spec.n, spec.m, rng)
    if spec.kind == "general":
        return sample_mu_general(spec.n, spec.m, rng)
    return sample_nu_grid(spec, rng).circuit


def random_layered_circuit(n: int, d: int, rng) -> Circuit:
    """Haar gates in d layers, each a random matching of floor(n/2) qubit pairs.

    Consecutive layers always conflict, so ``layering`` recovers exactly d layers.
    """
    gen = as_generator(rng)
    gates = []
    for _ in range(d):
        perm = gen.permutation(n) + 1
        for i in range(0, n - 1, 2):
            a, b = int(perm[i]), int(perm[i + 1])
            gates.append(Gate((min(a, b), max(a, b)), haar_unitary(4, gen)))
    return Circuit(n, tuple(gates))
