"""Uniform ``amplitude(circuit, x, y, backend=...)`` entry point over all simulators."""
from __future__ import annotations

from .core import Circuit, LayeredCircuit
from .dense import amplitude_dense
from .gridcut import amplitude_gridcut
from .paths import amplitude_paths
from .recursive import amplitude_hybrid, amplitude_savitch, amplitude_tradeoff

BACKENDS = ("dense", "paths", "savitch", "tradeoff", "gridcut", "hybrid")


def amplitude(circuit: Circuit | LayeredCircuit, x, y, backend: str = "dense", *,
              force: bool = False, k: int | None = None) -> complex:
    """<y|C|x> with the named backend. ``k`` is the tradeoff block-bit count (default n)."""
    if backend == "dense":
        return amplitude_dense(circuit, x, y)
    if backend == "paths":
        return amplitude_paths(circuit, x, y, force=force)
    if backend == "savitch":
        return amplitude_savitch(circuit, x, y)
    if backend == "tradeoff":
        return amplitude_tradeoff(circuit, x, y, circuit.n if k is None else k)
    if backend == "gridcut":
        return amplitude_gridcut(circuit, x, y, force=force)
    if backend == "hybrid":
        return amplitude_hybrid(circuit, x, y, force=force)
    raise ValueError(f"unknown backend {backend!r}; expected one of {BACKENDS}")
