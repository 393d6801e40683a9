"""JSON circuit files.

Schema::

    {"n": int,
     "grid": {"h": int, "w": int} | null,
     "gates": [{"q": [a, b], "u": [[[re, im], x4], x4]}, ...]}

Matrices are row-major. Floats are written with ``repr`` (shortest string
that round-trips), so parse(serialize(c)) reproduces every matrix bit for bit.
"""
from __future__ import annotations

import json
import os

import numpy as np

from .core import UNITARY_ATOL, Circuit, Gate, GridLayout, unitarity_error
from .errors import CircuitError


def circuit_to_dict(circuit: Circuit) -> dict:
    grid = None if circuit.layout is None else {"h": circuit.layout.h, "w": circuit.layout.w}
    gates = []
    for g in circuit.gates:
        u = [[[float(z.real), float(z.imag)] for z in row] for row in g.matrix]
        gates.append({"q": list(g.qubits), "u": u})
    return {"n": circuit.n, "grid": grid, "gates": gates}


def dumps(circuit: Circuit) -> str:
    return json.dumps(circuit_to_dict(circuit), separators=(",", ":"))


def circuit_from_dict(data: dict) -> Circuit:
    try:
        n = int(data["n"])
        grid = data.get("grid")
        layout = None if grid is None else GridLayout(int(grid["h"]), int(grid["w"]))
        raw_gates = data["gates"]
    except (KeyError, TypeError, ValueError) as exc:
        raise CircuitError(f"malformed circuit file: {exc}") from exc

    gates = []
    for i, entry in enumerate(raw_gates):
        try:
            a, b = (int(q) for q in entry["q"])
            u = np.array(entry["u"], dtype=np.float64)
        except (KeyError, TypeError, ValueError) as exc:
            raise CircuitError(f"gate {i}: malformed entry ({exc})") from exc
        if u.shape != (4, 4, 2):
            raise CircuitError(f"gate {i}: matrix must be 4x4 [re, im] pairs, got shape {u.shape}")
        mat = u[..., 0] + 1j * u[..., 1]
        err = unitarity_error(mat)
        if not err < UNITARY_ATOL:
            raise CircuitError(f"gate {i}: matrix is not unitary (max |U^dag U - I| = {err:.3g})")
        gates.append(Gate((a, b), mat))
    return Circuit(n, tuple(gates), layout)


def loads(text: str) -> Circuit:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as exc:
        raise CircuitError(f"malformed JSON: {exc}") from exc
    if not isinstance(data, dict):
        raise CircuitError("circuit file must hold a JSON object")
    return circuit_from_dict(data)


def save_circuit(circuit: Circuit, path: str | os.PathLike) -> None:
    with open(path, "w") as fh:
        fh.write(dumps(circuit))
        fh.write("\n")


def load_circuit(path: str | os.PathLike) -> Circuit:
    with open(path) as fh:
        return loads(fh.read())
