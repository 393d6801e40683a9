"""Divide-and-conquer over the grid: poly space, 2^O(d sqrt(n)) time.

A node of the recursion is a rectangle of the grid plus the full list of m
operations restricted to it. Operations come in three kinds:

* two-qubit gates with both qubits inside the rectangle,
* single-entry one-qubit operators ``alpha |o><i|`` left over from splitting
  a gate that crossed an earlier cut,
* identities (``None``), padding every instance to the original m slots.

The rectangle is cut across its longer side at the floor(H/2) line. Each gate
crossing the cut is expanded into its 16 single-entry terms; for every choice
tau of one term per crossing gate, each operation factors into an A part and
a B part, and the amplitude is the sum over tau of the two sub-amplitudes.

Choices of tau that give an identically zero product are skipped while tau is
being built: a single-entry operator pins the bit of its qubit before and
after it, so adjacent pinned values (or the input/output bits) must agree.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

from .core import Circuit, Gate, GridLayout, LayeredCircuit, as_index
from .errors import CircuitError, LimitExceeded

DEFAULT_MAX_WORK = 10 ** 8

_ONE = 1
_TWO = 2


@dataclass(frozen=True)
class Rect:
    """Rows r0..r1 and columns c0..c1 of a grid (1-based, inclusive)."""

    r0: int
    r1: int
    c0: int
    c1: int

    @classmethod
    def full(cls, layout: GridLayout) -> "Rect":
        return cls(1, layout.h, 1, layout.w)

    @property
    def height(self) -> int:
        return self.r1 - self.r0 + 1

    @property
    def width(self) -> int:
        return self.c1 - self.c0 + 1

    @property
    def size(self) -> int:
        return self.height * self.width

    def qubits(self, layout: GridLayout) -> list[int]:
        return [layout.qubit(r, c) for r in range(self.r0, self.r1 + 1)
                for c in range(self.c0, self.c1 + 1)]


@dataclass(frozen=True)
class CutSet:
    edges: tuple[tuple[int, int], ...]
    side_a: frozenset[int]
    side_b: frozenset[int]
    rect_a: Rect
    rect_b: Rect


def find_cut(layout: GridLayout, rect: Rect | None = None) -> CutSet:
    """Balanced edge cut of a rectangle along the floor(H/2) line of its longer side."""
    rect = rect or Rect.full(layout)
    if rect.size < 2:
        raise ValueError("cannot cut a single-cell grid")
    edges = []
    if rect.height >= rect.width:
        k = rect.r0 + rect.height // 2 - 1
        rect_a = Rect(rect.r0, k, rect.c0, rect.c1)
        rect_b = Rect(k + 1, rect.r1, rect.c0, rect.c1)
        for c in range(rect.c0, rect.c1 + 1):
            edges.append((layout.qubit(k, c), layout.qubit(k + 1, c)))
    else:
        k = rect.c0 + rect.width // 2 - 1
        rect_a = Rect(rect.r0, rect.r1, rect.c0, k)
        rect_b = Rect(rect.r0, rect.r1, k + 1, rect.c1)
        for r in range(rect.r0, rect.r1 + 1):
            edges.append((layout.qubit(r, k), layout.qubit(r, k + 1)))
    return CutSet(tuple(edges), frozenset(rect_a.qubits(layout)),
                  frozenset(rect_b.qubits(layout)), rect_a, rect_b)


@dataclass(frozen=True)
class SingleEntryTerm:
    """``scalar * |out_bits><in_bits|`` on a gate's qubit pair (2-bit patterns)."""

    scalar: complex
    in_bits: int
    out_bits: int

    def matrix(self) -> np.ndarray:
        m = np.zeros((4, 4), dtype=np.complex128)
        m[self.out_bits, self.in_bits] = self.scalar
        return m


def decompose_gate(gate: Gate) -> list[SingleEntryTerm]:
    """The 16 single-entry terms of a gate, (in, out) pairs in lexicographic order."""
    u = gate.matrix
    return [SingleEntryTerm(complex(u[y, x]), x, y) for x in range(4) for y in range(4)]


class _Search:
    """Shared, read-only context of one amplitude evaluation."""

    def __init__(self, n, layout, x, y, max_work, force, stats):
        self.n = n
        self.layout = layout
        self.x = x
        self.y = y
        self.max_work = max_work
        self.force = force
        self.stats = stats

    def xbit(self, q):
        return (self.x >> (self.n - q)) & 1

    def ybit(self, q):
        return (self.y >> (self.n - q)) & 1


@functools.lru_cache(maxsize=4096)
def _cut_of(layout: GridLayout, rect: Rect) -> tuple[CutSet, tuple[int, ...]]:
    cut = find_cut(layout, rect) if rect.size > 1 else None
    return cut, tuple(rect.qubits(layout))


def _chain_broken(ctx: _Search, qubits, ops) -> bool:
    """True when pinned bits on some qubit disagree, making the amplitude exactly 0."""
    known = {q: ctx.xbit(q) for q in qubits}
    for op in ops:
        if op is None:
            continue
        if op[0] == _ONE:
            q = op[1]
            k = known[q]
            if k is not None and k != op[2]:
                return True
            known[q] = op[3]
        else:
            known[op[1]] = None
            known[op[2]] = None
    return any(k is not None and k != ctx.ybit(q) for q, k in known.items())


def _node(ctx: _Search, rect: Rect, ops: list) -> complex:
    cut, qubits = _cut_of(ctx.layout, rect)
    if _chain_broken(ctx, qubits, ops):
        return 0j
    if cut is None:
        acc = 1.0 + 0j
        for op in ops:
            if op is not None:
                acc *= op[4]
        return acc

    side_a = cut.side_a
    base_a: list = [None] * len(ops)
    base_b: list = [None] * len(ops)
    crossing = []
    for i, op in enumerate(ops):
        if op is None:
            continue
        if op[0] == _ONE:
            (base_a if op[1] in side_a else base_b)[i] = op
            continue
        in_a, in_b = op[1] in side_a, op[2] in side_a
        if in_a and in_b:
            base_a[i] = op
        elif not in_a and not in_b:
            base_b[i] = op
        else:
            crossing.append(i)

    r = len(crossing)
    if ctx.stats is not None:
        ctx.stats.append((rect.size, len(cut.edges), r))
    if 16 ** r > ctx.max_work and not ctx.force:
        raise LimitExceeded(f"grid cut has |R| = {r} crossing gates: 16^{r} = {16 ** r} "
                            f"terms exceed the work limit {ctx.max_work:g}")
    if r == 0:
        amp_a = _node(ctx, cut.rect_a, base_a)
        if amp_a == 0:
            return 0j
        return amp_a * _node(ctx, cut.rect_b, base_b)

    # For each crossing gate and each of its two qubits, what pins the bit
    # entering / leaving it: ("fixed", bit), ("tau", j) for another crossing
    # gate's choice, or None when a two-qubit gate inside a side mixes it.
    slot = {i: j for j, i in enumerate(crossing)}
    last_on: dict[int, int] = {}
    before: dict[tuple[int, int], int] = {}
    after: dict[tuple[int, int], int] = {}
    for i, op in enumerate(ops):
        if op is None:
            continue
        qs = (op[1],) if op[0] == _ONE else (op[1], op[2])
        for q in qs:
            prev = last_on.get(q, -1)
            before[(i, q)] = prev
            if prev >= 0:
                after[(prev, q)] = i
            last_on[q] = i

    def pin_in(i, q):
        p = before[(i, q)]
        if p < 0:
            return ("fixed", ctx.xbit(q))
        op = ops[p]
        if op[0] == _ONE:
            return ("fixed", op[3])
        if p in slot:
            return ("tau", slot[p], q)
        return None

    def pin_out(i, q):
        nx = after.get((i, q), -1)
        if nx < 0:
            return ("fixed", ctx.ybit(q))
        op = ops[nx]
        if op[0] == _ONE:
            return ("fixed", op[2])
        return None  # later crossing gates check against us, mixing gates don't pin

    plans = []
    for i in crossing:
        _, a, b, mat = ops[i]
        plans.append((i, a, b, mat, a in side_a,
                      pin_in(i, a), pin_in(i, b), pin_out(i, a), pin_out(i, b)))

    choice: list = [None] * r  # (in_bits, out_bits, scalar) per crossing gate

    def out_bit_of(j, q):
        _, a, _, _, _, _, _, _, _ = plans[j]
        out = choice[j][1]
        return out >> 1 if q == a else out & 1

    def ok_in(pin, bit):
        if pin is None:
            return True
        if pin[0] == "fixed":
            return pin[1] == bit
        return out_bit_of(pin[1], pin[2]) == bit

    total = 0j

    def dfs(j):
        nonlocal total
        if j == r:
            ops_a = list(base_a)
            ops_b = list(base_b)
            for (i, a, b, _, a_in_a, *_), (xin, yout, alpha) in zip(plans, choice):
                ea = (_ONE, a, xin >> 1, yout >> 1)
                eb = (_ONE, b, xin & 1, yout & 1)
                if a_in_a:
                    ops_a[i] = (*ea, alpha)
                    ops_b[i] = (*eb, 1.0)
                else:
                    ops_b[i] = (*ea, 1.0)
                    ops_a[i] = (*eb, alpha)
            amp_a = _node(ctx, cut.rect_a, ops_a)
            if amp_a != 0:
                total += amp_a * _node(ctx, cut.rect_b, ops_b)
            return
        _, a, b, mat, _, in_a, in_b, out_a, out_b = plans[j]
        for xin in range(4):
            if not (ok_in(in_a, xin >> 1) and ok_in(in_b, xin & 1)):
                continue
            for yout in range(4):
                if out_a is not None and out_a[1] != yout >> 1:
                    continue
                if out_b is not None and out_b[1] != yout & 1:
                    continue
                alpha = mat[yout][xin]
                if alpha == 0:
                    continue
                choice[j] = (xin, yout, alpha)
                dfs(j + 1)
        choice[j] = None

    dfs(0)
    return total


def _as_ops(circuit: Circuit) -> list:
    return [(_TWO, g.qubits[0], g.qubits[1], g.matrix.tolist()) for g in circuit.gates]


def amplitude_gridcut(circuit: Circuit | LayeredCircuit, x, y, *,
                      max_work: float = DEFAULT_MAX_WORK, force: bool = False,
                      stats: list | None = None) -> complex:
    """<y|C|x> for a circuit on a grid by recursive cutting.

    ``stats``, when given, collects (cells, cut edges, crossing gates) for
    every recursion node.
    """
    circ = circuit.circuit if isinstance(circuit, LayeredCircuit) else circuit
    if circ.layout is None:
        raise CircuitError("grid-cut simulation needs a circuit with a grid layout")
    xi, yi = as_index(circ.n, x), as_index(circ.n, y)
    ctx = _Search(circ.n, circ.layout, xi, yi, max_work, force, stats)
    return complex(_node(ctx, Rect.full(circ.layout), _as_ops(circ)))
