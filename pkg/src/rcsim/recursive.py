"""Polynomial-space amplitude algorithms built on layer halving.

``amplitude_savitch``
    <y|C|x> = sum_z <y|C_upper|z><z|C_lower|x>, recursing on both halves of
    the layer range; one layer is evaluated directly as a product of gate
    entries. O(n log d) space, O(n (2d)^(n+1)) time.
``amplitude_tradeoff``
    the same recursion on projected block vectors: the Hilbert space is cut
    into 2^k blocks sharing their first k bits, so each level stores one
    2^(n-k) vector and the intermediate sum runs over 2^k blocks.
``amplitude_hybrid``
    the savitch recursion, handing any slice of depth <= c*sqrt(n) to the
    grid-cut algorithm.

Terms that vanish identically are skipped: an intermediate bit on a qubit
that one half never touches must equal the corresponding bit of x (lower
half) or y (upper half), so only bits touched by both halves are summed over.
"""
from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor

import numba
import numpy as np

from .core import Circuit, LayeredCircuit, _apply_2q_inplace, as_index, as_layered, slice_layers
from .errors import CircuitError, LimitExceeded

DEFAULT_MAX_QUBITS = 12
DEFAULT_MAX_BLOCK_QUBITS = 26


def _layer_arrays(layered: LayeredCircuit):
    circ = layered.circuit
    pa, pb, mats = circ.gate_arrays()
    bounds = np.array(layered.bounds, dtype=np.int64)
    touched = np.zeros(layered.d, dtype=np.int64)
    for i in range(layered.d):
        for g in range(bounds[i], bounds[i + 1]):
            touched[i] |= (np.int64(1) << pa[g]) | (np.int64(1) << pb[g])
    return bounds, pa, pb, mats, touched


def _split(l: int, r: int) -> int:
    """Last layer of the lower half of [l, r]: the lower half gets ceil(len/2) layers."""
    return l + (r - l + 2) // 2 - 1


# --------------------------------------------------------------------------
# savitch-style recursion
# --------------------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _mask(touched, l, r):
    m = np.int64(0)
    for i in range(l, r + 1):
        m |= touched[i]
    return m


@numba.njit(cache=True, nogil=True)
def _deposit(j, free):
    """The j-th submask of ``free`` in increasing order."""
    out = np.int64(0)
    f = free
    bit = np.int64(1)
    while f:
        low = f & -f
        if j & bit:
            out |= low
        bit <<= 1
        f &= f - 1
    return out


@numba.njit(cache=True, nogil=True)
def _layer_amp(layer, x, y, bounds, pa, pb, mats, touched):
    if (x ^ y) & ~touched[layer]:
        return 0.0j
    acc = 1.0 + 0.0j
    for g in range(bounds[layer], bounds[layer + 1]):
        a = pa[g]
        b = pb[g]
        col = 2 * ((x >> a) & 1) + ((x >> b) & 1)
        row = 2 * ((y >> a) & 1) + ((y >> b) & 1)
        acc *= mats[g, row, col]
    return acc


@numba.njit(cache=True, nogil=True)
def _savitch(l, r, x, y, bounds, pa, pb, mats, touched):
    if l == r:
        return _layer_amp(l, x, y, bounds, pa, pb, mats, touched)
    mid = l + (r - l + 2) // 2 - 1
    low = _mask(touched, l, mid)
    up = _mask(touched, mid + 1, r)
    if (x ^ y) & ~low & ~up:
        return 0.0j
    free = low & up
    base = (x & ~low) | (y & ~up & low)
    acc = 0.0j
    s = np.int64(0)
    while True:
        z = base | s
        lower = _savitch(l, mid, x, z, bounds, pa, pb, mats, touched)
        if lower != 0:
            acc += _savitch(mid + 1, r, z, y, bounds, pa, pb, mats, touched) * lower
        if s == free:
            break
        s = (s - free) & free
    return acc


@numba.njit(cache=True, nogil=True)
def _savitch_top_range(l, r, x, y, j0, j1, bounds, pa, pb, mats, touched):
    """Top-level partial sum over the submasks numbered j0..j1-1."""
    mid = l + (r - l + 2) // 2 - 1
    low = _mask(touched, l, mid)
    up = _mask(touched, mid + 1, r)
    free = low & up
    base = (x & ~low) | (y & ~up & low)
    acc = 0.0j
    for j in range(j0, j1):
        z = base | _deposit(j, free)
        lower = _savitch(l, mid, x, z, bounds, pa, pb, mats, touched)
        if lower != 0:
            acc += _savitch(mid + 1, r, z, y, bounds, pa, pb, mats, touched) * lower
    return acc


def _check_qubits(n: int, max_qubits: int) -> None:
    if n > max_qubits:
        raise LimitExceeded(f"{n} qubits exceed the recursive backend cap of {max_qubits}")
    if n > 62:
        raise LimitExceeded("basis states are int64 bitmasks: at most 62 qubits")


def amplitude_savitch(circuit: Circuit | LayeredCircuit, x, y, *,
                      max_qubits: int = DEFAULT_MAX_QUBITS,
                      partitions: int = 1, threads: int = 1) -> complex:
    """<y|C|x> by recursive halving of the layer range.

    ``partitions`` splits the outermost intermediate sum into contiguous
    ranges whose partials are added in range order, so the result is
    bit-identical for a fixed partition count whatever ``threads`` is.
    """
    layered = as_layered(circuit)
    n = layered.n
    _check_qubits(n, max_qubits)
    xi, yi = as_index(n, x), as_index(n, y)
    if layered.d == 0:
        return 1.0 + 0j if xi == yi else 0j
    arrays = _layer_arrays(layered)
    l, r = 0, layered.d - 1
    if partitions <= 1 or l == r:
        return complex(_savitch(l, r, np.int64(xi), np.int64(yi), *arrays))

    touched = arrays[-1]
    mid = _split(l, r)
    low, up = int(_mask(touched, l, mid)), int(_mask(touched, mid + 1, r))
    if (xi ^ yi) & ~low & ~up:
        return 0j
    total = 1 << bin(low & up).count("1")
    edges = [total * p // partitions for p in range(partitions + 1)]

    def part(p):
        return _savitch_top_range(l, r, np.int64(xi), np.int64(yi),
                                  edges[p], edges[p + 1], *arrays)

    with ThreadPoolExecutor(max_workers=max(1, threads)) as pool:
        partials = list(pool.map(part, range(partitions)))
    acc = 0j
    for v in partials:
        acc += v
    return complex(acc)


# --------------------------------------------------------------------------
# block-projected space-time tradeoff
# --------------------------------------------------------------------------

@numba.njit(cache=True, nogil=True)
def _apply_1q_inplace(v, m2, p):
    step = np.int64(1) << p
    for i in range(v.shape[0]):
        if i & step == 0:
            v0 = v[i]
            v1 = v[i | step]
            v[i] = m2[0, 0] * v0 + m2[0, 1] * v1
            v[i | step] = m2[1, 0] * v0 + m2[1, 1] * v1


@numba.njit(cache=True, nogil=True)
def _block_layer(layer, s, u, t, nl, bounds, pa, pb, mats, touched):
    """P_t L u for one layer L, with u a vector of block s."""
    out = np.zeros(u.shape[0], dtype=np.complex128)
    high_touched = touched[layer] >> nl
    if (s ^ t) & ~high_touched:
        return out
    out[:] = u
    scalar = 1.0 + 0.0j
    m2 = np.zeros((2, 2), dtype=np.complex128)
    for g in range(bounds[layer], bounds[layer + 1]):
        a = pa[g]
        b = pb[g]
        if a < nl and b < nl:
            _apply_2q_inplace(out, mats[g], a, b)
        elif a >= nl and b >= nl:
            sa = (s >> (a - nl)) & 1
            sb = (s >> (b - nl)) & 1
            ta = (t >> (a - nl)) & 1
            tb = (t >> (b - nl)) & 1
            scalar *= mats[g, 2 * ta + tb, 2 * sa + sb]
        elif a >= nl:
            sa = (s >> (a - nl)) & 1
            ta = (t >> (a - nl)) & 1
            for yb in range(2):
                for xb in range(2):
                    m2[yb, xb] = mats[g, 2 * ta + yb, 2 * sa + xb]
            _apply_1q_inplace(out, m2, b)
        else:
            sb = (s >> (b - nl)) & 1
            tb = (t >> (b - nl)) & 1
            for ya in range(2):
                for xa in range(2):
                    m2[ya, xa] = mats[g, 2 * ya + tb, 2 * xa + sb]
            _apply_1q_inplace(out, m2, a)
    if scalar != 1.0:
        for i in range(out.shape[0]):
            out[i] *= scalar
    return out


@numba.njit(cache=True, nogil=True)
def _project(l, r, s, u, t, nl, bounds, pa, pb, mats, touched):
    """P_t C_[r<-l] u for u in block s."""
    if l == r:
        return _block_layer(l, s, u, t, nl, bounds, pa, pb, mats, touched)
    mid = l + (r - l + 2) // 2 - 1
    low = _mask(touched, l, mid) >> nl
    up = _mask(touched, mid + 1, r) >> nl
    out = np.zeros(u.shape[0], dtype=np.complex128)
    if (s ^ t) & ~low & ~up:
        return out
    free = low & up
    base = (s & ~low) | (t & ~up & low)
    z = np.int64(0)
    while True:
        blk = base | z
        b = _project(l, mid, s, u, blk, nl, bounds, pa, pb, mats, touched)
        if np.any(b != 0):
            out += _project(mid + 1, r, blk, b, t, nl, bounds, pa, pb, mats, touched)
        if z == free:
            break
        z = (z - free) & free
    return out


def amplitude_tradeoff(circuit: Circuit | LayeredCircuit, x, y, k: int, *,
                       max_block_qubits: int = DEFAULT_MAX_BLOCK_QUBITS) -> complex:
    """<y|C|x> with 2^k blocks of 2^(n-k) amplitudes (k=0: dense, k=n: savitch)."""
    layered = as_layered(circuit)
    n = layered.n
    if not 0 <= k <= n:
        raise ValueError(f"block bits k must lie in [0, {n}], got {k}")
    if n - k > max_block_qubits:
        raise LimitExceeded(f"block vectors of 2^{n - k} amplitudes exceed the memory cap "
                            f"of 2^{max_block_qubits}")
    if n > 62:
        raise LimitExceeded("basis states are int64 bitmasks: at most 62 qubits")
    xi, yi = as_index(n, x), as_index(n, y)
    if layered.d == 0:
        return 1.0 + 0j if xi == yi else 0j
    nl = n - k
    low_mask = (1 << nl) - 1
    u = np.zeros(1 << nl, dtype=np.complex128)
    u[xi & low_mask] = 1.0
    out = _project(0, layered.d - 1, np.int64(xi >> nl), u, np.int64(yi >> nl),
                   np.int64(nl), *_layer_arrays(layered))
    return complex(out[yi & low_mask])


# --------------------------------------------------------------------------
# grid-accelerated variants
# --------------------------------------------------------------------------

def _shallow(depth: int, n: int, c: float) -> bool:
    return depth <= c * math.sqrt(n)


def amplitude_hybrid(circuit: Circuit | LayeredCircuit, x, y, c: float = 1.0, *,
                     max_qubits: int = DEFAULT_MAX_QUBITS, max_work: float | None = None,
                     force: bool = False) -> complex:
    """Savitch recursion that delegates slices of depth <= c*sqrt(n) to grid cutting.

    Without a grid layout this is plain ``amplitude_savitch``.
    """
    from . import gridcut

    layered = as_layered(circuit)
    n = layered.n
    if layered.layout is None:
        return amplitude_savitch(layered, x, y, max_qubits=max_qubits)
    _check_qubits(n, max_qubits)
    xi, yi = as_index(n, x), as_index(n, y)
    if layered.d == 0:
        return 1.0 + 0j if xi == yi else 0j
    bounds, pa, pb, mats, touched = _layer_arrays(layered)
    gc_kwargs = {"force": force}
    if max_work is not None:
        gc_kwargs["max_work"] = max_work
    slices: dict[tuple[int, int], LayeredCircuit] = {}

    def rec(l, r, xv, yv):
        if _shallow(r - l + 1, n, c):
            sub = slices.get((l, r))
            if sub is None:
                sub = slices[(l, r)] = slice_layers(layered, l + 1, r + 1)
            return gridcut.amplitude_gridcut(sub, xv, yv, **gc_kwargs)
        if l == r:
            return complex(_layer_amp(l, np.int64(xv), np.int64(yv), bounds, pa, pb, mats, touched))
        mid = _split(l, r)
        low, up = int(_mask(touched, l, mid)), int(_mask(touched, mid + 1, r))
        if (xv ^ yv) & ~low & ~up:
            return 0j
        free = low & up
        base = (xv & ~low) | (yv & ~up & low)
        acc = 0j
        s = 0
        while True:
            z = base | s
            lower = rec(l, mid, xv, z)
            if lower != 0:
                acc += rec(mid + 1, r, z, yv) * lower
            if s == free:
                break
            s = (s - free) & free
        return acc

    return complex(rec(0, layered.d - 1, xi, yi))


def amplitude_tradeoff_grid(circuit: Circuit | LayeredCircuit, x, y, k: int, c: float = 1.0, *,
                            max_block_qubits: int = 12, force: bool = False) -> complex:
    """Block tradeoff whose shallow slices (depth <= c*sqrt(n)) go to grid cutting.

    A shallow slice's projected block map P_t C P_s is assembled entry by
    entry from 2^(2(n-k)) grid-cut amplitudes.
    """
    from . import gridcut

    layered = as_layered(circuit)
    n = layered.n
    if layered.layout is None:
        raise CircuitError("grid tradeoff needs a circuit with a grid layout")
    if not 0 <= k <= n:
        raise ValueError(f"block bits k must lie in [0, {n}], got {k}")
    if n - k > max_block_qubits:
        raise LimitExceeded(f"2^{n - k}-amplitude blocks exceed the cap of 2^{max_block_qubits}")
    xi, yi = as_index(n, x), as_index(n, y)
    if layered.d == 0:
        return 1.0 + 0j if xi == yi else 0j
    nl = n - k
    size = 1 << nl
    bounds, pa, pb, mats, touched = _layer_arrays(layered)

    def project(l, r, s, u, t):
        if _shallow(r - l + 1, n, c):
            sub = slice_layers(layered, l + 1, r + 1)
            out = np.zeros(size, dtype=np.complex128)
            for i in np.flatnonzero(u):
                src = (s << nl) | int(i)
                for j in range(size):
                    out[j] += gridcut.amplitude_gridcut(sub, src, (t << nl) | j, force=force) * u[i]
            return out
        if l == r:
            return _block_layer(l, np.int64(s), u, np.int64(t), np.int64(nl),
                                bounds, pa, pb, mats, touched)
        mid = _split(l, r)
        low = int(_mask(touched, l, mid)) >> nl
        up = int(_mask(touched, mid + 1, r)) >> nl
        out = np.zeros(size, dtype=np.complex128)
        if (s ^ t) & ~low & ~up:
            return out
        free = low & up
        base = (s & ~low) | (t & ~up & low)
        z = 0
        while True:
            b = project(l, mid, s, u, base | z)
            if np.any(b != 0):
                out += project(mid + 1, r, base | z, b, t)
            if z == free:
                break
            z = (z - free) & free
        return out

    u0 = np.zeros(size, dtype=np.complex128)
    u0[xi & (size - 1)] = 1.0
    return complex(project(0, layered.d - 1, xi >> nl, u0, yi >> nl)[yi & (size - 1)])
