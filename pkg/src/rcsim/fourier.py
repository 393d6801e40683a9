"""Fourier spectra of +-1 valued Boolean functions, Fourier Sampling and Fishing.

Coefficients use the unitary normalisation

    fhat(z) = 2^(-n/2) * sum_x f(x) (-1)^(x.z),

so sum_z fhat(z)^2 = 2^n. Internally the transform is done over the integers
(``s(z) = 2^(n/2) fhat(z)``) and every threshold test is an exact integer
comparison: |fhat(z)| >= 1 iff s(z)^2 >= 2^n.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy import stats

from .core import BasisState, as_index
from .dense import sample_from_probs
from .rng import as_generator

MAX_BITS = 24


def _check_bits(n: int) -> None:
    if not 0 <= n <= MAX_BITS:
        raise ValueError(f"Boolean functions are supported up to n = {MAX_BITS} bits, got {n}")


@dataclass(frozen=True, eq=False)
class BooleanFn:
    """f: {0,1}^n -> {-1,+1} as a table indexed by the input's basis index."""

    n: int
    table: np.ndarray = field(repr=False)

    def __post_init__(self):
        _check_bits(self.n)
        t = np.asarray(self.table)
        if t.shape != (1 << self.n,):
            raise ValueError(f"expected {1 << self.n} table entries, got shape {t.shape}")
        if not np.all((t == 1) | (t == -1)):
            raise ValueError("table entries must be +1 or -1")
        t = t.astype(np.int8)
        t.flags.writeable = False
        object.__setattr__(self, "table", t)

    @classmethod
    def constant(cls, n: int, value: int = 1) -> "BooleanFn":
        return cls(n, np.full(1 << n, value, dtype=np.int8))

    @classmethod
    def character(cls, n: int, z) -> "BooleanFn":
        """x -> (-1)^(x.z)."""
        zi = as_index(n, z)
        x = np.arange(1 << n, dtype=np.int64)
        p = x & zi
        for shift in (16, 8, 4, 2, 1):
            p ^= p >> shift
        return cls(n, 1 - 2 * (p & 1).astype(np.int8))

    def to_hex(self) -> str:
        return table_to_hex(self)


def random_boolean_fn(n: int, rng) -> BooleanFn:
    """Uniformly random f, one random bit per table entry."""
    _check_bits(n)
    bits = as_generator(rng).integers(0, 2, size=1 << n, dtype=np.int8)
    return BooleanFn(n, 1 - 2 * bits)


def wht_unnormalized(values) -> np.ndarray:
    """Integer Walsh-Hadamard transform: out[z] = sum_x v[x] (-1)^(x.z)."""
    a = np.array(values, dtype=np.int64)
    size = a.shape[0]
    if size & (size - 1):
        raise ValueError(f"length must be a power of two, got {size}")
    h = 1
    while h < size:
        a = a.reshape(-1, 2, h)
        a = np.stack((a[:, 0] + a[:, 1], a[:, 0] - a[:, 1]), axis=1)
        h *= 2
    return a.reshape(size)


@dataclass(frozen=True, eq=False)
class FourierTable:
    n: int
    sums: np.ndarray = field(repr=False)  # exact integer sums s(z)

    @property
    def coeffs(self) -> np.ndarray:
        return self.sums * 2.0 ** (-self.n / 2)

    def sampling_probs(self) -> np.ndarray:
        """2^-n * fhat(z)^2, the Fourier Sampling distribution."""
        s = self.sums.astype(np.float64)
        return s * s / 4.0 ** self.n

    def big(self) -> np.ndarray:
        """Mask of z with |fhat(z)| >= 1."""
        return self.sums * self.sums >= (1 << self.n)


def wht(f: BooleanFn) -> FourierTable:
    return FourierTable(f.n, wht_unnormalized(f.table))


def _spectrum(f) -> FourierTable:
    return f if isinstance(f, FourierTable) else wht(f)


def fourier_sample(f, rng) -> BasisState:
    """One z drawn with probability 2^-n * fhat(z)^2."""
    return fourier_samples(f, 1, rng)[0]


def fourier_samples(f, count: int, rng) -> list[BasisState]:
    spec = _spectrum(f)
    return [BasisState(spec.n, int(i)) for i in sample_from_probs(spec.sampling_probs(), count, rng)]


def fishing_success(f, z) -> bool:
    spec = _spectrum(f)
    s = int(spec.sums[as_index(spec.n, z)])
    return s * s >= (1 << spec.n)


def adv_f(f) -> float:
    """Fourier Sampling mass on coefficients with |fhat| >= 1."""
    spec = _spectrum(f)
    return float(np.sum(spec.sampling_probs()[spec.big()]))


def succ_constants() -> tuple[float, float]:
    """Limiting Fishing success of one Fourier sample and of a uniform guess."""
    succ_r = math.erfc(1 / math.sqrt(2))
    succ_q = 2 / math.sqrt(2 * math.pi) * math.exp(-0.5) + succ_r
    return succ_q, succ_r


def exact_fishing_rates(n: int) -> tuple[float, float]:
    """Exact (quantum, uniform guess) Fishing success over random f at finite n.

    Each s(z) is distributed as 2K - 2^n with K ~ Binomial(2^n, 1/2).
    """
    size = 1 << n
    k = np.arange(size + 1)
    s = 2 * k - size
    pmf = stats.binom.pmf(k, size, 0.5)
    big = s.astype(np.int64) ** 2 >= size
    succ_r = float(np.sum(pmf[big]))
    succ_q = float(np.sum(pmf[big] * s[big].astype(np.float64) ** 2)) / size
    return succ_q, succ_r


# --------------------------------------------------------------------------
# hex truth tables: entry x is bit (2^n - 1 - x) of the integer, bit 1 means f(x) = -1
# --------------------------------------------------------------------------

def table_to_hex(f: BooleanFn) -> str:
    if f.n < 2:
        raise ValueError("hex truth tables need n >= 2")
    bits = (f.table < 0).astype(np.uint8)
    packed = np.packbits(bits)
    text = packed.tobytes().hex()
    return text[: (1 << f.n) // 4]


def table_from_hex(text: str) -> BooleanFn:
    text = "".join(text.split()).lower()
    if not text or any(c not in "0123456789abcdef" for c in text):
        raise ValueError("truth table must be a non-empty hex string")
    size = 4 * len(text)
    n = size.bit_length() - 1
    if size != 1 << n:
        raise ValueError(f"hex truth table has {size} bits, not a power of two")
    raw = bytes.fromhex(text if len(text) % 2 == 0 else text + "0")
    bits = np.unpackbits(np.frombuffer(raw, dtype=np.uint8))[:size]
    return BooleanFn(n, 1 - 2 * bits.astype(np.int8))
