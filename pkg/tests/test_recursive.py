import tracemalloc

import numpy as np
import pytest

from rcsim.core import Circuit, Gate, GridLayout, layering
from rcsim.dense import amplitude_dense, evolve
from rcsim.ensembles import haar_unitary, random_layered_circuit, sample_mu_grid
from rcsim.errors import LimitExceeded
from rcsim.gridcut import amplitude_gridcut
from rcsim.recursive import (amplitude_hybrid, amplitude_savitch, amplitude_tradeoff,
                             amplitude_tradeoff_grid)
from rcsim.rng import RngStream

from conftest import random_general, random_grid


def _pairs(n, count, rng):
    return [(int(rng.integers(1 << n)), int(rng.integers(1 << n))) for _ in range(count)]


class TestSavitch:
    def test_single_layer_read_off(self, rng):
        u = haar_unitary(4, rng)
        c = Circuit(2, (Gate((1, 2), u),))
        assert amplitude_savitch(c, "00", "01") == u[1, 0]

    def test_untouched_qubit_must_agree(self, rng):
        c = Circuit(3, (Gate((1, 2), haar_unitary(4, rng)),))
        assert amplitude_savitch(c, "000", "001") == 0
        assert amplitude_savitch(c, "001", "111") != 0

    def test_empty(self):
        assert amplitude_savitch(Circuit(3), 1, 1) == 1
        assert amplitude_savitch(Circuit(3), 1, 2) == 0

    def test_random_n5_d4(self, rng):
        c = random_layered_circuit(5, 4, rng)
        for x, y in _pairs(5, 20, rng):
            assert abs(amplitude_savitch(c, x, y) - amplitude_dense(c, x, y)) < 1e-9

    @pytest.mark.parametrize("n", [3, 4, 5])
    def test_sum_over_outputs(self, n, rng):
        c = random_layered_circuit(n, 5, rng)
        total = sum(abs(amplitude_savitch(c, 0, y)) ** 2 for y in range(1 << n))
        assert abs(total - 1) < 1e-8

    def test_odd_depth_split(self, rng):
        c = random_layered_circuit(4, 7, rng)
        assert layering(c).d == 7
        want = evolve(c, 6).amps
        got = [amplitude_savitch(c, 6, y) for y in range(16)]
        np.testing.assert_allclose(got, want, atol=1e-12)

    def test_partitions_agree(self, rng):
        c = random_layered_circuit(6, 6, rng)
        ref = amplitude_savitch(c, 3, 40)
        for parts in (2, 3, 7):
            for threads in (1, 4):
                got = amplitude_savitch(c, 3, 40, partitions=parts, threads=threads)
                assert abs(got - ref) < 1e-12
        a = amplitude_savitch(c, 3, 40, partitions=3, threads=1)
        b = amplitude_savitch(c, 3, 40, partitions=3, threads=3)
        assert a == b

    def test_qubit_cap(self):
        with pytest.raises(LimitExceeded):
            amplitude_savitch(Circuit(13), 0, 0)

    def test_no_state_sized_allocation(self, rng):
        n = 20
        c = random_layered_circuit(n, 2, rng)
        amplitude_savitch(c, 0, 0, max_qubits=n)  # compile outside the trace
        tracemalloc.start()
        amplitude_savitch(c, 5, 9, max_qubits=n)
        _, peak = tracemalloc.get_traced_memory()
        tracemalloc.stop()
        assert peak < (1 << n) * 16 // 64


class TestTradeoff:
    def test_k0_is_dense(self, rng):
        c = random_layered_circuit(5, 5, rng)
        for x, y in _pairs(5, 10, rng):
            assert abs(amplitude_tradeoff(c, x, y, 0) - amplitude_dense(c, x, y)) < 1e-10

    def test_kn_is_savitch(self, rng):
        c = random_layered_circuit(5, 5, rng)
        for x, y in _pairs(5, 10, rng):
            assert abs(amplitude_tradeoff(c, x, y, 5) - amplitude_savitch(c, x, y)) < 1e-10

    def test_random_n6_k3(self, rng):
        c = random_layered_circuit(6, 4, rng)
        for x, y in _pairs(6, 20, rng):
            assert abs(amplitude_tradeoff(c, x, y, 3) - amplitude_dense(c, x, y)) < 1e-9

    def test_all_k_general_gates(self, rng):
        c = random_general(5, 12, rng)
        for k in range(6):
            for x, y in _pairs(5, 5, rng):
                assert abs(amplitude_tradeoff(c, x, y, k) - amplitude_dense(c, x, y)) < 1e-9

    def test_validation(self, rng):
        c = random_layered_circuit(4, 2, rng)
        with pytest.raises(ValueError):
            amplitude_tradeoff(c, 0, 0, 5)
        with pytest.raises(LimitExceeded):
            amplitude_tradeoff(c, 0, 0, 0, max_block_qubits=3)

    def test_empty(self):
        assert amplitude_tradeoff(Circuit(3), 4, 4, 1) == 1


class TestHybrid:
    def test_shallow_delegates_exactly(self, rng):
        c = random_grid(3, 3, 5, rng)
        lc = layering(c)
        assert lc.d <= 3
        for x, y in _pairs(9, 5, rng):
            assert amplitude_hybrid(c, x, y) == amplitude_gridcut(lc, x, y)

    def test_n9_d8(self):
        c = sample_mu_grid(9, 14, RngStream(6))
        lc = layering(c)
        assert 4 <= lc.d <= 8
        gen = np.random.default_rng(1)
        for x, y in _pairs(9, 5, gen):
            assert abs(amplitude_hybrid(lc, x, y, 1.0) - amplitude_dense(c, x, y)) < 1e-9

    def test_identity_circuit(self):
        g = GridLayout(3, 3)
        gates = [Gate(p, np.eye(4)) for p in [(1, 2), (4, 5), (7, 8), (2, 3), (5, 6), (8, 9)]]
        c = Circuit(9, tuple(gates), g)
        assert layering(c).d == 2
        assert amplitude_hybrid(c, "011010110", "011010110") == 1

    def test_without_layout_is_savitch(self, rng):
        c = random_layered_circuit(5, 4, rng)
        assert amplitude_hybrid(c, 3, 7) == amplitude_savitch(c, 3, 7)

    def test_small_c_matches_dense(self, rng):
        c = random_grid(2, 2, 10, rng)
        for x, y in _pairs(4, 10, rng):
            assert abs(amplitude_hybrid(c, x, y, 0.5) - amplitude_dense(c, x, y)) < 1e-9


class TestTradeoffGrid:
    @pytest.mark.parametrize("k", [0, 2, 4])
    def test_matches_dense(self, k, rng):
        c = random_grid(2, 2, 10, rng)
        for x, y in _pairs(4, 5, rng):
            assert abs(amplitude_tradeoff_grid(c, x, y, k) - amplitude_dense(c, x, y)) < 1e-9
