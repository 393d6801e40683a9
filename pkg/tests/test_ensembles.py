from collections import Counter

import numpy as np
import pytest
from scipy import stats

from rcsim.core import unitarity_error
from rcsim.ensembles import (EnsembleSpec, haar_state, haar_states, haar_unitary, sample,
                             sample_mu_general, sample_mu_grid, sample_nu_grid)
from rcsim.errors import CircuitError, SamplingError
from rcsim.rng import RngStream, as_generator


class TestRng:
    def test_same_address_same_draws(self):
        a = RngStream(7, (3, 1)).generator().random(5)
        b = RngStream(7, (3, 1)).generator().random(5)
        np.testing.assert_array_equal(a, b)

    def test_streams_independent_of_interleaving(self):
        s1, s2 = RngStream(7, (1,)), RngStream(7, (2,))
        g1 = s1.generator()
        g1.random(100)
        ref = s2.generator().random(3)
        np.testing.assert_array_equal(s2.generator().random(3), ref)
        assert not np.array_equal(s1.generator().random(3), ref)

    def test_child(self):
        assert RngStream(1).child(4, 2).key == (0, 4, 2)
        assert RngStream(1, 5).key == (5,)

    def test_seed_range(self):
        with pytest.raises(ValueError):
            RngStream(-1)
        with pytest.raises(ValueError):
            RngStream(2 ** 64)
        RngStream(2 ** 64 - 1)

    def test_as_generator(self):
        g = np.random.default_rng(0)
        assert as_generator(g) is g
        with pytest.raises(TypeError):
            as_generator("seed")


class TestHaar:
    @pytest.mark.parametrize("dim", [2, 4])
    def test_unitary(self, dim, rng):
        for _ in range(200):
            assert unitarity_error(haar_unitary(dim, rng)) < 1e-12

    def test_bad_dimension(self, rng):
        with pytest.raises(ValueError):
            haar_unitary(3, rng)
        with pytest.raises(ValueError):
            haar_state(1, rng)

    def test_dim2_first_moment_and_uniform_law(self):
        gen = RngStream(101).generator()
        p = np.array([abs(haar_unitary(2, gen)[0, 0]) ** 2 for _ in range(100_000)])
        assert abs(p.mean() - 0.5) < 0.005
        assert stats.kstest(p, "uniform").pvalue > 0.01

    def test_dim2_column_contrast(self):
        gen = RngStream(102).generator()
        vals = []
        for _ in range(100_000):
            u = haar_unitary(2, gen)
            vals.append(abs(abs(u[0, 0]) ** 2 - abs(u[1, 0]) ** 2))
        assert abs(np.mean(vals) - 0.5) < 0.005

    def test_state_normalised(self, rng):
        for dim in (2, 4, 64):
            assert abs(haar_state(dim, rng).norm() - 1) < 1e-12

    def test_state_dim2_uniform(self):
        p = np.abs(haar_states(2, 100_000, RngStream(103))[:, 0]) ** 2
        assert stats.kstest(p, "uniform").statistic < 0.01

    def test_state_dim4_mean(self):
        p = np.abs(haar_states(4, 100_000, RngStream(104))[:, 0]) ** 2
        assert abs(p.mean() - 0.25) < 0.003

    def test_single_state_matches_batched_law(self):
        gen = RngStream(105).generator()
        p = np.array([abs(haar_state(2, gen).amps[0]) ** 2 for _ in range(20_000)])
        assert stats.kstest(p, "uniform").pvalue > 0.01


class TestGridEnsemble:
    def test_structure(self):
        c = sample_mu_grid(9, 81, RngStream(3))
        assert c.m == 81 and c.layout is not None
        touched = {q for g in c.gates for q in g.qubits}
        assert touched == set(range(1, 10))
        for t, g in enumerate(c.gates[:9], 1):
            assert g.qubits[0] == t
        assert all(c.layout.adjacent(*g.qubits) for g in c.gates)

    def test_deterministic(self):
        a = sample_mu_grid(9, 81, RngStream(3))
        b = sample_mu_grid(9, 81, RngStream(3))
        assert all(np.array_equal(g.matrix, h.matrix) and g.qubits == h.qubits
                   for g, h in zip(a.gates, b.gates))

    def test_preconditions(self):
        with pytest.raises(CircuitError, match="perfect square"):
            sample_mu_grid(10, 20, RngStream(0))
        with pytest.raises(CircuitError):
            sample_mu_grid(9, 8, RngStream(0))
        with pytest.raises(CircuitError):
            sample_mu_grid(1, 5, RngStream(0))

    def test_later_gates_uniform_over_edges(self):
        c = sample_mu_grid(4, 4 + 8000, RngStream(8))
        counts = Counter(tuple(sorted(g.qubits)) for g in c.gates[4:])
        assert len(counts) == 4
        assert stats.chisquare(list(counts.values())).pvalue > 0.001


class TestGeneralEnsemble:
    def test_pairs_uniform(self):
        c = sample_mu_general(4, 10_000, RngStream(4))
        counts = Counter(g.qubits for g in c.gates)
        assert len(counts) == 6
        for v in counts.values():
            assert abs(v / 10_000 - 1 / 6) < 0.02

    def test_distinct_and_deterministic(self):
        a = sample_mu_general(6, 50, RngStream(1))
        assert all(g.qubits[0] != g.qubits[1] for g in a.gates)
        b = sample_mu_general(6, 50, RngStream(1))
        assert all(np.array_equal(g.matrix, h.matrix) for g, h in zip(a.gates, b.gates))

    def test_preconditions(self):
        with pytest.raises(CircuitError):
            sample_mu_general(1, 3, RngStream(0))
        with pytest.raises(CircuitError):
            sample_mu_general(3, 0, RngStream(0))


class TestConditional:
    def test_spec_validation(self):
        with pytest.raises(ValueError):
            EnsembleSpec("ring", 4, 4)
        with pytest.raises(CircuitError):
            EnsembleSpec("grid", 10, 10)
        with pytest.raises(ValueError):
            EnsembleSpec("grid_conditional", 9, 81, threshold=-0.1)
        EnsembleSpec("general", 10, 10)

    def test_threshold_met(self):
        s = sample_nu_grid(EnsembleSpec("grid_conditional", 9, 81, 0.7), RngStream(2))
        assert s.adv >= 0.7 and s.attempts >= 1

    def test_zero_threshold_accepts_first(self):
        s = sample_nu_grid(EnsembleSpec("grid_conditional", 9, 81, 0.0), RngStream(2))
        assert s.attempts == 1

    def test_impossible_threshold(self):
        spec = EnsembleSpec("grid_conditional", 4, 4, 1.01, max_attempts=5)
        with pytest.raises(SamplingError, match="5 attempts"):
            sample_nu_grid(spec, RngStream(2))

    def test_few_attempts_at_default_threshold(self):
        spec = EnsembleSpec("grid_conditional", 9, 81, 0.7)
        attempts = [sample_nu_grid(spec, RngStream(s)).attempts for s in range(100)]
        assert sum(a <= 3 for a in attempts) >= 99

    def test_custom_oracle(self):
        calls = []

        def oracle(c):
            calls.append(c)
            return 0.5 if len(calls) < 3 else 0.9

        s = sample_nu_grid(EnsembleSpec("grid_conditional", 4, 4, 0.7), RngStream(0), oracle)
        assert s.attempts == 3 and s.adv == 0.9

    def test_sample_dispatch(self):
        assert sample(EnsembleSpec("general", 5, 7), RngStream(1)).layout is None
        assert sample(EnsembleSpec("grid", 4, 6), RngStream(1)).layout is not None
        assert sample(EnsembleSpec("grid_conditional", 4, 6), RngStream(1)).m == 6
