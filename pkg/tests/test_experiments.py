import csv
import json
import math

import numpy as np
import pytest

from rcsim.core import Circuit, Gate, GridLayout
from rcsim.experiments import (ExperimentReport, bench_backends, exp_adv_distribution, exp_fourier_success,
                               exp_hog, exp_prob_histogram, exp_variance_decay)


class TestReport:
    def test_csv_and_json(self, tmp_path):
        rep = ExperimentReport("demo", {"n": 2}, {"x": 0.1}, {"rows": (["a", "b"], [(1, 0.5), (2, 1 / 3)])})
        paths = rep.write(tmp_path)
        assert [p.split("/")[-1] for p in paths] == ["demo_rows.csv"]
        with open(paths[0]) as fh:
            rows = list(csv.reader(fh))
        assert rows[0] == ["a", "b"]
        assert float(rows[2][1]) == 1 / 3
        parsed = json.loads(rep.to_json())
        assert parsed["stats"] == {"x": 0.1}


class TestProbHistogram:
    def test_exponential_fit(self):
        rep = exp_prob_histogram(16, 256, 3)
        assert rep.stats["ks_statistic"] < 0.01
        assert abs(rep.stats["scaled_median"] - math.log(2)) < 0.05

    def test_identity_circuit_far_from_exponential(self):
        # p = e_0: scaled values are one 16 and fifteen zeros, far from Exp(1)
        ident = Circuit(4, (), GridLayout(2, 2))
        rep = exp_prob_histogram(4, 0, 0, circuit=ident)
        assert rep.stats["ks_statistic"] > 0.5

    def test_deterministic(self):
        a = exp_prob_histogram(9, 40, 5).to_json()
        assert a == exp_prob_histogram(9, 40, 5).to_json()


class TestAdvDistribution:
    def test_c_thr(self):
        rep = exp_adv_distribution(4, 16, 5, 0)
        assert f"{rep.stats['c_thr']:.6f}" == "0.846574"

    def test_thread_independent(self):
        a = exp_adv_distribution(9, 81, 24, 7, threads=1)
        b = exp_adv_distribution(9, 81, 24, 7, threads=4)
        assert a.to_json() == b.to_json()
        assert a.table_csv("samples") == b.table_csv("samples")

    def test_concentration(self):
        rep = exp_adv_distribution(9, 81, 200, 1)
        assert abs(rep.stats["mean"] - 0.8469) < 0.003
        assert rep.stats["frac_at_least_5_8"] == 1.0


class TestVarianceDecay:
    def test_rows(self):
        rep = exp_variance_decay([4, 6], 40, 2)
        header, rows = rep.tables["variance"]
        assert header[:3] == ["n", "m", "samples"]
        assert [r[1] for r in rows] == [16, 36]
        assert all(r[4] >= 0 for r in rows)


class TestFourierSuccess:
    def test_rates_near_exact(self):
        rep = exp_fourier_success(8, 400, 4, shots=16)
        assert abs(rep.stats["quantum_success"] - rep.stats["exact_quantum_success"]) < 0.03
        assert abs(rep.stats["guess_success"] - rep.stats["exact_guess_success"]) < 0.03
        assert rep.stats["quantum_success"] > rep.stats["guess_success"] + 0.4

    def test_thread_independent(self):
        a = exp_fourier_success(6, 50, 9, threads=1).to_json()
        assert a == exp_fourier_success(6, 50, 9, threads=3).to_json()


class TestHogExperiment:
    def test_small(self):
        rep = exp_hog(9, 81, 4, 100, 1)
        assert rep.stats["honest_passed"] >= 3
        assert rep.stats["cheat_passed"] == 0


class TestBench:
    def test_agreement_and_rows(self):
        rep = bench_backends([4], [2, 4], 1, 0)
        header, rows = rep.tables["timings"]
        assert header[-1] == "median_seconds"
        assert {r[0] for r in rows} >= {"dense", "savitch", "tradeoff"}
        assert all(r[-1] >= 0 for r in rows)

    def test_grid_backends(self):
        rep = bench_backends([4, 9], [2], 1, 0, grid=True)
        assert {"gridcut", "hybrid"} <= {r[0] for r in rep.tables["timings"][1]}

    def test_savitch_grows_with_depth(self):
        rep = bench_backends([6], [2, 8], 3, 0, backends=("savitch",))
        rows = rep.tables["timings"][1]
        assert rows[0][2] < rows[1][2]
        assert rows[0][-1] < rows[1][-1]
