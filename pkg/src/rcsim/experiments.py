"""Reproduction harness for the random-circuit statistics plus backend benchmarks.

Every experiment is a pure function of its parameters and seed. Per-sample
randomness comes from ``RngStream(seed, key)`` substreams, and samples may be
evaluated on worker threads; results are always aggregated in sample order,
so the thread count never changes a single output byte.

CSV schemas (one file per table, ``<experiment>_<table>.csv``):

* prob_hist / probs:        index, scaled_probability        (2^n * p)
* adv_dist / samples:       sample, adv
* adv_dist / histogram:     bin_lo, bin_hi, count
* var_decay / variance:     n, m, samples, mean_adv, var_adv, reference  (0.1/n)
* fourier / trials:         trial, quantum_hits, guess_hits, shots, adv
* hog / instances:          instance, attempts, adv, honest_heavy, honest_passed,
                            cheat_heavy, cheat_passed
* bench / timings:          backend, n, d, m, repetitions, median_seconds
"""
from __future__ import annotations

import csv
import io
import json
import math
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np
from scipy import stats as sps

from .backends import amplitude
from .core import Circuit
from .dense import prob_list, sample_from_probs
from .ensembles import EnsembleSpec, random_layered_circuit, sample_mu_general, sample_mu_grid, sample_nu_grid
from .errors import RcsimError
from .fourier import adv_f, exact_fishing_rates, random_boolean_fn, succ_constants, wht
from .hog import HogInstance, hog_generate, hog_verify, uphalf
from .rng import RngStream

C_THR = (1 + math.log(2)) / 2
AGREEMENT_ATOL = 1e-9


@dataclass
class ExperimentReport:
    name: str
    params: dict
    stats: dict = field(default_factory=dict)
    tables: dict = field(default_factory=dict)  # table -> (header, rows)
    csv_paths: list = field(default_factory=list)

    def table_csv(self, table: str) -> str:
        header, rows = self.tables[table]
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        for row in rows:
            w.writerow([repr(v) if isinstance(v, float) else v for v in row])
        return buf.getvalue()

    def write(self, out_dir: str | os.PathLike) -> list[str]:
        os.makedirs(out_dir, exist_ok=True)
        paths = []
        for table in self.tables:
            path = os.path.join(os.fspath(out_dir), f"{self.name}_{table}.csv")
            with open(path, "w", newline="") as fh:
                fh.write(self.table_csv(table))
            paths.append(path)
        self.csv_paths = paths
        return paths

    def summary(self) -> dict:
        return {"name": self.name, "params": self.params, "stats": self.stats,
                "csv": [os.path.basename(p) for p in self.csv_paths]}

    def to_json(self) -> str:
        return json.dumps(self.summary(), sort_keys=True, indent=2)


def _map_ordered(fn: Callable, items: Sequence, threads: int) -> list:
    if threads <= 1:
        return [fn(i) for i in items]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, items))


def _mean_std(values: np.ndarray) -> tuple[float, float]:
    return float(np.mean(values)), float(np.std(values, ddof=1)) if values.size > 1 else 0.0


# --------------------------------------------------------------------------
# output-probability statistics
# --------------------------------------------------------------------------

def exp_prob_histogram(n: int, m: int, seed: int, *, circuit: Circuit | None = None) -> ExperimentReport:
    """Scaled output probabilities of one mu_grid circuit and their KS distance to Exp(1).

    ``circuit`` replaces the random draw (used for sanity checks).
    """
    if circuit is None:
        circuit = sample_mu_grid(n, m, RngStream(seed, (0,)))
    n = circuit.n
    scaled = prob_list(circuit).probs * (1 << n)
    ks = sps.kstest(scaled, "expon")
    rows = [(i, float(v)) for i, v in enumerate(scaled)]
    return ExperimentReport(
        "prob_hist", {"n": n, "m": circuit.m, "seed": seed},
        {"ks_statistic": float(ks.statistic), "ks_pvalue": float(ks.pvalue),
         "scaled_median": float(np.median(scaled)), "ln2": math.log(2)},
        {"probs": (["index", "scaled_probability"], rows)})


def _grid_adv(n, m, seed, i):
    return uphalf(prob_list(sample_mu_grid(n, m, RngStream(seed, (i,)))).probs)


def exp_adv_distribution(n: int, m: int, samples: int, seed: int, *,
                         threads: int = 1, bins: int = 40) -> ExperimentReport:
    """adv(C) over i.i.d. mu_grid circuits: per-sample values, histogram, mean and std."""
    if samples < 2:
        raise ValueError(f"need at least 2 samples, got {samples}")
    advs = np.array(_map_ordered(lambda i: _grid_adv(n, m, seed, i), range(samples), threads))
    mean, std = _mean_std(advs)
    counts, edges = np.histogram(advs, bins=bins)
    hist = [(float(edges[j]), float(edges[j + 1]), int(counts[j])) for j in range(bins)]
    return ExperimentReport(
        "adv_dist", {"n": n, "m": m, "samples": samples, "seed": seed},
        {"mean": mean, "std": std, "min": float(advs.min()), "max": float(advs.max()),
         "c_thr": C_THR, "frac_at_least_5_8": float(np.mean(advs >= 5 / 8))},
        {"samples": (["sample", "adv"], [(i, float(a)) for i, a in enumerate(advs)]),
         "histogram": (["bin_lo", "bin_hi", "count"], hist)})


def _general_adv(n, m, seed, i):
    return uphalf(prob_list(sample_mu_general(n, m, RngStream(seed, (n, i)))).probs)


def exp_variance_decay(n_list: Sequence[int], samples_per_n: int, seed: int, *,
                       threads: int = 1) -> ExperimentReport:
    """Sample variance of adv(C) for C from mu_general with n^2 gates, per n."""
    if samples_per_n < 2:
        raise ValueError(f"need at least 2 samples per n, got {samples_per_n}")
    rows = []
    for n in n_list:
        m = n * n
        advs = np.array(_map_ordered(lambda i: _general_adv(n, m, seed, i),
                                     range(samples_per_n), threads))
        rows.append((int(n), m, samples_per_n, float(np.mean(advs)),
                     float(np.var(advs, ddof=1)), 0.1 / n))
    below = all(r[4] <= r[5] for r in rows if r[0] >= 6)
    inversions = sum(1 for a, b in zip(rows, rows[1:]) if b[4] > a[4])
    return ExperimentReport(
        "var_decay", {"n_list": [int(n) for n in n_list], "samples": samples_per_n, "seed": seed},
        {"below_reference_for_n_ge_6": below, "variance_inversions": inversions},
        {"variance": (["n", "m", "samples", "mean_adv", "var_adv", "reference"], rows)})


# --------------------------------------------------------------------------
# Fourier Fishing
# --------------------------------------------------------------------------

def _fourier_trial(n, seed, shots, t):
    f = random_boolean_fn(n, RngStream(seed, (t, 0)))
    spec = wht(f)
    big = spec.big()
    gen = RngStream(seed, (t, 1)).generator()
    q = sample_from_probs(spec.sampling_probs(), shots, gen)
    g = gen.integers(0, 1 << n, size=shots)
    return int(np.count_nonzero(big[q])), int(np.count_nonzero(big[g])), adv_f(spec)


def exp_fourier_success(n: int, trials: int, seed: int, *, shots: int = 1,
                        threads: int = 1) -> ExperimentReport:
    """Fishing success of Fourier samples and of uniform guesses over random f.

    Each trial draws a fresh f and makes ``shots`` independent attempts of
    each strategy; rates are hits / (trials * shots).
    """
    if not 1 <= n <= 16:
        raise ValueError(f"n must be in [1, 16], got {n}")
    if trials < 1 or shots < 1:
        raise ValueError("trials and shots must be >= 1")
    out = _map_ordered(lambda t: _fourier_trial(n, seed, shots, t), range(trials), threads)
    q_hits = np.array([o[0] for o in out])
    g_hits = np.array([o[1] for o in out])
    advs = np.array([o[2] for o in out])
    succ_q, succ_r = succ_constants()
    exact_q, exact_r = exact_fishing_rates(n)
    total = trials * shots
    return ExperimentReport(
        "fourier", {"n": n, "trials": trials, "shots": shots, "seed": seed},
        {"quantum_success": float(q_hits.sum() / total),
         "guess_success": float(g_hits.sum() / total),
         "adv_mean": float(advs.mean()),
         "adv_var": float(advs.var(ddof=1)) if trials > 1 else 0.0,
         "low_adv_frequency": float(np.mean(advs < succ_q - 1 / n)),
         "succ_q": succ_q, "succ_r": succ_r,
         "exact_quantum_success": exact_q, "exact_guess_success": exact_r},
        {"trials": (["trial", "quantum_hits", "guess_hits", "shots", "adv"],
                    [(t, int(q_hits[t]), int(g_hits[t]), shots, float(advs[t]))
                     for t in range(trials)])})


# --------------------------------------------------------------------------
# HOG end to end
# --------------------------------------------------------------------------

def _hog_instance(n, m, k, threshold, seed, i):
    spec = EnsembleSpec("grid_conditional", n, m, threshold)
    drawn = sample_nu_grid(spec, RngStream(seed, (i, 0)))
    inst = HogInstance(drawn.circuit, k)
    honest = hog_verify(inst, hog_generate(inst, RngStream(seed, (i, 1))))
    guesses = RngStream(seed, (i, 2)).generator().integers(0, 1 << n, size=k)
    cheat = hog_verify(inst, [int(z) for z in guesses])
    return (i, drawn.attempts, float(drawn.adv), honest.heavy_count, honest.passed,
            cheat.heavy_count, cheat.passed)


def exp_hog(n: int, m: int, instances: int, k: int, seed: int, *,
            threshold: float = 0.7, threads: int = 1) -> ExperimentReport:
    """Honest samplers versus uniform guessing on conditioned grid circuits."""
    rows = _map_ordered(lambda i: _hog_instance(n, m, k, threshold, seed, i),
                        range(instances), threads)
    return ExperimentReport(
        "hog", {"n": n, "m": m, "instances": instances, "k": k,
                "threshold": threshold, "seed": seed},
        {"honest_passed": sum(r[4] for r in rows), "cheat_passed": sum(r[6] for r in rows),
         "honest_heavy_fraction": float(np.mean([r[3] for r in rows]) / k),
         "cheat_heavy_fraction": float(np.mean([r[5] for r in rows]) / k)},
        {"instances": (["instance", "attempts", "adv", "honest_heavy", "honest_passed",
                        "cheat_heavy", "cheat_passed"], rows)})


# --------------------------------------------------------------------------
# backend timings
# --------------------------------------------------------------------------

BENCH_BACKENDS = ("dense", "paths", "savitch", "tradeoff", "gridcut", "hybrid")


def _bench_circuit(n, d, seed, grid):
    if grid:
        # about d layers worth of gates; the layered depth is reported as measured
        return sample_mu_grid(n, max(n, d * n // 2), RngStream(seed, (n, d)))
    return random_layered_circuit(n, d, RngStream(seed, (n, d)))


def bench_backends(n_list: Sequence[int], d_list: Sequence[int], repetitions: int, seed: int, *,
                   backends: Sequence[str] = BENCH_BACKENDS, pairs: int = 3, grid: bool = False,
                   max_paths: int = 10 ** 6) -> ExperimentReport:
    """Median wall-clock time per (backend, n, d) after an agreement check against dense.

    Circuits are d layers of random matchings, or mu_grid circuits with
    d*n/2 gates when ``grid`` is set (grid backends only run on those).
    """
    from .core import layering

    rows = []
    for n in n_list:
        for d in d_list:
            circ = _bench_circuit(n, d, seed, grid)
            actual_d = layering(circ).d
            usable = [b for b in backends
                      if (b not in ("gridcut", "hybrid") or circ.layout is not None)
                      and (b != "paths" or 4 ** circ.m <= max_paths)]
            gen = RngStream(seed, (n, d, 1)).generator()
            xs = [(int(gen.integers(1 << n)), int(gen.integers(1 << n))) for _ in range(pairs)]
            for b in usable:
                for x, y in xs:
                    want = amplitude(circ, x, y, "dense")
                    got = amplitude(circ, x, y, b)
                    if abs(got - want) > AGREEMENT_ATOL:
                        raise RcsimError(f"backend {b} disagrees with dense by {abs(got - want):.3g} "
                                         f"at n={n}, d={actual_d}")
            x, y = xs[0]
            for b in usable:
                times = []
                for _ in range(repetitions):
                    t0 = time.perf_counter()
                    amplitude(circ, x, y, b)
                    times.append(time.perf_counter() - t0)
                rows.append((b, int(n), actual_d, circ.m, repetitions, float(np.median(times))))
    return ExperimentReport(
        "bench", {"n_list": list(n_list), "d_list": list(d_list),
                  "repetitions": repetitions, "seed": seed, "grid": grid},
        {"rows": len(rows), "agreement_atol": AGREEMENT_ATOL},
        {"timings": (["backend", "n", "d", "m", "repetitions", "median_seconds"], rows)})
