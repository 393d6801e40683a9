"""Command line front end: ``rcsim <command> [options]``.

Machine-readable results (JSON, CSV, circuit and sample files) go to stdout
or ``--out``; human-readable summaries go to stderr. Exit status is 0 on
success, 1 on a domain error and 2 on a usage error.
"""
from __future__ import annotations

import argparse
import json
import sys

from . import experiments as ex
from .backends import BACKENDS, amplitude
from .circuit_io import dumps, load_circuit, save_circuit
from .core import BasisState, as_index, index_to_bits
from .dense import DEFAULT_MAX_QUBITS
from .ensembles import EnsembleSpec, sample, sample_nu_grid
from .errors import RcsimError
from .fourier import adv_f, fishing_success, fourier_samples, random_boolean_fn, table_from_hex, wht
from .hog import DEFAULT_K, HogInstance, hog_generate, hog_verify
from .rng import RngStream


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _emit(args, payload: dict) -> None:
    text = json.dumps(payload, sort_keys=True)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def _note(msg: str) -> None:
    print(msg, file=sys.stderr)


# --------------------------------------------------------------------------
# commands
# --------------------------------------------------------------------------

def cmd_gen(args):
    spec = EnsembleSpec(args.kind, args.n, args.m, args.threshold, args.max_attempts)
    rng = RngStream(args.seed)
    if spec.kind == "grid_conditional":
        drawn = sample_nu_grid(spec, rng)
        circuit = drawn.circuit
        _note(f"accepted after {drawn.attempts} attempts, adv = {drawn.adv:.6f}")
    else:
        circuit = sample(spec, rng)
    if args.out:
        save_circuit(circuit, args.out)
        _note(f"wrote {circuit!r} to {args.out}")
    else:
        print(dumps(circuit))


def cmd_amp(args):
    circuit = load_circuit(args.circuit)
    x = as_index(circuit.n, args.x)
    y = as_index(circuit.n, args.y)
    amp = amplitude(circuit, x, y, args.backend, force=args.force, k=args.k)
    text = '{"backend": "%s", "im": %.12f, "re": %.12f}' % (args.backend, amp.imag, amp.real)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text + "\n")
    else:
        print(text)


def cmd_hog_gen(args):
    spec = EnsembleSpec("grid_conditional", args.n, args.m, args.threshold, args.max_attempts)
    drawn = sample_nu_grid(spec, RngStream(args.seed))
    info = {"n": args.n, "m": args.m, "attempts": drawn.attempts, "adv": drawn.adv}
    if args.out:
        save_circuit(drawn.circuit, args.out)
        print(json.dumps(info, sort_keys=True))
    else:
        print(dumps(drawn.circuit))
    _note(f"accepted after {drawn.attempts} attempts, adv = {drawn.adv:.6f}")


def cmd_hog_solve(args):
    circuit = load_circuit(args.circuit)
    samples = hog_generate(HogInstance(circuit, args.k), RngStream(args.seed))
    text = "".join(z.bits + "\n" for z in samples)
    if args.out:
        with open(args.out, "w") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)


def _read_samples(path: str, n: int) -> list[BasisState]:
    out = []
    with open(path) as fh:
        for lineno, line in enumerate(fh, 1):
            bits = line.strip()
            if not bits:
                continue
            if len(bits) != n:
                raise ValueError(f"{path}:{lineno}: sample {bits!r} has {len(bits)} bits, "
                                 f"circuit has {n} qubits")
            out.append(BasisState.from_bits(bits))
    return out


def cmd_hog_verify(args):
    circuit = load_circuit(args.circuit)
    samples = _read_samples(args.samples, circuit.n)
    backend = args.backend or ("dense" if circuit.n <= DEFAULT_MAX_QUBITS else "hybrid")
    verdict = hog_verify(HogInstance(circuit, len(samples)), samples, backend,
                         threads=args.threads, force=args.force)
    _emit(args, verdict.to_dict())
    _note(verdict.summary())


def _boolean_fn(args):
    if args.table:
        with open(args.table) as fh:
            return table_from_hex(fh.read())
    if args.n is None:
        raise ValueError("give either --table FILE or --n N (random f from --seed)")
    return random_boolean_fn(args.n, RngStream(args.seed, (0,)))


def cmd_fourier_sample(args):
    f = _boolean_fn(args)
    zs = fourier_samples(f, args.count, RngStream(args.seed, (1,)))
    _emit(args, {"n": f.n, "samples": [z.bits for z in zs]})


def cmd_fourier_fish(args):
    f = _boolean_fn(args)
    spec = wht(f)
    z = as_index(f.n, args.z)
    _emit(args, {"n": f.n, "z": index_to_bits(z, f.n),
                 "coefficient": float(spec.coeffs[z]), "success": fishing_success(spec, z)})


def cmd_fourier_adv(args):
    f = _boolean_fn(args)
    _emit(args, {"n": f.n, "adv": adv_f(f)})


def _report(args, report):
    if args.out:
        report.write(args.out)
    print(report.to_json())


def cmd_exp_prob_hist(args):
    _report(args, ex.exp_prob_histogram(args.n, args.m, args.seed))


def cmd_exp_adv_dist(args):
    _report(args, ex.exp_adv_distribution(args.n, args.m, args.samples, args.seed,
                                          threads=args.threads))


def cmd_exp_var_decay(args):
    if args.full:
        n_list, samples = list(range(2, 17)), 1000
    else:
        n_list, samples = args.n_list, args.samples
    _report(args, ex.exp_variance_decay(n_list, samples, args.seed, threads=args.threads))


def cmd_exp_fourier(args):
    _report(args, ex.exp_fourier_success(args.n, args.trials, args.seed, shots=args.shots,
                                         threads=args.threads))


def cmd_exp_bench(args):
    _report(args, ex.bench_backends(args.n_list, args.d_list, args.repetitions, args.seed,
                                    grid=args.grid))


def cmd_exp_hog(args):
    _report(args, ex.exp_hog(args.n, args.m, args.instances, args.k, args.seed,
                             threshold=args.threshold, threads=args.threads))


# --------------------------------------------------------------------------
# parser
# --------------------------------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=0, help="root seed (unsigned 64-bit)")
    common.add_argument("--threads", type=int, default=1, help="worker threads (outputs do not depend on it)")
    common.add_argument("--out", help="output file, or directory for experiment CSVs")
    common.add_argument("--force", action="store_true", help="run past backend work limits")

    parser = argparse.ArgumentParser(prog="rcsim", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("gen", parents=[common], help="sample a random circuit")
    p.add_argument("--kind", choices=("grid", "general", "grid_conditional"), default="grid")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--max-attempts", type=int, default=1000)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("amp", parents=[common], help="one amplitude <y|C|x>")
    p.add_argument("--circuit", required=True)
    p.add_argument("--backend", choices=BACKENDS, default="dense")
    p.add_argument("--x", required=True, help="input bitstring, qubit 1 first")
    p.add_argument("--y", required=True, help="output bitstring, qubit 1 first")
    p.add_argument("--k", type=int, help="block bits for the tradeoff backend (default n)")
    p.set_defaults(func=cmd_amp)

    hog = sub.add_parser("hog", help="heavy output generation").add_subparsers(dest="action", required=True)
    p = hog.add_parser("gen", parents=[common], help="sample a conditioned grid circuit")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--m", type=int, required=True)
    p.add_argument("--threshold", type=float, default=0.7)
    p.add_argument("--max-attempts", type=int, default=1000)
    p.set_defaults(func=cmd_hog_gen)
    p = hog.add_parser("solve", parents=[common], help="measure C|0^n> k times")
    p.add_argument("--circuit", required=True)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.set_defaults(func=cmd_hog_solve)
    p = hog.add_parser("verify", parents=[common], help="count heavy samples")
    p.add_argument("--circuit", required=True)
    p.add_argument("--samples", required=True, help="one bitstring per line")
    p.add_argument("--backend", choices=BACKENDS)
    p.set_defaults(func=cmd_hog_verify)

    four = sub.add_parser("fourier", help="Fourier Sampling and Fishing").add_subparsers(
        dest="action", required=True)
    for name, func, helptext in (("sample", cmd_fourier_sample, "draw z with prob 2^-n fhat(z)^2"),
                                 ("fish", cmd_fourier_fish, "test |fhat(z)| >= 1"),
                                 ("adv", cmd_fourier_adv, "Fourier mass on |fhat| >= 1")):
        p = four.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--table", help="hex truth table file")
        p.add_argument("--n", type=int, help="input bits of a random f drawn from --seed")
        if name == "sample":
            p.add_argument("--count", type=int, default=1)
        if name == "fish":
            p.add_argument("--z", required=True)
        p.set_defaults(func=func)

    exp = sub.add_parser("exp", help="experiments").add_subparsers(dest="action", required=True)
    p = exp.add_parser("prob-hist", parents=[common])
    p.add_argument("--n", type=int, default=16)
    p.add_argument("--m", type=int, default=256)
    p.set_defaults(func=cmd_exp_prob_hist)
    p = exp.add_parser("adv-dist", parents=[common])
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--m", type=int, default=81)
    p.add_argument("--samples", type=int, default=1000)
    p.set_defaults(func=cmd_exp_adv_dist)
    p = exp.add_parser("var-decay", parents=[common])
    p.add_argument("--n-list", type=_int_list, default=[4, 6, 8, 10, 12])
    p.add_argument("--samples", type=int, default=300)
    p.add_argument("--full", action="store_true", help="n = 2..16 with 1000 samples each")
    p.set_defaults(func=cmd_exp_var_decay)
    p = exp.add_parser("fourier", parents=[common])
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--trials", type=int, default=2000)
    p.add_argument("--shots", type=int, default=1)
    p.set_defaults(func=cmd_exp_fourier)
    p = exp.add_parser("bench", parents=[common])
    p.add_argument("--n-list", type=_int_list, default=[4, 6, 8])
    p.add_argument("--d-list", type=_int_list, default=[2, 4, 6])
    p.add_argument("--repetitions", type=int, default=3)
    p.add_argument("--grid", action="store_true", help="grid circuits, adds grid-cut backends")
    p.set_defaults(func=cmd_exp_bench)
    p = exp.add_parser("hog", parents=[common])
    p.add_argument("--n", type=int, default=9)
    p.add_argument("--m", type=int, default=81)
    p.add_argument("--instances", type=int, default=20)
    p.add_argument("--k", type=int, default=DEFAULT_K)
    p.add_argument("--threshold", type=float, default=0.7)
    p.set_defaults(func=cmd_exp_hog)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.threads < 1:
        parser.error("--threads must be >= 1")
    try:
        args.func(args)
    except (RcsimError, ValueError, OSError) as exc:
        print(f"rcsim: error: {exc}", file=sys.stderr)
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
