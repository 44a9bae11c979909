"""Command-line interface: ``symtd {decompose,experiment,demo-slices,gen}``."""
from __future__ import annotations

import argparse
import sys

import numpy as np

from . import __version__
from .decompose import OstdOptions, WhitenOptions, ostd, whitened_ostd
from .errors import SymtdError, WhiteningFailure, ZeroTensor
from .experiment import (
    ExperimentConfig,
    format_summary,
    instance_spec,
    records_to_csv,
    run_experiment,
    summarize,
)
from .linalg import DEFAULT_TOL
from .metrics import ScoreOptions, normalize_columns, relative_error, solution_score
from .synth import FAMILIES, InstanceSpec, gen_instance
from .tensor import read_factors, read_tensor, write_factors, write_tensor

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_WHITENING = 2


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _solver_flags(p):
    p.add_argument("--method", choices=("ortho", "whiten"), default="ortho")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--randomize", action="store_true", help="apply a random orthogonal rotation first")
    p.add_argument("--max-attempts", type=int, default=100, help="p.s.d. search budget for whitening")
    p.add_argument("--tol", type=float, default=DEFAULT_TOL)


def _size_flags(p, defaults=(3, 4, 2)):
    p.add_argument("--family", choices=FAMILIES, default="orthogonal")
    p.add_argument("--m", type=int, default=defaults[0])
    p.add_argument("--n", type=int, default=defaults[1])
    p.add_argument("--p", type=int, default=defaults[2])
    p.add_argument("--eta", type=float, default=0.0)


def build_parser():
    parser = _Parser(prog="symtd", description=__doc__)
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("decompose", help="decompose a tensor file")
    p.add_argument("input")
    _solver_flags(p)
    p.add_argument("--out", help="write the factors here")
    p.add_argument("--truth", help="factors file to score the result against")
    p.add_argument("--symmetrize", action="store_true", help="average an asymmetric input over permutations")

    p = sub.add_parser("experiment", help="run a seeded Monte Carlo experiment")
    _size_flags(p)
    _solver_flags(p)
    p.add_argument("--instances", type=int, default=100)
    p.add_argument("--runs", type=int, default=10)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="write per-run CSV here")
    p.add_argument("--format", choices=("table", "csv"), default="table")
    p.add_argument("--timing", action="store_true", help="fill wall_time_ms (makes the CSV non-reproducible)")

    p = sub.add_parser("demo-slices", help="why a random slice combination beats a single slice")
    p.add_argument("--seed", type=int, default=0)

    p = sub.add_parser("gen", help="write a synthetic instance and its true factors")
    _size_flags(p)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="tensor file to write")
    p.add_argument("--truth-out", help="factors file (default: OUT.factors)")
    p.add_argument("--clean", action="store_true", help="write the noise-free tensor instead")
    return parser


def cmd_decompose(args, out):
    a = read_tensor(args.input, symmetrize_input=args.symmetrize)
    base = OstdOptions(randomize=args.randomize, nonzero_tol=args.tol, rng=np.random.default_rng(args.seed))
    attempts = None
    if args.method == "ortho":
        d = ostd(a, base)
    else:
        opts = WhitenOptions(base=base, max_psd_attempts=args.max_attempts, psd_tol=args.tol)
        try:
            report = whitened_ostd(a, opts)
        except WhiteningFailure as exc:
            print(f"whitening failed: no p.s.d. slice combination after {exc.attempts} attempts", file=out)
            return EXIT_WHITENING
        d, attempts = report.decomposition, report.psd_attempts

    print(f"predicted rank: {d.rank}", file=out)
    try:
        print(f"relative error: {relative_error(a, d):.6e}", file=out)
    except ZeroTensor:
        print("relative error: undefined (zero tensor)", file=out)
    if attempts is not None:
        print(f"p.s.d. attempts: {attempts}", file=out)
    for k, (lam, x) in enumerate(zip(d.weights, d.factors.T), 1):
        print(f"  factor {k}: lambda = {lam:.10g}  |x| = {np.linalg.norm(x):.6f}", file=out)
    if args.truth:
        truth = read_factors(args.truth)
        score = solution_score(normalize_columns(d, a.order), normalize_columns(truth, a.order),
                               ScoreOptions(m=a.order)) if d.rank else 0.0
        print(f"solution score: {score:.6f}", file=out)
    if args.out:
        write_factors(args.out, d)
    return EXIT_OK


def cmd_experiment(args, out):
    cfg = ExperimentConfig(
        family=args.family,
        m=args.m,
        n=args.n,
        p=args.p,
        eta=args.eta,
        instances=args.instances,
        runs=args.runs,
        seed=args.seed,
        method=args.method,
        randomize=args.randomize,
        max_attempts=args.max_attempts,
        tol=args.tol,
        jobs=args.jobs,
        timing=args.timing,
    )
    if cfg.family == "nie":
        cfg = ExperimentConfig(**{**cfg.__dict__, "m": None, "n": None, "p": None})
    spec = instance_spec(cfg, 0)  # validates sizes before any work
    records = run_experiment(cfg)
    text = records_to_csv(records)
    if args.out:
        with open(args.out, "w", newline="") as fh:
            fh.write(text)
    if args.format == "csv":
        out.write(text)
    else:
        summary = summarize(records, spec.p, cfg.error_threshold(), cfg.method == "whiten")
        print(format_summary(summary, spec.m, spec.n, spec.p), file=out)
    return EXIT_OK


def demo_slices(seed=0, weights=(3.0, 2.0, 1.0)):
    """Predicted ranks on ``sum_k w_k e_k^3`` for three choices of slice weights."""
    gt = gen_instance(InstanceSpec(m=3, n=3, family="identity", weights=tuple(weights)))
    a = gt.observed
    e1 = np.array([1.0, 0.0, 0.0])
    rng = np.random.default_rng(seed)
    return {
        "single slice": ostd(a, OstdOptions(rng=rng), coefficients=e1).rank,
        "random combination": ostd(a, OstdOptions(rng=rng)).rank,
        "single slice after random rotation": ostd(a, OstdOptions(randomize=True, rng=rng), coefficients=e1).rank,
    }


def cmd_demo_slices(args, out):
    print("tensor: sum_k w_k e_k^3 with w = (3, 2, 1), true rank 3", file=out)
    print("slice A(:,:,1) has a single nonzero entry, w_1 at (1,1)", file=out)
    for name, rank in demo_slices(args.seed).items():
        print(f"  {name:<36} predicted rank {rank}", file=out)
    return EXIT_OK


def cmd_gen(args, out):
    spec = InstanceSpec(
        m=None if args.family == "nie" else args.m,
        n=None if args.family == "nie" else args.n,
        p=None if args.family in ("nie", "identity") else args.p,
        eta=args.eta,
        family=args.family,
        seed=args.seed,
    )
    gt = gen_instance(spec)
    truth_path = args.truth_out or f"{args.out}.factors"
    write_tensor(args.out, gt.clean if args.clean else gt.observed)
    write_factors(truth_path, gt.truth)
    print(f"wrote {args.out} and {truth_path}", file=out)
    return EXIT_OK


COMMANDS = {
    "decompose": cmd_decompose,
    "experiment": cmd_experiment,
    "demo-slices": cmd_demo_slices,
    "gen": cmd_gen,
}


def main(argv=None, out=None):
    out = out or sys.stdout
    args = build_parser().parse_args(argv)
    try:
        return COMMANDS[args.command](args, out)
    except (OSError, SymtdError) as exc:
        print(f"symtd: error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":
    sys.exit(main())
