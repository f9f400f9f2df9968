"""Command-line front end.

Exit status: 0 on success, 2 for usage or input errors, 3 when an exhaustive
campaign would exceed the situation budget (``SCK_BUDGET``).
"""
from __future__ import annotations

import argparse
import json
import sys
import time

import numpy as np

from . import __version__
from .bitsim import FaultModel
from .checked import CheckPolicy, CheckTechnique, Operator
from .coverage import (BudgetExceeded, CampaignSpec, run_campaign, run_exhaustive,
                       situation_count)
from .coverage.campaign import budget_from_env
from .coverage.report import (TABLE_WIDTHS, rows_to_csv, table2_rows, table2_text,
                              to_csv, to_json, to_text)
from .fir import (FirConfig, InputFileError, default_taps, fir_fault_campaign,
                  full_sweep, measure_overhead, random_inputs, read_int_file)
from .words import MAX_WIDTH, MIN_WIDTH

EXIT_OK = 0
EXIT_USAGE = 2
EXIT_BUDGET = 3

TABLE2_SAMPLED_WIDTH = 16


class UsageError(Exception):
    pass


def _width(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not MIN_WIDTH <= n <= MAX_WIDTH:
        raise argparse.ArgumentTypeError(f"width {n} out of range {MIN_WIDTH}..{MAX_WIDTH}")
    return n


def _positive(text):
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if n < 1:
        raise argparse.ArgumentTypeError(f"must be >= 1, got {n}")
    return n


def _operator(text):
    try:
        return Operator.parse(text)
    except ValueError:
        raise argparse.ArgumentTypeError(
            f"unknown operator {text!r} (choose add, sub, mul, div)") from None


def _add_output_args(p):
    p.add_argument("--format", choices=("text", "csv", "json"), default="text")
    p.add_argument("--output", "-o", metavar="PATH", help="write the report here instead of stdout")
    p.add_argument("--threads", type=int, default=1,
                   help="worker threads (0 = all cores); results do not depend on it")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="selfcheck",
        description="Self-checking arithmetic: fault-coverage campaigns and FIR benchmarks.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    cov = sub.add_parser("coverage", help="run one fault-coverage campaign")
    cov.add_argument("--op", type=_operator, required=True)
    cov.add_argument("--tech", choices=[t.value for t in CheckTechnique], required=True)
    cov.add_argument("--bits", type=_width, required=True)
    cov.add_argument("--mode", choices=("same-unit", "cross-unit"), default="same-unit")
    how = cov.add_mutually_exclusive_group()
    how.add_argument("--exhaustive", action="store_true", help="enumerate every situation (default)")
    how.add_argument("--sample", type=int, metavar="N", help="draw N situations uniformly")
    cov.add_argument("--seed", type=int, help="seed for --sample")
    cov.add_argument("--fault-model", choices=[m.value for m in FaultModel],
                     default=FaultModel.HYBRID.value)
    _add_output_args(cov)

    t2 = sub.add_parser("table2", help="same-unit addition coverage for n = 1, 2, 3, 4, 8")
    t2.add_argument("--full", action="store_true",
                    help=f"also sample n={TABLE2_SAMPLED_WIDTH}")
    t2.add_argument("--sample", type=int, default=1_000_000, metavar="N",
                    help="draws for the sampled width (default 1000000)")
    t2.add_argument("--seed", type=int, default=1)
    _add_output_args(t2)

    fir = sub.add_parser("fir", help="FIR fault campaign or overhead benchmark")
    what = fir.add_mutually_exclusive_group()
    what.add_argument("--campaign", action="store_true", help="single-fault sweep (default)")
    what.add_argument("--bench", action="store_true", help="time plain, checked and embedded variants")
    _add_fir_args(fir)
    _add_output_args(fir)

    bench = sub.add_parser("bench", help="FIR overhead plus campaign throughput")
    _add_fir_args(bench)
    bench.add_argument("--campaign-bits", type=_width, default=8,
                       help="width of the timed exhaustive addition campaign")
    _add_output_args(bench)
    return parser


def _add_fir_args(p):
    p.add_argument("--taps", metavar="FILE", help="tap file, one integer per line")
    p.add_argument("--input", metavar="FILE", action="append",
                   help="input stream file (repeatable; campaign runs use each as one input)")
    p.add_argument("--policy", choices=[t.value for t in CheckTechnique], default="both",
                   help="technique for + and x (division is unused by the filter)")
    p.add_argument("--bits", type=_width, help="datapath width (default 8 campaign, 16 bench)")
    p.add_argument("--mode", choices=("same-unit", "cross-unit"), default="same-unit")
    p.add_argument("--variant", choices=("checked", "embedded"), default="checked")
    p.add_argument("--runs", type=_positive, default=100, help="random campaign inputs")
    p.add_argument("--samples", type=_positive, default=32, help="samples per campaign input")
    p.add_argument("--length", type=_positive, default=4096, help="samples in the benchmark input")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--repetitions", type=_positive, default=5)


# --- output -----------------------------------------------------------------

def _emit(text: str, path) -> None:
    if path is None:
        sys.stdout.write(text)
        return
    try:
        with open(path, "w", newline="") as fh:
            fh.write(text)
    except OSError as exc:
        raise UsageError(f"cannot write {path}: {exc.strerror or exc}") from exc


def _record(fields: dict, fmt: str) -> str:
    if fmt == "json":
        return json.dumps(fields, indent=2) + "\n"
    if fmt == "csv":
        return rows_to_csv([fields])
    width = max(len(k) for k in fields)
    return "".join(f"{k.ljust(width)}  {v}\n" for k, v in fields.items())


# --- commands ---------------------------------------------------------------

def run_coverage_command(args) -> str:
    if args.sample is not None and args.seed is None:
        raise UsageError("--sample needs --seed")
    if args.sample is None and args.seed is not None:
        raise UsageError("--seed only applies with --sample")
    try:
        spec = CampaignSpec(args.op, args.tech, args.bits, args.mode,
                            sample_count=args.sample, seed=args.seed,
                            fault_model=args.fault_model)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc
    result = run_campaign(spec, budget=budget_from_env(), threads=args.threads)
    if args.format == "csv":
        return to_csv([result])
    if args.format == "json":
        return to_json([result])
    return to_text([result])


def table2_results(threads=1, full=False, sample=1_000_000, seed=1, budget=None):
    results = []
    for n in TABLE_WIDTHS:
        for tech in ("tech1", "tech2", "both"):
            results.append(run_exhaustive(CampaignSpec("add", tech, n), budget=budget,
                                          threads=threads))
    if full:
        for tech in ("tech1", "tech2", "both"):
            spec = CampaignSpec("add", tech, TABLE2_SAMPLED_WIDTH, sample_count=sample, seed=seed)
            results.append(run_campaign(spec, threads=threads))
    return results


def run_table2_command(args) -> str:
    if args.full and args.sample < 10_000:
        raise UsageError("--sample must be >= 10000")
    results = table2_results(args.threads, args.full, args.sample, args.seed,
                             budget=budget_from_env())
    rows = table2_rows(results)
    if args.format == "csv":
        return rows_to_csv(rows)
    if args.format == "json":
        return json.dumps(rows, indent=2) + "\n"
    return table2_text(results)


def _fir_config(args, campaign: bool) -> FirConfig:
    bits = args.bits or (8 if campaign else 16)
    taps = read_int_file(args.taps) if args.taps else default_taps(
        "taps3.txt" if campaign else "taps16.txt")
    try:
        return FirConfig(taps=taps, width=bits, input_length=args.length,
                         policy=CheckPolicy.uniform(args.policy),
                         variant=args.variant)
    except ValueError as exc:
        raise UsageError(str(exc)) from exc


def _fir_inputs(args, cfg, campaign):
    if not args.input:
        if campaign:
            return random_inputs(args.runs, args.samples, cfg.width, args.seed), "random"
        return random_inputs(1, cfg.input_length, cfg.width, args.seed)[0].tolist(), "random"
    streams = [read_int_file(path) for path in args.input]
    if any(not s for s in streams):
        raise UsageError("input files must contain at least one sample")
    if not campaign:
        return [v for s in streams for v in s], ",".join(args.input)
    if len({len(s) for s in streams}) != 1:
        raise UsageError("campaign input files must all have the same length")
    return np.array(streams, dtype=np.int64), ",".join(args.input)


def run_fir_campaign(args) -> dict:
    cfg = _fir_config(args, campaign=True)
    inputs, source = _fir_inputs(args, cfg, campaign=True)
    report = fir_fault_campaign(cfg, full_sweep(cfg), inputs, variant=args.variant,
                                mode=args.mode, threads=args.threads)
    fields = {
        "policy": args.policy, "mode": args.mode, "variant": args.variant,
        "width": cfg.width, "taps": len(cfg.taps), "inputs": len(inputs),
        "samples": inputs.shape[1], "source": source,
        "seed": args.seed if source == "random" else "",
    }
    fields.update(report.as_row())
    return fields


def run_fir_bench(args) -> dict:
    cfg = _fir_config(args, campaign=False)
    samples, source = _fir_inputs(args, cfg, campaign=False)
    r = measure_overhead(cfg, args.repetitions, samples=samples)
    return {
        "policy": args.policy, "width": cfg.width, "taps": len(cfg.taps),
        "samples": len(samples), "source": source, "repetitions": args.repetitions,
        "plain_s": f"{r.plain:.6f}", "checked_s": f"{r.checked:.6f}",
        "embedded_s": f"{r.embedded:.6f}", "checked_ratio": f"{r.checked_ratio:.3f}",
        "embedded_ratio": f"{r.embedded_ratio:.3f}",
    }


def run_fir_command(args) -> str:
    fields = run_fir_bench(args) if args.bench else run_fir_campaign(args)
    return _record(fields, args.format)


def run_bench_command(args) -> str:
    fields = run_fir_bench(args)
    n = args.campaign_bits
    budget = budget_from_env()
    if situation_count(n) > budget:
        raise BudgetExceeded(f"{situation_count(n)} situations exceed the budget of {budget}")
    t0 = time.perf_counter()
    run_exhaustive(CampaignSpec("add", "both", n), budget=budget, threads=args.threads)
    elapsed = time.perf_counter() - t0
    fields.update({
        "campaign_bits": n, "campaign_situations": situation_count(n),
        "campaign_s": f"{elapsed:.6f}",
        "situations_per_s": f"{situation_count(n) / elapsed:.0f}",
    })
    return _record(fields, args.format)


COMMANDS = {
    "coverage": run_coverage_command,
    "table2": run_table2_command,
    "fir": run_fir_command,
    "bench": run_bench_command,
}


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_OK if exc.code in (0, None) else EXIT_USAGE
    try:
        if getattr(args, "threads", 1) < 0:
            raise UsageError("--threads must be >= 0")
        text = COMMANDS[args.command](args)
        _emit(text, args.output)
    except BudgetExceeded as exc:
        print(f"selfcheck: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except (UsageError, InputFileError) as exc:
        print(f"selfcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except ValueError as exc:
        # e.g. a malformed SCK_BUDGET
        print(f"selfcheck: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
