"""Command-line front door.

Subcommands::

    mgfmarg example N          reproduce one of the ten worked cases
    mgfmarg marginal           compute a marginal from a config file
    mgfmarg fit-mmle           maximize the marginal over fixed effects
    mgfmarg verify SUITE       run a verification suite

Exit codes: 0 pass, 1 usage/config error, 2 verification failure.
Machine output (``--format records``) is one JSON object per line with
stable field names; identical invocations produce byte-identical records.
"""

from __future__ import annotations

import argparse
import json
import math
import sys
import time

import numpy as np

from .errors import ConfigError, MgfMargError
from .examples import EXAMPLE_NUMBERS, run_example
from .fitting import fit_cake_mmle
from .models import CakeData, cake_design, load_table, make_cake_dataset
from .verify import SUITES, run_suite

__all__ = ["main"]


def _emit_record(payload: dict) -> None:
    print(json.dumps(payload, sort_keys=True))


def _cmd_example(args) -> int:
    reports = []
    failed = False
    for n in args.numbers:
        rep = run_example(n, seed=args.seed, mc_iters=args.mc_iters,
                          tolerance_override=args.tolerance_override)
        reports.append(rep)
        failed = failed or not rep.passed
    if args.format == "records":
        for rep in reports:
            extras = {k: v for k, v in rep.extras.items()
                      if not k.startswith("seconds")}
            _emit_record({
                "record": "example", "example": rep.number,
                "log_marginal": rep.log_mgf, "log_oracle": rep.log_oracle,
                "abs_log_diff": rep.abs_log_diff, "tolerance": rep.tolerance,
                "pass": rep.passed, **extras,
            })
    else:
        for rep in reports:
            status = "PASS" if rep.passed else "FAIL"
            print(f"example {rep.number} ({rep.title}): {status}")
            for line in rep.lines:
                print(f"  {line}")
    return 0 if not failed else 2


def _cmd_marginal(args) -> int:
    from .config import load_marginal_config

    task = load_marginal_config(args.config)
    t0 = time.perf_counter()
    result = task.run()
    seconds = time.perf_counter() - t0
    if args.format == "records":
        _emit_record({
            "record": "marginal", "log_marginal": result.log_value,
            "sign": result.sign, "path": result.path.value,
            "orders": [float(o) for o in result.orders_used],
            "seconds": seconds,
        })
    else:
        print(f"log marginal : {result.log_value:.15g}")
        if result.log_value > -700:
            print(f"marginal     : {math.exp(result.log_value):.10g}")
        print(f"path         : {result.path.value}")
        print(f"orders       : {list(result.orders_used)}")
        print(f"seconds      : {seconds:.4f}")
    return 0


def _cmd_fit_mmle(args) -> int:
    from .config import load_fit_config

    task = load_fit_config(args.config)
    if task.data_path is not None:
        table = load_table(task.data_path)
        for col in ("recipe", "temperature", "replication", "angle"):
            if col not in table:
                raise ConfigError("fit.data", f"column {col!r} missing from "
                                  f"{task.data_path}")
        data = CakeData(recipe=table["recipe"].astype(int),
                        temperature=table["temperature"].astype(int),
                        replication=table["replication"].astype(int),
                        angle=table["angle"],
                        a_true=np.full(cake_design(
                            table["recipe"].astype(int),
                            table["temperature"].astype(int)).shape[1], np.nan),
                        xi=task.xi, alpha=task.alpha)
    else:
        data = make_cake_dataset(seed=task.seed, xi=task.xi, alpha=task.alpha)
    t0 = time.perf_counter()
    fit = fit_cake_mmle(data, xi=task.xi, alpha=task.alpha, a0=task.start,
                        max_evals=task.max_evals)
    seconds = time.perf_counter() - t0
    if args.format == "records":
        _emit_record({
            "record": "fit", "coefficients": [float(c) for c in fit.coefficients],
            "log_marginal": fit.log_marginal, "iterations": fit.n_iterations,
            "evaluations": fit.n_evaluations, "converged": fit.converged,
            "seconds": seconds,
        })
    else:
        print(f"coefficients : {np.array2string(fit.coefficients, precision=6)}")
        print(f"log marginal : {fit.log_marginal:.10g}")
        print(f"evaluations  : {fit.n_evaluations} (converged={fit.converged})")
        print(f"seconds      : {seconds:.2f}")
        if not fit.converged:
            print("warning      : simplex search stopped before the tolerance; "
                  "best point so far is reported")
    return 0


def _cmd_verify(args) -> int:
    results = run_suite(args.suite, seed=args.seed)
    n_pass = sum(r.passed for r in results)
    if args.format == "records":
        for r in results:
            _emit_record({"record": "check", "suite": args.suite,
                          "name": r.name, "pass": r.passed, "detail": r.detail})
        _emit_record({"record": "summary", "suite": args.suite,
                      "passed": n_pass, "total": len(results)})
    else:
        for r in results:
            print(f"{'PASS' if r.passed else 'FAIL'} {r.name}: {r.detail}")
        print(f"{args.suite}: {n_pass}/{len(results)} checks passed")
    return 0 if n_pass == len(results) else 2


class _Parser(argparse.ArgumentParser):
    """argparse exits 2 on usage errors; the contract here reserves 2 for
    verification failures, so usage problems exit 1 instead."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(1)


def _build_parser() -> argparse.ArgumentParser:
    parser = _Parser(
        prog="mgfmarg",
        description="Exact Poisson/gamma marginal likelihoods from prior-mgf "
                    "derivatives, with verification oracles.")
    parser.add_argument("--format", choices=("text", "records"), default="text",
                        help="human text or line-delimited JSON records")
    sub = parser.add_subparsers(dest="command", required=True)

    def add_format_flag(p):
        # accepted after the subcommand too; SUPPRESS keeps a pre-subcommand
        # value from being clobbered by a subparser default
        p.add_argument("--format", choices=("text", "records"),
                       default=argparse.SUPPRESS,
                       help="human text or line-delimited JSON records")

    p_ex = sub.add_parser("example", help="reproduce worked cases 1..10")
    add_format_flag(p_ex)
    p_ex.add_argument("numbers", nargs="+", type=int, metavar="N",
                      help="example numbers (1..10)")
    p_ex.add_argument("--seed", type=int, default=42)
    p_ex.add_argument("--mc-iters", type=int, default=10 ** 6,
                      help="Monte Carlo iterations for example 4")
    p_ex.add_argument("--tolerance-override", type=float, default=None)
    p_ex.set_defaults(func=_cmd_example)

    p_marg = sub.add_parser("marginal", help="compute a marginal from a config")
    add_format_flag(p_marg)
    p_marg.add_argument("--config", required=True)
    p_marg.set_defaults(func=_cmd_marginal)

    p_fit = sub.add_parser("fit-mmle", help="maximize the marginal over fixed effects")
    add_format_flag(p_fit)
    p_fit.add_argument("--config", required=True)
    p_fit.set_defaults(func=_cmd_fit_mmle)

    p_ver = sub.add_parser("verify", help="run a verification suite")
    add_format_flag(p_ver)
    p_ver.add_argument("suite", choices=sorted(SUITES))
    p_ver.add_argument("--seed", type=int, default=42)
    p_ver.set_defaults(func=_cmd_verify)
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    if getattr(args, "numbers", None) is not None:
        bad = [n for n in args.numbers if n not in EXAMPLE_NUMBERS]
        if bad:
            parser.error(f"example numbers out of range: {bad}")
    try:
        return args.func(args)
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MgfMargError as exc:
        print(f"error: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
