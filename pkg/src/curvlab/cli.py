"""Command-line front end.

    curvlab verify  --suite kahler-l2 --n 2 --n 3 --trials 20 --seed 42
    curvlab fixture --kind diagonal --n 2 --param a=1 --param b=2 --out diag.json

`verify` runs one suite (or all of them) and writes the report to stdout or
--out; a one-line summary and the wall time go to stderr so the report bytes
stay reproducible.  Exit status is 0 when every gating check passes, 1 on
verification failure, 2 on usage errors.
"""

from __future__ import annotations

import argparse
import sys
import time

from . import __version__
from .harness import (
    FIXTURE_KINDS,
    SUITES,
    SuiteConfig,
    _dumps,
    emit_fixture,
    run_suite,
)
from .linalg import InvalidTensorError, ResourceLimitError


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="curvlab",
        description="Verify sphere-average curvature identities by independent routes.",
    )
    parser.add_argument("--version", action="version", version=f"curvlab {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run a verification suite and emit a report")
    verify.add_argument("--suite", choices=("all",) + SUITES, default="all")
    verify.add_argument(
        "--n",
        dest="n_list",
        action="append",
        type=int,
        metavar="N",
        help="dimension to test; repeatable (default: 1 2 3)",
    )
    verify.add_argument("--trials", type=int, default=20, help="random tensors per dimension (default 20)")
    verify.add_argument("--mc-samples", type=int, default=0, help="Monte Carlo samples per case; 0 skips MC")
    verify.add_argument("--seed", type=int, default=42)
    verify.add_argument("--rel-tol", type=float, default=1e-10)
    verify.add_argument("--format", choices=("json", "csv"), default="json")
    verify.add_argument("--out", default="-", help="report path; '-' writes to stdout (default)")
    verify.add_argument("--fixture", default=None, help="tensor JSON to verify instead of random draws")

    fixture = sub.add_parser("fixture", help="emit a tensor fixture as JSON")
    fixture.add_argument("--kind", choices=FIXTURE_KINDS, required=True)
    fixture.add_argument("--n", type=int, default=2)
    fixture.add_argument(
        "--param",
        dest="params",
        action="append",
        default=[],
        metavar="KEY=VALUE",
        help="fixture parameter, e.g. c=2 or a=1 or diag=1,0,2; repeatable",
    )
    fixture.add_argument("--seed", type=int, default=42)
    fixture.add_argument("--out", default="-", help="fixture path; '-' writes to stdout (default)")
    return parser


def _write(text: str, path: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as fh:
            fh.write(text)


def _parse_params(pairs) -> dict:
    params = {}
    for pair in pairs:
        key, sep, value = pair.partition("=")
        if not sep or not key:
            raise ValueError(f"parameter must look like key=value, got {pair!r}")
        params[key] = value
    return params


def _cmd_verify(args) -> int:
    config = SuiteConfig(
        suite=args.suite,
        n_list=tuple(args.n_list) if args.n_list else (1, 2, 3),
        trials=args.trials,
        mc_samples=args.mc_samples,
        seed=args.seed,
        rel_tol=args.rel_tol,
        format=args.format,
        output=args.out,
        fixture=args.fixture,
    )
    start = time.perf_counter()
    report = run_suite(config)
    text = report.to_json() if config.format == "json" else report.to_csv()
    _write(text, args.out)
    summary = report.summary
    print(
        f"{config.suite}: {summary['passes']}/{summary['cases']} checks passed"
        f" (worst rel diff {summary['worst_rel_diff']:.3g})"
        f" in {time.perf_counter() - start:.2f}s",
        file=sys.stderr,
    )
    return report.exit_code()


def _cmd_fixture(args) -> int:
    data = emit_fixture(args.kind, args.n, _parse_params(args.params), args.seed)
    _write(_dumps(data) + "\n", args.out)
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command == "verify":
            return _cmd_verify(args)
        return _cmd_fixture(args)
    except (ValueError, InvalidTensorError, ResourceLimitError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
