"""Command-line front end.

Exit codes: 0 success, 2 usage or parse error, 3 degenerate input,
4 internal numerical failure.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from pathlib import Path

from homportrait.classifier import UnrealizedPair, classify, is_global_attractor, is_global_repeller
from homportrait.core import BandHit, Degenerate, HomPortraitError, NoConvergence, VectorField, describe
from homportrait.kostlan import expected_lines
from homportrait.montecarlo import DEFAULT_SEED, SamplerConfig, estimate
from homportrait.plotting import render_svg
from homportrait.selfcheck import run_selfcheck

EXIT_OK, EXIT_USAGE, EXIT_DEGENERATE, EXIT_NUMERIC = 0, 2, 3, 4
PARTITIONS_ENV = "HOMPORTRAIT_PARTITIONS"


class UsageError(Exception):
    pass


def count_arg(text: str) -> int:
    """Positive integer, scientific notation allowed (``1e6``)."""
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if value != int(value) or value < 1:
        raise argparse.ArgumentTypeError(f"expected a positive integer, got {text!r}")
    return int(value)


def _default_partitions() -> int:
    raw = os.environ.get(PARTITIONS_ENV)
    if not raw:
        return 1
    try:
        return max(1, int(raw))
    except ValueError:
        raise UsageError(f"{PARTITIONS_ENV} must be an integer, got {raw!r}") from None


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


# --------------------------------------------------------------------------- subcommands


def _attractor_verdict(f: VectorField) -> str:
    try:
        if is_global_attractor(f):
            return "global attractor"
        if is_global_repeller(f):
            return "global repeller"
        return "neither"
    except (BandHit, NoConvergence) as exc:
        return f"undecided ({exc})"


def cmd_classify(args) -> int:
    try:
        f = VectorField.parse(args.coeffs, args.degree)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.degree not in (1, 2, 3):
        raise UsageError("classification is available for degree 1, 2 or 3")
    outcome = classify(f, strict=args.strict, oracle_fallback=not args.no_oracle_fallback)
    if isinstance(outcome, Degenerate):
        reasons = describe(outcome.reasons) + list(outcome.details)
        if args.format == "json":
            _emit(json.dumps({"degree": f.degree, "coeffs": list(f.coeffs), "degenerate": True,
                              "reasons": reasons}, ensure_ascii=False) + "\n", args.out)
        else:
            _emit("degenerate: " + ", ".join(reasons) + "\n", args.out)
        return EXIT_DEGENERATE
    verdict = _attractor_verdict(f) if f.degree % 2 == 1 else None
    if args.format == "json":
        doc = {
            "degree": f.degree,
            "coeffs": list(f.coeffs),
            "label": outcome.label.value,
            "index": outcome.index,
            "lines": outcome.lines,
            "tiebreak_used": outcome.tiebreak_used,
            "index_source": outcome.index_source,
            "warnings": list(outcome.warnings),
            "attractor": verdict,
        }
        _emit(json.dumps(doc, ensure_ascii=False) + "\n", args.out)
    elif args.format == "csv":
        _emit("label,index,lines,index_source\n"
              f"{outcome.label.value},{outcome.index},{outcome.lines},{outcome.index_source}\n", args.out)
    else:
        text = [str(outcome), f"index source: {outcome.index_source}"]
        text += [f"warning: {w}" for w in outcome.warnings]
        if verdict is not None:
            text.append(f"origin: {verdict}")
        _emit("\n".join(text) + "\n", args.out)
    return EXIT_OK


def cmd_estimate(args) -> int:
    partitions = args.partitions if args.partitions is not None else _default_partitions()
    config = SamplerConfig(args.degree, args.samples, args.seed, partitions, args.oracle_fallback)
    report = estimate(config)
    render = {
        "json": lambda: report.to_json(include_timing=args.timing),
        "csv": report.to_csv,
        "text": report.to_text,
    }[args.format]
    _emit(render(), args.out)
    if args.csv:
        Path(args.csv).write_text(report.to_csv(), encoding="utf-8")
    if args.out:
        sys.stdout.write(report.to_text())
    return EXIT_OK


def cmd_lambda(args) -> int:
    value = expected_lines(args.n, args.tol)
    if args.format == "json":
        _emit(json.dumps({"n": args.n, "tol": args.tol, "lambda": value}) + "\n", args.out)
    else:
        _emit(f"{value:.10f}\n", args.out)
    return EXIT_OK


def cmd_selfcheck(args) -> int:
    results = run_selfcheck(args.degree, args.samples, args.seed)
    lines = [r.line() for r in results]
    failed = sum(not r.passed for r in results)
    lines.append(f"{'all checks passed' if not failed else f'{failed} checks failed'}")
    _emit("\n".join(lines) + "\n", args.out)
    return EXIT_OK if not failed else EXIT_NUMERIC


def cmd_svg(args) -> int:
    try:
        f = VectorField.parse(args.coeffs, args.degree)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    title = None
    if f.degree in (1, 2, 3):
        outcome = classify(f)
        title = str(outcome)
    Path(args.out).write_text(render_svg(f, title), encoding="utf-8")
    return EXIT_OK


# --------------------------------------------------------------------------- parser


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="homportrait",
        description="Phase portraits of random planar homogeneous polynomial vector fields.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    def fmt(p, choices=("text", "json", "csv"), default="text"):
        p.add_argument("--format", choices=choices, default=default)
        p.add_argument("--out", help="write the result here instead of stdout")

    p = sub.add_parser("classify", help="classify one field")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--coeffs", required=True, help="comma-separated P then Q coefficients, descending x-power")
    p.add_argument("--strict", action="store_true", help="treat every measure-zero configuration as degenerate")
    p.add_argument("--no-oracle-fallback", action="store_true",
                   help="never replace a non-well-posed closed-form index by the winding number")
    fmt(p)
    p.set_defaults(func=cmd_classify)

    p = sub.add_parser("estimate", help="Monte Carlo portrait probabilities")
    p.add_argument("--degree", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--samples", type=count_arg, default=10**6)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--partitions", type=count_arg, default=None,
                   help=f"worker partitions (default: ${PARTITIONS_ENV} or 1)")
    p.add_argument("--oracle-fallback", action="store_true",
                   help="use the winding number where the closed-form index is not applicable")
    p.add_argument("--csv", help="also write the per-label CSV table here")
    p.add_argument("--timing", action="store_true", help="include wall time in the JSON report")
    fmt(p, default="json")
    p.set_defaults(func=cmd_estimate)

    p = sub.add_parser("lambda", help="expected number of invariant lines Λ_n")
    p.add_argument("--n", type=int, required=True)
    p.add_argument("--tol", type=float, default=1e-10)
    fmt(p, choices=("text", "json"))
    p.set_defaults(func=cmd_lambda)

    p = sub.add_parser("selfcheck", help="closed forms versus numerical oracles")
    p.add_argument("--degree", type=int, required=True, choices=(1, 2, 3))
    p.add_argument("--samples", type=count_arg, default=10**4)
    p.add_argument("--seed", type=int, default=DEFAULT_SEED)
    p.add_argument("--out")
    p.set_defaults(func=cmd_selfcheck)

    p = sub.add_parser("svg", help="direction-field picture with invariant lines")
    p.add_argument("--degree", type=int, required=True)
    p.add_argument("--coeffs", required=True)
    p.add_argument("--out", required=True)
    p.set_defaults(func=cmd_svg)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if getattr(args, "n", 1) < 1 or getattr(args, "tol", 1.0) <= 0:
            raise UsageError("need n >= 1 and tol > 0")
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except UnrealizedPair as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (NoConvergence, HomPortraitError) as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC


if __name__ == "__main__":
    sys.exit(main())
