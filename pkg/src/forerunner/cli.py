"""Command-line front end.

    python -m forerunner scenario run <spec-file>
    python -m forerunner sweep <spec-file>
    python -m forerunner accept <suite> [--report out.json]

Exit codes: 0 pass, 1 compute error, 2 spec error, 3 acceptance failure.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from . import io

EXIT_OK, EXIT_COMPUTE, EXIT_SPEC, EXIT_ACCEPT = 0, 1, 2, 3


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="forerunner", description="Forerunner model: scenarios and acceptance suites")
    sub = p.add_subparsers(dest="command", required=True)

    sc = sub.add_parser("scenario", help="figure-reproduction scenarios")
    sc_sub = sc.add_subparsers(dest="action", required=True)
    run = sc_sub.add_parser("run", help="run one scenario spec (JSON or key = value)")
    run.add_argument("spec_file", type=Path)

    sw = sub.add_parser("sweep", help="run a parameter sweep spec")
    sw.add_argument("spec_file", type=Path)

    acc = sub.add_parser("accept", help="run an acceptance suite")
    acc.add_argument("suite")
    acc.add_argument("--report", type=Path, default=None, help="write the JSON report here")
    return p


def _run_spec(path: Path, force: str | None) -> int:
    from .scenarios import load_spec, run_scenario

    try:
        spec = load_spec(path, force_scenario=force)
    except io.SpecError as exc:
        print(f"spec error: {exc}", file=sys.stderr)
        return EXIT_SPEC
    try:
        summary = run_scenario(spec)
    except Exception as exc:  # any numerical failure is reported with scenario context
        print(f"compute error in scenario {spec.scenario}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    out = Path(spec.output_path)
    for name in summary["files"] + ["summary.json"]:
        print(out / name)
    return EXIT_OK


def _accept(suite: str, report: Path | None) -> int:
    from .acceptance import SUITES, run_suite

    if suite not in SUITES:
        print(f"spec error: unknown suite {suite!r}; choose from {', '.join(SUITES)}", file=sys.stderr)
        return EXIT_SPEC
    try:
        rep = run_suite(suite, echo=print)
    except Exception as exc:
        print(f"compute error in suite {suite}: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_COMPUTE
    if report is not None:
        io.write_json(rep, report)
    print(f"suite {suite}: {'PASS' if rep['passed'] else 'FAIL'}")
    return EXIT_OK if rep["passed"] else EXIT_ACCEPT


def main(argv: list[str] | None = None) -> int:
    args = _build_parser().parse_args(argv)
    if args.command == "scenario":
        return _run_spec(args.spec_file, None)
    if args.command == "sweep":
        return _run_spec(args.spec_file, "sweep")
    return _accept(args.suite, args.report)


if __name__ == "__main__":
    sys.exit(main())
