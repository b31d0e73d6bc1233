"""Command line front end.

    eqsig run SPEC [--tol X] [--json] [--seed N] [--max-subdivisions K] [-o OUT]
    eqsig catalog list
    eqsig catalog emit NAME [-o OUT]

Exit status: 0 when every verdict is PASS, 1 on any FAIL, 2 on input errors.
"""
from __future__ import annotations

import argparse
import sys
from pathlib import Path

from .errors import EqsigError, ParseError, TaskError, UnknownFixture, ValidationError


def _parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="eqsig", description="Equivariant signatures, fiber models and bundle checks on finite complexes.")
    sub = p.add_subparsers(dest="command", required=True)
    run = sub.add_parser("run", help="run the tasks of a problem file")
    run.add_argument("spec", help="problem file (JSON)")
    run.add_argument("--tol", type=float, default=None, help="tolerance for complex identities (default 1e-9)")
    run.add_argument("--json", action="store_true", help="print the machine report instead of the text summary")
    run.add_argument("--seed", type=int, default=0, help="seed for sampled automorphisms")
    run.add_argument("--max-subdivisions", type=int, default=2, help="cap on barycentric subdivisions when regularising")
    run.add_argument("-o", "--output", default=None, help="also write the JSON report here")
    cat = sub.add_parser("catalog", help="shipped fixtures")
    csub = cat.add_subparsers(dest="action", required=True)
    csub.add_parser("list", help="list fixture names")
    emit = csub.add_parser("emit", help="print a fixture as a problem file")
    emit.add_argument("name")
    emit.add_argument("-o", "--output", default=None)
    return p


def _write(text: str, path: str | None) -> None:
    if path is None:
        sys.stdout.write(text)
    else:
        Path(path).write_text(text)


def main(argv: list[str] | None = None) -> int:
    args = _parser().parse_args(argv)
    try:
        if args.command == "run":
            from .runner import report_json, report_text, run_problem
            from .specio import load_problem

            prob = load_problem(args.spec, args.tol)
            report = run_problem(prob, args.tol, args.seed, args.max_subdivisions)
            js = report_json(report)
            if args.output:
                Path(args.output).write_text(js)
            sys.stdout.write(js if args.json else report_text(report))
            return 0 if report["verdict"] == "PASS" else 1
        from .catalog import catalog_emit, catalog_list
        from .specio import dumps

        if args.action == "list":
            for name, kind in catalog_list():
                print(f"{name}\t{kind}")
            return 0
        _write(dumps(catalog_emit(args.name)), args.output)
        return 0
    except (ParseError, ValidationError, TaskError, UnknownFixture) as e:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
        return 2
    except FileNotFoundError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except EqsigError as e:
        print(f"error ({type(e).__name__}): {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
