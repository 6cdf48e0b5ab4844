"""Command-line front end.

Exit codes: 0 success, 1 literal not found (explain) or oracle
disagreement, 2 parse or validation error, 3 inconsistent facts, 4 no
extension, 5 resource limit.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from pathlib import Path

from .diagnosis import RunResult
from .dsl import compile_literal
from .engine import derive_provenance, render_tree
from .errors import (
    DslError, GroundingError, InconsistentFacts, NoExtension, NotFound, ResourceLimitError,
)
from .grounder import ground_theory
from .oracle import enumerate_extensions
from .pipeline import (
    OracleMismatch, Options, ValidationError, __version__, load_scenario, run_scenario, solve,
)
from .rulebase import load_rulebase, validate_stratification, validate_uniqueness

EXIT_OK = 0
EXIT_NOT_FOUND = 1
EXIT_INVALID = 2
EXIT_INCONSISTENT = 3
EXIT_NO_EXTENSION = 4
EXIT_RESOURCE = 5

STATUS_EXIT = {
    "ok": EXIT_OK,
    "invalid": EXIT_INVALID,
    "inconsistent": EXIT_INCONSISTENT,
    "no_extension": EXIT_NO_EXTENSION,
    "resource": EXIT_RESOURCE,
    "error": EXIT_NOT_FOUND,
}


def dumps(obj) -> str:
    return json.dumps(obj, sort_keys=True, ensure_ascii=False)


def _max_ground(args) -> int | None:
    if args.max_ground is not None:
        return args.max_ground
    env = os.environ.get("NORMKIT_MAX_GROUND")
    return int(env) if env else None


def _failure(status: str, message: str) -> RunResult:
    return RunResult(status, version=__version__, message=message)


def _guarded(fn, *a, **kw) -> RunResult:
    """Run ``fn`` and turn library errors into a failed :class:`RunResult`."""
    try:
        return fn(*a, **kw)
    except DslError as e:
        return _failure("invalid", "\n".join(str(d) for d in e.diagnostics))
    except (ValidationError, GroundingError) as e:
        return _failure("invalid", str(e))
    except InconsistentFacts as e:
        return _failure("inconsistent", str(e))
    except NoExtension as e:
        return _failure("no_extension", str(e))
    except ResourceLimitError as e:
        return _failure("resource", str(e))
    except OracleMismatch as e:
        return _failure("error", str(e))


def _print_result(result: RunResult, args, out) -> None:
    if args.json:
        print(dumps(result.to_json()), file=out)
        return
    print(f"status: {result.status}", file=out)
    if not result.diagnoses:
        print("no anomaly found", file=out)
    for i, d in enumerate(result.diagnoses, start=1):
        print(f"{i}. {d.kind} anomaly: agent {d.agent}, state {d.state} ({d.rule_id})", file=out)
        print("   support: " + "; ".join(str(l) for l in d.support), file=out)
    ext = result.extension
    if args.trace and ext is not None:
        print("applied defaults:", file=out)
        for rid in ext.applied:
            print(f"  {rid}", file=out)
        if not ext.complete:
            print("stopped at the first anomaly; the extension is partial", file=out)
        print("other extensions may exist; use --oracle to enumerate them", file=out)
    stats = result.stats
    print(
        f"ground defaults: {stats.get('ground_defaults', 0)}, applied: {stats.get('applied', 0)}, "
        f"backtracks: {stats.get('backtracks', 0)}"
        + (f", extensions: {stats['extensions']}" if "extensions" in stats else ""),
        file=out,
    )


def _options(args) -> Options:
    return Options(
        first_anomaly=args.first_anomaly,
        max_ground=_max_ground(args),
        allow_scenario_rules=args.allow_scenario_rules,
        oracle=args.oracle,
        oracle_cap=args.oracle_cap,
    )


def _load_rules(args):
    return load_rulebase(args.rules) if args.rules else load_rulebase()


def cmd_run(args) -> int:
    try:
        rulebase = _load_rules(args)
    except DslError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_INVALID
    options = _options(args)
    if args.dir:
        files = sorted(Path(args.dir).glob("*.nk"))
        with ThreadPoolExecutor() as pool:
            results = list(pool.map(lambda f: _guarded(run_scenario, rulebase, f, options), files))
        worst = EXIT_OK
        for f, r in zip(files, results):
            line = r.to_json()
            line["scenario"] = str(f)
            print(dumps(line))
            worst = max(worst, STATUS_EXIT[r.status])
        return worst
    if not args.scenario:
        print("error: a scenario file or --dir is required", file=sys.stderr)
        return EXIT_INVALID
    result = _guarded(run_scenario, rulebase, args.scenario, options)
    if result.status != "ok" and not args.json:
        print(f"error: {result.message}", file=sys.stderr)
        return STATUS_EXIT[result.status]
    if result.status != "ok":
        print(result.message, file=sys.stderr)
    _print_result(result, args, sys.stdout)
    return STATUS_EXIT[result.status]


def cmd_check(args) -> int:
    problems: list[str] = []
    try:
        rulebase = _load_rules(args)
    except DslError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_INVALID
    problems += validate_uniqueness(rulebase).violations
    problems += validate_stratification(rulebase).violations
    for path in args.scenarios:
        try:
            load_scenario(rulebase, path, args.allow_scenario_rules)
        except DslError as e:
            problems += [str(d) for d in e.diagnostics]
        except ValidationError as e:
            problems += [f"{path}: {m}" for m in e.messages]
    for p in problems:
        print(p, file=sys.stderr)
    if problems:
        return EXIT_INVALID
    print("ok")
    return EXIT_OK


def cmd_explain(args) -> int:
    try:
        rulebase = _load_rules(args)
        theory = load_scenario(rulebase, args.scenario, args.allow_scenario_rules)
        target = compile_literal(args.literal, theory)
    except DslError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_INVALID
    except ValidationError as e:
        print(e, file=sys.stderr)
        return EXIT_INVALID
    options = Options(max_ground=_max_ground(args))
    result = _guarded(solve, theory, options)
    if result.status != "ok":
        print(f"error: {result.message}", file=sys.stderr)
        return STATUS_EXIT[result.status]
    ext = result.extension
    try:
        tree = derive_provenance(target, ext)
    except NotFound:
        near = sorted((l for l in ext.literals if l.pred == target.pred), key=lambda l: l.key())
        print(f"{target} is not in the extension", file=sys.stderr)
        if near:
            print("literals with the same predicate:", file=sys.stderr)
            for l in near[:20]:
                print(f"  {l}", file=sys.stderr)
        return EXIT_NOT_FOUND
    print(render_tree(tree))
    return EXIT_OK


def cmd_oracle(args) -> int:
    try:
        rulebase = _load_rules(args)
        theory = load_scenario(rulebase, args.scenario, args.allow_scenario_rules)
        program = ground_theory(theory, _max_ground(args))
        extensions = enumerate_extensions(program, args.oracle_cap)
    except DslError as e:
        for d in e.diagnostics:
            print(d, file=sys.stderr)
        return EXIT_INVALID
    except (ValidationError, GroundingError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INVALID
    except InconsistentFacts as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INCONSISTENT
    except ResourceLimitError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_RESOURCE
    from .diagnosis import ANOMALY, DERIVED_ANOMALY

    summary = {
        "extensions": len(extensions),
        "with_anomaly": sum(ANOMALY in e for e in extensions),
        "with_derived_anomaly": sum(DERIVED_ANOMALY in e for e in extensions),
        "version": __version__,
    }
    if args.json:
        print(dumps(summary))
    else:
        for k, v in summary.items():
            print(f"{k}: {v}")
    return EXIT_OK if extensions else EXIT_NO_EXTENSION


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="normkit", description="Norm-based anomaly detection in crash scenarios.")
    parser.add_argument("--version", action="version", version=f"normkit {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("--rules", action="append", metavar="PATH",
                       help="rulebase file or manifest (repeatable; default: bundled rulebase)")
        p.add_argument("--max-ground", type=int, default=None, metavar="N",
                       help="cap on ground defaults (env NORMKIT_MAX_GROUND)")
        p.add_argument("--allow-scenario-rules", action="store_true",
                       help="let scenarios define defaults and expansions")
        p.add_argument("--oracle-cap", type=int, default=20, metavar="N",
                       help="largest default count the enumerator accepts")

    run = sub.add_parser("run", help="solve a scenario and report anomalies")
    common(run)
    run.add_argument("scenario", nargs="?")
    run.add_argument("--dir", help="solve every .nk file in a directory (JSON lines)")
    run.add_argument("--first-anomaly", action="store_true", help="stop once Anomaly is derived")
    run.add_argument("--json", action="store_true")
    run.add_argument("--trace", action="store_true", help="list applied defaults in order")
    run.add_argument("--oracle", action="store_true", help="cross-check against full enumeration")
    run.set_defaults(func=cmd_run)

    check = sub.add_parser("check", help="validate the rulebase and scenarios")
    common(check)
    check.add_argument("scenarios", nargs="*")
    check.set_defaults(func=cmd_check)

    explain = sub.add_parser("explain", help="show how a literal was derived")
    common(explain)
    explain.add_argument("scenario")
    explain.add_argument("literal", help="e.g. 'must(drive_fairly_slow, B) @ 0'")
    explain.set_defaults(func=cmd_explain)

    oracle = sub.add_parser("oracle", help="enumerate every extension of a scenario")
    common(oracle)
    oracle.add_argument("scenario")
    oracle.add_argument("--json", action="store_true")
    oracle.set_defaults(func=cmd_oracle)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
