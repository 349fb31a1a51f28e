"""Command-line entry point: ``martsel solve|verify|na-check|cps|gen``.

Reports are JSON on standard output (or ``--output``). Exit codes:
0 solvable / verified / no arbitrage, 1 unsolvable / failed check /
arbitrage, 2 invalid input, 3 a constructed solution failed verification.
"""
from __future__ import annotations

import argparse
import hashlib
import json
import sys
import time
from pathlib import Path

from ._linalg import frac_str
from .finance import ModelError, arbitrage_oracle, check_na_single, consistent_price_system, parse_cone_model, parse_price_process
from .generate import PROFILES, generate_text
from .msp import (
    SolutionSchemaError,
    assemble_measure,
    backward_pass,
    forward_pass,
    parse_solution,
    solution_json,
    verify_solution,
)
from .tree import InstanceError, dumps, parse_instance, point_json

EXIT_OK, EXIT_NO, EXIT_INPUT, EXIT_INTERNAL = 0, 1, 2, 3


class _Invalid(Exception):
    pass


def _read(path: str) -> bytes:
    try:
        return Path(path).read_bytes()
    except OSError as exc:
        raise _Invalid(f"cannot read {path}: {exc.strerror}") from None


def _verification(instance, solution) -> dict:
    failures = verify_solution(instance, solution)
    return {
        "passed": not failures,
        "failures": [{"node": f.node, "check": f.check, "message": f.message} for f in failures],
    }


def _measure(instance, solution) -> dict:
    m = assemble_measure(instance, solution)
    return {
        "z": {u: frac_str(m.z[u]) for u in instance.tree.order},
        "sum_Q": frac_str(m.total_Q),
        "E_P_density": frac_str(m.expected_density),
    }


def _solve_report(instance, construct: bool, threads: int) -> tuple[dict, int]:
    state = backward_pass(instance, threads)
    report = {"verdict": state.verdict}
    if not state.solvable:
        report["failing_node"] = state.failing_node
        report["failing_time"] = state.failing_time
        return report, EXIT_NO
    if not construct:
        return report, EXIT_OK
    sol = forward_pass(instance, state, threads)
    report["solution"] = solution_json(instance, sol)
    report["measure"] = _measure(instance, sol)
    report["verification"] = _verification(instance, sol)
    return report, EXIT_OK if report["verification"]["passed"] else EXIT_INTERNAL


def cmd_solve(args) -> tuple[dict, int]:
    data = _read(args.instance)
    instance = parse_instance(data)
    report, code = _solve_report(instance, not args.no_construct, args.threads)
    return {"command": "solve", "instance_sha256": hashlib.sha256(data).hexdigest(), **report}, code


def cmd_verify(args) -> tuple[dict, int]:
    data = _read(args.instance)
    instance = parse_instance(data)
    sol_data = _read(args.solution)
    try:
        doc = json.loads(sol_data)
    except (json.JSONDecodeError, UnicodeDecodeError):
        raise _Invalid("solution file is not JSON") from None
    if isinstance(doc, dict) and isinstance(doc.get("solution"), dict):
        sol_data = json.dumps(doc["solution"])
    solution = parse_solution(sol_data, instance)
    ver = _verification(instance, solution)
    report = {"command": "verify", "instance_sha256": hashlib.sha256(data).hexdigest(), "verification": ver}
    return report, EXIT_OK if ver["passed"] else EXIT_NO


def cmd_na_check(args) -> tuple[dict, int]:
    data = _read(args.instance)
    process = parse_price_process(data)
    res = check_na_single(process, args.threads)
    oracle = arbitrage_oracle(process)
    if oracle.arbitrage == res.no_arbitrage:
        raise RuntimeError("recursion and arbitrage LP disagree")
    report = {
        "command": "na-check",
        "instance_sha256": hashlib.sha256(data).hexdigest(),
        "verdict": "no-arbitrage" if res.no_arbitrage else "arbitrage",
    }
    if res.no_arbitrage:
        report["solution"] = solution_json(res.instance, res.solution)
        report["measure"] = _measure(res.instance, res.solution)
        report["verification"] = _verification(res.instance, res.solution)
        code = EXIT_OK if report["verification"]["passed"] else EXIT_INTERNAL
    else:
        report["failing_node"] = res.failing_node
        report["strategy"] = {u: point_json(h) for u, h in oracle.strategy.items()}
        report["terminal_gains"] = {leaf: frac_str(w) for leaf, w in oracle.wealth.items()}
        code = EXIT_NO
    return report, code


def cmd_cps(args) -> tuple[dict, int]:
    data = _read(args.instance)
    model = parse_cone_model(data)
    res = consistent_price_system(model, args.threads)
    report = {
        "command": "cps",
        "instance_sha256": hashlib.sha256(data).hexdigest(),
        "verdict": res.state.verdict,
        "subspace_dual_nodes": list(res.subspace_nodes),
    }
    if not res.solvable:
        report["failing_node"] = res.state.failing_node
        return report, EXIT_NO
    report["solution"] = solution_json(res.instance, res.solution)
    report["verification"] = _verification(res.instance, res.solution)
    return report, EXIT_OK if report["verification"]["passed"] else EXIT_INTERNAL


def _seed(text: str) -> int:
    try:
        n = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if not 0 <= n < 2**64:
        raise argparse.ArgumentTypeError("seed must be in [0, 2^64)")
    return n


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="martsel", description="Exact martingale selection on event trees.")
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p, name="instance"):
        p.add_argument(name)
        p.add_argument("--threads", type=int, default=1, help="worker threads per tree level")
        p.add_argument("--output", help="write the report here instead of stdout")
        p.add_argument("--timing", action="store_true", help="add wall-clock timing (breaks byte-identical output)")

    p = sub.add_parser("solve", help="decide solvability and construct (x, Q)")
    common(p)
    p.add_argument("--no-construct", action="store_true", help="stop after the backward pass")
    p.set_defaults(func=cmd_solve)

    p = sub.add_parser("verify", help="check an externally supplied solution")
    common(p)
    p.add_argument("solution")
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("na-check", help="no-arbitrage check for a price process")
    common(p)
    p.set_defaults(func=cmd_na_check)

    p = sub.add_parser("cps", help="strictly consistent price system for a cone model")
    common(p)
    p.set_defaults(func=cmd_cps)

    p = sub.add_parser("gen", help="print a random instance")
    p.add_argument("--seed", type=_seed, required=True)
    p.add_argument("--profile", choices=PROFILES, default="solvable-biased")
    p.add_argument("--output")
    p.set_defaults(func=None)
    return parser


def _emit(text: str, output) -> None:
    if output:
        Path(output).write_text(text, encoding="utf-8")
    else:
        sys.stdout.write(text)


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "gen":
        _emit(generate_text(args.seed, args.profile), args.output)
        return EXIT_OK
    if args.threads < 1:
        print("martsel: --threads must be at least 1", file=sys.stderr)
        return EXIT_INPUT
    start = time.perf_counter()
    try:
        report, code = args.func(args)
    except (_Invalid, InstanceError, SolutionSchemaError, ModelError) as exc:
        print(f"martsel: {exc}", file=sys.stderr)
        report = {"command": args.command, "error": str(exc)}
        code = EXIT_INPUT
    if args.timing:
        report["timing_seconds"] = round(time.perf_counter() - start, 6)
    _emit(dumps(report), args.output)
    return code


if __name__ == "__main__":
    sys.exit(main())
