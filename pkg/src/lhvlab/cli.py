"""Command-line surface: evaluate, simulate, sweep, optimize, quantum.

Single evaluations print a JSON envelope ``{schema_version, command, inputs,
results}`` on stdout; sweeps print CSV.  Floats are serialized with Python's
shortest round-trip representation, so parsing the output recovers the exact
binary values.  Diagnostics go to stderr.

Exit codes: 0 success, 1 usage error, 2 invalid model, 3 runtime error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys

import numpy as np

from .analytic import ch_with_memory, memory_adjusted_rates, quantum_reference, rates_closed
from .errors import (
    AsymmetricModelError,
    AsymmetricRatesError,
    EfficiencyRangeError,
    EmptySpaceError,
    InvalidResponseError,
    LhvError,
)
from .model import (
    LhvModel,
    MemoryKind,
    MemoryRule,
    model_from_dict,
    model_to_dict,
    normalize_angle,
    reference_model,
)
from .montecarlo import estimate_ch_mc
from .search import SearchSpace, maximize_ch, sweep_phi

SCHEMA_VERSION = "1"

_RULE_NAMES = {
    "none": MemoryKind.MEMORYLESS,
    "inhibit": MemoryKind.INHIBIT,
    "enhance": MemoryKind.ENHANCE,
}

_BUILTIN_MODELS = ("paper", "reference")


class _UsageError(Exception):
    pass


class _ModelContentError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # exit 1 instead of argparse's default 2
        raise _UsageError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="lhvlab", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def add_model_args(p):
        group = p.add_mutually_exclusive_group()
        group.add_argument(
            "--model", default="paper", metavar="NAME",
            help="built-in model name: 'paper' (alias 'reference'); default paper",
        )
        group.add_argument(
            "--model-file", metavar="PATH",
            help='JSON model file {"alice": {"a0": ...}, "bob": {...}}',
        )

    def add_rule_args(p):
        p.add_argument("--rule", choices=sorted(_RULE_NAMES), default="none",
                       help="memory rule for the second event of each pair")
        p.add_argument("--strength", type=float, default=1.0,
                       help="probability the rule fires, in [0, 1]; default 1")

    def add_deg_arg(p):
        p.add_argument("--deg", action="store_true", help="angles given in degrees")

    p_eval = sub.add_parser("eval", help="closed-form Clauser-Horne parameter")
    add_model_args(p_eval)
    add_rule_args(p_eval)
    p_eval.add_argument("--phi", type=float, required=True, help="effective angle (radians)")
    add_deg_arg(p_eval)
    p_eval.add_argument("--emit-model", action="store_true",
                        help="include the resolved model object in the results")
    p_eval.set_defaults(handler=_cmd_eval)

    p_sim = sub.add_parser("simulate", help="Monte Carlo estimate with batch-means errors")
    add_model_args(p_sim)
    add_rule_args(p_sim)
    p_sim.add_argument("--phi", type=float, required=True, help="effective angle (radians)")
    add_deg_arg(p_sim)
    p_sim.add_argument("--pairs", type=int, default=1_000_000,
                       help="number of two-event blocks per angle run; default 1000000")
    p_sim.add_argument("--seed", type=int, required=True, help="64-bit unsigned master seed")
    p_sim.add_argument("--threads", type=int, default=1,
                       help="worker threads; never changes the output")
    p_sim.set_defaults(handler=_cmd_simulate)

    p_sweep = sub.add_parser("sweep", help="CSV table of B over an angle grid")
    add_model_args(p_sweep)
    add_rule_args(p_sweep)
    p_sweep.add_argument("--phi-start", type=float, required=True)
    p_sweep.add_argument("--phi-end", type=float, required=True)
    p_sweep.add_argument("--steps", type=int, required=True, help="number of grid points")
    add_deg_arg(p_sweep)
    p_sweep.set_defaults(handler=_cmd_sweep)

    p_opt = sub.add_parser("optimize", help="maximize B over a parameter space")
    p_opt.add_argument("--space", required=True, metavar="JSON",
                       help="inline JSON or path: "
                            '{"rule": "none", "free": {"phi": [0, 1.5708]}, "fixed": {}}')
    p_opt.add_argument("--restarts", type=int, default=16,
                       help="quasi-random restarts beside the reference start; default 16")
    p_opt.add_argument("--seed", type=int, required=True, help="seed for restart placement")
    p_opt.set_defaults(handler=_cmd_optimize)

    p_q = sub.add_parser("quantum", help="quantum reference value for efficiency eta")
    p_q.add_argument("--eta", type=float, required=True, help="detector efficiency in [0, 1]")
    p_q.add_argument("--phi", type=float, required=True, help="effective angle (radians)")
    add_deg_arg(p_q)
    p_q.set_defaults(handler=_cmd_quantum)

    return parser


def _resolve_phi(args) -> float:
    return math.radians(args.phi) if args.deg else float(args.phi)


def _resolve_rule(args) -> MemoryRule:
    try:
        return MemoryRule(_RULE_NAMES[args.rule], float(args.strength))
    except ValueError as exc:
        raise _UsageError(str(exc)) from exc


def _resolve_model(args) -> tuple[LhvModel, str]:
    if args.model_file is not None:
        try:
            with open(args.model_file, "r", encoding="utf-8") as handle:
                data = json.load(handle)
        except OSError as exc:
            raise _UsageError(f"cannot read model file: {exc}") from exc
        except json.JSONDecodeError as exc:
            raise _ModelContentError(f"model file is not valid JSON: {exc}") from exc
        try:
            return model_from_dict(data), args.model_file
        except ValueError as exc:
            raise _ModelContentError(str(exc)) from exc
    if args.model not in _BUILTIN_MODELS:
        raise _UsageError(
            f"unknown model {args.model!r}; use one of {_BUILTIN_MODELS} or --model-file"
        )
    return reference_model(), "paper"


def _emit_envelope(command: str, inputs: dict, results: dict) -> None:
    envelope = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "inputs": inputs,
        "results": results,
    }
    sys.stdout.write(json.dumps(envelope, indent=2) + "\n")


def _rates_payload(rates) -> dict:
    return {"p_a": rates.p_a, "p_b": rates.p_b, "p_ab": rates.p_ab}


def _estimate_payload(estimate) -> dict:
    return {"value": estimate.value, "stderr": estimate.stderr, "n": estimate.n}


def _cmd_eval(args) -> int:
    model, source = _resolve_model(args)
    rule = _resolve_rule(args)
    phi = _resolve_phi(args)
    breakdown = ch_with_memory(model, rule, phi)
    adjusted_phi = memory_adjusted_rates(rates_closed(model, phi), rule)
    adjusted_3phi = memory_adjusted_rates(rates_closed(model, 3.0 * phi), rule)
    results = {
        "b": breakdown.b,
        "term_scaled": breakdown.term_scaled,
        "term_quadratic": breakdown.term_quadratic,
        "term_offset": breakdown.term_offset,
        "rates_phi": _rates_payload(adjusted_phi),
        "rates_3phi": _rates_payload(adjusted_3phi),
    }
    if args.emit_model:
        results["model"] = model_to_dict(model)
    _emit_envelope("eval", {
        "model": source,
        "rule": args.rule,
        "strength": float(args.strength),
        "phi": phi,
        "phi_mod_2pi": normalize_angle(phi),
    }, results)
    return 0


def _cmd_simulate(args) -> int:
    model, source = _resolve_model(args)
    rule = _resolve_rule(args)
    phi = _resolve_phi(args)
    if args.pairs < 1:
        raise _UsageError("--pairs must be >= 1")
    if args.threads < 1:
        raise _UsageError("--threads must be >= 1")
    if not 0 <= args.seed < 2**64:
        raise _UsageError("--seed must be a 64-bit unsigned integer")
    result = estimate_ch_mc(
        model, rule, phi, args.pairs, args.seed, threads=args.threads
    )
    _emit_envelope("simulate", {
        "model": source,
        "rule": args.rule,
        "strength": float(args.strength),
        "phi": phi,
        "phi_mod_2pi": normalize_angle(phi),
        "pairs": args.pairs,
        "seed": args.seed,
        "threads": args.threads,
    }, {
        "b": _estimate_payload(result.b),
        "p_a": _estimate_payload(result.p_a),
        "p_b": _estimate_payload(result.p_b),
        "p_ab_phi": _estimate_payload(result.p_ab_phi),
        "p_ab_3phi": _estimate_payload(result.p_ab_3phi),
        "n_pairs": result.n_pairs,
        "n_batches": result.n_batches,
    })
    return 0


def _cmd_sweep(args) -> int:
    model, _ = _resolve_model(args)
    rule = _resolve_rule(args)
    if args.steps < 1:
        raise _UsageError("--steps must be >= 1")
    start, end = args.phi_start, args.phi_end
    if args.deg:
        start, end = math.radians(start), math.radians(end)
    grid = np.linspace(start, end, args.steps)
    rows = sweep_phi(model, rule, grid)
    buffer = io.StringIO()
    writer = csv.writer(buffer, lineterminator="\n")
    writer.writerow(["phi", "b", "term_scaled", "term_quadratic", "term_offset"])
    for phi, breakdown in rows:
        writer.writerow([
            repr(phi),
            repr(breakdown.b),
            "" if breakdown.term_scaled is None else repr(breakdown.term_scaled),
            "" if breakdown.term_quadratic is None else repr(breakdown.term_quadratic),
            "" if breakdown.term_offset is None else repr(breakdown.term_offset),
        ])
    sys.stdout.write(buffer.getvalue())
    return 0


def _parse_space(text: str) -> SearchSpace:
    raw = text.strip()
    if not raw.startswith("{"):
        try:
            with open(raw, "r", encoding="utf-8") as handle:
                raw = handle.read()
        except OSError as exc:
            raise _UsageError(f"cannot read space file: {exc}") from exc
    try:
        data = json.loads(raw)
        rule_name = data.get("rule", "none")
        if rule_name not in _RULE_NAMES:
            raise ValueError(f"unknown rule {rule_name!r}")
        free = {str(k): (float(v[0]), float(v[1])) for k, v in data.get("free", {}).items()}
        fixed = {str(k): float(v) for k, v in data.get("fixed", {}).items()}
        return SearchSpace(rule_kind=_RULE_NAMES[rule_name], free=free, fixed=fixed)
    except (ValueError, TypeError, KeyError, IndexError) as exc:
        raise _UsageError(f"malformed search space: {exc}") from exc


def _cmd_optimize(args) -> int:
    space = _parse_space(args.space)
    if args.restarts < 0:
        raise _UsageError("--restarts must be >= 0")
    result = maximize_ch(space, args.restarts, args.seed)
    _emit_envelope("optimize", {
        "space": {
            "rule": space.rule_kind.value,
            "free": {k: list(v) for k, v in space.free.items()},
            "fixed": dict(space.fixed),
        },
        "restarts": args.restarts,
        "seed": args.seed,
    }, {
        "best_params": result.best_params,
        "best_b": result.best_b,
        "evaluations": result.evaluations,
        "trace": [
            {"params": entry.params, "b": entry.b, "penalized": entry.penalized}
            for entry in result.trace
        ],
    })
    return 0


def _cmd_quantum(args) -> int:
    phi = _resolve_phi(args)
    value = quantum_reference(args.eta, phi)
    _emit_envelope("quantum", {
        "eta": float(args.eta),
        "phi": phi,
        "phi_mod_2pi": normalize_angle(phi),
    }, {"b_qm": value})
    return 0


def run_command(argv=None) -> int:
    """Dispatch one CLI invocation; returns the process exit code."""
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SystemExit as exc:  # --help and friends
        return 0 if exc.code in (0, None) else 1
    try:
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EfficiencyRangeError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except EmptySpaceError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (_ModelContentError, InvalidResponseError, AsymmetricModelError, AsymmetricRatesError) as exc:
        print(f"invalid model: {exc}", file=sys.stderr)
        return 2
    except LhvError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 3
    except ValueError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


def main() -> None:
    sys.exit(run_command(sys.argv[1:]))


if __name__ == "__main__":
    main()
