"""Command-line front end.

Subcommands mirror the library: spec parsing, constants (with an optional
JSON result cache), sequence predicates, structure tools, and batch
explorers.  Exit codes: 0 success, 1 usage or input error, 2 budget
exhausted.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import dataclass

from . import __version__
from .config import DEFAULT_NODE_BUDGET, DEFAULT_TIME_BUDGET_S, Budget
from .constants import davenport, erdos_burgess, explore_conjecture, invariant_factors
from .errors import BudgetExceeded, PreconditionError, SeqFileError, SpecError
from .semigroup import GroupSpec, element_count, format_spec, idempotent, parse_spec
from .sequences import (
    format_seq,
    idempotent_witness,
    is_idempotent_sum,
    is_idempotent_sum_free,
    is_minimal_idempotent_sum,
    read_seq_file,
)
from .structure import (
    IntSeq,
    behaving_bound_classify,
    classify_free_sequence,
    is_behaving,
    l_const,
    lhat,
    savchev_chen,
    structure_gap_report,
)


class _UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    """argparse exits with status 2 on bad usage; the budget code owns 2
    here, so usage problems are rerouted through the normal error path."""

    def error(self, message):
        raise _UsageError(f"{self.prog}: {message}")


@dataclass(frozen=True)
class CliConfig:
    """Resolved run configuration; flags win over environment variables."""

    threads: int
    node_budget: int = DEFAULT_NODE_BUDGET
    time_budget_s: int = int(DEFAULT_TIME_BUDGET_S)
    cache_path: str | None = None
    output: str = "text"

    @classmethod
    def from_args(cls, args) -> "CliConfig":
        threads = getattr(args, "threads", None)
        if threads is None:
            env = os.environ.get("EBS_THREADS")
            threads = int(env) if env else (os.cpu_count() or 1)
        cache = getattr(args, "cache", None) or os.environ.get("EBS_CACHE") or None
        cfg = cls(
            threads=threads,
            node_budget=getattr(args, "node_budget", None) or DEFAULT_NODE_BUDGET,
            time_budget_s=getattr(args, "time_budget", None) or int(DEFAULT_TIME_BUDGET_S),
            cache_path=cache,
            output="json" if getattr(args, "json", False) else "text",
        )
        if cfg.threads < 1 or cfg.node_budget < 1 or cfg.time_budget_s < 1:
            raise SpecError("threads and budgets must be positive")
        return cfg

    def budget(self) -> Budget:
        return Budget(
            node_budget=self.node_budget,
            time_budget_s=float(self.time_budget_s),
            threads=self.threads,
        )


def _parse_group(text: str) -> GroupSpec:
    try:
        periods = tuple(int(p) for p in text.split(","))
    except ValueError:
        raise SpecError(f"group must be a comma-separated modulus list, got {text!r}")
    return GroupSpec(periods)


def _parse_ints(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(p) for p in text.split(","))
    except ValueError:
        raise SpecError(f"expected a comma-separated integer list, got {text!r}")


def _emit(cfg: CliConfig, payload: dict, text_lines) -> None:
    if cfg.output == "json":
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        for line in text_lines:
            print(line)


def _result_lines(d: dict) -> list[str]:
    order = ("spec", "quantity", "method", "value", "lower", "upper", "rule",
             "nodes", "elapsed_ms", "flags", "invariant_factors")
    lines = [f"{key}: {d[key]}" for key in order if key in d]
    lines += [f"{key}: {d[key]}" for key in sorted(d) if key not in order]
    return lines


# ---------------------------------------------------------------------------
# result cache

def _cache_read(path: str) -> dict:
    try:
        with open(path, encoding="utf-8") as fh:
            data = json.load(fh)
        return data if isinstance(data, dict) else {}
    except FileNotFoundError:
        return {}
    except json.JSONDecodeError:
        print(f"warning: ignoring unreadable cache {path}", file=sys.stderr)
        return {}


def _cached(cfg: CliConfig, label: str, quantity: str, method: str, compute) -> dict:
    if cfg.cache_path is None:
        return compute()
    store = _cache_read(cfg.cache_path)
    key = f"{label}|{quantity}|{method}"
    entry = store.get(key)
    if isinstance(entry, dict) and entry.get("version") == __version__:
        return entry["result"]
    result = compute()
    store[key] = {"version": __version__, "result": result}
    with open(cfg.cache_path, "w", encoding="utf-8") as fh:
        json.dump(store, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return result


# ---------------------------------------------------------------------------
# subcommand handlers

def _cmd_spec(args) -> int:
    cfg = CliConfig.from_args(args)
    s = parse_spec(args.spec)
    label = format_spec(s)
    if args.action == "format":
        print(label)
        return 0
    payload = {
        "spec": label,
        "arity": s.arity,
        "elements": element_count(s),
        "idempotent": list(idempotent(s)),
    }
    _emit(cfg, payload, _result_lines(payload))
    return 0


def _single_cyclic(text: str):
    s = parse_spec(text)
    if s.arity != 1:
        raise SpecError("this quantity is defined for a single C(k;n) factor")
    return s.coords[0]


def _cmd_const(args) -> int:
    cfg = CliConfig.from_args(args)
    budget = cfg.budget()
    quantity = args.quantity
    if quantity == "davenport":
        g = _parse_group(args.group)
        factors = invariant_factors(g)
        label = "Z(" + ",".join(map(str, g.periods)) + ")"

        def compute() -> dict:
            res = davenport(g, args.method, budget)
            d = res.to_dict(label)
            d["invariant_factors"] = list(factors)
            return d

    elif quantity == "eb":
        s = parse_spec(args.spec)
        label = format_spec(s)

        def compute() -> dict:
            return erdos_burgess(s, args.method, budget).to_dict(label)

    else:
        c = _single_cyclic(args.spec)
        label = format_spec(c.as_product())
        fn = lhat if quantity == "lhat" else l_const

        def compute() -> dict:
            return fn(c, args.method, budget).to_dict(label)

    d = _cached(cfg, label, quantity, args.method, compute)
    _emit(cfg, d, _result_lines(d))
    return 0


def _cmd_seq(args) -> int:
    cfg = CliConfig.from_args(args)
    s = parse_spec(args.spec)
    t = read_seq_file(s, args.file)
    predicate = args.predicate
    if predicate == "free":
        verdict = is_idempotent_sum_free(s, t)
    elif predicate == "idempotent":
        verdict = is_idempotent_sum(s, t)
    else:
        verdict = is_minimal_idempotent_sum(s, t)
    payload = {
        "spec": format_spec(s),
        "predicate": predicate,
        "length": len(t),
        "result": verdict,
    }
    lines = [f"{k}: {payload[k]}" for k in ("spec", "predicate", "length")]
    lines.append(f"result: {'true' if verdict else 'false'}")
    if predicate == "free" and not verdict:
        witness = idempotent_witness(s, t)
        payload["witness"] = [list(term) for term in witness]
        lines.append("witness:")
        lines.extend(format_seq(witness).splitlines())
    _emit(cfg, payload, lines)
    return 0


def _cmd_struct(args) -> int:
    cfg = CliConfig.from_args(args)
    if args.action == "behaving":
        h = IntSeq(_parse_ints(args.ints))
        payload = {
            "ints": list(h.entries),
            "behaving": is_behaving(h),
            "class": behaving_bound_classify(h),
        }
        _emit(cfg, payload, [f"ints: {','.join(map(str, h.entries))}",
                             f"behaving: {str(payload['behaving']).lower()}",
                             f"class: {payload['class']}"])
        return 0
    if args.action == "classify":
        c = _single_cyclic(args.spec)
        t = read_seq_file(c.as_product(), args.file)
        res = classify_free_sequence(c, t)
        payload = {"spec": format_spec(c.as_product()), **res.to_dict()}
        lines = [f"spec: {payload['spec']}", f"tag: {payload['tag']}",
                 f"c: {payload['c']}",
                 f"H: {','.join(map(str, payload['H'])) if payload['H'] else None}",
                 f"threshold_met: {str(payload['threshold_met']).lower()}"]
        _emit(cfg, payload, lines)
        return 0
    # savchev-chen
    g = _parse_group(args.group)
    if len(g.periods) != 1:
        raise SpecError("savchev-chen takes a single modulus")
    n = g.periods[0]
    out = savchev_chen(n, _parse_ints(args.ints))
    if out is None:
        payload = {"modulus": n, "result": None}
        _emit(cfg, payload, [f"modulus: {n}", "result: none"])
        return 0
    c, h = out
    payload = {"modulus": n, "c": c, "H": list(h.entries)}
    _emit(cfg, payload, [f"modulus: {n}", f"c: {c}",
                         f"H: {','.join(map(str, h.entries))}"])
    return 0


def _cmd_explore(args) -> int:
    cfg = CliConfig.from_args(args)
    budget = cfg.budget()
    if args.kind == "conjecture41":
        report = explore_conjecture(args.max_k, args.max_n, budget)
    else:
        quantity = "lhat" if args.kind == "lhat-gap" else "l"
        report = structure_gap_report(quantity, args.max_k, args.max_n, budget)
    lines = "".join(json.dumps(row, sort_keys=True) + "\n" for row in report["rows"])
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(lines)
    else:
        sys.stdout.write(lines)
    summary = report["summary"]
    print("summary: " + " ".join(f"{k}={summary[k]}" for k in sorted(summary)))
    return 0


# ---------------------------------------------------------------------------
# parser wiring

def _add_common(p: argparse.ArgumentParser, cache: bool = False) -> None:
    p.add_argument("--json", action="store_true", help="emit one JSON object")
    p.add_argument("--threads", type=int, default=None)
    p.add_argument("--node-budget", type=int, default=None, dest="node_budget")
    p.add_argument("--time-budget", type=int, default=None, dest="time_budget",
                   help="seconds")
    if cache:
        p.add_argument("--cache", default=None, help="path to a JSON result cache")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ebs", description=__doc__)
    parser.add_argument("--version", action="version", version=f"ebs {__version__}")
    sub = parser.add_subparsers(dest="command", required=True)

    spec_p = sub.add_parser("spec", help="parse and normalize product specs")
    spec_sub = spec_p.add_subparsers(dest="action", required=True)
    for action in ("parse", "format"):
        ap = spec_sub.add_parser(action)
        ap.add_argument("--spec", required=True)
        _add_common(ap)
        ap.set_defaults(handler=_cmd_spec, action=action)

    const_p = sub.add_parser("const", help="compute a constant")
    const_sub = const_p.add_subparsers(dest="quantity", required=True)
    for quantity in ("eb", "davenport", "lhat", "l"):
        cp = const_sub.add_parser(quantity)
        if quantity == "davenport":
            cp.add_argument("--group", required=True,
                            help="comma-separated moduli, e.g. 2,4")
        else:
            cp.add_argument("--spec", required=True)
        cp.add_argument("--method", choices=("formula", "brute", "both"),
                        default="formula")
        _add_common(cp, cache=True)
        cp.set_defaults(handler=_cmd_const, quantity=quantity)

    seq_p = sub.add_parser("seq", help="sequence predicates")
    seq_sub = seq_p.add_subparsers(dest="action", required=True)
    sp = seq_sub.add_parser("check")
    sp.add_argument("--spec", required=True)
    sp.add_argument("--file", required=True)
    sp.add_argument("--predicate", choices=("free", "idempotent", "minimal"),
                    required=True)
    _add_common(sp)
    sp.set_defaults(handler=_cmd_seq)

    struct_p = sub.add_parser("struct", help="structure tools")
    struct_sub = struct_p.add_subparsers(dest="action", required=True)
    bp = struct_sub.add_parser("behaving")
    bp.add_argument("--ints", required=True)
    _add_common(bp)
    bp.set_defaults(handler=_cmd_struct, action="behaving")
    clp = struct_sub.add_parser("classify")
    clp.add_argument("--spec", required=True)
    clp.add_argument("--file", required=True)
    _add_common(clp)
    clp.set_defaults(handler=_cmd_struct, action="classify")
    scp = struct_sub.add_parser("savchev-chen")
    scp.add_argument("--group", required=True, help="single modulus n")
    scp.add_argument("--ints", required=True)
    _add_common(scp)
    scp.set_defaults(handler=_cmd_struct, action="savchev-chen")

    explore_p = sub.add_parser("explore", help="batch reports")
    explore_sub = explore_p.add_subparsers(dest="kind", required=True)
    for kind in ("conjecture41", "lhat-gap", "l-gap"):
        ep = explore_sub.add_parser(kind)
        ep.add_argument("--max-k", type=int, required=True, dest="max_k")
        ep.add_argument("--max-n", type=int, required=True, dest="max_n")
        ep.add_argument("--out", default=None, help="JSON-lines report path")
        _add_common(ep)
        ep.set_defaults(handler=_cmd_explore, kind=kind)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        return args.handler(args)
    except _UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (SpecError, SeqFileError, PreconditionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except BudgetExceeded as exc:
        print(f"error: budget exceeded: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
