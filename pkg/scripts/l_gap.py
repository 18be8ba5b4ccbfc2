#!/usr/bin/env python3
"""Tabulate brute-force l values for k > n against the closed form and the
l <= lhat + 1 relation, covering the open even-index and n = 2 cases."""

import argparse
import json
import sys

from ebs.config import Budget
from ebs.structure import structure_gap_report


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-k", type=int, default=9)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--node-budget", type=int, default=10**8)
    ap.add_argument("--time-budget", type=float, default=300.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    budget = Budget(node_budget=args.node_budget, time_budget_s=args.time_budget)
    report = structure_gap_report("l", args.max_k, args.max_n, budget)
    sink = open(args.out, "w", encoding="utf-8") if args.out else sys.stdout
    try:
        for row in report["rows"]:
            sink.write(json.dumps(row, sort_keys=True) + "\n")
    finally:
        if args.out:
            sink.close()
    summary = report["summary"]
    print("summary: " + " ".join(f"{k}={summary[k]}" for k in sorted(summary)),
          file=sys.stderr)
    return 0 if not summary["anomalies"] else 1


if __name__ == "__main__":
    sys.exit(main())
