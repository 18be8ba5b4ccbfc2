#!/usr/bin/env python3
"""Sweep rank-two specs and compare brute-force values against the
conjectured closed form, recording which sufficient condition (if any)
explains each equality.  Writes one JSON object per spec."""

import argparse
import json
import sys

from ebs.config import Budget
from ebs.constants import explore_conjecture


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--max-k", type=int, default=4)
    ap.add_argument("--max-n", type=int, default=4)
    ap.add_argument("--node-budget", type=int, default=10**8)
    ap.add_argument("--time-budget", type=float, default=300.0)
    ap.add_argument("--out", default=None)
    args = ap.parse_args()

    budget = Budget(node_budget=args.node_budget, time_budget_s=args.time_budget)
    report = explore_conjecture(args.max_k, args.max_n, budget)
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
    return 0 if not summary["soundness_bugs"] else 1


if __name__ == "__main__":
    sys.exit(main())
