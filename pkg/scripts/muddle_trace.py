#!/usr/bin/env python3
"""Run a muddled timeline on random batches and print its trace.

One valid random edge operation arrives per tick.  The table shows the
pipeline filling during warmup (budget age climbing), then deliveries
pinning the served budget age at one; the summary checks the freshness
bound b - L - ceil(L/2) - 3 actually observed against the exact oracle.

    python3 scripts/muddle_trace.py --n 8 --d 3 --latency 8 --bits 96 --steps 40
"""

import argparse
import math
import random
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dynwalk.graph import EdgeBatch, EdgeOp, validate_and_apply
from dynwalk.muddle import MuddleConfig, MuddleTimeline
from dynwalk.oracle import exact_power_sum


def random_op(rng, graph):
    for _ in range(200):
        u, v = rng.sample(range(graph.n), 2)
        a, b = min(u, v), max(u, v)
        if graph.has_edge(a, b):
            return EdgeOp("delete", a, b)
        if graph.degree(a) < graph.d and graph.degree(b) < graph.d:
            return EdgeOp("insert", a, b)
    raise RuntimeError("no valid operation found")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--n", type=int, default=8)
    ap.add_argument("--d", type=int, default=3)
    ap.add_argument("--k", type=int, default=8, help="truncation degree")
    ap.add_argument("--latency", type=int, default=8)
    ap.add_argument("--bits", type=int, default=96)
    ap.add_argument("--steps", type=int, default=40)
    ap.add_argument("--seed", type=int, default=0)
    args = ap.parse_args()

    cfg = MuddleConfig(args.n, args.d, args.k, args.latency, args.bits)
    tl = MuddleTimeline(cfg)
    rng = random.Random(args.seed)
    worst = None
    print("clock\tjobs\tage\tdelivered\top")
    for _ in range(args.steps):
        op = random_op(rng, tl.served.graph)
        tl.step(EdgeBatch((op,)))
        sign = "+" if op.kind == "insert" else "-"
        print(f"{tl.trace[-1].line()}\t{sign}({op.u},{op.v})")
        oracle = exact_power_sum(tl.served.B, cfg.K)
        for row_a, row_b in zip(tl.served.G.rows, oracle.rows):
            for pa, pb in zip(row_a, row_b):
                for j in range(cfg.K + 1):
                    dev = abs(pa[j] - pb[j])
                    if worst is None or dev > worst:
                        worst = dev
    print()
    budget = args.bits - args.latency - (args.latency + 1) // 2 - 3
    seen = math.log2(float(worst)) if worst else float("-inf")
    print(f"max budget age: {tl.max_budget_age()}")
    print(f"freshness bound 2^-{budget}; worst deviation seen 2^{seen:.1f}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
