#!/usr/bin/env python3
"""Sweep the expansion tester across walk lengths on one graph family.

For the chosen graph this prints, per walk length, the worst diagonal
return probability against the accept threshold, the verdict, and the
exact eigenvalue bracket the oracle certifies.  Useful for eyeballing
where the collision mass crosses the threshold as walks get longer.

    python3 scripts/expansion_demo.py --family blowup --groups 3 --size 3
    python3 scripts/expansion_demo.py --family cycle --n 12 --max-ell 5
    python3 scripts/expansion_demo.py --family cliques --half 5
"""

import argparse
import sys
from pathlib import Path

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from dynwalk.numerics import format_rat, parse_rat, rat
from dynwalk.graph import DynGraph, lazy_transition
from dynwalk.dyncore import read_power_entry, state_from_graph
from dynwalk.expander import TesterConfig, expansion_query, threshold
from dynwalk.oracle import second_eigenvalue


def build(args) -> DynGraph:
    if args.family == "cycle":
        n = args.n
        edges = frozenset((min(i, (i + 1) % n), max(i, (i + 1) % n)) for i in range(n))
        return DynGraph(n, 2, edges)
    if args.family == "blowup":
        n = args.groups * args.size
        edges = frozenset(
            (u, v)
            for u in range(n)
            for v in range(u + 1, n)
            if u // args.size != v // args.size
        )
        return DynGraph(n, (args.groups - 1) * args.size, edges)
    if args.family == "cliques":
        h = args.half
        edges = {
            (b + u, b + v)
            for b in (0, h)
            for u in range(h)
            for v in range(u + 1, h)
        }
        edges.add((0, h))
        return DynGraph(2 * h, h, frozenset(edges))
    raise SystemExit(f"unknown family {args.family!r}")


def main() -> int:
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--family", choices=("cycle", "blowup", "cliques"), default="blowup")
    ap.add_argument("--n", type=int, default=12, help="cycle length")
    ap.add_argument("--groups", type=int, default=3, help="blowup groups")
    ap.add_argument("--size", type=int, default=3, help="blowup group size")
    ap.add_argument("--half", type=int, default=5, help="clique size (cliques family)")
    ap.add_argument("--alpha", default="1/2", help="gap parameter p/q")
    ap.add_argument("--max-ell", type=int, default=4)
    args = ap.parse_args()

    g = build(args)
    alpha = parse_rat(args.alpha)
    bound = threshold(g.n)
    bracket = second_eigenvalue(lazy_transition(g), rat(1, 2**20))
    print(f"graph: n={g.n} d={g.d} edges={len(g.edges())}")
    print(
        f"lambda in [{format_rat(bracket.lower)}, {format_rat(bracket.upper)}]"
        f" ~ {float(bracket.lower):.6f}"
    )
    print(f"accept threshold (1/n)(1+2/n) = {format_rat(bound)} ~ {float(bound):.6f}")
    print()
    state = state_from_graph(g, 4 * args.max_ell)
    print(f"{'ell':>4} {'worst diag':>12} {'float':>10} verdict")
    for ell in range(1, args.max_ell + 1):
        worst = max(read_power_entry(state, v, v, 2 * ell) for v in range(g.n))
        verdict = expansion_query(state, TesterConfig(alpha, g.d, ell))
        word = "accept" if verdict.accept else f"reject (witness {verdict.witness})"
        print(f"{ell:>4} {format_rat(worst):>12} {float(worst):>10.6f} {word}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
