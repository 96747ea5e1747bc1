"""Equivalence classes of small choice trees under the nondeterminism theories.

Run with ``python3 demos/oracle_classes.py [depth]`` (default 2).
"""

from __future__ import annotations

import sys

from loceff.equivalence import tree_oracle
from loceff.freemodel import show_tree
from loceff.loader import load


def main(depth: int = 2) -> None:
    prog = load("nondet.lae").program
    sig = prog.signature
    for labels in (("idem",), ("comm",), ("comm", "idem", "assoc")):
        o = tree_oracle(prog.theory(*labels), sig, depth)
        classes = [c for c in o.partition() if len(c) > 1]
        print(f"{{{', '.join(labels)}}} at depth {depth}: {o.size} trees, {len(o.partition())} classes, {o.instances} equation instances")
        for c in classes[:3]:
            print("   ", " ~ ".join(show_tree(t) for t in c[:3]) + (" ~ ..." if len(c) > 3 else ""))


if __name__ == "__main__":
    main(int(sys.argv[1]) if len(sys.argv) > 1 else 2)
