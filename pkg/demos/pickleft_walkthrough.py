"""pickLeft: running it, denoting it, and checking which equations it respects.

Run with ``python3 demos/pickleft_walkthrough.py``.
"""

from __future__ import annotations

from loceff.freemodel import denote_comp, show_tree
from loceff.interpreter import run
from loceff.loader import load
from loceff.logic.respects import auto_respects, check_respects
from loceff.printer import show
from loceff.syntax import CompT


def main() -> None:
    loaded = load("pickleft.lae")
    prog = loaded.program
    let = prog.lets["pickLeft"]
    h, ht = let.term, let.type
    print("pickLeft :", show(ht))
    print("         =", show(h))

    demo = prog.closed(prog.term("demo"))
    print("\nrunning", show(demo))
    for t in run(demo, trace=True).trace:
        print("  ~>", show(t))
    print("denotes", show_tree(denote_comp(None, demo, CompT(ht.dst.value), {}, prog.signature)))

    print("\nchecking the shipped proof scripts")
    ev = loaded.evidence["pickleft_proof"]
    print(" ", check_respects(h, ht.src.theory, ht.src.sig, ht.dst, ev, checker=loaded.checker()))

    print("\nbounded search for a commutativity counterexample")
    v = auto_respects(h, prog.theory("comm"), ht.src.sig, ht.dst)
    print(" ", type(v).__name__, v.counterexample.describe() if hasattr(v, "counterexample") else v.detail)


if __name__ == "__main__":
    main()
