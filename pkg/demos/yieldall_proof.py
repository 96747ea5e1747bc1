"""yieldAll respects commutativity of choice, by two computational inductions.

Prints the proof obligation, the shape of the shipped proof, and the verdict.
Run with ``python3 demos/yieldall_proof.py``.
"""

from __future__ import annotations

import time

from loceff.loader import load
from loceff.logic.proof import Induction, Inherit, count_nodes, walk
from loceff.logic.respects import check_respects, obligation
from loceff.printer import show


def main() -> None:
    loaded = load("yieldall.lae")
    let = loaded.program.lets["yieldAll"]
    h, ht = let.term, let.type
    comm = loaded.program.equations["comm"]
    ob = obligation(h, comm, ht.dst, {})
    print("obligation for", comm.name)
    print("  ", show(ob.goal.lhs))
    print("  ==", show(ob.goal.rhs))
    print("  at", show(ht.dst))

    (ep,) = loaded.evidence["yieldall_proof"].equations
    inherits = sorted({p.label for p in walk(ep.proof) if isinstance(p, Inherit)})
    print(f"\nproof uses {count_nodes(ep.proof, Induction)} inductions and inherits {inherits}")

    t0 = time.perf_counter()
    v = check_respects(h, ht.src.theory, ht.src.sig, ht.dst, loaded.evidence["yieldall_proof"], checker=loaded.checker())
    print(f"verdict: {v} in {time.perf_counter() - t0:.3f}s")

    try:
        check_respects(h, ht.src.theory, ht.src.sig, ht.dst, loaded.evidence["yieldall_proof"], logic="eq", checker=loaded.checker("eq"))
    except Exception as e:  # noqa: BLE001 - shown to the reader
        print("in the equational logic the same script is rejected:", e)


if __name__ == "__main__":
    main()
