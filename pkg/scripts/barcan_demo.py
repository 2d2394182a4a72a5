"""Decide the Barcan formula and its converse, and print the countermodel."""

from rcbench.calculus import Derivable, decide_qrc1, serialize
from rcbench.formula import parse_sequent, to_text
from rcbench.kripke import model_to_json

for text in ("<> A x0. P(x0) |- A x0. <>P(x0)", "A x0. <>P(x0) |- <> A x0. P(x0)"):
    s = parse_sequent(text)
    res = decide_qrc1(s)
    print(f"{to_text(s)}: {type(res).__name__} after {res.rounds} rounds")
    if isinstance(res, Derivable):
        print(serialize(res.derivation))
    else:
        w = res.witness
        print(f"fails at world {w.world}, verified {w.verify(s)}")
        print(model_to_json(w.model))
    print()
