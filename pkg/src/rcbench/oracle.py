"""Brute-force cross-check of the RC1 decision procedure.

Every sequent is judged three ways: :func:`decide_rc1`, proof search with
an independently checked derivation, and a search through all finite
transitive irreflexive tree models up to a node bound.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from itertools import product

from .calculus import Logic, ProofNotFound, ProofSearch, all_formulas, check_derivation, decide_rc1
from .formula import Sequent
from .kripke import TreeModelBank, check_prop


@dataclass
class SweepReport:
    sequents: int = 0
    derivable: int = 0
    disagreements: list = field(default_factory=list)
    both: list = field(default_factory=list)      # proof and countermodel both found
    neither: list = field(default_factory=list)   # no oracle side succeeded
    bad_derivations: list = field(default_factory=list)
    seconds: float = 0.0

    @property
    def ok(self) -> bool:
        return not (self.disagreements or self.both or self.neither or self.bad_derivations)


def rc1_sweep(atoms=("p", "q"), max_size: int = 6, max_nodes: int = 6, budget: int = 64,
              verify_witnesses: int = 200) -> SweepReport:
    t0 = time.monotonic()
    formulas = all_formulas(tuple(atoms), max_size)
    bank = TreeModelBank(tuple(atoms), max_nodes)
    bits = [bank.bits(f) for f in formulas]
    search = ProofSearch(Logic.RC1)
    rep = SweepReport()
    checked = 0
    for (i, lhs), (j, rhs) in product(enumerate(formulas), repeat=2):
        s = Sequent(lhs, rhs)
        rep.sequents += 1
        verdict = decide_rc1(s)
        bad = bits[i] & ~bits[j]
        try:
            d = search.prove(s, budget)
        except ProofNotFound:
            d = None
        if d is not None and not check_derivation(d, Logic.RC1):
            rep.bad_derivations.append(s)
        proved, refuted = d is not None, bad != 0
        if proved and refuted:
            rep.both.append(s)
        elif not proved and not refuted:
            rep.neither.append(s)
        elif verdict != proved:
            rep.disagreements.append(s)
        rep.derivable += verdict
        if refuted and checked < verify_witnesses:
            # re-evaluate a sample of witnesses with the plain model checker
            m = bank.model((bad & -bad).bit_length() - 1)
            if not (check_prop(m, 0, lhs) and not check_prop(m, 0, rhs)):
                rep.disagreements.append(s)
            checked += 1
    rep.seconds = time.monotonic() - t0
    return rep
