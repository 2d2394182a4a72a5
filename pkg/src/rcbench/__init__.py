"""Workbench for strictly positive provability logics and their arithmetical readings."""

from .formula import Mode, Sequent, parse, parse_formula, parse_sequent, to_text
from .calculus import Logic, check_derivation, decide_qrc1, decide_rc1, interpolate, prove

__all__ = [
    "Mode", "Sequent", "parse", "parse_formula", "parse_sequent", "to_text",
    "Logic", "check_derivation", "decide_qrc1", "decide_rc1", "interpolate", "prove",
]
