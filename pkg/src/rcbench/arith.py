"""First-order arithmetic with opaque provability operators.

Formulas print to and parse from a parenthesised prefix format, e.g.
``(forall y0 (dia (named HA) (eq y0 (num 0))))``.  Boxes and diamonds are
atoms of fixed complexity; nothing is arithmetised.
"""

from __future__ import annotations

import math
import re
import zlib
from dataclasses import dataclass, field
from typing import Callable, Mapping, Optional, Union


class ArithParseError(ValueError):
    def __init__(self, message: str, pos: int = 0):
        self.pos = pos
        super().__init__(f"{message} at position {pos}")


class ShapeError(ValueError):
    """An operation received a formula outside its required syntactic shape."""


class OracleError(KeyError):
    pass


# -- terms --------------------------------------------------------------------

class ATerm:
    def __str__(self) -> str:
        return term_text(self)


@dataclass(frozen=True)
class AVar(ATerm):
    name: str


@dataclass(frozen=True)
class Num(ATerm):
    n: int

    def __post_init__(self):
        if self.n < 0:
            raise ValueError("numerals are natural numbers")


@dataclass(frozen=True)
class Mod(ATerm):
    t: ATerm
    m: int

    def __post_init__(self):
        if self.m < 1:
            raise ValueError("modulus must be at least 1")


@dataclass(frozen=True)
class Pair0(ATerm):
    t: ATerm


@dataclass(frozen=True)
class Pair1(ATerm):
    t: ATerm


# -- axiomatization expressions --------------------------------------------------

class AxExpr:
    def __str__(self) -> str:
        return ax_text(self)


@dataclass(frozen=True)
class Named(AxExpr):
    tag: str
    cls: Optional["Cls"] = None  # declared complexity; Sigma1 when omitted


@dataclass(frozen=True)
class OrAx(AxExpr):
    left: AxExpr
    right: AxExpr


@dataclass(frozen=True)
class EqQuote(AxExpr):
    """The axiomatisation ``u = <quote of formula>``."""

    formula: "AFormula"


@dataclass(frozen=True)
class PredAx(AxExpr):
    symbol: str
    args: tuple = ()


@dataclass(frozen=True)
class ExistsAx(AxExpr):
    """Union over a parameter: ``exists v. AX(u, v)``."""

    var: str
    body: AxExpr


HA = Named("HA")
PA = Named("PA")


# -- formulas ---------------------------------------------------------------------

class AFormula:
    def __str__(self) -> str:
        return text(self)


@dataclass(frozen=True)
class Falsum(AFormula):
    pass


@dataclass(frozen=True)
class Eq(AFormula):
    left: ATerm
    right: ATerm


@dataclass(frozen=True)
class Leq(AFormula):
    left: ATerm
    right: ATerm


@dataclass(frozen=True)
class Pred(AFormula):
    symbol: str
    args: tuple = ()


@dataclass(frozen=True)
class And(AFormula):
    parts: tuple


@dataclass(frozen=True)
class Or(AFormula):
    parts: tuple


@dataclass(frozen=True)
class Imp(AFormula):
    left: AFormula
    right: AFormula


@dataclass(frozen=True)
class Not(AFormula):
    body: AFormula


@dataclass(frozen=True)
class AForall(AFormula):
    var: str
    body: AFormula


@dataclass(frozen=True)
class Exists(AFormula):
    var: str
    body: AFormula


@dataclass(frozen=True)
class BForall(AFormula):
    var: str
    bound: ATerm
    body: AFormula


@dataclass(frozen=True)
class BExists(AFormula):
    var: str
    bound: ATerm
    body: AFormula


@dataclass(frozen=True)
class Box(AFormula):
    ax: AxExpr
    body: AFormula


@dataclass(frozen=True)
class ADia(AFormula):
    ax: AxExpr
    body: AFormula


@dataclass(frozen=True)
class SentVar(AFormula):
    """A variable ranging over sentences (the theta of reflection statements)."""

    name: str


@dataclass(frozen=True)
class SentForall(AFormula):
    name: str
    body: AFormula


FALSUM = Falsum()
TRUE = Eq(Num(0), Num(0))


def and_(*parts: AFormula) -> AFormula:
    return parts[0] if len(parts) == 1 else And(tuple(parts))


def or_(*parts: AFormula) -> AFormula:
    return parts[0] if len(parts) == 1 else Or(tuple(parts))


def forall_many(names, body: AFormula) -> AFormula:
    for v in reversed(list(names)):
        body = AForall(v, body)
    return body


# -- complexity classes -------------------------------------------------------------

@dataclass(frozen=True)
class Cls:
    """``D`` (Delta0), ``S``/``P`` with a level, ``DC`` or ``?`` (unclassified)."""

    kind: str
    level: int = 0

    def __str__(self) -> str:
        if self.kind == "D":
            return "Delta0"
        if self.kind == "DC":
            return "DC(Pi1,Sigma1)"
        if self.kind == "?":
            return "unclassified"
        return f"{'Sigma' if self.kind == 'S' else 'Pi'}{self.level}"


DELTA0 = Cls("D")
DC = Cls("DC", 1)
UNKNOWN = Cls("?")


def SIGMA(n: int) -> Cls:
    return DELTA0 if n == 0 else Cls("S", n)


def PI(n: int) -> Cls:
    return DELTA0 if n == 0 else Cls("P", n)


def parse_class(s: str) -> Cls:
    s = s.strip()
    table = {"Delta0": DELTA0, "D0": DELTA0, "DC": DC, "DC(Pi1,Sigma1)": DC}
    if s in table:
        return table[s]
    m = re.fullmatch(r"(Sigma|Pi|S|P)(\d+)", s)
    if not m:
        raise ValueError(f"unknown complexity class {s!r}")
    n = int(m.group(2))
    return SIGMA(n) if m.group(1) in ("Sigma", "S") else PI(n)


def leq(a: Cls, b: Cls) -> bool:
    if a == b or b == UNKNOWN:
        return True
    if a == UNKNOWN:
        return False
    if a.kind == "D":
        return True
    if b.kind == "D":
        return False
    if a.kind == "DC":
        return b.kind in ("S", "P") and b.level >= 2
    if b.kind == "DC":
        return a.level <= 1
    if a.kind == b.kind:
        return a.level <= b.level
    return a.level < b.level


def join(a: Cls, b: Cls) -> Cls:
    if leq(a, b):
        return b
    if leq(b, a):
        return a
    # incomparable: Sigma_n against Pi_n
    n = max(a.level, b.level)
    return DC if n == 1 else SIGMA(n + 1)


def flip(c: Cls) -> Cls:
    if c.kind == "S":
        return PI(c.level)
    if c.kind == "P":
        return SIGMA(c.level)
    return c


def _exists_over(c: Cls) -> Cls:
    if c == UNKNOWN:
        return c
    if c.kind == "D":
        return SIGMA(1)
    if c.kind == "S":
        return c
    if c.kind == "DC":
        return SIGMA(2)
    return SIGMA(c.level + 1)


def _forall_over(c: Cls) -> Cls:
    return flip(_exists_over(flip(c))) if c.kind != "DC" else PI(2)


def classify(phi: AFormula) -> Cls:
    """Classical syntactic classification; negation swaps Sigma and Pi."""
    return _classify(phi, ha=False)


def classify_ha(phi: AFormula) -> Cls:
    """Classification that only uses intuitionistically valid prenex moves.

    Negation is pushed only where HA proves the equivalence (through ``exists``,
    ``or``, boxes, decidable matrices and double negations of Pi1); any
    other negation is unclassified.
    """
    return _classify(phi, ha=True)


def _classify(phi: AFormula, ha: bool) -> Cls:
    if isinstance(phi, (Falsum, Eq, Leq, Pred)):
        return DELTA0
    if isinstance(phi, (BForall, BExists)):
        return _classify(phi.body, ha)
    if isinstance(phi, Box):
        return SIGMA(1)
    if isinstance(phi, ADia):
        return PI(1)
    if isinstance(phi, (And, Or)):
        out = DELTA0
        for p in phi.parts:
            out = join(out, _classify(p, ha))
        return out
    if isinstance(phi, Exists):
        return _exists_over(_classify(phi.body, ha))
    if isinstance(phi, AForall):
        return _forall_over(_classify(phi.body, ha))
    if isinstance(phi, Not):
        return _classify_not(phi.body, ha)
    if isinstance(phi, Imp):
        if not ha:
            return join(flip(_classify(phi.left, False)), _classify(phi.right, False))
        left = _classify(phi.left, True)
        if left == DELTA0:
            return _classify(phi.right, True)
        if isinstance(phi.left, Exists) and phi.left.var not in free_vars(phi.right):
            return _classify(AForall(phi.left.var, Imp(phi.left.body, phi.right)), True)
        if _classify(phi.right, True) == DELTA0 and not isinstance(phi.right, Falsum):
            return _classify(Not(phi.left), True) if leq(left, SIGMA(1)) else UNKNOWN
        if isinstance(phi.right, Falsum):
            return _classify_not(phi.left, True)
        return UNKNOWN
    return UNKNOWN


def _classify_not(body: AFormula, ha: bool) -> Cls:
    inner = _classify(body, ha)
    if not ha:
        return flip(inner)
    if inner == DELTA0:
        return DELTA0
    if isinstance(body, Exists):
        return _classify(AForall(body.var, Not(body.body)), True)
    if isinstance(body, Or):
        return _classify(And(tuple(Not(p) for p in body.parts)), True)
    if isinstance(body, Box):
        return PI(1)
    if isinstance(body, Not) and leq(_classify(body.body, True), PI(1)):
        return _classify(body.body, True)
    return UNKNOWN


# -- traversal ------------------------------------------------------------------------

def term_vars(t: ATerm) -> frozenset:
    if isinstance(t, AVar):
        return frozenset({t.name})
    if isinstance(t, (Mod, Pair0, Pair1)):
        return term_vars(t.t)
    return frozenset()


def ax_free_vars(ax: AxExpr) -> frozenset:
    """Free parameters of an axiomatisation; the axiom variable ``u`` is implicit."""
    if isinstance(ax, Named):
        return frozenset()
    if isinstance(ax, OrAx):
        return ax_free_vars(ax.left) | ax_free_vars(ax.right)
    if isinstance(ax, EqQuote):
        return free_vars(ax.formula) - {"u"}
    if isinstance(ax, PredAx):
        return frozenset().union(*(term_vars(t) for t in ax.args)) - {"u"}
    if isinstance(ax, ExistsAx):
        return ax_free_vars(ax.body) - {ax.var}
    raise TypeError(ax)


def free_vars(phi: AFormula) -> frozenset:
    if isinstance(phi, (Falsum, SentVar)):
        return frozenset()
    if isinstance(phi, (Eq, Leq)):
        return term_vars(phi.left) | term_vars(phi.right)
    if isinstance(phi, Pred):
        return frozenset().union(*(term_vars(t) for t in phi.args))
    if isinstance(phi, (And, Or)):
        return frozenset().union(*(free_vars(p) for p in phi.parts))
    if isinstance(phi, Imp):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Not):
        return free_vars(phi.body)
    if isinstance(phi, (AForall, Exists)):
        return free_vars(phi.body) - {phi.var}
    if isinstance(phi, (BForall, BExists)):
        return term_vars(phi.bound) | (free_vars(phi.body) - {phi.var})
    if isinstance(phi, (Box, ADia)):
        return ax_free_vars(phi.ax) | free_vars(phi.body)
    if isinstance(phi, SentForall):
        return free_vars(phi.body)
    raise TypeError(phi)


def all_names(phi) -> frozenset:
    out = set()
    for node in subformulas(phi):
        if isinstance(node, (AForall, Exists, BForall, BExists)):
            out.add(node.var)
        out |= free_vars(node)
    return frozenset(out)


def subformulas(phi: AFormula):
    stack = [phi]
    while stack:
        f = stack.pop()
        yield f
        if isinstance(f, (And, Or)):
            stack.extend(reversed(f.parts))
        elif isinstance(f, Imp):
            stack.extend([f.right, f.left])
        elif isinstance(f, (Not, AForall, Exists, BForall, BExists, Box, ADia, SentForall)):
            stack.append(f.body)


def fresh_name(base: str, used) -> str:
    if base not in used:
        return base
    k = 0
    while f"{base}{k}" in used:
        k += 1
    return f"{base}{k}"


def subst_term(t: ATerm, x: str, s: ATerm) -> ATerm:
    if isinstance(t, AVar):
        return s if t.name == x else t
    if isinstance(t, Mod):
        return Mod(subst_term(t.t, x, s), t.m)
    if isinstance(t, Pair0):
        return Pair0(subst_term(t.t, x, s))
    if isinstance(t, Pair1):
        return Pair1(subst_term(t.t, x, s))
    return t


def subst_ax(ax: AxExpr, x: str, s: ATerm) -> AxExpr:
    if isinstance(ax, Named):
        return ax
    if isinstance(ax, OrAx):
        return OrAx(subst_ax(ax.left, x, s), subst_ax(ax.right, x, s))
    if isinstance(ax, EqQuote):
        return EqQuote(subst(ax.formula, x, s)) if x != "u" else ax
    if isinstance(ax, PredAx):
        return PredAx(ax.symbol, tuple(subst_term(t, x, s) for t in ax.args)) if x != "u" else ax
    if isinstance(ax, ExistsAx):
        if ax.var == x or x not in ax_free_vars(ax.body):
            return ax
        var, body = ax.var, ax.body
        if var in term_vars(s):
            var = fresh_name(var, _ax_names(body) | term_vars(s) | {x, "u"})
            body = subst_ax(body, ax.var, AVar(var))
        return ExistsAx(var, subst_ax(body, x, s))
    raise TypeError(ax)


def _ax_names(ax: AxExpr) -> frozenset:
    if isinstance(ax, OrAx):
        return _ax_names(ax.left) | _ax_names(ax.right)
    if isinstance(ax, EqQuote):
        return all_names(ax.formula)
    if isinstance(ax, ExistsAx):
        return _ax_names(ax.body) | {ax.var}
    return ax_free_vars(ax)


def subst(phi: AFormula, x: str, s: ATerm) -> AFormula:
    """Capture-avoiding substitution of the term ``s`` for free ``x``; binders are renamed."""
    if isinstance(phi, (Falsum, SentVar)):
        return phi
    if isinstance(phi, Eq):
        return Eq(subst_term(phi.left, x, s), subst_term(phi.right, x, s))
    if isinstance(phi, Leq):
        return Leq(subst_term(phi.left, x, s), subst_term(phi.right, x, s))
    if isinstance(phi, Pred):
        return Pred(phi.symbol, tuple(subst_term(t, x, s) for t in phi.args))
    if isinstance(phi, And):
        return And(tuple(subst(p, x, s) for p in phi.parts))
    if isinstance(phi, Or):
        return Or(tuple(subst(p, x, s) for p in phi.parts))
    if isinstance(phi, Imp):
        return Imp(subst(phi.left, x, s), subst(phi.right, x, s))
    if isinstance(phi, Not):
        return Not(subst(phi.body, x, s))
    if isinstance(phi, SentForall):
        return SentForall(phi.name, subst(phi.body, x, s))
    if isinstance(phi, (Box, ADia)):
        return type(phi)(subst_ax(phi.ax, x, s), subst(phi.body, x, s))
    if isinstance(phi, (AForall, Exists, BForall, BExists)):
        bounded = isinstance(phi, (BForall, BExists))
        bound = subst_term(phi.bound, x, s) if bounded else None
        if phi.var == x or x not in free_vars(phi.body):
            return type(phi)(phi.var, bound, phi.body) if bounded else phi
        var, body = phi.var, phi.body
        if var in term_vars(s):
            new = fresh_name(var, all_names(body) | term_vars(s) | {x})
            body = subst(body, var, AVar(new))
            var = new
        body = subst(body, x, s)
        return type(phi)(var, bound, body) if bounded else type(phi)(var, body)
    raise TypeError(phi)


# -- printing ---------------------------------------------------------------------------

def term_text(t: ATerm) -> str:
    if isinstance(t, AVar):
        return t.name
    if isinstance(t, Num):
        return f"(num {t.n})"
    if isinstance(t, Mod):
        return f"(mod {term_text(t.t)} {t.m})"
    if isinstance(t, Pair0):
        return f"(p0 {term_text(t.t)})"
    if isinstance(t, Pair1):
        return f"(p1 {term_text(t.t)})"
    raise TypeError(t)


def ax_text(ax: AxExpr) -> str:
    if isinstance(ax, Named):
        return f"(named {ax.tag})" if ax.cls is None else f"(named {ax.tag} {ax.cls})"
    if isinstance(ax, OrAx):
        return f"(or-ax {ax_text(ax.left)} {ax_text(ax.right)})"
    if isinstance(ax, EqQuote):
        return f"(eq-quote {text(ax.formula)})"
    if isinstance(ax, PredAx):
        return "(pred-ax " + " ".join([ax.symbol] + [term_text(t) for t in ax.args]) + ")"
    if isinstance(ax, ExistsAx):
        return f"(exists-ax {ax.var} {ax_text(ax.body)})"
    raise TypeError(ax)


def text(phi: AFormula) -> str:
    if isinstance(phi, Falsum):
        return "(false)"
    if isinstance(phi, Eq):
        return f"(eq {term_text(phi.left)} {term_text(phi.right)})"
    if isinstance(phi, Leq):
        return f"(le {term_text(phi.left)} {term_text(phi.right)})"
    if isinstance(phi, Pred):
        return "(pred " + " ".join([phi.symbol] + [term_text(t) for t in phi.args]) + ")"
    if isinstance(phi, And):
        return "(and " + " ".join(text(p) for p in phi.parts) + ")"
    if isinstance(phi, Or):
        return "(or " + " ".join(text(p) for p in phi.parts) + ")"
    if isinstance(phi, Imp):
        return f"(imp {text(phi.left)} {text(phi.right)})"
    if isinstance(phi, Not):
        return f"(not {text(phi.body)})"
    if isinstance(phi, AForall):
        return f"(forall {phi.var} {text(phi.body)})"
    if isinstance(phi, Exists):
        return f"(exists {phi.var} {text(phi.body)})"
    if isinstance(phi, BForall):
        return f"(ball {phi.var} {term_text(phi.bound)} {text(phi.body)})"
    if isinstance(phi, BExists):
        return f"(bex {phi.var} {term_text(phi.bound)} {text(phi.body)})"
    if isinstance(phi, Box):
        return f"(box {ax_text(phi.ax)} {text(phi.body)})"
    if isinstance(phi, ADia):
        return f"(dia {ax_text(phi.ax)} {text(phi.body)})"
    if isinstance(phi, SentVar):
        return f"(sent {phi.name})"
    if isinstance(phi, SentForall):
        return f"(forall-sent {phi.name} {text(phi.body)})"
    raise TypeError(phi)


# -- parsing ------------------------------------------------------------------------------

_SEXP_TOKEN = re.compile(r"\s*(?:(\()|(\))|([^\s()]+))")
_NAME = re.compile(r"[A-Za-z_][A-Za-z0-9_]*$")


def _read(text_: str):
    """Parse into nested lists of (token, position) leaves."""
    pos, stack = 0, [[]]
    while pos < len(text_):
        m = _SEXP_TOKEN.match(text_, pos)
        if not m or m.end() == pos:
            if text_[pos:].strip() == "":
                break
            raise ArithParseError("unexpected character", pos)
        start = m.start(1) if m.group(1) else m.start(2) if m.group(2) else m.start(3)
        pos = m.end()
        if m.group(1):
            stack.append([("(", start)])
        elif m.group(2):
            if len(stack) == 1:
                raise ArithParseError("unbalanced ')'", start)
            lst = stack.pop()
            stack[-1].append(lst)
        else:
            stack[-1].append((m.group(3), start))
    if len(stack) != 1:
        raise ArithParseError("unbalanced '('", len(text_))
    top = stack[0]
    if len(top) != 1:
        raise ArithParseError("expected exactly one expression", top[1][1] if len(top) > 1 else 0)
    return top[0]


def _head(node):
    if not isinstance(node, list) or len(node) < 2 or isinstance(node[1], list):
        pos = node[1] if isinstance(node, tuple) else node[0][1]
        raise ArithParseError("expected (operator ...)", pos)
    return node[1][0], node[0][1], node[2:]


def _leaf(node, what: str) -> str:
    if isinstance(node, list):
        raise ArithParseError(f"expected {what}", node[0][1])
    return node[0]


def _name(node) -> str:
    s = _leaf(node, "a variable name")
    if not _NAME.match(s):
        raise ArithParseError(f"bad variable name {s!r}", node[1])
    return s


def _nat(node) -> int:
    s = _leaf(node, "a natural number")
    if not s.isdigit():
        raise ArithParseError(f"expected a natural number, got {s!r}", node[1])
    return int(s)


def _arity(op, pos, args, n):
    if len(args) != n:
        raise ArithParseError(f"{op} takes {n} arguments, got {len(args)}", pos)


def _term(node) -> ATerm:
    if not isinstance(node, list):
        return AVar(_name(node))
    op, pos, args = _head(node)
    if op == "num":
        _arity(op, pos, args, 1)
        return Num(_nat(args[0]))
    if op == "mod":
        _arity(op, pos, args, 2)
        m = _nat(args[1])
        if m < 1:
            raise ArithParseError("modulus must be at least 1", pos)
        return Mod(_term(args[0]), m)
    if op in ("p0", "p1"):
        _arity(op, pos, args, 1)
        return (Pair0 if op == "p0" else Pair1)(_term(args[0]))
    raise ArithParseError(f"unknown term operator {op!r}", pos)


def _ax(node) -> AxExpr:
    op, pos, args = _head(node)
    if op == "named":
        if len(args) not in (1, 2):
            raise ArithParseError("named takes a tag and an optional class", pos)
        cls = None
        if len(args) == 2:
            try:
                cls = parse_class(_leaf(args[1], "a class"))
            except ValueError as e:
                raise ArithParseError(str(e), pos) from e
        return Named(_leaf(args[0], "a theory tag"), cls)
    if op == "or-ax":
        _arity(op, pos, args, 2)
        return OrAx(_ax(args[0]), _ax(args[1]))
    if op == "eq-quote":
        _arity(op, pos, args, 1)
        return EqQuote(_formula(args[0]))
    if op == "pred-ax":
        if not args:
            raise ArithParseError("pred-ax needs a symbol", pos)
        return PredAx(_name(args[0]), tuple(_term(a) for a in args[1:]))
    if op == "exists-ax":
        _arity(op, pos, args, 2)
        return ExistsAx(_name(args[0]), _ax(args[1]))
    raise ArithParseError(f"unknown axiomatisation operator {op!r}", pos)


def _formula(node) -> AFormula:
    op, pos, args = _head(node) if isinstance(node, list) and len(node) >= 2 else (None, None, None)
    if isinstance(node, list) and len(node) == 1:
        raise ArithParseError("empty expression", node[0][1])
    if op is None:
        raise ArithParseError("expected a formula", node[1] if isinstance(node, tuple) else 0)
    if op == "false":
        _arity(op, pos, args, 0)
        return FALSUM
    if op in ("eq", "le"):
        _arity(op, pos, args, 2)
        return (Eq if op == "eq" else Leq)(_term(args[0]), _term(args[1]))
    if op == "pred":
        if not args:
            raise ArithParseError("pred needs a symbol", pos)
        return Pred(_name(args[0]), tuple(_term(a) for a in args[1:]))
    if op in ("and", "or"):
        if len(args) < 2:
            raise ArithParseError(f"{op} needs at least two arguments", pos)
        return (And if op == "and" else Or)(tuple(_formula(a) for a in args))
    if op == "imp":
        _arity(op, pos, args, 2)
        return Imp(_formula(args[0]), _formula(args[1]))
    if op == "not":
        _arity(op, pos, args, 1)
        return Not(_formula(args[0]))
    if op in ("forall", "exists"):
        _arity(op, pos, args, 2)
        return (AForall if op == "forall" else Exists)(_name(args[0]), _formula(args[1]))
    if op in ("ball", "bex"):
        _arity(op, pos, args, 3)
        return (BForall if op == "ball" else BExists)(_name(args[0]), _term(args[1]), _formula(args[2]))
    if op in ("box", "dia"):
        _arity(op, pos, args, 2)
        return (Box if op == "box" else ADia)(_ax(args[0]), _formula(args[1]))
    if op == "sent":
        _arity(op, pos, args, 1)
        return SentVar(_name(args[0]))
    if op == "forall-sent":
        _arity(op, pos, args, 2)
        return SentForall(_name(args[0]), _formula(args[1]))
    raise ArithParseError(f"unknown formula operator {op!r}", pos)


def parse_arith(source: str) -> AFormula:
    return _formula(_read(source))


def parse_ax(source: str) -> AxExpr:
    return _ax(_read(source))


def parse_term(source: str) -> ATerm:
    return _term(_read(source))


# -- pairing and bounded evaluation ---------------------------------------------------------

def pair(a: int, b: int) -> int:
    return (a + b) * (a + b + 1) // 2 + b


def unpair(n: int) -> tuple:
    w = (math.isqrt(8 * n + 1) - 1) // 2
    b = n - w * (w + 1) // 2
    return w - b, b


@dataclass
class Oracle:
    """Interpretations for uninterpreted symbols.

    ``preds`` maps a predicate symbol to a set of tuples or a callable on
    tuples.  ``modal`` maps ``(kind, ax, closed_body)`` to a truth value, or
    is a callable on that key; ``kind`` is ``"box"`` or ``"dia"``.
    """

    preds: Mapping = field(default_factory=dict)
    modal: Union[Mapping, Callable] = field(default_factory=dict)

    def pred(self, symbol: str, args: tuple) -> bool:
        if symbol not in self.preds:
            raise OracleError(f"no interpretation for predicate {symbol}")
        table = self.preds[symbol]
        return bool(table(args)) if callable(table) else args in table

    def modality(self, key: tuple) -> bool:
        if callable(self.modal):
            return bool(self.modal(key))
        if key not in self.modal:
            raise OracleError(f"no truth value for {key[0]} {ax_text(key[1])} {text(key[2])}")
        return bool(self.modal[key])


def hashed_modal_oracle(seed: int) -> Callable:
    """A deterministic pseudo-random truth value for every modal key."""

    def value(key) -> bool:
        kind, ax, body = key
        return zlib.crc32(f"{seed}|{kind}|{ax_text(ax)}|{text(body)}".encode()) & 1 == 1

    return value


def fold_term(t: ATerm) -> ATerm:
    """Evaluate ground subterms to numerals."""
    if isinstance(t, Mod):
        inner = fold_term(t.t)
        return Num(inner.n % t.m) if isinstance(inner, Num) else Mod(inner, t.m)
    if isinstance(t, (Pair0, Pair1)):
        inner = fold_term(t.t)
        if isinstance(inner, Num):
            return Num(unpair(inner.n)[0 if isinstance(t, Pair0) else 1])
        return type(t)(inner)
    return t


def fold(phi: AFormula) -> AFormula:
    """Fold ground terms everywhere, including inside modal operators."""
    return _map_terms(phi, fold_term)


def _map_terms(phi: AFormula, f) -> AFormula:
    if isinstance(phi, (Falsum, SentVar)):
        return phi
    if isinstance(phi, Eq):
        return Eq(f(phi.left), f(phi.right))
    if isinstance(phi, Leq):
        return Leq(f(phi.left), f(phi.right))
    if isinstance(phi, Pred):
        return Pred(phi.symbol, tuple(f(t) for t in phi.args))
    if isinstance(phi, (And, Or)):
        return type(phi)(tuple(_map_terms(p, f) for p in phi.parts))
    if isinstance(phi, Imp):
        return Imp(_map_terms(phi.left, f), _map_terms(phi.right, f))
    if isinstance(phi, Not):
        return Not(_map_terms(phi.body, f))
    if isinstance(phi, (AForall, Exists)):
        return type(phi)(phi.var, _map_terms(phi.body, f))
    if isinstance(phi, (BForall, BExists)):
        return type(phi)(phi.var, f(phi.bound), _map_terms(phi.body, f))
    if isinstance(phi, (Box, ADia)):
        return type(phi)(_map_ax_terms(phi.ax, f), _map_terms(phi.body, f))
    if isinstance(phi, SentForall):
        return SentForall(phi.name, _map_terms(phi.body, f))
    raise TypeError(phi)


def _map_ax_terms(ax: AxExpr, f) -> AxExpr:
    if isinstance(ax, OrAx):
        return OrAx(_map_ax_terms(ax.left, f), _map_ax_terms(ax.right, f))
    if isinstance(ax, EqQuote):
        return EqQuote(_map_terms(ax.formula, f))
    if isinstance(ax, PredAx):
        return PredAx(ax.symbol, tuple(f(t) for t in ax.args))
    if isinstance(ax, ExistsAx):
        return ExistsAx(ax.var, _map_ax_terms(ax.body, f))
    return ax


def _close(phi: AFormula, env: Mapping) -> AFormula:
    for x in sorted(free_vars(phi)):
        if x not in env:
            raise OracleError(f"variable {x} is unassigned")
        phi = subst(phi, x, Num(env[x]))
    return fold(phi)


def _close_ax(ax: AxExpr, env: Mapping) -> AxExpr:
    for x in sorted(ax_free_vars(ax)):
        if x not in env:
            raise OracleError(f"variable {x} is unassigned")
        ax = subst_ax(ax, x, Num(env[x]))
    return _map_ax_terms(ax, fold_term)


def eval_term(t: ATerm, env: Mapping) -> int:
    if isinstance(t, Num):
        return t.n
    if isinstance(t, AVar):
        if t.name not in env:
            raise OracleError(f"variable {t.name} is unassigned")
        return env[t.name]
    if isinstance(t, Mod):
        return eval_term(t.t, env) % t.m
    if isinstance(t, Pair0):
        return unpair(eval_term(t.t, env))[0]
    if isinstance(t, Pair1):
        return unpair(eval_term(t.t, env))[1]
    raise TypeError(t)


def eval_bounded(phi: AFormula, B: int, oracle: Optional[Oracle] = None, env: Optional[Mapping] = None,
                 var_bounds: Optional[Mapping] = None) -> bool:
    """Classical truth with every unbounded quantifier cut to ``0..B``.

    ``var_bounds`` overrides the cut for quantifiers binding particular
    variable names.
    """
    oracle = oracle or Oracle()
    bounds = dict(var_bounds or {})

    def ev(f: AFormula, g: dict) -> bool:
        if isinstance(f, Falsum):
            return False
        if isinstance(f, Eq):
            return eval_term(f.left, g) == eval_term(f.right, g)
        if isinstance(f, Leq):
            return eval_term(f.left, g) <= eval_term(f.right, g)
        if isinstance(f, Pred):
            return oracle.pred(f.symbol, tuple(eval_term(t, g) for t in f.args))
        if isinstance(f, And):
            return all(ev(p, g) for p in f.parts)
        if isinstance(f, Or):
            return any(ev(p, g) for p in f.parts)
        if isinstance(f, Imp):
            return (not ev(f.left, g)) or ev(f.right, g)
        if isinstance(f, Not):
            return not ev(f.body, g)
        if isinstance(f, AForall):
            return all(ev(f.body, {**g, f.var: k}) for k in range(bounds.get(f.var, B) + 1))
        if isinstance(f, Exists):
            return any(ev(f.body, {**g, f.var: k}) for k in range(bounds.get(f.var, B) + 1))
        if isinstance(f, BForall):
            return all(ev(f.body, {**g, f.var: k}) for k in range(eval_term(f.bound, g) + 1))
        if isinstance(f, BExists):
            return any(ev(f.body, {**g, f.var: k}) for k in range(eval_term(f.bound, g) + 1))
        if isinstance(f, (Box, ADia)):
            kind = "box" if isinstance(f, Box) else "dia"
            return oracle.modality((kind, _close_ax(f.ax, g), _close(f.body, g)))
        if isinstance(f, SentVar):
            return oracle.pred(f.name, ())
        raise OracleError(f"cannot evaluate {type(f).__name__}")

    return ev(phi, dict(env or {}))


# -- shape-driven constructions ----------------------------------------------------------------

def _is_delta0(phi: AFormula) -> bool:
    return all(not isinstance(n, (AForall, Exists, Box, ADia, SentVar, SentForall)) for n in subformulas(phi))


def sigma2_parts(phi: AFormula) -> tuple:
    """Split ``exists s forall t delta`` into ``(s, t, delta)``."""
    if isinstance(phi, Exists) and isinstance(phi.body, AForall) and _is_delta0(phi.body.body):
        return phi.var, phi.body.var, phi.body.body
    raise ShapeError(f"expected exists-forall prenex form over a Delta0 matrix, got {text(phi)}")


def merge_sigma2_disjunction(phi0: AFormula, phi1: AFormula) -> AFormula:
    """A single exists-forall formula equivalent to ``phi0 or phi1``, with the witness as a pair."""
    s, t, d0 = sigma2_parts(phi0)
    u, v, d1 = sigma2_parts(phi1)
    used = all_names(phi0) | all_names(phi1)
    x = fresh_name("x", used)
    y = fresh_name("y", used | {x})
    left = subst(subst(d0, s, Pair1(AVar(x))), t, AVar(y))
    right = subst(subst(d1, u, Pair1(AVar(x))), v, AVar(y))
    return Exists(x, AForall(y, Or((And((Eq(Pair0(AVar(x)), Num(0)), left)),
                                    And((Eq(Pair0(AVar(x)), Num(1)), right))))))


def pi1_to_neg_neg_sigma1(pi: AFormula) -> AFormula:
    """For ``forall x delta`` the Sigma1 formula ``exists x not delta``."""
    if not (isinstance(pi, AForall) and _is_delta0(pi.body)):
        raise ShapeError(f"expected forall over a Delta0 matrix, got {text(pi)}")
    return Exists(pi.var, Not(pi.body))


def prenex_prefix(phi: AFormula) -> tuple:
    """``(prefix, matrix)`` with the prefix a list of ``("A"|"E", var)``."""
    prefix = []
    while isinstance(phi, (AForall, Exists)):
        prefix.append(("A" if isinstance(phi, AForall) else "E", phi.var))
        phi = phi.body
    if not _is_delta0(phi):
        raise ShapeError(f"not in prenex form: matrix {text(phi)} has unbounded quantifiers")
    return prefix, phi


def is_prenex(phi: AFormula) -> bool:
    try:
        prenex_prefix(phi)
    except ShapeError:
        return False
    return True


def kuroda_body(phi: AFormula) -> AFormula:
    """Insert a double negation after every maximal block of universal quantifiers."""
    prefix, matrix = prenex_prefix(phi)
    out = matrix
    for i in reversed(range(len(prefix))):
        q, v = prefix[i]
        last_of_block = q == "A" and (i + 1 == len(prefix) or prefix[i + 1][0] == "E")
        if last_of_block:
            out = Not(Not(out))
        out = AForall(v, out) if q == "A" else Exists(v, out)
    return out


def widen_dc(phi: AFormula) -> AFormula:
    """Record that a DC(Pi1,Sigma1) formula is treated as Sigma2; the formula is unchanged."""
    if not leq(classify_ha(phi), DC):
        raise ShapeError(f"{text(phi)} is not in DC(Pi1,Sigma1)")
    return phi
