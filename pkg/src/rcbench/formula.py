"""Strictly positive modal formulas: syntax, parsing, printing, substitution.

Formulas are immutable dataclasses built from ``Top``, ``Atom``, ``Conj``,
``Dia`` and ``Forall``.  Variables and constants are indexed (``x0``, ``c3``)
so that translations into arithmetic can map them positionally.

Concrete syntax (ASCII, whitespace-insensitive)::

    formula := "T" | atom | "(" formula ")" | "<>" formula | "<" NAT ">" formula
             | "A" var "." formula | formula "&" formula
    atom    := IDENT | IDENT "(" term ("," term)* ")"
    sequent := formula "|-" formula

``&`` is left-associative; ``<>``, ``<k>`` and ``A x.`` bind tighter than ``&``.
"""

from __future__ import annotations

import enum
import re
from dataclasses import dataclass, field
from typing import Iterator, Optional, Union


class Mode(enum.Enum):
    PROP = "prop"    # one modality, no quantifiers, 0-ary atoms only
    POLY = "poly"    # indexed modalities, no quantifiers
    QUANT = "quant"  # one modality, predicates with terms, universal quantifier


class ParseError(ValueError):
    def __init__(self, message: str, pos: int, text: str = ""):
        self.pos = pos
        self.text = text
        super().__init__(f"{message} at position {pos}")


class SignatureError(ValueError):
    pass


class CaptureError(ValueError):
    pass


# -- terms -------------------------------------------------------------------

@dataclass(frozen=True, order=True)
class Var:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("variable index must be >= 0")

    def __str__(self) -> str:
        return f"x{self.index}"


@dataclass(frozen=True, order=True)
class Const:
    index: int

    def __post_init__(self):
        if self.index < 0:
            raise ValueError("constant index must be >= 0")

    def __str__(self) -> str:
        return f"c{self.index}"


Term = Union[Var, Const]


# -- formulas ----------------------------------------------------------------

class Formula:
    """Base class; concrete node types are the frozen dataclasses below."""

    __slots__ = ()

    def __str__(self) -> str:
        return to_text(self)

    def __and__(self, other: "Formula") -> "Conj":
        return Conj(self, other)


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Atom(Formula):
    pred: str
    args: tuple = ()


@dataclass(frozen=True)
class Conj(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Dia(Formula):
    index: int
    body: Formula


@dataclass(frozen=True)
class Forall(Formula):
    var: Var
    body: Formula


TOP = Top()


def dia(body: Formula, index: int = 0) -> Dia:
    return Dia(index, body)


def conj(*parts: Formula) -> Formula:
    """Left-nested conjunction; the empty conjunction is ``T``."""
    if not parts:
        return TOP
    out = parts[0]
    for p in parts[1:]:
        out = Conj(out, p)
    return out


@dataclass(frozen=True)
class Sequent:
    lhs: Formula
    rhs: Formula

    def __str__(self) -> str:
        return f"{to_text(self.lhs)} |- {to_text(self.rhs)}"


@dataclass
class Signature:
    """Predicate arities (0 = propositional atom) and constant names."""

    predicates: dict = field(default_factory=dict)
    constants: frozenset = frozenset()

    def __post_init__(self):
        for name, arity in self.predicates.items():
            if arity < 0:
                raise SignatureError(f"negative arity for {name}")
        clash = set(self.predicates) & set(self.constants)
        if clash:
            raise SignatureError(f"names used both as predicate and constant: {sorted(clash)}")
        self.constants = frozenset(self.constants)

    @classmethod
    def of(cls, *formulas: Formula) -> "Signature":
        preds: dict = {}
        consts: set = set()
        for f in formulas:
            for node in walk(f):
                if isinstance(node, Atom):
                    if preds.setdefault(node.pred, len(node.args)) != len(node.args):
                        raise SignatureError(f"inconsistent arity for {node.pred}")
                    consts.update(str(t) for t in node.args if isinstance(t, Const))
        return cls(preds, frozenset(consts))


# -- traversal and structural operations --------------------------------------

def walk(phi: Formula) -> Iterator[Formula]:
    stack = [phi]
    while stack:
        node = stack.pop()
        yield node
        if isinstance(node, Conj):
            stack.append(node.right)
            stack.append(node.left)
        elif isinstance(node, (Dia, Forall)):
            stack.append(node.body)


def size(phi: Formula) -> int:
    return sum(1 for _ in walk(phi))


def free_vars(phi: Formula) -> frozenset:
    if isinstance(phi, Top):
        return frozenset()
    if isinstance(phi, Atom):
        return frozenset(t for t in phi.args if isinstance(t, Var))
    if isinstance(phi, Conj):
        return free_vars(phi.left) | free_vars(phi.right)
    if isinstance(phi, Dia):
        return free_vars(phi.body)
    if isinstance(phi, Forall):
        return free_vars(phi.body) - {phi.var}
    raise TypeError(phi)


def all_vars(phi: Formula) -> frozenset:
    """Every variable occurring in ``phi``, bound or free."""
    out = set()
    for node in walk(phi):
        if isinstance(node, Atom):
            out.update(t for t in node.args if isinstance(t, Var))
        elif isinstance(node, Forall):
            out.add(node.var)
    return frozenset(out)


def bound_vars(phi: Formula) -> frozenset:
    return frozenset(n.var for n in walk(phi) if isinstance(n, Forall))


def constants_of(phi: Formula) -> frozenset:
    return frozenset(t for n in walk(phi) if isinstance(n, Atom) for t in n.args if isinstance(t, Const))


def predicates_of(phi: Formula) -> frozenset:
    return frozenset(n.pred for n in walk(phi) if isinstance(n, Atom))


def symbols_of(phi: Formula) -> frozenset:
    """Predicate names and constant names (as strings) occurring in ``phi``."""
    return predicates_of(phi) | frozenset(str(c) for c in constants_of(phi))


def modal_depth(phi: Formula) -> int:
    if isinstance(phi, (Top, Atom)):
        return 0
    if isinstance(phi, Conj):
        return max(modal_depth(phi.left), modal_depth(phi.right))
    if isinstance(phi, Dia):
        return 1 + modal_depth(phi.body)
    if isinstance(phi, Forall):
        return modal_depth(phi.body)
    raise TypeError(phi)


def modalities_of(phi: Formula) -> frozenset:
    return frozenset(n.index for n in walk(phi) if isinstance(n, Dia))


def is_free_for(t: Term, x: Var, phi: Formula) -> bool:
    """True iff no free occurrence of ``x`` in ``phi`` lies under a binder of ``t``."""
    if isinstance(t, Const):
        return True

    def ok(f: Formula, binders: frozenset) -> bool:
        if isinstance(f, Top):
            return True
        if isinstance(f, Atom):
            return not (x in f.args and t in binders)
        if isinstance(f, Conj):
            return ok(f.left, binders) and ok(f.right, binders)
        if isinstance(f, Dia):
            return ok(f.body, binders)
        if isinstance(f, Forall):
            if f.var == x:
                return True  # x not free below
            return ok(f.body, binders | {f.var})
        raise TypeError(f)

    return ok(phi, frozenset())


def substitute(phi: Formula, x: Var, t: Term) -> Formula:
    """Replace the free occurrences of ``x`` by ``t``; raises on capture."""
    if not is_free_for(t, x, phi):
        raise CaptureError(f"{t} is not free for {x} in {to_text(phi)}")
    return _subst(phi, x, t)


def _subst(phi: Formula, x: Var, t: Term) -> Formula:
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, Atom):
        if x not in phi.args:
            return phi
        return Atom(phi.pred, tuple(t if a == x else a for a in phi.args))
    if isinstance(phi, Conj):
        left, right = _subst(phi.left, x, t), _subst(phi.right, x, t)
        if left is phi.left and right is phi.right:
            return phi
        return Conj(left, right)
    if isinstance(phi, Dia):
        body = _subst(phi.body, x, t)
        return phi if body is phi.body else Dia(phi.index, body)
    if isinstance(phi, Forall):
        if phi.var == x:
            return phi
        body = _subst(phi.body, x, t)
        return phi if body is phi.body else Forall(phi.var, body)
    raise TypeError(phi)


def replace_const(phi: Formula, c: Const, t: Term) -> Formula:
    """Replace every occurrence of constant ``c`` by term ``t`` (no capture check)."""
    if isinstance(phi, Top):
        return phi
    if isinstance(phi, Atom):
        return Atom(phi.pred, tuple(t if a == c else a for a in phi.args))
    if isinstance(phi, Conj):
        return Conj(replace_const(phi.left, c, t), replace_const(phi.right, c, t))
    if isinstance(phi, Dia):
        return Dia(phi.index, replace_const(phi.body, c, t))
    if isinstance(phi, Forall):
        return Forall(phi.var, replace_const(phi.body, c, t))
    raise TypeError(phi)


def conjuncts(phi: Formula) -> list:
    """Top-level conjuncts of ``phi`` in left-to-right order (``T`` kept)."""
    if isinstance(phi, Conj):
        return conjuncts(phi.left) + conjuncts(phi.right)
    return [phi]


def fresh_var(*formulas: Formula, start: int = 0) -> Var:
    used = {v.index for f in formulas for v in all_vars(f)}
    k = start
    while k in used:
        k += 1
    return Var(k)


# -- printing ----------------------------------------------------------------

def _term_text(t: Term) -> str:
    return str(t)


def to_text(phi: Union[Formula, Sequent]) -> str:
    if isinstance(phi, Sequent):
        return str(phi)
    if isinstance(phi, Top):
        return "T"
    if isinstance(phi, Atom):
        if not phi.args:
            return phi.pred
        return f"{phi.pred}({','.join(_term_text(a) for a in phi.args)})"
    if isinstance(phi, Conj):
        right = to_text(phi.right)
        if isinstance(phi.right, Conj):
            right = f"({right})"
        return f"{to_text(phi.left)} & {right}"
    if isinstance(phi, Dia):
        op = "<>" if phi.index == 0 else f"<{phi.index}>"
        return op + _unary_text(phi.body)
    if isinstance(phi, Forall):
        return f"A {phi.var}. " + _unary_text(phi.body)
    raise TypeError(phi)


def _unary_text(phi: Formula) -> str:
    s = to_text(phi)
    return f"({s})" if isinstance(phi, Conj) else s


# -- parsing -----------------------------------------------------------------

_TOKEN = re.compile(r"\s*(?:(\|-)|(<>)|([<>().,&])|(\d+)|([A-Za-z_][A-Za-z0-9_]*))")
_VAR = re.compile(r"x(\d+)$")
_CONST = re.compile(r"c(\d+)$")
RESERVED = {"T", "A"}


def _tokenize(text: str) -> list:
    toks = []
    pos = 0
    while pos < len(text):
        if text[pos:].strip() == "":
            break
        m = _TOKEN.match(text, pos)
        if not m:
            start = len(text) - len(text[pos:].lstrip())
            raise ParseError(f"unexpected character {text[start]!r}", start, text)
        kind = m.lastindex
        value = m.group(kind)
        toks.append((kind, value, m.start(kind)))
        pos = m.end()
    toks.append((0, "<eof>", len(text)))
    return toks


class _Parser:
    def __init__(self, text: str, signature: Optional[Signature], mode: Mode):
        self.text = text
        self.toks = _tokenize(text)
        self.i = 0
        self.sig = signature
        self.mode = mode
        self.seen_arity: dict = {}

    def peek(self):
        return self.toks[self.i]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, value: str):
        kind, v, pos = self.next()
        if v != value:
            raise ParseError(f"expected {value!r}, found {v!r}", pos, self.text)
        return pos

    def error(self, msg: str, pos: Optional[int] = None):
        raise ParseError(msg, self.peek()[2] if pos is None else pos, self.text)

    def formula(self) -> Formula:
        out = self.unary()
        while self.peek()[1] == "&":
            self.next()
            out = Conj(out, self.unary())
        return out

    def unary(self) -> Formula:
        kind, v, pos = self.peek()
        if v == "(":
            self.next()
            f = self.formula()
            self.expect(")")
            return f
        if v == "<>":
            self.next()
            return Dia(0, self.unary())
        if v == "<":
            self.next()
            kind, num, npos = self.next()
            if kind != 4:
                self.error("expected modality index", npos)
            self.expect(">")
            idx = int(num)
            if idx != 0 and self.mode is not Mode.POLY:
                self.error(f"modality <{idx}> only allowed in polymodal mode", pos)
            return Dia(idx, self.unary())
        if v == "T" and kind == 5:
            self.next()
            return TOP
        if v == "A" and kind == 5:
            self.next()
            if self.mode is not Mode.QUANT:
                self.error("quantifier in propositional mode", pos)
            var = self.term(expect_var=True)
            self.expect(".")
            return Forall(var, self.unary())
        if kind == 5:
            return self.atom()
        self.error(f"unexpected token {v!r}")

    def term(self, expect_var: bool = False) -> Term:
        kind, v, pos = self.next()
        m = _VAR.match(v) if kind == 5 else None
        if m:
            return Var(int(m.group(1)))
        m = _CONST.match(v) if kind == 5 else None
        if m and not expect_var:
            c = Const(int(m.group(1)))
            if self.sig is not None and str(c) not in self.sig.constants:
                self.error(f"unknown constant {c}", pos)
            return c
        self.error("expected variable" if expect_var else "expected term", pos)

    def atom(self) -> Formula:
        kind, name, pos = self.next()
        if name in RESERVED or _VAR.match(name) or _CONST.match(name):
            self.error(f"{name!r} cannot be used as a predicate", pos)
        args: tuple = ()
        if self.peek()[1] == "(" and self._looks_like_args():
            self.next()
            items = [self.term()]
            while self.peek()[1] == ",":
                self.next()
                items.append(self.term())
            self.expect(")")
            args = tuple(items)
        if args and self.mode is not Mode.QUANT:
            self.error("predicate arguments only allowed in quantified mode", pos)
        if self.sig is not None:
            if name not in self.sig.predicates:
                self.error(f"unknown symbol {name!r}", pos)
            if self.sig.predicates[name] != len(args):
                self.error(f"arity mismatch for {name}: expected {self.sig.predicates[name]}, got {len(args)}", pos)
        else:
            if self.seen_arity.setdefault(name, len(args)) != len(args):
                self.error(f"arity mismatch for {name}", pos)
        return Atom(name, args)

    def _looks_like_args(self) -> bool:
        # "p (q & r)" is not an argument list; "P(x0" is
        kind, v, _ = self.toks[self.i + 1]
        return kind == 5 and bool(_VAR.match(v) or _CONST.match(v))

    def done(self):
        kind, v, pos = self.peek()
        if kind != 0:
            self.error(f"trailing input {v!r}", pos)


def parse_formula(text: str, signature: Optional[Signature] = None, mode: Mode = Mode.QUANT) -> Formula:
    p = _Parser(text, signature, mode)
    f = p.formula()
    p.done()
    return f


def parse_sequent(text: str, signature: Optional[Signature] = None, mode: Mode = Mode.QUANT) -> Sequent:
    p = _Parser(text, signature, mode)
    lhs = p.formula()
    p.expect("|-")
    rhs = p.formula()
    p.done()
    return Sequent(lhs, rhs)


def parse(text: str, signature: Optional[Signature] = None, mode: Mode = Mode.QUANT) -> Union[Formula, Sequent]:
    """Parse a formula, or a sequent if the text contains ``|-``."""
    if "|-" in text:
        return parse_sequent(text, signature, mode)
    return parse_formula(text, signature, mode)


def infer_mode(*formulas: Formula) -> Mode:
    if any(isinstance(n, Forall) or (isinstance(n, Atom) and n.args) for f in formulas for n in walk(f)):
        return Mode.QUANT
    if any(i != 0 for f in formulas for i in modalities_of(f)):
        return Mode.POLY
    return Mode.PROP
