"""Derivations and decision procedures for RC1, RC_omega and QRC1.

A :class:`Derivation` is a tree of rule applications.  Rule labels:

==============  =====================================================
label           schema
==============  =====================================================
``top``         phi |- T
``id``          phi |- phi
``conj-elim-l`` phi & psi |- phi
``conj-elim-r`` phi & psi |- psi
``conj-intro``  phi |- psi, phi |- chi  =>  phi |- psi & chi
``cut``         phi |- psi, psi |- chi  =>  phi |- chi
``nec``         phi |- psi  =>  <a>phi |- <a>psi
``trans``       <a><a>phi |- <a>phi
``mono``        <a>phi |- <b>phi                     (a > b)
``neg-intro``   <a>phi & <b>psi |- <a>(phi & <b>psi)  (a > b)
``forall-r``    phi |- psi  =>  phi |- A x. psi      (x not free in phi)
``forall-l``    phi[x:=t] |- psi  =>  A x. phi |- psi (t free for x in phi)
``inst``        phi |- psi  =>  phi[x:=t] |- psi[x:=t]
``const-elim``  phi[x:=c] |- psi[x:=c]  =>  phi |- psi (c not in phi, psi)
==============  =====================================================

Proof search is goal directed: the right-hand side is decomposed first
(``T``, ``&``, ``A``), then a single left conjunct is focused on.  Every
search step is expanded into the primitive rules above, so its output is
checked by :func:`check_derivation` independently of the search.
"""

from __future__ import annotations

import enum
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Optional

from .formula import (
    TOP, Atom, Conj, Const, Dia, Forall, Formula, Mode, Sequent, Top, Var,
    all_vars, bound_vars, conjuncts, constants_of, free_vars, fresh_var, infer_mode,
    is_free_for, predicates_of, replace_const, substitute,
    symbols_of, walk,
)


class Logic(enum.Enum):
    RC1 = "rc1"
    RCW = "rcw"
    QRC1 = "qrc1"


RULE_ARITY = {
    "top": 0, "id": 0, "conj-elim-l": 0, "conj-elim-r": 0, "conj-intro": 2,
    "cut": 2, "nec": 1, "trans": 0, "mono": 0, "neg-intro": 0,
    "forall-r": 1, "forall-l": 1, "inst": 1, "const-elim": 1,
}

_BASE_RULES = {"top", "id", "conj-elim-l", "conj-elim-r", "conj-intro", "cut", "nec", "trans"}
LOGIC_RULES = {
    Logic.RC1: frozenset(_BASE_RULES),
    Logic.RCW: frozenset(_BASE_RULES | {"mono", "neg-intro"}),
    Logic.QRC1: frozenset(_BASE_RULES | {"forall-r", "forall-l", "inst", "const-elim"}),
}


class DerivationError(ValueError):
    def __init__(self, path: tuple, message: str):
        self.path = path
        self.reason = message
        where = ".".join(map(str, path)) or "root"
        super().__init__(f"node {where}: {message}")


class ModeError(ValueError):
    pass


class ProofNotFound(Exception):
    def __init__(self, sequent: Sequent, budget: int, exhausted: bool):
        self.sequent = sequent
        self.budget = budget
        self.exhausted = exhausted
        why = "budget exhausted" if exhausted else "search space exhausted"
        super().__init__(f"no derivation of {sequent} within budget {budget} ({why})")


class NotDerivable(ValueError):
    pass


class SignatureViolation(AssertionError):
    pass


class SearchTimeout(Exception):
    pass


@dataclass(frozen=True)
class Derivation:
    conclusion: Sequent
    rule: str
    params: tuple = ()
    premises: tuple = ()

    @property
    def lhs(self) -> Formula:
        return self.conclusion.lhs

    @property
    def rhs(self) -> Formula:
        return self.conclusion.rhs

    def param(self, name: str):
        for k, v in self.params:
            if k == name:
                return v
        raise KeyError(name)

    def nodes(self):
        stack = [self]
        while stack:
            d = stack.pop()
            yield d
            stack.extend(reversed(d.premises))

    def __str__(self) -> str:
        return serialize(self)


def serialize(d: Derivation) -> str:
    """One node per line, ``label [k=v, ...] :: sequent``, children indented two spaces."""
    lines = []
    stack = [(d, 0)]
    while stack:
        node, depth = stack.pop()
        params = ""
        if node.params:
            params = " [" + ", ".join(f"{k}={v}" for k, v in node.params) + "]"
        lines.append(f"{'  ' * depth}{node.rule}{params} :: {node.conclusion}")
        for p in reversed(node.premises):
            stack.append((p, depth + 1))
    return "\n".join(lines)


def parse_derivation(text: str, mode: Mode = Mode.QUANT) -> Derivation:
    from .formula import parse_sequent, _VAR, _CONST

    def value(v: str):
        if _VAR.match(v):
            return Var(int(v[1:]))
        if _CONST.match(v):
            return Const(int(v[1:]))
        return int(v)

    rows = []
    for line in text.splitlines():
        if not line.strip():
            continue
        indent = len(line) - len(line.lstrip(" "))
        head, _, seq = line.strip().partition(" :: ")
        label, _, rest = head.partition(" ")
        params = ()
        if rest:
            inner = rest.strip()[1:-1]
            params = tuple((k, value(v)) for k, v in (item.split("=") for item in inner.split(", ")))
        rows.append((indent // 2, label, params, parse_sequent(seq, mode=mode)))

    def build(i: int, depth: int):
        _, label, params, seq = rows[i]
        kids = []
        j = i + 1
        while j < len(rows) and rows[j][0] > depth:
            if rows[j][0] == depth + 1:
                kid, j = build(j, depth + 1)
                kids.append(kid)
            else:
                j += 1
        return Derivation(seq, label, params, tuple(kids)), j

    d, _ = build(0, 0)
    return d


# -- checking ----------------------------------------------------------------

def _check_formula_mode(phi: Formula, logic: Logic, path: tuple) -> None:
    for n in walk(phi):
        if isinstance(n, Forall) and logic is not Logic.QRC1:
            raise DerivationError(path, f"quantifier not allowed in {logic.value}")
        if isinstance(n, Atom) and n.args and logic is not Logic.QRC1:
            raise DerivationError(path, f"predicate arguments not allowed in {logic.value}")
        if isinstance(n, Dia) and n.index != 0 and logic is not Logic.RCW:
            raise DerivationError(path, f"modality <{n.index}> not allowed in {logic.value}")


def validate_derivation(d: Derivation, logic: Logic) -> None:
    """Raise :class:`DerivationError` at the first (pre-order) incorrect node."""
    stack = [(d, ())]
    allowed = LOGIC_RULES[logic]
    while stack:
        node, path = stack.pop()
        _check_node(node, logic, allowed, path)
        for i in reversed(range(len(node.premises))):
            stack.append((node.premises[i], path + (i,)))


def check_derivation(d: Derivation, logic: Logic) -> bool:
    try:
        validate_derivation(d, logic)
    except DerivationError:
        return False
    return True


def _check_node(node: Derivation, logic: Logic, allowed: frozenset, path: tuple) -> None:
    rule = node.rule
    if rule not in RULE_ARITY:
        raise DerivationError(path, f"unknown rule {rule!r}")
    if rule not in allowed:
        raise DerivationError(path, f"rule {rule} is not part of {logic.value}")
    if len(node.premises) != RULE_ARITY[rule]:
        raise DerivationError(path, f"{rule} expects {RULE_ARITY[rule]} premises, got {len(node.premises)}")
    lhs, rhs = node.lhs, node.rhs
    _check_formula_mode(lhs, logic, path)
    _check_formula_mode(rhs, logic, path)
    prem = node.premises

    def fail(msg: str):
        raise DerivationError(path, f"{rule}: {msg}")

    def par(name: str):
        try:
            return node.param(name)
        except KeyError:
            fail(f"missing parameter {name}")

    if rule == "top":
        if rhs != TOP:
            fail("right-hand side must be T")
    elif rule == "id":
        if lhs != rhs:
            fail("sides differ")
    elif rule in ("conj-elim-l", "conj-elim-r"):
        if not isinstance(lhs, Conj):
            fail("left-hand side is not a conjunction")
        want = lhs.left if rule == "conj-elim-l" else lhs.right
        if rhs != want:
            fail("right-hand side is not the eliminated conjunct")
    elif rule == "conj-intro":
        a, b = prem
        if a.lhs != lhs or b.lhs != lhs:
            fail("premise left-hand sides differ from conclusion")
        if rhs != Conj(a.rhs, b.rhs):
            fail("conclusion is not the conjunction of the premise right-hand sides")
    elif rule == "cut":
        a, b = prem
        if a.rhs != b.lhs:
            fail("cut formulas differ")
        if a.lhs != lhs or b.rhs != rhs:
            fail("conclusion does not match premises")
    elif rule == "nec":
        a = par("a")
        (p,) = prem
        if lhs != Dia(a, p.lhs) or rhs != Dia(a, p.rhs):
            fail("conclusion is not the premise under the modality")
    elif rule == "trans":
        a = par("a")
        if not (isinstance(rhs, Dia) and rhs.index == a and lhs == Dia(a, rhs)):
            fail("not of the form <a><a>phi |- <a>phi")
    elif rule == "mono":
        a, b = par("a"), par("b")
        if not a > b:
            fail("side condition a > b violated")
        if not (isinstance(lhs, Dia) and lhs.index == a and rhs == Dia(b, lhs.body)):
            fail("not of the form <a>phi |- <b>phi")
    elif rule == "neg-intro":
        a, b = par("a"), par("b")
        if not a > b:
            fail("side condition a > b violated")
        ok = (isinstance(lhs, Conj) and isinstance(lhs.left, Dia) and isinstance(lhs.right, Dia)
              and lhs.left.index == a and lhs.right.index == b
              and rhs == Dia(a, Conj(lhs.left.body, lhs.right)))
        if not ok:
            fail("not of the form <a>phi & <b>psi |- <a>(phi & <b>psi)")
    elif rule == "forall-r":
        x = par("x")
        (p,) = prem
        if p.lhs != lhs or rhs != Forall(x, p.rhs):
            fail("conclusion does not match premise")
        if x in free_vars(lhs):
            fail(f"side condition violated: {x} is free in the left-hand side")
    elif rule == "forall-l":
        x, t = par("x"), par("t")
        (p,) = prem
        if not (isinstance(lhs, Forall) and lhs.var == x):
            fail(f"left-hand side is not quantified over {x}")
        if not is_free_for(t, x, lhs.body):
            fail(f"side condition violated: {t} is not free for {x}")
        if p.lhs != substitute(lhs.body, x, t) or p.rhs != rhs:
            fail("premise is not the instantiated sequent")
    elif rule == "inst":
        x, t = par("x"), par("t")
        (p,) = prem
        if not (is_free_for(t, x, p.lhs) and is_free_for(t, x, p.rhs)):
            fail(f"side condition violated: {t} is not free for {x}")
        if lhs != substitute(p.lhs, x, t) or rhs != substitute(p.rhs, x, t):
            fail("conclusion is not the instantiated premise")
    elif rule == "const-elim":
        x, c = par("x"), par("c")
        (p,) = prem
        if c in constants_of(lhs) or c in constants_of(rhs):
            fail(f"side condition violated: {c} occurs in the conclusion")
        if not (is_free_for(c, x, lhs) and is_free_for(c, x, rhs)):
            fail("internal substitution error")
        if p.lhs != substitute(lhs, x, c) or p.rhs != substitute(rhs, x, c):
            fail("premise is not the conclusion with the constant substituted")


# -- derivation builders -----------------------------------------------------

def _node(lhs, rhs, rule, params=(), premises=()) -> Derivation:
    return Derivation(Sequent(lhs, rhs), rule, tuple(params), tuple(premises))


def identity(phi: Formula) -> Derivation:
    return _node(phi, phi, "id")


def cut(d1: Derivation, d2: Derivation) -> Derivation:
    if d1.rule == "id":
        return d2
    if d2.rule == "id":
        return d1
    return _node(d1.lhs, d2.rhs, "cut", (), (d1, d2))


def project(phi: Formula, gamma: Formula) -> Derivation:
    """Derivation of ``phi |- gamma`` for a top-level conjunct ``gamma`` of ``phi``."""
    if phi == gamma:
        return identity(phi)
    if not isinstance(phi, Conj):
        raise ValueError(f"{gamma} is not a conjunct of {phi}")
    if gamma in conjuncts(phi.left):
        return cut(_node(phi, phi.left, "conj-elim-l"), project(phi.left, gamma))
    return cut(_node(phi, phi.right, "conj-elim-r"), project(phi.right, gamma))


def alpha_rename(phi: Formula, names: frozenset, used: set) -> Derivation:
    """Derivation of ``phi |- phi'`` where ``phi'`` binds no variable in ``names``.

    Fresh variable indices are drawn outside ``used``, which is updated.
    """
    if not bound_vars(phi) & names:
        return identity(phi)
    if isinstance(phi, Conj):
        a = alpha_rename(phi.left, names, used)
        b = alpha_rename(phi.right, names, used)
        return _node(phi, Conj(a.rhs, b.rhs), "conj-intro", (), (
            cut(_node(phi, phi.left, "conj-elim-l"), a), cut(_node(phi, phi.right, "conj-elim-r"), b)))
    if isinstance(phi, Dia):
        a = alpha_rename(phi.body, names, used)
        return _node(phi, Dia(phi.index, a.rhs), "nec", (("a", phi.index),), (a,))
    x, body = phi.var, phi.body
    y = x
    if x in names:
        y = Var(min(set(range(len(used) + 1)) - used))
        used.add(y.index)
        body = substitute(body, x, y)
    a = alpha_rename(body, names, used)
    inst = _node(phi, a.rhs, "forall-l", (("x", x), ("t", y)), (a,))
    return _node(phi, Forall(y, a.rhs), "forall-r", (("x", y),), (inst,))


# -- proof search ------------------------------------------------------------

@dataclass
class ProofSearch:
    """Focused search with memo tables that persist across calls on the same object."""

    logic: Logic
    ok: dict = field(default_factory=dict)
    fail: dict = field(default_factory=dict)
    hits: int = 0

    def prove(self, s: Sequent, budget: int = 64) -> Derivation:
        _check_logic(s, self.logic)
        before = self.hits
        res = self.search(s.lhs, s.rhs, budget)
        if res is None:
            raise ProofNotFound(s, budget, exhausted=self.hits > before)
        return res[0]

    def search(self, lhs: Formula, rhs: Formula, budget: int) -> Optional[tuple]:
        key = (lhs, rhs)
        got = self.ok.get(key)
        if got is not None and got[1] <= budget:
            return got
        failed = self.fail.get(key)
        if failed is not None:
            tried, limited = failed
            if not limited:
                return None
            if budget <= tried:
                self.hits += 1
                return None
        if budget <= 0:
            self.hits += 1
            return None
        before = self.hits
        res = self._expand(lhs, rhs, budget)
        if res is None:
            self.fail[key] = (budget, self.hits > before)
        else:
            self.ok[key] = res
        return res

    def _expand(self, lhs, rhs, budget):
        if isinstance(rhs, Top):
            return _node(lhs, rhs, "top"), 1
        if lhs == rhs:
            return identity(lhs), 1
        if isinstance(rhs, Conj):
            a = self.search(lhs, rhs.left, budget - 1)
            if a is None:
                return None
            b = self.search(lhs, rhs.right, budget - 1 - a[1])
            if b is None:
                return None
            return _node(lhs, rhs, "conj-intro", (), (a[0], b[0])), 1 + a[1] + b[1]
        if isinstance(rhs, Forall):
            return self._forall_right(lhs, rhs, budget)
        if self.logic is Logic.QRC1:
            clash = free_vars(rhs) & bound_vars(lhs)
            if clash:
                return self._rename_clash(lhs, rhs, sorted(clash), budget)
        return self._left(lhs, rhs, budget)

    def _forall_right(self, lhs, rhs, budget):
        x, body = rhs.var, rhs.body
        if x not in free_vars(lhs):
            sub = self.search(lhs, body, budget - 1)
            if sub is None:
                return None
            return _node(lhs, rhs, "forall-r", (("x", x),), (sub[0],)), 1 + sub[1]
        y = fresh_var(lhs, rhs)
        renamed = substitute(body, x, y)
        sub = self.search(lhs, renamed, budget - 1)
        if sub is None:
            return None
        to_y = _node(lhs, Forall(y, renamed), "forall-r", (("x", y),), (sub[0],))
        back = _node(Forall(y, renamed), rhs, "forall-r", (("x", x),), (
            _node(Forall(y, renamed), body, "forall-l", (("x", y), ("t", x)), (identity(body),)),))
        return cut(to_y, back), 1 + sub[1]

    def _rename_clash(self, lhs, rhs, clash, budget):
        # rename the clashing binders of lhs so every free variable of rhs can be instantiated
        used = {v.index for f in (lhs, rhs) for v in all_vars(f)}
        d = alpha_rename(lhs, frozenset(clash), used)
        sub = self.search(d.rhs, rhs, budget - 1)
        if sub is None:
            return None
        return cut(d, sub[0]), 1 + sub[1]

    def _left(self, lhs, goal, budget):
        parts = []
        for g in conjuncts(lhs):
            if g not in parts:
                parts.append(g)
        for g in parts:
            if isinstance(goal, Dia) and isinstance(g, Dia) and g.index >= goal.index:
                lower = [h for h in parts if isinstance(h, Dia) and h.index < g.index]
                res = self._diamond(lhs, g, lower, goal, budget - 1)
            else:
                res = self._focus(g, goal, budget - 1)
                if res is not None:
                    res = cut(project(lhs, g), res[0]), res[1]
            if res is not None:
                return res[0], res[1] + 1
        return None

    def _focus(self, g: Formula, goal: Formula, budget: int):
        if budget <= 0:
            self.hits += 1
            return None
        if g == goal:
            return identity(g), 1
        if isinstance(g, Conj):
            for h in conjuncts(g):
                res = self._focus(h, goal, budget - 1)
                if res is not None:
                    return cut(project(g, h), res[0]), res[1] + 1
            return None
        if isinstance(g, Forall):
            x, body = g.var, g.body
            for t in _candidate_terms(goal, x):
                if not is_free_for(t, x, body):
                    continue
                res = self._focus(substitute(body, x, t), goal, budget - 1)
                if res is not None:
                    d = _node(g, goal, "forall-l", (("x", x), ("t", t)), (res[0],))
                    return d, res[1] + 1
            return None
        if isinstance(g, Dia) and isinstance(goal, Dia) and g.index >= goal.index:
            return self._diamond(g, g, [], goal, budget)
        return None

    def _diamond(self, lhs, g: Dia, lower: list, goal: Dia, budget: int):
        beta, alpha = g.index, goal.index
        inner = g.body
        for h in lower:
            inner = Conj(inner, h)
        for target in (goal.body, goal):
            sub = self.search(inner, target, budget - 1)
            if sub is not None:
                break
        else:
            return None
        d = project(lhs, g)
        acc = g.body
        for h in lower:
            both = _node(lhs, Conj(Dia(beta, acc), h), "conj-intro", (), (d, project(lhs, h)))
            ax = _node(Conj(Dia(beta, acc), h), Dia(beta, Conj(acc, h)), "neg-intro",
                       (("a", beta), ("b", h.index)))
            d = cut(both, ax)
            acc = Conj(acc, h)
        if sub[0].rule != "id":
            d = cut(d, _node(Dia(beta, inner), Dia(beta, sub[0].rhs), "nec", (("a", beta),), (sub[0],)))
        if beta > alpha:
            d = cut(d, _node(d.rhs, Dia(alpha, d.rhs.body), "mono", (("a", beta), ("b", alpha))))
        if target is goal:
            d = cut(d, _node(d.rhs, goal, "trans", (("a", alpha),)))
        return d, sub[1] + 1


def _candidate_terms(goal: Formula, x: Var) -> list:
    terms = sorted(free_vars(goal), key=lambda v: v.index)
    terms += sorted(constants_of(goal), key=lambda c: c.index)
    if x not in terms:
        terms.append(x)
    return terms


def _check_logic(s: Sequent, logic: Logic) -> None:
    mode = infer_mode(s.lhs, s.rhs)
    allowed = {Logic.RC1: {Mode.PROP}, Logic.RCW: {Mode.PROP, Mode.POLY}, Logic.QRC1: {Mode.PROP, Mode.QUANT}}
    if mode not in allowed[logic]:
        raise ModeError(f"sequent {s} is not in the language of {logic.value}")
    if logic is Logic.QRC1 and any(i != 0 for f in (s.lhs, s.rhs) for i in _indices(f)):
        raise ModeError("QRC1 has a single modality")


def _indices(phi):
    return {n.index for n in walk(phi) if isinstance(n, Dia)}


DEFAULT_BUDGET = 64


def prove(s: Sequent, logic: Logic = Logic.QRC1, budget: int = DEFAULT_BUDGET) -> Derivation:
    """Search for a derivation of ``s``; raises :class:`ProofNotFound`.

    ``budget`` bounds the number of search steps (right decompositions,
    focus and diamond steps) in the found proof, not the size of its
    expansion into primitive rules.
    """
    return ProofSearch(logic).prove(s, budget)


def proof_cost(s: Sequent, logic: Logic, budget: int = DEFAULT_BUDGET) -> Optional[int]:
    _check_logic(s, logic)
    res = ProofSearch(logic).search(s.lhs, s.rhs, budget)
    return None if res is None else res[1]


# -- RC1 decision ------------------------------------------------------------

def decide_rc1(s: Sequent) -> bool:
    """Polynomial decision for monomodal propositional sequents."""
    if infer_mode(s.lhs, s.rhs) is not Mode.PROP:
        raise ModeError(f"decide_rc1 needs a monomodal propositional sequent, got {s}")
    memo: dict = {}

    def flat(phi):
        return [g for g in conjuncts(phi) if not isinstance(g, Top)]

    def dec(lhs, rhs) -> bool:
        key = (lhs, rhs)
        if key in memo:
            return memo[key]
        if isinstance(rhs, Top):
            out = True
        elif isinstance(rhs, Atom):
            out = rhs in flat(lhs)
        elif isinstance(rhs, Conj):
            out = dec(lhs, rhs.left) and dec(lhs, rhs.right)
        elif isinstance(rhs, Dia):
            out = any(dec(g.body, rhs.body) or dec(g.body, rhs)
                      for g in flat(lhs) if isinstance(g, Dia))
        else:
            raise ModeError(f"unexpected formula {rhs}")
        memo[key] = out
        return out

    return dec(s.lhs, s.rhs)


# -- QRC1 dual search ----------------------------------------------------------

@dataclass
class QRC1Config:
    proof_step: int = 8          # proof budget added per round
    max_rounds: Optional[int] = None
    timeout: Optional[float] = None  # seconds


@dataclass(frozen=True)
class Derivable:
    derivation: Derivation
    rounds: int


@dataclass(frozen=True)
class Underivable:
    witness: object  # kripke.Witness
    rounds: int


class RoundLimit(Exception):
    pass


def decide_qrc1(s: Sequent, config: Optional[QRC1Config] = None):
    """Interleave proof search and countermodel search with growing bounds.

    Round ``n`` runs :func:`prove` with budget ``n * proof_step`` and then
    :func:`rcbench.kripke.countermodel_search` with bound ``n``.
    """
    from .kripke import countermodel_search

    cfg = config or QRC1Config()
    _check_logic(s, Logic.QRC1)
    deadline = None if cfg.timeout is None else time.monotonic() + cfg.timeout
    searcher = ProofSearch(Logic.QRC1)
    n = 0
    while cfg.max_rounds is None or n < cfg.max_rounds:
        n += 1
        res = searcher.search(s.lhs, s.rhs, n * cfg.proof_step)
        if res is not None:
            return Derivable(res[0], n)
        if deadline is not None and time.monotonic() > deadline:
            raise SearchTimeout(f"no verdict for {s} after {n - 1} rounds")
        w = countermodel_search(s, n, deadline=deadline)
        if w is not None:
            return Underivable(w, n)
    raise RoundLimit(f"no verdict for {s} within {cfg.max_rounds} rounds")


# -- interpolation -----------------------------------------------------------

def is_derivable(s: Sequent, logic: Logic, config: Optional[QRC1Config] = None) -> bool:
    if logic is Logic.RC1:
        return decide_rc1(s)
    if logic is Logic.RCW:
        try:
            prove(s, logic)
        except ProofNotFound:
            return False
        return True
    return isinstance(decide_qrc1(s, config), Derivable)


def interpolate(s: Sequent, logic: Logic, config: Optional[QRC1Config] = None) -> Formula:
    """An interpolant for a derivable sequent.

    Normally the right-hand side itself.  Constants of the right-hand side
    that do not occur on the left are generalised away: for ``A x0. P(x0) |- P(c0)``
    the interpolant is ``A x0. P(x0)`` rather than ``P(c0)``.
    """
    if not is_derivable(s, logic, config):
        raise NotDerivable(str(s))
    if not predicates_of(s.rhs) <= predicates_of(s.lhs):
        raise SignatureViolation(f"predicates {sorted(predicates_of(s.rhs) - predicates_of(s.lhs))} "
                                 f"of the right-hand side do not occur on the left in {s}")
    chi = s.rhs
    for c in sorted(constants_of(s.rhs) - constants_of(s.lhs), key=lambda c: c.index):
        y = fresh_var(s.lhs, chi)
        chi = Forall(y, replace_const(chi, c, y))
    if not symbols_of(chi) <= symbols_of(s.lhs):
        raise SignatureViolation(f"interpolant {chi} leaves the common language")
    return chi


# -- test-data generators ----------------------------------------------------

def all_formulas(atoms: tuple, max_size: int, indices: tuple = (0,)) -> list:
    """Every propositional formula over ``atoms`` with at most ``max_size`` symbols."""

    @lru_cache(maxsize=None)
    def exact(n: int) -> tuple:
        if n == 1:
            return (TOP,) + tuple(Atom(a) for a in atoms)
        out = [Dia(i, b) for i in indices for b in exact(n - 1)]
        for k in range(1, n - 1):
            out.extend(Conj(a, b) for a in exact(k) for b in exact(n - 1 - k))
        return tuple(out)

    return [f for n in range(1, max_size + 1) for f in exact(n)]


def random_formula(rng: random.Random, preds: dict, depth: int, *, consts: int = 2,
                   nvars: int = 2, quantified: bool = True, bound: tuple = ()) -> Formula:
    """Random strictly positive formula; ``preds`` maps names to arities."""
    names = sorted(preds)
    if depth <= 0 or rng.random() < 0.25:
        if not names or rng.random() < 0.1:
            return TOP
        p = rng.choice(names)
        terms = [Var(i) for i in range(nvars)] + [Const(i) for i in range(consts)] if quantified else []
        return Atom(p, tuple(rng.choice(terms) for _ in range(preds[p])))
    r = rng.random()
    if r < 0.35:
        return Conj(random_formula(rng, preds, depth - 1, consts=consts, nvars=nvars, quantified=quantified),
                    random_formula(rng, preds, depth - 1, consts=consts, nvars=nvars, quantified=quantified))
    if r < 0.7 or not quantified:
        return Dia(0, random_formula(rng, preds, depth - 1, consts=consts, nvars=nvars, quantified=quantified))
    return Forall(Var(rng.randrange(nvars)),
                  random_formula(rng, preds, depth - 1, consts=consts, nvars=nvars, quantified=quantified))


def random_derivation(rng: random.Random, preds: dict, depth: int = 4, *, consts: int = 2,
                      nvars: int = 2) -> Derivation:
    """A random QRC1 derivation obtained by closing axiom instances under the rules."""
    lhs = random_formula(rng, preds, 3, consts=consts, nvars=nvars)
    d = _derive_from(rng, lhs, depth, preds, consts, nvars)
    for _ in range(rng.randrange(3)):
        d = _post_rule(rng, d, nvars)
    return d


def _derive_from(rng, phi, depth, preds, consts, nvars) -> Derivation:
    options = ["id", "top"]
    if isinstance(phi, Conj):
        options += ["conj-elim-l", "conj-elim-r"] * 2
    if isinstance(phi, Dia):
        options += ["nec"] * 3
        if isinstance(phi.body, Dia):
            options.append("trans")
    if isinstance(phi, Forall):
        options += ["forall-l"] * 3
    if depth > 0:
        options += ["conj-intro", "cut", "forall-r", "cut"]
    choice = rng.choice(options)
    sub = lambda f: _derive_from(rng, f, depth - 1, preds, consts, nvars)
    if choice == "id":
        return identity(phi)
    if choice == "top":
        return _node(phi, TOP, "top")
    if choice == "conj-elim-l":
        return _node(phi, phi.left, "conj-elim-l")
    if choice == "conj-elim-r":
        return _node(phi, phi.right, "conj-elim-r")
    if choice == "trans":
        return _node(phi, phi.body, "trans", (("a", 0),))
    if choice == "nec":
        p = sub(phi.body)
        return _node(phi, Dia(0, p.rhs), "nec", (("a", 0),), (p,))
    if choice == "forall-l":
        x, body = phi.var, phi.body
        terms = [t for t in [Var(i) for i in range(nvars)] + [Const(i) for i in range(consts)]
                 if is_free_for(t, x, body)]
        t = rng.choice(terms)
        p = sub(substitute(body, x, t))
        return _node(phi, p.rhs, "forall-l", (("x", x), ("t", t)), (p,))
    if choice == "conj-intro":
        a, b = sub(phi), sub(phi)
        return _node(phi, Conj(a.rhs, b.rhs), "conj-intro", (), (a, b))
    if choice == "cut":
        a = sub(phi)
        b = sub(a.rhs)
        return _node(phi, b.rhs, "cut", (), (a, b))
    # forall-r: generalise over a variable that is not free on the left
    p = sub(phi)
    fv = free_vars(phi)
    cands = [v for v in (Var(i) for i in range(nvars + 1)) if v not in fv] or [fresh_var(phi)]
    x = rng.choice(cands)
    return _node(phi, Forall(x, p.rhs), "forall-r", (("x", x),), (p,))


def _post_rule(rng, d: Derivation, nvars: int) -> Derivation:
    lhs, rhs = d.lhs, d.rhs
    if rng.random() < 0.5:
        vs = sorted(free_vars(lhs) | free_vars(rhs), key=lambda v: v.index)
        if not vs:
            return d
        x = rng.choice(vs)
        t = rng.choice([Const(0), Const(1), Var(rng.randrange(nvars + 1))])
        if not (is_free_for(t, x, lhs) and is_free_for(t, x, rhs)):
            return d
        return _node(substitute(lhs, x, t), substitute(rhs, x, t), "inst", (("x", x), ("t", t)), (d,))
    cs = sorted(constants_of(lhs) | constants_of(rhs), key=lambda c: c.index)
    if not cs:
        return d
    c = rng.choice(cs)
    x = fresh_var(lhs, rhs)
    new_lhs, new_rhs = replace_const(lhs, c, x), replace_const(rhs, c, x)
    return _node(new_lhs, new_rhs, "const-elim", (("x", x), ("c", c)), (d,))
