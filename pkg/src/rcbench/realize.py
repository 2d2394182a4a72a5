"""Arithmetical readings of strictly positive formulas.

Modal variable ``x_k`` becomes the arithmetical variable ``y{k}`` and the
constant ``c_k`` becomes ``z{k}``.  A realization entry for an n-ary
predicate is written with the parameters ``y0 .. y{n-1}``; atoms
instantiate them positionally.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from typing import Optional

from .arith import (
    ADia, AForall, And, AVar, AxExpr, BExists, BForall, Box, Cls, DC, EqQuote, Eq, Exists,
    ExistsAx, FALSUM, Imp, Leq, Mod, Named, Not, Num, Or, OrAx, Pair0, Pair1, Pred, PredAx, SIGMA, SentForall, SentVar, ShapeError, TRUE,
    AFormula, and_, ax_free_vars, all_names, classify, fold, forall_many, free_vars, leq, or_,
    parse_arith, parse_class, subformulas, subst, subst_ax,
)
from .formula import Atom, Conj, Dia, Forall, Formula, Sequent, Top, Var, walk
from .kripke import SheafModel


class RealizationError(KeyError):
    """A predicate has no realization entry."""


def arith_name(t) -> str:
    return f"y{t.index}" if isinstance(t, Var) else f"z{t.index}"


def arith_term(t) -> AVar:
    return AVar(arith_name(t))


def _theory(T) -> AxExpr:
    return Named(T) if isinstance(T, str) else T


def instantiate(entry: AFormula, args: tuple) -> AFormula:
    """Simultaneously replace parameters ``y0..y{n-1}`` of ``entry`` by ``args``."""
    used = all_names(entry) | {a.name for a in args if isinstance(a, AVar)}
    temps = []
    out = entry
    for i in range(len(args)):
        tmp = f"q{i}"
        while tmp in used:
            tmp += "_"
        used = used | {tmp}
        temps.append(tmp)
        out = subst(out, f"y{i}", AVar(tmp))
    for tmp, a in zip(temps, args):
        out = subst(out, tmp, a)
    return out


def _instantiate_ax(entry: AxExpr, args: tuple) -> AxExpr:
    temps = []
    out = entry
    for i in range(len(args)):
        tmp = f"q{i}_"
        temps.append(tmp)
        out = subst_ax(out, f"y{i}", AVar(tmp))
    for tmp, a in zip(temps, args):
        out = subst_ax(out, tmp, a)
    return out


# -- finitary realizations --------------------------------------------------------

@dataclass(frozen=True)
class Entry:
    formula: AFormula
    arity: int = 0
    declared: Optional[Cls] = None


@dataclass
class FinitaryRealization:
    entries: dict = field(default_factory=dict)

    def check_declarations(self) -> None:
        for name, e in sorted(self.entries.items()):
            extra = free_vars(e.formula) - {f"y{i}" for i in range(e.arity)}
            if extra:
                raise ShapeError(f"entry for {name} has stray free variables {sorted(extra)}")
            if e.declared is not None and not leq(classify(e.formula), e.declared):
                raise ShapeError(f"entry for {name} classifies as {classify(e.formula)}, "
                                 f"above its declared class {e.declared}")


def load_realization(source: str) -> FinitaryRealization:
    """JSON map ``{"P": {"formula": "(...)", "arity": 1, "class": "Sigma1"}}``; a bare string is a sentence."""
    doc = json.loads(source)
    entries = {}
    for name, spec in doc.items():
        if isinstance(spec, str):
            spec = {"formula": spec}
        cls = parse_class(spec["class"]) if "class" in spec else None
        entries[name] = Entry(parse_arith(spec["formula"]), int(spec.get("arity", 0)), cls)
    r = FinitaryRealization(entries)
    r.check_declarations()
    return r


def extend_finitary(r: FinitaryRealization, T, phi: Formula) -> AFormula:
    ax = _theory(T)

    def go(f):
        if isinstance(f, Top):
            return TRUE
        if isinstance(f, Atom):
            if f.pred not in r.entries:
                raise RealizationError(f"no realization for predicate {f.pred}")
            return instantiate(r.entries[f.pred].formula, tuple(arith_term(t) for t in f.args))
        if isinstance(f, Conj):
            return And((go(f.left), go(f.right)))
        if isinstance(f, Dia):
            return ADia(ax, go(f.body))
        if isinstance(f, Forall):
            return AForall(arith_name(f.var), go(f.body))
        raise TypeError(f)

    return go(phi)


def closure_order(names) -> list:
    """Variables sorted with the y's first, then the z's, each by ascending index."""
    def key(n):
        m = re.fullmatch(r"([yz])(\d+)", n)
        return (0 if m.group(1) == "y" else 1, int(m.group(2))) if m else (2, n)
    return sorted(names, key=key)


def emit_qpl_statement(r: FinitaryRealization, T, s: Sequent) -> AFormula:
    body = Imp(extend_finitary(r, T, s.lhs), extend_finitary(r, T, s.rhs))
    return forall_many(closure_order(free_vars(body)), body)


# -- infinitary realizations --------------------------------------------------------

@dataclass
class InfinitaryRealization:
    """Predicate name to an axiomatisation in the parameters ``y0..``; ``u`` enumerates axioms."""

    entries: dict = field(default_factory=dict)


def _ax_is_sigma1(ax: AxExpr) -> bool:
    if isinstance(ax, Named):
        return ax.cls is None or leq(ax.cls, SIGMA(1))
    if isinstance(ax, OrAx):
        return _ax_is_sigma1(ax.left) and _ax_is_sigma1(ax.right)
    if isinstance(ax, ExistsAx):
        return _ax_is_sigma1(ax.body)
    return True


def extend_infinitary(r: InfinitaryRealization, tau: AxExpr, phi: Formula) -> AxExpr:
    tau = _theory(tau)
    if not _ax_is_sigma1(tau):
        raise ShapeError(f"base axiomatisation {tau} is not Sigma1")

    def go(f):
        if isinstance(f, Top):
            return tau
        if isinstance(f, Atom):
            if f.pred not in r.entries:
                raise RealizationError(f"no realization for predicate {f.pred}")
            return OrAx(_instantiate_ax(r.entries[f.pred], tuple(arith_term(t) for t in f.args)), tau)
        if isinstance(f, Conj):
            return OrAx(go(f.left), go(f.right))
        if isinstance(f, Dia):
            return OrAx(tau, EqQuote(ADia(go(f.body), TRUE)))
        if isinstance(f, Forall):
            return ExistsAx(arith_name(f.var), go(f.body))
        raise TypeError(f)

    return go(phi)


def lift_finitary_to_infinitary(r: FinitaryRealization) -> InfinitaryRealization:
    return InfinitaryRealization({name: EqQuote(e.formula) for name, e in r.entries.items()})


THETA = "theta"


def emit_rl_statement(r: InfinitaryRealization, tau, s: Sequent) -> AFormula:
    """For ``phi |- psi``: every sentence provable from psi's axioms is provable from phi's."""
    lhs, rhs = extend_infinitary(r, tau, s.lhs), extend_infinitary(r, tau, s.rhs)
    theta = SentVar(THETA)
    body = Imp(Box(rhs, theta), Box(lhs, theta))
    return SentForall(THETA, forall_many(closure_order(ax_free_vars(lhs) | ax_free_vars(rhs)), body))


def quotes_mention_u(ax: AxExpr) -> bool:
    """True when some quoted formula still mentions the axiom variable ``u``."""
    if isinstance(ax, OrAx):
        return quotes_mention_u(ax.left) or quotes_mention_u(ax.right)
    if isinstance(ax, ExistsAx):
        return quotes_mention_u(ax.body)
    if isinstance(ax, EqQuote):
        for node in subformulas(ax.formula):
            if isinstance(node, (Box, ADia)) and not isinstance(node.ax, Named):
                return True
        return "u" in free_vars(ax.formula)
    return False


# -- Kripke-model readings ---------------------------------------------------------------

F_SYMBOL = "F"


@dataclass(frozen=True)
class SolovayContext:
    """A finite constant-domain model whose world 0 sees every other world."""

    model: SheafModel
    symbol: str = F_SYMBOL

    def __post_init__(self):
        m = self.model
        if not m.is_constant_domain:
            raise ShapeError("the model must have a constant domain")
        m.validate(transitive=True, irreflexive=True)
        missing = [w for w in range(1, m.worlds) if (0, w) not in m.R]
        if missing:
            raise ShapeError(f"world 0 must see every other world; it misses {missing}")

    @property
    def N(self) -> int:
        return self.model.worlds - 1

    @property
    def m(self) -> int:
        return self.model.domains[0]

    @classmethod
    def with_root(cls, model: SheafModel, symbol: str = F_SYMBOL) -> "SolovayContext":
        """Shift the worlds up by one and add a root 0 with empty predicates."""
        n = model.worlds + 1
        R = {(w + 1, u + 1) for w, u in model.R} | {(0, w) for w in range(1, n)}
        interp = {p: [set()] + [set(ts) for ts in per] for p, per in model.interp.items()}
        consts = {}
        for c, vals in model.consts.items():
            if len(set(vals)) > 1:
                raise ShapeError(f"constant {c} varies between worlds, so no root can see them all")
            consts[c] = (vals[0],) + tuple(vals)
        return cls(SheafModel.constant(n, R, model.domains[0], interp, consts, model.arity), symbol)


def lambda_sentence(ctx: SolovayContext, i: int) -> AFormula:
    """The limit sentence of world ``i``: F eventually reaches ``i`` and stays there."""
    if not 0 <= i <= ctx.N:
        raise IndexError(f"world {i} out of range 0..{ctx.N}")
    F = ctx.symbol
    x, y, ib = AVar("x"), AVar("y"), Num(i)
    return And((Exists("x", Pred(F, (x, ib))),
                AForall("x", AForall("y", Imp(Leq(x, y), Imp(Pred(F, (x, ib)), Pred(F, (y, ib))))))))


def _phi_i(ctx: SolovayContext, S: str, terms: tuple, i: int) -> AFormula:
    ext = sorted(ctx.model.interp.get(S, [frozenset()] * ctx.model.worlds)[i])
    disjuncts = []
    for tup in ext:
        eqs = [Eq(Num(a), Mod(arith_term(t), ctx.m)) for a, t in zip(tup, terms)]
        disjuncts.append(and_(*eqs) if eqs else TRUE)
    return or_(*disjuncts) if disjuncts else FALSUM


def solovay_realize(ctx: SolovayContext, S: str, terms: tuple) -> AFormula:
    arity = ctx.model.arity.get(S)
    if arity is None:
        raise RealizationError(f"predicate {S} is not interpreted in the model")
    if arity != len(terms):
        raise ShapeError(f"{S} has arity {arity}, applied to {len(terms)} terms")
    return Or(tuple(And((lambda_sentence(ctx, i), _phi_i(ctx, S, terms, i))) for i in range(ctx.N + 1)))


def extend_solovay(ctx: SolovayContext, T, phi: Formula) -> AFormula:
    ax = _theory(T)

    def go(f):
        if isinstance(f, Top):
            return TRUE
        if isinstance(f, Atom):
            return solovay_realize(ctx, f.pred, f.args)
        if isinstance(f, Conj):
            return And((go(f.left), go(f.right)))
        if isinstance(f, Dia):
            return ADia(ax, go(f.body))
        if isinstance(f, Forall):
            return AForall(arith_name(f.var), go(f.body))
        raise TypeError(f)

    return go(phi)


def solovay_realization(ctx: SolovayContext) -> FinitaryRealization:
    """The Kripke-model reading as an ordinary finitary realization."""
    entries = {}
    for S, k in ctx.model.arity.items():
        entries[S] = Entry(solovay_realize(ctx, S, tuple(Var(i) for i in range(k))), k, DC)
    return FinitaryRealization(entries)


# -- guarded variables and the mod-m expansion ------------------------------------------------

_GUARDED = re.compile(r"[yz]\d+$")


def unguarded_occurrences(phi: AFormula, m: int, names=None) -> list:
    """Variables (default: every ``y_k``/``z_k``) occurring outside a ``(mod v m)`` context."""
    want = (lambda n: _GUARDED.match(n)) if names is None else (lambda n: n in names)
    bad = []

    def term(t, guarded=False):
        if isinstance(t, AVar):
            if want(t.name) and not guarded:
                bad.append(t.name)
        elif isinstance(t, Mod):
            term(t.t, guarded=(t.m == m and isinstance(t.t, AVar)))
        elif isinstance(t, (Pair0, Pair1)):
            term(t.t)

    def ax_(a):
        if isinstance(a, OrAx):
            ax_(a.left), ax_(a.right)
        elif isinstance(a, EqQuote):
            form(a.formula)
        elif isinstance(a, PredAx):
            for t in a.args:
                term(t)
        elif isinstance(a, ExistsAx):
            ax_(a.body)

    def form(f):
        if isinstance(f, (Eq, Leq)):
            term(f.left), term(f.right)
        elif isinstance(f, Pred):
            for t in f.args:
                term(t)
        elif isinstance(f, (And, Or)):
            for p in f.parts:
                form(p)
        elif isinstance(f, Imp):
            form(f.left), form(f.right)
        elif isinstance(f, (Not, AForall, Exists, SentForall)):
            form(f.body)
        elif isinstance(f, (BForall, BExists)):
            term(f.bound), form(f.body)
        elif isinstance(f, (Box, ADia)):
            ax_(f.ax), form(f.body)

    form(phi)
    return bad


def is_guarded(phi: AFormula, m: int) -> bool:
    return not unguarded_occurrences(phi, m)


def expand_mod_quantifier(phi: AFormula, u: str, m: int) -> AFormula:
    """``forall u phi`` as the conjunction of ``phi[u:=k]`` for ``k < m``, ground mods folded."""
    bad = unguarded_occurrences(phi, m, names={u})
    if bad:
        raise ShapeError(f"variable {u} occurs outside (mod {u} {m})")
    return and_(*(fold(subst(phi, u, Num(k))) for k in range(m)))


def expand_all(phi: AFormula, m: int) -> AFormula:
    """Replace every universal quantifier over a guarded variable by its finite expansion."""
    def go(f):
        if isinstance(f, AForall):
            body = go(f.body)
            if _GUARDED.match(f.var):
                return expand_mod_quantifier(body, f.var, m)
            return AForall(f.var, body)
        if isinstance(f, (And, Or)):
            return type(f)(tuple(go(p) for p in f.parts))
        if isinstance(f, Imp):
            return Imp(go(f.left), go(f.right))
        if isinstance(f, (Not, Exists)):
            return type(f)(go(f.body)) if isinstance(f, Not) else Exists(f.var, go(f.body))
        if isinstance(f, (Box, ADia)):
            return type(f)(f.ax, go(f.body))
        return f

    return go(phi)


def certificate(phi: Formula, translate) -> list:
    """``(subformula, class of its translation)`` for every distinct subformula, innermost first."""
    seen, out = set(), []
    for f in reversed(list(walk(phi))):
        if f in seen:
            continue
        seen.add(f)
        out.append((f, classify(translate(f))))
    return out
