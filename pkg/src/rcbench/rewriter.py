"""Equivalence rewriting over arithmetic formulas with checked side conditions.

Each rule is a pair of schematic shapes that HA proves equivalent under a
side condition (a complexity bound or a shape requirement).  Rewrites may
happen at any position; a position is a path of child indices.  Rules that
depend on the ambient theory look at the innermost enclosing modality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

from .arith import (
    ADia, AForall, AFormula, And, BExists, BForall, Box, Cls, DC, DELTA0, Exists, Imp, Named, Not,
    Or, PI, SIGMA, SentForall, classify_ha, is_prenex, leq, parse_arith, sigma2_parts, text,
)

FORWARD, BACKWARD = "->", "<-"


class NoMatch(ValueError):
    pass


class SideConditionError(ValueError):
    def __init__(self, rule: str, message: str, cls: Optional[Cls] = None):
        self.rule = rule
        self.cls = cls
        super().__init__(f"{rule}: side condition failed: {message}")


# -- positions -------------------------------------------------------------------

def children(phi: AFormula) -> tuple:
    if isinstance(phi, (And, Or)):
        return phi.parts
    if isinstance(phi, Imp):
        return (phi.left, phi.right)
    if isinstance(phi, (Not, AForall, Exists, BForall, BExists, Box, ADia, SentForall)):
        return (phi.body,)
    return ()


def replace_child(phi: AFormula, i: int, new: AFormula) -> AFormula:
    if isinstance(phi, (And, Or)):
        parts = list(phi.parts)
        parts[i] = new
        return type(phi)(tuple(parts))
    if isinstance(phi, Imp):
        return Imp(new, phi.right) if i == 0 else Imp(phi.left, new)
    if isinstance(phi, Not):
        return Not(new)
    if isinstance(phi, (AForall, Exists)):
        return type(phi)(phi.var, new)
    if isinstance(phi, (BForall, BExists)):
        return type(phi)(phi.var, phi.bound, new)
    if isinstance(phi, (Box, ADia)):
        return type(phi)(phi.ax, new)
    if isinstance(phi, SentForall):
        return SentForall(phi.name, new)
    raise IndexError(f"{type(phi).__name__} has no child {i}")


def at(phi: AFormula, path: tuple) -> AFormula:
    for i in path:
        kids = children(phi)
        if not 0 <= i < len(kids):
            raise NoMatch(f"no position {path}")
        phi = kids[i]
    return phi


def replace_at(phi: AFormula, path: tuple, new: AFormula) -> AFormula:
    if not path:
        return new
    return replace_child(phi, path[0], replace_at(children(phi)[path[0]], path[1:], new))


def context_at(phi: AFormula, path: tuple):
    """The axiomatisation of the innermost modality strictly above ``path`` (None at top level)."""
    ctx = None
    for i in path:
        if isinstance(phi, (Box, ADia)):
            ctx = phi.ax
        phi = children(phi)[i]
    return ctx


def positions(phi: AFormula, path: tuple = ()):
    """All paths in pre-order (leftmost first)."""
    yield path
    for i, c in enumerate(children(phi)):
        yield from positions(c, path + (i,))


def node_count(phi: AFormula) -> int:
    return 1 + sum(node_count(c) for c in children(phi))


# -- rules ---------------------------------------------------------------------------

@dataclass(frozen=True)
class Rule:
    name: str
    justification: str
    forward: Callable
    backward: Optional[Callable] = None  # None: implication only

    @property
    def bidirectional(self) -> bool:
        return self.backward is not None

    def rewrite(self, phi: AFormula, direction: str, ctx) -> AFormula:
        fn = self.forward if direction == FORWARD else self.backward
        if fn is None:
            raise NoMatch(f"{self.name} only applies left to right")
        return fn(self.name, phi, ctx)


def _need(rule, cond: bool, msg: str, cls=None):
    if not cond:
        raise SideConditionError(rule, msg, cls)


def _is_named(ax, tag) -> bool:
    return isinstance(ax, Named) and ax.tag == tag


def _class_at_most(rule, phi, bound: Cls):
    c = classify_ha(phi)
    _need(rule, leq(c, bound), f"{text(phi)} classifies as {c}, not within {bound}", c)


def _forall_neg_f(rule, phi, ctx):
    if isinstance(phi, AForall) and isinstance(phi.body, Not):
        return Not(Exists(phi.var, phi.body.body))
    raise NoMatch(rule)


def _forall_neg_b(rule, phi, ctx):
    if isinstance(phi, Not) and isinstance(phi.body, Exists):
        return AForall(phi.body.var, Not(phi.body.body))
    raise NoMatch(rule)


def _dn_elim(bound: Cls):
    def f(rule, phi, ctx):
        if isinstance(phi, Not) and isinstance(phi.body, Not):
            _class_at_most(rule, phi.body.body, bound)
            return phi.body.body
        raise NoMatch(rule)

    def b(rule, phi, ctx):
        _class_at_most(rule, phi, bound)
        return Not(Not(phi))

    return f, b


def _ha_to_pa(rule, phi, ctx):
    if isinstance(phi, Box) and _is_named(phi.ax, "HA"):
        return Box(Named("PA"), phi.body)
    raise NoMatch(rule)


def _swap_box(src, dst, bound):
    def fn(rule, phi, ctx):
        if isinstance(phi, Box) and _is_named(phi.ax, src):
            _class_at_most(rule, phi.body, bound)
            return Box(Named(dst), phi.body)
        raise NoMatch(rule)
    return fn


def _box_dn_plain_f(rule, phi, ctx):
    if isinstance(phi, Box) and _is_named(phi.ax, "HA") and isinstance(phi.body, Not) \
            and isinstance(phi.body.body, Not):
        _class_at_most(rule, phi.body.body.body, SIGMA(1))
        return Box(phi.ax, phi.body.body.body)
    raise NoMatch(rule)


def _box_dn_plain_b(rule, phi, ctx):
    if isinstance(phi, Box) and _is_named(phi.ax, "HA"):
        _class_at_most(rule, phi.body, SIGMA(1))
        return Box(phi.ax, Not(Not(phi.body)))
    raise NoMatch(rule)


def _box_dn_forall_f(rule, phi, ctx):
    if isinstance(phi, Box) and _is_named(phi.ax, "HA") and isinstance(phi.body, AForall):
        inner = phi.body.body
        if isinstance(inner, Not) and isinstance(inner.body, Not):
            _class_at_most(rule, inner.body.body, SIGMA(1))
            return Box(phi.ax, AForall(phi.body.var, inner.body.body))
    raise NoMatch(rule)


def _box_dn_forall_b(rule, phi, ctx):
    if isinstance(phi, Box) and _is_named(phi.ax, "HA") and isinstance(phi.body, AForall):
        _class_at_most(rule, phi.body.body, SIGMA(1))
        return Box(phi.ax, AForall(phi.body.var, Not(Not(phi.body.body))))
    raise NoMatch(rule)


def _negpi_f(rule, phi, ctx):
    if isinstance(phi, Not) and isinstance(phi.body, AForall):
        _class_at_most(rule, phi.body.body, DELTA0)
        return Not(Not(Exists(phi.body.var, Not(phi.body.body))))
    raise NoMatch(rule)


def _negpi_b(rule, phi, ctx):
    if (isinstance(phi, Not) and isinstance(phi.body, Not) and isinstance(phi.body.body, Exists)
            and isinstance(phi.body.body.body, Not)):
        delta = phi.body.body.body.body
        _class_at_most(rule, delta, DELTA0)
        return Not(AForall(phi.body.body.var, delta))
    raise NoMatch(rule)


def _swap_dia(src, dst, check):
    def fn(rule, phi, ctx):
        if isinstance(phi, ADia) and _is_named(phi.ax, src):
            check(rule, phi.body)
            return ADia(Named(dst), phi.body)
        raise NoMatch(rule)
    return fn


def _sigma2_check(rule, phi):
    _class_at_most(rule, phi, SIGMA(2))


def _prenex_check(rule, phi):
    _need(rule, is_prenex(phi), f"{text(phi)} is not in prenex form")


def _pa_dn_f(rule, phi, ctx):
    if isinstance(phi, Not) and isinstance(phi.body, Not):
        _need(rule, _is_named(ctx, "PA"), "double negation is only eliminated inside a PA modality")
        return phi.body.body
    raise NoMatch(rule)


def _pa_dn_b(rule, phi, ctx):
    _need(rule, _is_named(ctx, "PA"), "double negation is only introduced inside a PA modality")
    return Not(Not(phi))


_DN_DELTA = _dn_elim(DELTA0)
_DN_PI1 = _dn_elim(PI(1))

RULES = (
    Rule("R-FORALL-NEG", "HA proves (forall x not phi) <-> (not exists x phi)", _forall_neg_f, _forall_neg_b),
    Rule("R-DN-DELTA", "HA eliminates double negation in front of a decidable (Delta0) formula", *_DN_DELTA),
    Rule("R-DN-PI1", "HA eliminates double negation in front of a Pi1 formula", *_DN_PI1),
    Rule("R-HA-TO-PA", "every HA-provable formula is PA-provable", _ha_to_pa, None),
    Rule("R-PI2-CONS", "PA is conservative over HA for Pi2 formulas",
         _swap_box("PA", "HA", PI(2)), _swap_box("HA", "PA", PI(2))),
    Rule("R-BOX-DN-SIGMA1", "HA proves a doubly negated Sigma1 formula iff it proves the formula",
         _box_dn_plain_f, _box_dn_plain_b),
    Rule("R-BOX-DN-SIGMA1-FORALL",
         "HA proves forall x of a doubly negated Sigma1 formula iff it proves forall x of the formula",
         _box_dn_forall_f, _box_dn_forall_b),
    Rule("R-NEGPI-TO-DNSIGMA", "HA proves (not forall x delta) <-> (not not exists x not delta) for Delta0 delta",
         _negpi_f, _negpi_b),
    Rule("R-DIA-SIGMA2", "HA-consistency and PA-consistency agree on Sigma2 formulas",
         _swap_dia("HA", "PA", _sigma2_check), _swap_dia("PA", "HA", _sigma2_check)),
    Rule("R-DIA-PRENEX", "PA-consistency and HA-consistency agree on prenex formulas",
         _swap_dia("PA", "HA", _prenex_check), _swap_dia("HA", "PA", _prenex_check)),
    Rule("R-PA-DN", "classical double negation holds inside a PA modality", _pa_dn_f, _pa_dn_b),
)
RULES_BY_NAME = {r.name: r for r in RULES}
WIDEN = "W-DC-SIGMA2"
WIDEN_JUSTIFICATION = "a DC(Pi1,Sigma1) formula is HA-equivalent to a Sigma2 formula by pairing witnesses"
DEFAULT_CHAIN_RULES = tuple(r.name for r in RULES if r.bidirectional)


# -- traces ------------------------------------------------------------------------------

@dataclass(frozen=True)
class Step:
    rule: str
    path: tuple
    direction: str
    before: AFormula
    after: AFormula
    match: tuple = field(default=(), compare=False)  # (name, printed subformula) pairs

    def justification(self) -> str:
        if self.rule == WIDEN:
            return WIDEN_JUSTIFICATION
        return RULES_BY_NAME[self.rule].justification


@dataclass(frozen=True)
class Trace:
    start: AFormula
    steps: tuple = ()

    @property
    def end(self) -> AFormula:
        return self.steps[-1].after if self.steps else self.start

    def __len__(self) -> int:
        return len(self.steps)

    def to_text(self) -> str:
        lines = [f"START: {text(self.start)}"]
        for k, s in enumerate(self.steps, 1):
            where = ".".join(map(str, s.path)) or "root"
            lines.append(f"STEP {k}: RULE {s.rule} @ {where} — justification: {s.justification()}")
        lines.append(f"END: {text(self.end)}")
        return "\n".join(lines)


def parse_trace(source: str) -> Trace:
    """Rebuild a trace from its text form by re-applying each step."""
    lines = [l for l in source.splitlines() if l.strip()]
    if not lines or not lines[0].startswith("START: "):
        raise ValueError("trace must begin with START:")
    cur = parse_arith(lines[0][len("START: "):])
    start, steps = cur, []
    for line in lines[1:]:
        if line.startswith("END: "):
            end = parse_arith(line[len("END: "):])
            if end != cur:
                raise ValueError("END formula does not match the replayed steps")
            break
        head = line.split(" — ")[0]
        _, _, rest = head.partition(": RULE ")
        name, _, where = rest.partition(" @ ")
        path = () if where == "root" else tuple(int(i) for i in where.split("."))
        if name == WIDEN:
            steps.append(Step(WIDEN, path, FORWARD, cur, cur))
            continue
        for d in (FORWARD, BACKWARD):
            try:
                nxt = apply(RULES_BY_NAME[name], cur, path, d)
            except (NoMatch, SideConditionError):
                continue
            steps.append(Step(name, path, d, cur, nxt))
            cur = nxt
            break
        else:
            raise ValueError(f"step {line!r} does not apply")
    return Trace(start, tuple(steps))


def apply(rule, phi: AFormula, path: tuple = (), direction: str = FORWARD) -> AFormula:
    """Rewrite the subformula at ``path``; raises NoMatch or SideConditionError."""
    if isinstance(rule, str):
        rule = RULES_BY_NAME[rule]
    target = at(phi, path)
    new = rule.rewrite(target, direction, context_at(phi, path))
    return replace_at(phi, path, new)


def step(rule, phi: AFormula, path: tuple = (), direction: str = FORWARD) -> list:
    """The trace steps for one rewrite, with a widening step inserted where required."""
    if isinstance(rule, str):
        rule = RULES_BY_NAME[rule]
    after = apply(rule, phi, path, direction)
    out = []
    if rule.name == "R-DIA-SIGMA2":
        body = at(phi, path).body
        if classify_ha(body) == DC:
            out.append(Step(WIDEN, path + (0,), FORWARD, phi, phi, (("formula", text(body)),)))
    out.append(Step(rule.name, path, direction, phi, after, (("target", text(at(phi, path))),)))
    return out


@dataclass(frozen=True)
class ReplayError:
    index: int
    reason: str


def replay_report(trace: Trace) -> Optional[ReplayError]:
    cur = trace.start
    for k, s in enumerate(trace.steps, 1):
        if s.before != cur:
            return ReplayError(k, "input differs from the previous output")
        if s.rule == WIDEN:
            body = at(cur, s.path)
            if classify_ha(body) != DC or s.after != cur:
                return ReplayError(k, f"widening applied to a formula of class {classify_ha(body)}")
            continue
        rule = RULES_BY_NAME.get(s.rule)
        if rule is None:
            return ReplayError(k, f"unknown rule {s.rule}")
        try:
            got = apply(rule, cur, s.path, s.direction)
        except SideConditionError as e:
            return ReplayError(k, str(e))
        except NoMatch:
            return ReplayError(k, f"{s.rule} does not match at {s.path}")
        if got != s.after:
            return ReplayError(k, "recorded output differs from the rewrite")
        cur = got
    return None


def replay(trace: Trace) -> bool:
    return replay_report(trace) is None


# -- search -------------------------------------------------------------------------------

class ChainNotFound(Exception):
    pass


def moves(phi: AFormula, rule_names, max_nodes: int):
    """All single rewrites of ``phi``: by rule order, then leftmost position, then direction."""
    for name in rule_names:
        rule = RULES_BY_NAME[name]
        dirs = (FORWARD, BACKWARD) if rule.bidirectional else (FORWARD,)
        for path in positions(phi):
            for d in dirs:
                try:
                    new = apply(rule, phi, path, d)
                except (NoMatch, SideConditionError):
                    continue
                if node_count(new) <= max_nodes:
                    yield name, path, d, new


def _flip(d: str) -> str:
    return BACKWARD if d == FORWARD else FORWARD


def derive_chain(start: AFormula, goal: AFormula, rules=DEFAULT_CHAIN_RULES, bound: int = 16,
                 slack: int = 4) -> Trace:
    """Shortest trace from ``start`` to ``goal`` by breadth-first search.

    With only bidirectional rules the search runs from both ends.  States
    larger than the bigger endpoint plus ``slack`` nodes are not explored.
    """
    rules = tuple(rules)
    if start == goal:
        return Trace(start)
    max_nodes = max(node_count(start), node_count(goal)) + slack
    bidi = all(RULES_BY_NAME[r].bidirectional for r in rules)
    fwd = {start: None}
    bwd = {goal: None}
    fq, bq = [start], [goal]
    depth_f = depth_b = 0
    while depth_f + depth_b < bound and (fq or bq):
        expand_forward = not bidi or (fq and (len(fq) <= len(bq) or not bq))
        if expand_forward:
            nxt = []
            for phi in fq:
                for name, path, d, new in moves(phi, rules, max_nodes):
                    if new in fwd:
                        continue
                    fwd[new] = (phi, name, path, d)
                    if new in bwd:
                        return _build(start, new, fwd, bwd)
                    nxt.append(new)
            fq, depth_f = nxt, depth_f + 1
        else:
            nxt = []
            for phi in bq:
                for name, path, d, new in moves(phi, rules, max_nodes):
                    if new in bwd:
                        continue
                    bwd[new] = (phi, name, path, d)
                    if new in fwd:
                        return _build(start, new, fwd, bwd)
                    nxt.append(new)
            bq, depth_b = nxt, depth_b + 1
        if not fq and not bq:
            break
    raise ChainNotFound(f"no chain of at most {bound} steps from {text(start)} to {text(goal)}")


def _build(start, meet, fwd, bwd) -> Trace:
    head = []
    cur = meet
    while fwd[cur] is not None:
        prev, name, path, d = fwd[cur]
        head.append((name, path, d))
        cur = prev
    head.reverse()
    cur = meet
    while bwd[cur] is not None:
        nxt, name, path, d = bwd[cur]
        head.append((name, path, _flip(d)))
        cur = nxt
    steps = []
    phi = start
    for name, path, d in head:
        for s in step(name, phi, path, d):
            steps.append(s)
        phi = steps[-1].after
    trace = Trace(start, tuple(steps))
    assert replay(trace)
    return trace


def sigma2_box_chain_endpoints(phi: AFormula) -> tuple:
    """For a Sigma2 formula ``exists x forall t delta``: ``Box(HA, not phi)`` and ``Box(PA, not phi)``."""
    sigma2_parts(phi)
    return Box(Named("HA"), Not(phi)), Box(Named("PA"), Not(phi))
