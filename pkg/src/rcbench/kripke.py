"""Kripke models and Kripke sheaves for strictly positive formulas.

Truth is evaluated with world bitmasks: a formula under a fixed variable
environment denotes the set of worlds where it holds, encoded as an int.
"""

from __future__ import annotations

import itertools
import json
import random
import time
from dataclasses import dataclass, field
from functools import lru_cache
from typing import Iterable, Mapping, Optional

import numpy as np

from .formula import (
    Atom, Conj, Const, Dia, Forall, Formula, Sequent, Signature, Top, Var,
    constants_of, free_vars, walk,
)


class ModelError(ValueError):
    """A model violates one of its structural conditions."""

    def __init__(self, message: str, clause: str = ""):
        self.clause = clause
        super().__init__(message)


# -- propositional models ----------------------------------------------------

@dataclass(frozen=True)
class PropModel:
    """Worlds ``0..worlds-1``, one accessibility relation per modality index."""

    worlds: int
    rel: Mapping[int, frozenset]
    val: Mapping[str, frozenset]

    @classmethod
    def of(cls, worlds: int, R: Iterable, val: Mapping[str, Iterable], higher: Optional[Mapping] = None):
        rel = {0: frozenset(map(tuple, R))}
        for k, pairs in (higher or {}).items():
            rel[k] = frozenset(map(tuple, pairs))
        return cls(worlds, rel, {a: frozenset(ws) for a, ws in val.items()})

    @property
    def R(self) -> frozenset:
        return self.rel.get(0, frozenset())

    def relation(self, index: int) -> frozenset:
        return self.rel.get(index, frozenset())

    def validate(self, transitive=True, irreflexive=True, tree=False, polymodal=False) -> None:
        for k, pairs in self.rel.items():
            _check_frame(self.worlds, pairs, transitive, irreflexive, f"R{k}")
        if tree:
            _check_tree(self.worlds, self.R)
        for a, ws in self.val.items():
            if any(not 0 <= w < self.worlds for w in ws):
                raise ModelError(f"valuation of {a} mentions an unknown world")
        if polymodal:
            _check_polymodal(self.rel)


def _check_frame(n, pairs, transitive, irreflexive, name="R") -> None:
    for w, u in pairs:
        if not (0 <= w < n and 0 <= u < n):
            raise ModelError(f"{name} mentions an unknown world in {(w, u)}")
        if irreflexive and w == u:
            raise ModelError(f"{name} is not irreflexive at world {w}", "irreflexive")
    if transitive:
        for (w, u), (u2, v) in itertools.product(pairs, pairs):
            if u == u2 and (w, v) not in pairs:
                raise ModelError(f"{name} is not transitive: {w}->{u}->{v}", "transitive")


def _check_tree(n, pairs) -> None:
    preds = {u: {w for w, v in pairs if v == u} for u in range(n)}
    roots = [u for u in range(n) if not preds[u]]
    if len(roots) != 1:
        raise ModelError(f"tree-like frames need exactly one root, found {roots}", "tree")
    root = roots[0]
    for u in range(n):
        if u != root and (root, u) not in pairs:
            raise ModelError(f"world {u} is not reachable from the root", "tree")
        # predecessors of every world must be linearly ordered
        ps = sorted(preds[u])
        for a, b in itertools.combinations(ps, 2):
            if (a, b) not in pairs and (b, a) not in pairs:
                raise ModelError(f"predecessors {a}, {b} of world {u} are incomparable", "tree")


def _check_polymodal(rel) -> None:
    idx = sorted(rel)
    for lo, hi in itertools.combinations(idx, 2):
        if not rel[hi] <= rel[lo]:
            raise ModelError(f"R{hi} is not contained in R{lo}", "monotone")
        for (w, v) in rel[lo]:
            for (w2, u) in rel[hi]:
                if w == w2 and (u, v) not in rel[lo]:
                    raise ModelError(f"introspection fails: {w}R{lo}{v}, {w}R{hi}{u} but not {u}R{lo}{v}",
                                     "introspection")


def _succ_masks(n: int, pairs) -> list:
    out = [0] * n
    for w, u in pairs:
        out[w] |= 1 << u
    return out


def _dia_mask(succ: list, mask: int) -> int:
    out = 0
    for w, s in enumerate(succ):
        if s & mask:
            out |= 1 << w
    return out


def prop_truth(m: PropModel, phi: Formula) -> int:
    """Bitmask of worlds forcing ``phi``."""
    succ = {k: _succ_masks(m.worlds, pairs) for k, pairs in m.rel.items()}
    full = (1 << m.worlds) - 1
    vals = {a: sum(1 << w for w in ws) for a, ws in m.val.items()}

    @lru_cache(maxsize=None)
    def ev(f: Formula) -> int:
        if isinstance(f, Top):
            return full
        if isinstance(f, Atom):
            if f.args:
                raise ModelError(f"propositional model cannot evaluate {f}")
            if f.pred not in vals:
                raise KeyError(f"unknown atom {f.pred}")
            return vals[f.pred]
        if isinstance(f, Conj):
            return ev(f.left) & ev(f.right)
        if isinstance(f, Dia):
            return _dia_mask(succ.get(f.index, [0] * m.worlds), ev(f.body))
        raise ModelError(f"propositional model cannot evaluate {f}")

    return ev(phi)


def check_prop(m: PropModel, w: int, phi: Formula) -> bool:
    return bool(prop_truth(m, phi) >> w & 1)


# -- Kripke sheaves ----------------------------------------------------------

@dataclass(frozen=True)
class SheafModel:
    """A first-order Kripke model over a sheaf.

    ``domains[w]`` is the size of M_w (elements ``0..domains[w]-1``),
    ``eta[(w, u)]`` the image tuple of M_w in M_u for each ``w R u``,
    ``consts[c][w]`` the interpretation of constant ``c`` at ``w`` and
    ``interp[P][w]`` the set of tuples in P at ``w``.
    """

    worlds: int
    R: frozenset
    domains: tuple
    eta: Mapping
    consts: Mapping
    interp: Mapping
    arity: Mapping = field(default_factory=dict)

    @classmethod
    def constant(cls, worlds: int, R: Iterable, domain: int, interp: Mapping, consts: Mapping = None,
                 arity: Mapping = None) -> "SheafModel":
        R = frozenset(map(tuple, R))
        eta = {(w, u): tuple(range(domain)) for w, u in R}
        cs = {c: tuple(v for _ in range(worlds)) if isinstance(v, int) else tuple(v)
              for c, v in (consts or {}).items()}
        ip = {p: tuple(frozenset(map(tuple, ts)) for ts in per_world) for p, per_world in interp.items()}
        ar = dict(arity or {})
        for p, per_world in ip.items():
            if p not in ar:
                ar[p] = next((len(t) for ts in per_world for t in ts), 0)
        m = cls(worlds, R, tuple([domain] * worlds), eta, cs, ip, ar)
        m.validate()
        return m

    @property
    def is_constant_domain(self) -> bool:
        return (len(set(self.domains)) <= 1
                and all(img == tuple(range(len(img))) for img in self.eta.values()))

    def validate(self, transitive: bool = False, irreflexive: bool = False) -> None:
        n = self.worlds
        _check_frame(n, self.R, transitive, irreflexive)
        if len(self.domains) != n or any(d < 1 for d in self.domains):
            raise ModelError("every world needs a non-empty domain", "domain")
        for w, u in self.R:
            img = self.eta.get((w, u))
            if img is None:
                raise ModelError(f"missing compatibility map for {w}R{u}", "eta")
            if len(img) != self.domains[w] or any(not 0 <= e < self.domains[u] for e in img):
                raise ModelError(f"compatibility map for {w}R{u} is not a function M_{w} -> M_{u}", "eta")
        for (w, u) in self.R:
            for (u2, v) in self.R:
                if u2 != u or (w, v) not in self.R:
                    continue
                direct = self.eta[(w, v)]
                composed = tuple(self.eta[(u, v)][e] for e in self.eta[(w, u)])
                if direct != composed:
                    raise ModelError(
                        f"sheaf clause (v) violated: eta[{u},{v}] o eta[{w},{u}] != eta[{w},{v}]", "v")
        for w in range(n):
            if (w, w) in self.R and self.eta[(w, w)] != tuple(range(self.domains[w])):
                raise ModelError(f"sheaf clause (vi) violated: eta[{w},{w}] is not the identity", "vi")
        for c, vals in self.consts.items():
            if len(vals) != n or any(not 0 <= vals[w] < self.domains[w] for w in range(n)):
                raise ModelError(f"constant {c} is not interpreted in every domain", "constants")
            for w, u in self.R:
                if self.eta[(w, u)][vals[w]] != vals[u]:
                    raise ModelError(f"concordance violated for {c} along {w}R{u}", "concordance")
        for p, per_world in self.interp.items():
            if len(per_world) != n:
                raise ModelError(f"predicate {p} needs one extension per world", "interp")
            k = self.arity.get(p)
            for w, ts in enumerate(per_world):
                for t in ts:
                    if k is not None and len(t) != k:
                        raise ModelError(f"tuple {t} of {p} at world {w} has the wrong arity", "interp")
                    if any(not 0 <= e < self.domains[w] for e in t):
                        raise ModelError(f"tuple {t} of {p} at world {w} leaves the domain", "interp")

    def push(self, w: int, u: int, g: Mapping) -> dict:
        """The u-assignment ``eta[w,u] o g``."""
        img = self.eta[(w, u)]
        return {x: img[e] for x, e in g.items()}

    def successors(self, w: int) -> list:
        return sorted(u for v, u in self.R if v == w)


@dataclass(frozen=True)
class Assignment:
    world: int
    values: Mapping  # Var -> element of M_world


def _term_value(m: SheafModel, w: int, g: Mapping, t) -> int:
    if isinstance(t, Const):
        key = str(t)
        if key not in m.consts:
            raise ModelError(f"constant {key} is not interpreted")
        return m.consts[key][w]
    if t not in g:
        raise ModelError(f"variable {t} is not assigned")
    return g[t]


def check_sheaf(m: SheafModel, w: int, g, phi: Formula) -> bool:
    if isinstance(g, Assignment):
        if g.world != w:
            raise ModelError(f"assignment belongs to world {g.world}, not {w}")
        g = g.values
    for x, e in g.items():
        if not 0 <= e < m.domains[w]:
            raise ModelError(f"assignment sends {x} outside M_{w}")
    return _sheaf(m, w, dict(g), phi)


def _sheaf(m: SheafModel, w: int, g: dict, phi: Formula) -> bool:
    if isinstance(phi, Top):
        return True
    if isinstance(phi, Atom):
        tup = tuple(_term_value(m, w, g, t) for t in phi.args)
        ext = m.interp.get(phi.pred)
        if ext is None:
            raise ModelError(f"predicate {phi.pred} is not interpreted")
        return tup in ext[w]
    if isinstance(phi, Conj):
        return _sheaf(m, w, g, phi.left) and _sheaf(m, w, g, phi.right)
    if isinstance(phi, Forall):
        return all(_sheaf(m, w, {**g, phi.var: e}, phi.body) for e in range(m.domains[w]))
    if isinstance(phi, Dia):
        if phi.index != 0:
            raise ModelError("sheaf models have a single modality")
        return any(_sheaf(m, u, m.push(w, u, g), phi.body) for u in m.successors(w))
    raise TypeError(phi)


def assignments(m: SheafModel, w: int, variables: Iterable[Var]):
    vs = sorted(set(variables), key=lambda v: v.index)
    for combo in itertools.product(range(m.domains[w]), repeat=len(vs)):
        yield dict(zip(vs, combo))


def satisfied(m: SheafModel, w: int, phi: Formula) -> bool:
    return all(_sheaf(m, w, g, phi) for g in assignments(m, w, free_vars(phi)))


def valid(m: SheafModel, phi: Formula) -> bool:
    return all(satisfied(m, w, phi) for w in range(m.worlds))


# -- constant-domain evaluation with bitmasks --------------------------------

class _ConstEval:
    """Truth masks for a constant-domain model given as interpretation masks."""

    def __init__(self, n: int, succ: list, domain: int, consts: Mapping, masks: Mapping):
        self.n, self.succ, self.domain = n, succ, domain
        self.consts, self.masks = consts, masks
        self.full = (1 << n) - 1
        self.memo: dict = {}

    def ev(self, phi: Formula, env: tuple) -> int:
        key = (phi, env)
        hit = self.memo.get(key)
        if hit is not None:
            return hit
        g = dict(env)
        if isinstance(phi, Top):
            out = self.full
        elif isinstance(phi, Atom):
            tup = tuple(self.consts[str(t)] if isinstance(t, Const) else g[t] for t in phi.args)
            out = self.masks[phi.pred].get(tup, 0)
        elif isinstance(phi, Conj):
            out = self.ev(phi.left, env)
            if out:
                out &= self.ev(phi.right, env)
        elif isinstance(phi, Dia):
            out = _dia_mask(self.succ, self.ev(phi.body, env))
        elif isinstance(phi, Forall):
            out = self.full
            fv = free_vars(phi.body)
            rest = tuple((x, e) for x, e in env if x != phi.var)
            for e in range(self.domain):
                inner = tuple(sorted(rest + ((phi.var, e),), key=lambda p: p[0].index)) if phi.var in fv else rest
                out &= self.ev(phi.body, _restrict(inner, fv))
                if not out:
                    break
        else:
            raise TypeError(phi)
        self.memo[key] = out
        return out


def _restrict(env: tuple, fv) -> tuple:
    return tuple((x, e) for x, e in env if x in fv)


@lru_cache(maxsize=None)
def strict_orders(n: int) -> tuple:
    """All irreflexive transitive relations on ``n`` labelled worlds, in bitmask order."""
    pairs = [(w, u) for w in range(n) for u in range(n) if w != u]
    out = []
    for mask in range(1 << len(pairs)):
        rel = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        if any((w, u) in rel and (u, w) in rel for w, u in rel):
            continue
        if all((w, v) in rel for (w, u) in rel for (u2, v) in rel if u == u2):
            out.append(rel)
    return tuple(out)


@lru_cache(maxsize=None)
def transitive_relations(n: int) -> tuple:
    """All transitive relations on ``n`` labelled worlds, reflexive points allowed."""
    pairs = [(w, u) for w in range(n) for u in range(n)]
    out = []
    for mask in range(1 << len(pairs)):
        rel = frozenset(p for i, p in enumerate(pairs) if mask >> i & 1)
        if all((w, v) in rel for (w, u) in rel for (u2, v) in rel if u == u2):
            out.append(rel)
    return tuple(out)


@dataclass(frozen=True)
class Witness:
    model: SheafModel
    world: int
    assignment: dict

    def verify(self, s: Sequent) -> bool:
        return (check_sheaf(self.model, self.world, self.assignment, s.lhs)
                and not check_sheaf(self.model, self.world, self.assignment, s.rhs))


def _sequent_signature(s: Sequent) -> tuple:
    arity = {}
    for f in (s.lhs, s.rhs):
        for node in walk(f):
            if isinstance(node, Atom):
                arity[node.pred] = len(node.args)
    consts = sorted({str(c) for f in (s.lhs, s.rhs) for c in constants_of(f)}, key=lambda c: int(c[1:]))
    return dict(sorted(arity.items())), consts


def countermodel_search(s: Sequent, n: int, deadline: Optional[float] = None) -> Optional[Witness]:
    """First constant-domain countermodel with at most ``n`` worlds and elements.

    Models are enumerated by (worlds, domain size, relation, constants,
    interpretation bits).  Returns ``None`` when the bound is exhausted.
    """
    if any(isinstance(x, Dia) and x.index != 0 for f in (s.lhs, s.rhs) for x in walk(f)):
        raise ModelError("countermodel_search is for monomodal sequents")
    arity, consts = _sequent_signature(s)
    fv = sorted(free_vars(s.lhs) | free_vars(s.rhs), key=lambda v: v.index)
    for k in range(1, n + 1):
        for d in range(1, n + 1):
            slots = [(p, tup) for p, a in arity.items() for tup in itertools.product(range(d), repeat=a)]
            nbits = k * len(slots)
            envs = [tuple(zip(fv, combo)) for combo in itertools.product(range(d), repeat=len(fv))]
            for rel in strict_orders(k):
                succ = _succ_masks(k, rel)
                for cvals in itertools.product(range(d), repeat=len(consts)):
                    cmap = dict(zip(consts, cvals))
                    for bits in range(1 << nbits):
                        if deadline is not None and bits & 0xFF == 0 and time.monotonic() > deadline:
                            return None
                        masks = {p: {} for p in arity}
                        for i, (p, tup) in enumerate(slots):
                            m = bits >> (i * k) & ((1 << k) - 1)
                            if m:
                                masks[p][tup] = m
                        ev = _ConstEval(k, succ, d, cmap, masks)
                        for env in envs:
                            bad = ev.ev(s.lhs, _restrict(env, free_vars(s.lhs))) & ~ev.ev(
                                s.rhs, _restrict(env, free_vars(s.rhs)))
                            if bad:
                                w = (bad & -bad).bit_length() - 1
                                model = _constant_model(k, rel, d, cmap, masks, arity)
                                wit = Witness(model, w, dict(env))
                                if not wit.verify(s):
                                    raise AssertionError(f"countermodel for {s} failed re-verification")
                                return wit
    return None


def _constant_model(k, rel, d, cmap, masks, arity) -> SheafModel:
    interp = {p: [[tup for tup, m in masks[p].items() if m >> w & 1] for w in range(k)] for p in arity}
    return SheafModel.constant(k, rel, d, interp, cmap, arity)


# -- polymodal propositional search -------------------------------------------

def polymodal_frames(n: int, top: int):
    """Tuples (R_0, ..., R_top) of transitive relations satisfying monotonicity and introspection.

    Reflexive points are allowed: with R_1 inside R_0, introspection along
    ``w R_1 u`` forces ``u R_0 u``, so irreflexive frames would leave every
    higher relation empty.
    """

    def extend(chain):
        if len(chain) == top + 1:
            yield tuple(chain)
            return
        prev = chain[-1]
        for rel in transitive_relations(n):
            if not rel <= prev:
                continue
            ok = all((u, v) in lo
                     for lo in chain for (w, v) in lo for (w2, u) in rel if w == w2)
            if ok:
                yield from extend(chain + [rel])

    for r0 in transitive_relations(n):
        yield from extend([r0])


def countermodel_search_poly(s: Sequent, n: int) -> Optional[tuple]:
    """Propositional polymodal countermodel ``(PropModel, world)`` with at most ``n`` worlds."""
    atoms = sorted({a.pred for f in (s.lhs, s.rhs) for a in walk(f) if isinstance(a, Atom)})
    top = max([x.index for f in (s.lhs, s.rhs) for x in walk(f) if isinstance(x, Dia)], default=0)
    for k in range(1, n + 1):
        for frame in polymodal_frames(k, top):
            rel = {i: r for i, r in enumerate(frame)}
            for bits in range(1 << (k * len(atoms))):
                val = {a: frozenset(w for w in range(k) if bits >> (i * k + w) & 1) for i, a in enumerate(atoms)}
                m = PropModel(k, rel, val)
                bad = prop_truth(m, s.lhs) & ~prop_truth(m, s.rhs)
                if bad:
                    return m, (bad & -bad).bit_length() - 1
    return None


# -- tree model bank ------------------------------------------------------------

@lru_cache(maxsize=None)
def tree_shapes(max_nodes: int) -> tuple:
    """Rooted unlabelled trees with up to ``max_nodes`` nodes as parent arrays (root 0)."""

    def canon(parent, v):
        kids = [i for i, p in enumerate(parent) if p == v and i != v]
        return "(" + "".join(sorted(canon(parent, c) for c in kids)) + ")"

    seen = {}
    for k in range(1, max_nodes + 1):
        for parents in itertools.product(*[range(i) for i in range(1, k)]):
            parent = (0,) + parents
            key = canon(parent, 0)
            if key not in seen:
                seen[key] = parent
    return tuple(sorted(seen.values(), key=lambda p: (len(p), p)))


def tree_relation(parent: tuple) -> frozenset:
    """Transitive closure of the child relation: w R u iff w is a proper ancestor of u."""
    out = set()
    for u in range(1, len(parent)):
        w = parent[u]
        while True:
            out.add((w, u))
            if w == 0:
                break
            w = parent[w]
    return frozenset(out)


class TreeModelBank:
    """Every finite transitive irreflexive tree model up to a node bound.

    Each formula is mapped to the bitset of models whose root forces it,
    so ``lhs |- rhs`` is refuted by the models in ``bits(lhs) & ~bits(rhs)``.
    """

    def __init__(self, atoms: tuple, max_nodes: int):
        self.atoms = tuple(atoms)
        self.blocks = []
        offset = 0
        for parent in tree_shapes(max_nodes):
            k = len(parent)
            nvals = 1 << (k * len(self.atoms))
            codes = np.arange(nvals, dtype=np.int64)
            vals = {a: ((codes[:, None] >> (i * k + np.arange(k))) & 1).astype(bool)
                    for i, a in enumerate(self.atoms)}
            below = np.zeros((k, k), dtype=np.int32)
            for w, u in tree_relation(parent):
                below[w, u] = 1
            self.blocks.append((parent, offset, nvals, vals, below))
            offset += nvals
        self.size = offset
        self._cache: dict = {}

    def bits(self, phi: Formula) -> int:
        hit = self._cache.get(phi)
        if hit is not None:
            return hit
        roots = np.concatenate([self._eval(phi, b, {})[:, 0] for b in self.blocks])
        packed = np.packbits(roots, bitorder="little")
        out = int.from_bytes(packed.tobytes(), "little")
        self._cache[phi] = out
        return out

    def _eval(self, phi, block, memo):
        if phi in memo:
            return memo[phi]
        _, _, nvals, vals, below = block
        if isinstance(phi, Top):
            out = np.ones((nvals, below.shape[0]), dtype=bool)
        elif isinstance(phi, Atom):
            out = vals[phi.pred]
        elif isinstance(phi, Conj):
            out = self._eval(phi.left, block, memo) & self._eval(phi.right, block, memo)
        elif isinstance(phi, Dia):
            out = (self._eval(phi.body, block, memo).astype(np.int32) @ below.T) > 0
        else:
            raise ModelError(f"tree bank evaluates propositional formulas only, got {phi}")
        memo[phi] = out
        return out

    def model(self, index: int) -> PropModel:
        for parent, offset, nvals, _, _ in self.blocks:
            if offset <= index < offset + nvals:
                code = index - offset
                k = len(parent)
                val = {a: frozenset(w for w in range(k) if code >> (i * k + w) & 1)
                       for i, a in enumerate(self.atoms)}
                return PropModel(k, {0: tree_relation(parent)}, val)
        raise IndexError(index)

    def refute(self, s: Sequent) -> Optional[PropModel]:
        bad = self.bits(s.lhs) & ~self.bits(s.rhs)
        if not bad:
            return None
        return self.model((bad & -bad).bit_length() - 1)


# -- random sheaves --------------------------------------------------------------

def random_sheaf(signature: Signature, seed: int, worlds: int = 3, max_domain: int = 3,
                 constant_domain: bool = False, density: float = 0.5) -> SheafModel:
    """Random transitive irreflexive Kripke sheaf; deterministic per seed.

    The relation is the transitive closure of a random DAG; compatibility
    maps are drawn on the covering edges of a spanning tree and composed
    along it, so clause (v) holds by construction.
    """
    rng = random.Random(seed)
    n = worlds
    # random forest on worlds in topological order, plus extra edges within the closure of that forest
    parent = [None] + [rng.choice([None] + list(range(u))) if rng.random() < density + 0.3 else None
                       for u in range(1, n)]
    rel = set()
    for u in range(n):
        w = parent[u]
        while w is not None:
            rel.add((w, u))
            w = parent[w]
    if constant_domain:
        d = rng.randint(1, max_domain)
        domains = [d] * n
    else:
        domains = [rng.randint(1, max_domain) for _ in range(n)]
        for u in range(n):
            if parent[u] is not None:
                domains[u] = max(domains[u], 1)
    step = {}
    for u in range(n):
        w = parent[u]
        if w is not None:
            step[(w, u)] = tuple(range(domains[w])) if constant_domain and domains[w] == domains[u] else \
                tuple(rng.randrange(domains[u]) for _ in range(domains[w]))
    eta = {}
    for (w, u) in rel:
        chain = [u]
        while chain[-1] != w:
            chain.append(parent[chain[-1]])
        chain.reverse()
        img = tuple(range(domains[w]))
        for a, b in zip(chain, chain[1:]):
            img = tuple(step[(a, b)][e] for e in img)
        eta[(w, u)] = img
    consts = {}
    for c in sorted(signature.constants, key=lambda c: int(c[1:])):
        name = str(c)
        vals = [None] * n
        for u in range(n):
            w = parent[u]
            vals[u] = rng.randrange(domains[u]) if w is None else step[(w, u)][vals[w]]
        consts[name] = tuple(vals)
    interp = {}
    for p, a in sorted(signature.predicates.items()):
        interp[p] = tuple(frozenset(t for t in itertools.product(range(domains[w]), repeat=a)
                                    if rng.random() < 0.5) for w in range(n))
    m = SheafModel(n, frozenset(rel), tuple(domains), eta, consts, interp, dict(signature.predicates))
    m.validate(transitive=True, irreflexive=True)
    return m


# -- JSON model files -------------------------------------------------------------

def model_to_json(m) -> str:
    if isinstance(m, PropModel):
        doc = {"worlds": m.worlds, "R": sorted(map(list, m.R)), "constant": 1,
               "interp": {a: {str(w): [[]] for w in sorted(ws)} for a, ws in sorted(m.val.items())}}
        higher = {str(k): sorted(map(list, r)) for k, r in m.rel.items() if k != 0}
        if higher:
            doc["Rs"] = higher
        return json.dumps(doc, sort_keys=True)
    doc = {"worlds": m.worlds, "R": sorted(map(list, m.R))}
    if m.is_constant_domain:
        doc["constant"] = m.domains[0] if m.domains else 1
    else:
        doc["domains"] = list(m.domains)
        doc["eta"] = {f"{w},{u}": list(img) for (w, u), img in sorted(m.eta.items())}
    doc["interp"] = {p: {str(w): sorted(map(list, ts)) for w, ts in enumerate(per) if ts}
                     for p, per in sorted(m.interp.items())}
    if m.consts:
        doc["constants"] = {c: {str(w): v for w, v in enumerate(vals)} for c, vals in sorted(m.consts.items())}
    return json.dumps(doc, sort_keys=True)


def model_from_json(text: str, transitive: bool = False, irreflexive: bool = False) -> SheafModel:
    """Load and validate a model file; structural violations raise :class:`ModelError`."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as e:
        raise ModelError(f"malformed model file: {e}") from e
    n = int(doc["worlds"])
    R = frozenset(tuple(p) for p in doc.get("R", []))
    if "domains" in doc:
        domains = tuple(int(d) for d in doc["domains"])
    else:
        domains = tuple([int(doc.get("constant", 1))] * n)
    eta = {}
    raw_eta = doc.get("eta")
    for w, u in R:
        if raw_eta is not None and f"{w},{u}" in raw_eta:
            eta[(w, u)] = tuple(raw_eta[f"{w},{u}"])
        elif raw_eta is None and "domains" not in doc:
            eta[(w, u)] = tuple(range(domains[w]))
    interp, arity = {}, {}
    for p, per in doc.get("interp", {}).items():
        ext = [set() for _ in range(n)]
        for w, tuples in per.items():
            ext[int(w)] = {tuple(t) for t in tuples}
        interp[p] = tuple(frozenset(e) for e in ext)
        lens = {len(t) for e in ext for t in e}
        if len(lens) > 1:
            raise ModelError(f"predicate {p} used with several arities", "interp")
        arity[p] = lens.pop() if lens else 0
    consts = {}
    for c, per in doc.get("constants", {}).items():
        vals = [per.get(str(w)) for w in range(n)]
        if any(v is None for v in vals):
            raise ModelError(f"constant {c} is not interpreted at every world", "constants")
        consts[c] = tuple(int(v) for v in vals)
    m = SheafModel(n, R, domains, eta, consts, interp, arity)
    m.validate(transitive=transitive, irreflexive=irreflexive)
    return m


def prop_model_from_json(text: str) -> PropModel:
    doc = json.loads(text)
    m = model_from_json(text)
    val = {p: frozenset(w for w, ts in enumerate(per) if () in ts) for p, per in m.interp.items()}
    higher = {int(k): v for k, v in doc.get("Rs", {}).items()}
    return PropModel.of(m.worlds, m.R, val, higher)


def as_sheaf(m: PropModel) -> SheafModel:
    """A propositional model as a one-element constant-domain sheaf with 0-ary predicates."""
    interp = {a: [[()] if w in ws else [] for w in range(m.worlds)] for a, ws in m.val.items()}
    return SheafModel.constant(m.worlds, m.R, 1, interp, arity={a: 0 for a in m.val})
