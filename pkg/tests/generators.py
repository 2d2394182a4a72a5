"""Random arithmetic formulas for the property tests."""

import random

from rcbench.arith import (
    HA, PA, ADia, AForall, And, AVar, BExists, BForall, Box, EqQuote, Eq, Exists, ExistsAx, Falsum,
    Imp, Leq, Mod, Named, Not, Num, Or, OrAx, Pair0, Pair1, Pred, PredAx, SentForall, SentVar,
    SIGMA, PI,
)

VARS = ("s", "t", "u", "v")


def term(rng: random.Random, names=VARS, depth: int = 2):
    r = rng.random()
    if depth <= 0 or r < 0.45:
        return AVar(rng.choice(names)) if names and rng.random() < 0.6 else Num(rng.randrange(4))
    if r < 0.65:
        return Mod(term(rng, names, depth - 1), rng.randint(1, 3))
    if r < 0.85:
        return Pair0(term(rng, names, depth - 1))
    return Pair1(term(rng, names, depth - 1))


def ax(rng: random.Random, names=VARS, depth: int = 2):
    r = rng.random()
    if depth <= 0 or r < 0.4:
        return rng.choice([HA, PA, Named("T"), Named("U", PI(1)), Named("V", SIGMA(2))])
    if r < 0.55:
        return OrAx(ax(rng, names, depth - 1), ax(rng, names, depth - 1))
    if r < 0.7:
        return PredAx("Q", (term(rng, names, 1),))
    if r < 0.85:
        return ExistsAx(rng.choice(VARS), ax(rng, names, depth - 1))
    return EqQuote(delta0(rng, names, 1))


def atomic(rng: random.Random, names=VARS):
    r = rng.random()
    if r < 0.1:
        return Falsum()
    if r < 0.4:
        return Eq(term(rng, names), term(rng, names))
    if r < 0.6:
        return Leq(term(rng, names), term(rng, names))
    arity = rng.randint(1, 2)
    return Pred("F", tuple(term(rng, names, 1) for _ in range(arity))) if arity == 2 else \
        Pred("G", (term(rng, names, 1),))


def delta0(rng: random.Random, names=VARS, depth: int = 2):
    r = rng.random()
    if depth <= 0 or r < 0.35:
        return atomic(rng, names)
    if r < 0.5:
        return Not(delta0(rng, names, depth - 1))
    if r < 0.65:
        return And((delta0(rng, names, depth - 1), delta0(rng, names, depth - 1)))
    if r < 0.8:
        return Or((delta0(rng, names, depth - 1), delta0(rng, names, depth - 1)))
    v = rng.choice(VARS)
    q = BForall if rng.random() < 0.5 else BExists
    return q(v, Num(rng.randrange(3)), delta0(rng, names, depth - 1))


def formula(rng: random.Random, depth: int = 4, names=VARS):
    """Any arithmetic formula, including modal operators and sentence variables."""
    if depth <= 0:
        return atomic(rng, names)
    r = rng.random()
    sub = lambda: formula(rng, depth - 1, names)
    if r < 0.15:
        return atomic(rng, names)
    if r < 0.25:
        return Not(sub())
    if r < 0.35:
        return And(tuple(sub() for _ in range(rng.randint(2, 3))))
    if r < 0.45:
        return Or(tuple(sub() for _ in range(rng.randint(2, 3))))
    if r < 0.52:
        return Imp(sub(), sub())
    if r < 0.62:
        return AForall(rng.choice(VARS), sub())
    if r < 0.72:
        return Exists(rng.choice(VARS), sub())
    if r < 0.78:
        q = BForall if rng.random() < 0.5 else BExists
        return q(rng.choice(VARS), term(rng, names, 1), sub())
    if r < 0.86:
        return Box(ax(rng, names), sub())
    if r < 0.94:
        return ADia(ax(rng, names), sub())
    if r < 0.97:
        return SentVar("theta")
    return SentForall("theta", sub())


def prenex(rng: random.Random, max_prefix: int = 3):
    """A prenex formula over a Delta0 matrix mentioning only its bound variables."""
    k = rng.randint(0, max_prefix)
    names = VARS[:k]
    out = delta0(rng, names, 2)
    for v in reversed(names):
        out = AForall(v, out) if rng.random() < 0.5 else Exists(v, out)
    return out


def sigma2(rng: random.Random, s: str = "s", t: str = "t"):
    """A closed exists-forall formula with a Delta0 matrix in ``s`` and ``t``."""
    return Exists(s, AForall(t, delta0(rng, (s, t), 2)))


def random_preds(rng: random.Random, size: int = 12):
    """Random finite extensions for the predicates F (binary) and G (unary)."""
    return {
        "F": {(a, b) for a in range(size) for b in range(size) if rng.random() < 0.5},
        "G": {(a,) for a in range(size) if rng.random() < 0.5},
    }
