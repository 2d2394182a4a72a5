"""Acceptance criteria A1 to A9.

Each test prints one ``A<k> PASS|FAIL <detail>`` line; the lines are
repeated in the terminal summary by ``conftest.py``.
"""

import itertools
import json
import random
import re
import time

import pytest

import generators as gen
from rcbench.arith import (
    DC, PA, AForall, Exists, Not, Oracle, SentForall, SentVar, Mod, AVar, classify, eval_bounded,
    free_vars as free_vars_ax, hashed_modal_oracle, leq, parse_arith, subformulas, subst, text,
)
from rcbench.calculus import (
    Derivable, Logic, ProofNotFound, Underivable, _derive_from, all_formulas, check_derivation,
    decide_qrc1, decide_rc1, prove, random_derivation, random_formula,
)
from rcbench.formula import (
    TOP, Atom, Conj, Const, Dia, Forall, Mode, Sequent, Signature, Var, constants_of, free_vars,
    fresh_var, is_free_for, modal_depth, parse_formula, parse_sequent, replace_const, substitute,
    symbols_of, to_text,
)
from rcbench.kripke import ModelError, assignments, check_sheaf, model_from_json, random_sheaf
from rcbench.oracle import rc1_sweep
from rcbench.realize import (
    SolovayContext, expand_all, expand_mod_quantifier, extend_solovay, is_guarded, lambda_sentence,
    solovay_realize,
)
from rcbench.rewriter import (
    RULES_BY_NAME, SideConditionError, apply, derive_chain, replay,
    sigma2_box_chain_endpoints,
)

PREDS = {"P": 1, "S": 2}


# -- A1 -----------------------------------------------------------------------------------------

@pytest.mark.slow
def test_a1_oracle_equivalence(report):
    rep = rc1_sweep(("p", "q"), max_size=6, max_nodes=6)
    ok = rep.ok and rep.seconds < 300
    report("A1", ok, f"{rep.sequents} sequents, {rep.derivable} derivable, "
                     f"{len(rep.disagreements)} disagreements, {len(rep.both)} both, "
                     f"{len(rep.neither)} neither, {len(rep.bad_derivations)} bad derivations, "
                     f"{rep.seconds:.1f}s")
    assert ok


# -- A2 -----------------------------------------------------------------------------------------

def _rc_instances(rng):
    """Axiom and rule instances of the polymodal calculus over atoms p, q."""
    pool = [f for f in all_formulas(("p", "q"), 4, indices=(0, 1, 2))]
    rng.shuffle(pool)
    pool = pool[:12]
    out = []
    for phi, psi in itertools.product(pool[:6], pool[6:12]):
        out += [("i", Sequent(phi, phi)), ("i", Sequent(phi, TOP)),
                ("ii", Sequent(Conj(phi, psi), phi)), ("ii", Sequent(Conj(phi, psi), psi))]
    for phi, psi in zip(pool[:6], pool[6:12]):
        for a, b in itertools.product(range(3), repeat=2):
            out.append(("vi", Sequent(Dia(a, Dia(a, phi)), Dia(a, phi))))
            if a > b:
                out.append(("vii", Sequent(Dia(a, phi), Dia(b, phi))))
                out.append(("viii", Sequent(Conj(Dia(a, phi), Dia(b, psi)),
                                            Dia(a, Conj(phi, Dia(b, psi))))))
    # rules, with premises that hold by the monomodal decision procedure
    mono = all_formulas(("p", "q"), 4)
    derivable = [(l, r) for l in mono for r in mono if decide_rc1(Sequent(l, r))]
    relabel = lambda f, a: f if not isinstance(f, (Dia, Conj)) else (
        Dia(a, relabel(f.body, a)) if isinstance(f, Dia) else Conj(relabel(f.left, a), relabel(f.right, a)))
    for _ in range(40):
        a = rng.randrange(3)
        l1, r1 = rng.choice(derivable)
        r2 = rng.choice([r for (l, r) in derivable if l == l1])
        mids = [r for (l, r) in derivable if l == r1]
        r3 = rng.choice(mids)
        l1, r1, r2, r3 = (relabel(f, a) for f in (l1, r1, r2, r3))
        out.append(("iii", Sequent(l1, Conj(r1, r2))))
        out.append(("iv", Sequent(l1, r3)))
        out.append(("v", Sequent(Dia(a, l1), Dia(a, r1))))
    return out


def _qrc_instances(rng):
    """Axiom and rule instances of the quantified calculus over P (unary) and S (binary).

    Metavariables are filled with formulas of depth at most 2; rule premises
    are small random derivations.
    """
    out = []
    pool = [random_formula(rng, PREDS, 2) for _ in range(20)]
    for phi, psi in zip(pool[:10], pool[10:]):
        out += [("i", Sequent(phi, TOP)), ("i", Sequent(phi, phi)),
                ("ii", Sequent(Conj(phi, psi), phi)), ("ii", Sequent(Conj(phi, psi), psi)),
                ("vi", Sequent(Dia(0, Dia(0, phi)), Dia(0, phi)))]
    terms = [Var(0), Var(1), Var(2), Const(0), Const(1)]
    for _ in range(40):
        d = _derive_from(rng, random_formula(rng, PREDS, 2), 1, PREDS, 2, 2)
        assert check_derivation(d, Logic.QRC1)
        lhs, rhs = d.lhs, d.rhs
        e = _derive_from(rng, lhs, 1, PREDS, 2, 2)
        f = _derive_from(rng, rhs, 1, PREDS, 2, 2)
        out.append(("iii", Sequent(lhs, Conj(rhs, e.rhs))))
        out.append(("iv", Sequent(lhs, f.rhs)))
        out.append(("v", Sequent(Dia(0, lhs), Dia(0, rhs))))
        x = next((v for v in terms[:3] if v not in free_vars(lhs)), None)
        if x is not None:
            out.append(("vii", Sequent(lhs, Forall(x, rhs))))
        # forall-left: abstract a constant of the left-hand side into a fresh variable
        y = fresh_var(lhs, rhs)
        cs = sorted(constants_of(lhs), key=lambda c: c.index)
        if cs:
            out.append(("viii", Sequent(Forall(y, replace_const(lhs, cs[0], y)), rhs)))
        vs = sorted(free_vars(lhs) | free_vars(rhs), key=lambda v: v.index)
        if vs:
            t = rng.choice(terms)
            if is_free_for(t, vs[0], lhs) and is_free_for(t, vs[0], rhs):
                out.append(("ix", Sequent(substitute(lhs, vs[0], t), substitute(rhs, vs[0], t))))
        all_cs = sorted(constants_of(lhs) | constants_of(rhs), key=lambda c: c.index)
        if all_cs:
            out.append(("x", Sequent(replace_const(lhs, all_cs[0], y), replace_const(rhs, all_cs[0], y))))
    return out


def test_a2_axiom_suite(report):
    rng = random.Random(2)
    failures = []
    counts = {}
    for logic, cases in ((Logic.RCW, _rc_instances(rng)), (Logic.QRC1, _qrc_instances(rng))):
        for label, s in cases:
            key = f"{logic.value}:{label}"
            counts[key] = counts.get(key, 0) + 1
            try:
                d = prove(s, logic, budget=40)
            except ProofNotFound:
                failures.append((key, s))
                continue
            if not check_derivation(d, logic):
                failures.append((key, s))
    total = sum(counts.values())
    detail = f"{total - len(failures)}/{total} instances over {len(counts)} schemas"
    if failures:
        detail += f"; first failure {failures[0][0]} {to_text(failures[0][1])}"
    report("A2", not failures, detail)
    assert not failures


# -- A3 -----------------------------------------------------------------------------------------

def _holds(m, s: Sequent) -> bool:
    fv = free_vars(s.lhs) | free_vars(s.rhs)
    return all(not check_sheaf(m, w, g, s.lhs) or check_sheaf(m, w, g, s.rhs)
               for w in range(m.worlds) for g in assignments(m, w, fv))


@pytest.mark.slow
def test_a3_soundness(report):
    rng = random.Random(3)
    sig = Signature(PREDS, {"c0", "c1"})
    models = [random_sheaf(sig, seed, worlds=1 + seed % 4, max_domain=3, constant_domain=True)
              for seed in range(50)]
    bad = []
    for _ in range(500):
        d = random_derivation(rng, PREDS, 4)
        assert check_derivation(d, Logic.QRC1)
        s = Sequent(d.lhs, d.rhs)
        bad += [(s, i) for i, m in enumerate(models) if not _holds(m, s)]
    report("A3", not bad, f"500 derivable sequents x 50 constant-domain models, {len(bad)} counterexamples")
    assert not bad


# -- A4 -----------------------------------------------------------------------------------------

def test_a4_barcan_pair(report):
    t0 = time.monotonic()
    fwd = decide_qrc1(parse_sequent("<> A x0. P(x0) |- A x0. <>P(x0)"))
    s = parse_sequent("A x0. <>P(x0) |- <> A x0. P(x0)")
    back = decide_qrc1(s)
    elapsed = time.monotonic() - t0
    ok = isinstance(fwd, Derivable) and check_derivation(fwd.derivation, Logic.QRC1)
    ok = ok and isinstance(back, Underivable) and back.witness.verify(s)
    ok = ok and back.witness.model.worlds <= 3 and max(back.witness.model.domains) <= 2
    ok = ok and elapsed < 10
    shape = f"{back.witness.model.worlds} worlds, domain {max(back.witness.model.domains)}" \
        if isinstance(back, Underivable) else "no witness"
    report("A4", ok, f"forward {type(fwd).__name__}, converse {type(back).__name__} ({shape}), {elapsed:.2f}s")
    assert ok


# -- A5 -----------------------------------------------------------------------------------------

@pytest.mark.slow
def test_a5_signature_and_depth(report):
    formulas = all_formulas(("p", "q"), 6)
    sym = [symbols_of(f) for f in formulas]
    dep = [modal_depth(f) for f in formulas]
    sym_bad = dep_bad = derivable = 0
    for (i, l), (j, r) in itertools.product(enumerate(formulas), repeat=2):
        if decide_rc1(Sequent(l, r)):
            derivable += 1
            sym_bad += not sym[j] <= sym[i]
            dep_bad += dep[i] < dep[j]
    rng = random.Random(5)
    q_sym = q_dep = q_pred_only = 0
    example = None
    for _ in range(500):
        d = random_derivation(rng, PREDS, 4)
        assert check_derivation(d, Logic.QRC1)
        if not symbols_of(d.rhs) <= symbols_of(d.lhs):
            q_sym += 1
            example = example or Sequent(d.lhs, d.rhs)
            # predicates alone stay inside the left-hand language
            q_pred_only += not {x for x in symbols_of(d.rhs) if not re.fullmatch(r"c\d+", str(x))} \
                <= symbols_of(d.lhs)
        q_dep += modal_depth(d.lhs) < modal_depth(d.rhs)
    ok = sym_bad == dep_bad == q_sym == q_dep == 0
    detail = (f"propositional: {derivable} derivable, {sym_bad} symbol and {dep_bad} depth violations; "
              f"quantified: 500 derivable, {q_sym} symbol ({q_pred_only} predicate) and {q_dep} depth violations")
    if example is not None:
        detail += f"; e.g. {to_text(example)}"
    report("A5", ok, detail)
    assert ok


# -- A6 -----------------------------------------------------------------------------------------

def test_a6_classifier_shapes(report):
    sig = Signature(PREDS)
    lam_ok = atom_ok = expand_ok = guard_ok = True
    atoms = 0
    for seed in range(20):
        base = random_sheaf(sig, 600 + seed, worlds=1 + seed % 4, max_domain=3, constant_domain=True)
        ctx = SolovayContext.with_root(base)
        lam_ok &= all(classify(lambda_sentence(ctx, i)) == DC for i in range(ctx.N))
        for p, a in PREDS.items():
            for args in itertools.product([Var(0), Var(1)], repeat=a):
                out = solovay_realize(ctx, p, args)
                atoms += 1
                atom_ok &= classify(out) == DC
                guard_ok &= is_guarded(out, ctx.m)
    rng = random.Random(6)
    base = random_sheaf(Signature(PREDS, {"c0"}), 66, worlds=3, max_domain=2, constant_domain=True)
    ctx = SolovayContext.with_root(base)
    for _ in range(100):
        phi = random_formula(rng, PREDS, 3, consts=1)
        out = extend_solovay(ctx, PA, phi)
        guard_ok &= is_guarded(out, ctx.m)
        expanded = expand_all(out, ctx.m)
        expand_ok &= leq(classify(expanded), DC)
        expand_ok &= not any(isinstance(n, AForall) and re.fullmatch(r"y\d+", n.var)
                             for n in subformulas(expanded))
    ok = lam_ok and atom_ok and expand_ok and guard_ok
    report("A6", ok, f"lambda {lam_ok}, {atoms} atoms DC {atom_ok}, 100 expanded translations DC {expand_ok}, "
                     f"guarded {guard_ok}")
    assert ok


# -- A7 -----------------------------------------------------------------------------------------

def _guarded_formula(rng, m):
    """A random formula whose only free variable is ``u``, always under ``(mod u m)``."""
    while True:
        phi = gen.formula(rng, 3, names=("s", "t", "w"))
        if "w" not in free_vars_ax(phi) or any(isinstance(n, (SentVar, SentForall)) for n in subformulas(phi)):
            continue
        for v in sorted(free_vars_ax(phi) - {"w"}):
            phi = AForall(v, phi) if rng.random() < 0.5 else Exists(v, phi)
        return subst(phi, "w", Mod(AVar("u"), m))


def test_a7_mod_expansion(report):
    rng = random.Random(7)
    agree = 0
    for k in range(200):
        m = rng.randint(1, 3)
        phi = _guarded_formula(rng, m)
        oracle = Oracle(gen.random_preds(rng, 10), hashed_modal_oracle(k))
        cut = eval_bounded(AForall("u", phi), 2, oracle, var_bounds={"u": 3 * m})
        agree += cut == eval_bounded(expand_mod_quantifier(phi, "u", m), 2, oracle)
    report("A7", agree == 200, f"{agree}/200 agreements")
    assert agree == 200


# -- A8 -----------------------------------------------------------------------------------------

# rules allowed in the box chain; R-PA-DN stands in for classical reasoning under the PA box
CHAIN_RULES = {"R-FORALL-NEG", "R-NEGPI-TO-DNSIGMA", "R-BOX-DN-SIGMA1", "R-BOX-DN-SIGMA1-FORALL",
               "R-PI2-CONS", "R-PA-DN"}


def test_a8_rewrite_replay(report):
    rng = random.Random(8)
    problems = []
    longest = 0
    for _ in range(20):
        phi = gen.sigma2(rng)
        start, goal = sigma2_box_chain_endpoints(phi)
        tr = derive_chain(start, goal)
        longest = max(longest, len(tr))
        if tr.end != goal or len(tr) > 9 or not replay(tr):
            problems.append(text(phi))
        elif not all(st.rule in CHAIN_RULES and RULES_BY_NAME[st.rule].justification for st in tr.steps):
            problems.append(text(phi))
    sig2 = parse_arith("(exists s (forall t (pred F s t)))")
    try:
        apply("R-DN-DELTA", Not(Not(sig2)))
        rejected = False
    except SideConditionError as e:
        rejected = "side condition" in str(e) or e.cls is not None
    ok = not problems and rejected
    report("A8", ok, f"20 chains, longest {longest} steps, {len(problems)} problems, DN-DELTA rejected {rejected}")
    assert ok


# -- A9 -----------------------------------------------------------------------------------------

def test_a9_golden_formats(report):
    rng = random.Random(9)
    modal_ok = 0
    for k in range(1000):
        if k % 2:
            f = random_formula(rng, PREDS, 4)
            modal_ok += parse_formula(to_text(f)) == f
        else:
            f = _poly_formula(rng, 4)
            modal_ok += parse_formula(to_text(f), mode=Mode.POLY) == f
    arith_ok = sum(parse_arith(text(phi)) == phi for phi in (gen.formula(rng, 5) for _ in range(1000)))
    bad = {"worlds": 3, "R": [[0, 1], [1, 2], [0, 2]], "domains": [2, 2, 2],
           "eta": {"0,1": [1, 0], "1,2": [1, 0], "0,2": [1, 0]}, "interp": {}}
    try:
        model_from_json(json.dumps(bad))
        named = False
    except ModelError as e:
        named = e.clause == "v" and "clause (v)" in str(e)
    ok = modal_ok == 1000 and arith_ok == 1000 and named
    report("A9", ok, f"modal {modal_ok}/1000, arithmetic {arith_ok}/1000 round trips, "
                     f"clause (v) rejection named {named}")
    assert ok


def _poly_formula(rng, depth):
    if depth <= 0 or rng.random() < 0.25:
        return rng.choice([TOP, Atom("p"), Atom("q")])
    if rng.random() < 0.5:
        return Conj(_poly_formula(rng, depth - 1), _poly_formula(rng, depth - 1))
    return Dia(rng.randrange(4), _poly_formula(rng, depth - 1))
