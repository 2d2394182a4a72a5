import json

import pytest
from hypothesis import given, settings, strategies as st

from rcbench.calculus import all_formulas, decide_rc1
from rcbench.formula import Mode, Sequent, Signature, parse_formula, parse_sequent
from rcbench.kripke import (
    ModelError, PropModel, SheafModel, TreeModelBank, as_sheaf, check_prop, check_sheaf,
    countermodel_search, countermodel_search_poly, model_from_json, model_to_json,
    polymodal_frames, prop_model_from_json, random_sheaf, satisfied, strict_orders, tree_relation, tree_shapes, valid,
)

F = parse_formula

# w=0 sees u_a=1 and u_b=2; P holds of element 0 at world 1 and of element 1 at world 2
SPLIT = SheafModel.constant(3, [(0, 1), (0, 2)], 2, {"P": [[], [(0,)], [(1,)]]})


# -- propositional truth ---------------------------------------------------------

def test_top_true_at_lonely_world():
    m = PropModel.of(1, [], {"p": []})
    assert check_prop(m, 0, F("T"))


def test_diamond_evaluation():
    m = PropModel.of(2, [(0, 1)], {"p": [1]})
    assert check_prop(m, 0, F("<>p"))
    assert not check_prop(m, 0, F("<><>p"))
    assert not check_prop(m, 1, F("<>p"))


# -- sheaf truth -------------------------------------------------------------------

def test_split_model_forces_universal_diamond():
    assert check_sheaf(SPLIT, 0, {}, F("A x0. <>P(x0)"))


def test_split_model_refutes_diamond_universal():
    assert not check_sheaf(SPLIT, 0, {}, F("<> A x0. P(x0)"))


def test_top_everywhere():
    m = random_sheaf(Signature({"P": 1, "S": 2}, frozenset({"c0"})), seed=5)
    for w in range(m.worlds):
        assert check_sheaf(m, w, {}, F("T"))


def test_free_variable_follows_eta():
    # two worlds, element 0 at world 0 maps to element 1 at world 1
    m = SheafModel(2, frozenset({(0, 1)}), (1, 2), {(0, 1): (1,)}, {},
                   {"P": (frozenset(), frozenset({(1,)}))}, {"P": 1})
    m.validate()
    assert check_sheaf(m, 0, {parse_formula("P(x0)").args[0]: 0}, F("<>P(x0)"))
    assert not satisfied(m, 0, F("<> A x0. P(x0)"))


# -- validity ----------------------------------------------------------------------

def test_validity_examples():
    assert valid(SPLIT, F("T"))
    full = SheafModel.constant(2, [(0, 1)], 2, {"P": [[(0,), (1,)], [(0,), (1,)]]})
    assert valid(full, F("P(x0)"))
    assert not valid(SPLIT, F("<>T"))


# -- countermodel search --------------------------------------------------------------

def test_barcan_countermodel_has_three_worlds():
    s = parse_sequent("A x0. <>P(x0) |- <> A x0. P(x0)")
    w = countermodel_search(s, 3)
    assert w is not None and w.verify(s)
    assert w.model.worlds == 3 and w.model.domains[0] == 2
    assert countermodel_search(s, 2) is None


def test_transitivity_has_no_countermodel():
    assert countermodel_search(parse_sequent("<><>p |- <>p"), 3) is None


def test_distinct_atoms_refuted_in_one_world():
    s = parse_sequent("p |- q")
    w = countermodel_search(s, 1)
    assert w.model.worlds == 1
    assert w.model.interp["p"][0] == {()} and w.model.interp["q"][0] == frozenset()


@pytest.mark.parametrize("seq", ["<0>p |- <1>p", "<1>p |- q", "<1>p & <1>q |- <1>(p & q)"])
def test_polymodal_countermodel(seq):
    s = parse_sequent(seq, mode=Mode.POLY)
    res = countermodel_search_poly(s, 3)
    assert res is not None
    m, w = res
    m.validate(irreflexive=False, polymodal=True)
    assert check_prop(m, w, s.lhs) and not check_prop(m, w, s.rhs)


@pytest.mark.parametrize("seq", [
    "<1>p |- <0>p",
    "<1>p & <0>q |- <1>(p & <0>q)",
    # monotonicity then introspection: <1>p |- <1>(p & <0>p) |- <0><0>p
    "<1>p |- <0><0>p",
])
def test_polymodal_derivable_has_no_countermodel(seq):
    s = parse_sequent(seq, mode=Mode.POLY)
    assert countermodel_search_poly(s, 3) is None


def test_polymodal_frames_validate():
    for frame in polymodal_frames(2, 1):
        PropModel(2, dict(enumerate(frame)), {}).validate(irreflexive=False, polymodal=True)


# -- frames -----------------------------------------------------------------------------

def test_strict_order_counts():
    # labelled strict partial orders on 1..4 points
    assert [len(strict_orders(n)) for n in range(1, 5)] == [1, 3, 19, 219]


def test_tree_shape_counts():
    # rooted unlabelled trees, OEIS A000081
    assert [sum(1 for t in tree_shapes(6) if len(t) == k) for k in range(1, 7)] == [1, 1, 2, 4, 9, 20]


def test_tree_bank_agrees_with_direct_evaluation():
    bank = TreeModelBank(("p", "q"), 4)
    phi = F("<>(p & <>q)")
    bits = bank.bits(phi)
    for i in range(0, bank.size, 7):
        m = bank.model(i)
        assert bool(bits >> i & 1) == check_prop(m, 0, phi)


# -- random sheaves and JSON ------------------------------------------------------------

SIG = Signature({"P": 1, "S": 2}, frozenset({"c0", "c1"}))


def test_random_sheaf_is_deterministic():
    assert model_to_json(random_sheaf(SIG, 11)) == model_to_json(random_sheaf(SIG, 11))


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.integers(1, 4), st.booleans())
def test_random_sheaf_is_well_formed(seed, worlds, constant):
    m = random_sheaf(SIG, seed, worlds=worlds, constant_domain=constant)
    m.validate(transitive=True, irreflexive=True)
    if constant:
        assert m.is_constant_domain
        assert all(img == tuple(range(len(img))) for img in m.eta.values())


@settings(max_examples=60, deadline=None)
@given(st.integers(0, 10**6), st.booleans())
def test_json_round_trip(seed, constant):
    m = random_sheaf(SIG, seed, worlds=4, constant_domain=constant)
    back = model_from_json(model_to_json(m), transitive=True, irreflexive=True)
    assert model_to_json(back) == model_to_json(m)
    for f in ["A x0. <>P(x0)", "<>S(c0, c1)", "<> A x0. A x1. S(x0, x1)"]:
        assert valid(back, F(f)) == valid(m, F(f))


def test_eta_composition_violation_rejected():
    doc = {"worlds": 3, "R": [[0, 1], [1, 2], [0, 2]], "domains": [2, 2, 2],
           "eta": {"0,1": [1, 0], "1,2": [1, 0], "0,2": [1, 0]}, "interp": {}}
    with pytest.raises(ModelError) as exc:
        model_from_json(json.dumps(doc))
    assert exc.value.clause == "v"
    assert "clause (v)" in str(exc.value)


def test_reflexive_eta_must_be_identity():
    # a constant map composes with itself, so only the identity clause fails
    doc = {"worlds": 1, "R": [[0, 0]], "domains": [2], "eta": {"0,0": [0, 0]}, "interp": {}}
    with pytest.raises(ModelError) as exc:
        model_from_json(json.dumps(doc))
    assert exc.value.clause == "vi"


def test_constants_must_be_concordant():
    doc = {"worlds": 2, "R": [[0, 1]], "domains": [2, 2], "eta": {"0,1": [0, 1]},
           "constants": {"c0": {"0": 0, "1": 1}}, "interp": {}}
    with pytest.raises(ModelError) as exc:
        model_from_json(json.dumps(doc))
    assert exc.value.clause == "concordance"


def test_prop_model_json_round_trip():
    m = PropModel.of(3, [(0, 1), (0, 2)], {"p": [1], "q": [0, 2]}, higher={1: [(0, 2)]})
    back = prop_model_from_json(model_to_json(m))
    assert back == m


def test_prop_and_sheaf_truth_agree():
    m = PropModel(3, {0: tree_relation((0, 0, 1))}, {"p": frozenset({2}), "q": frozenset({1})})
    sheaf = as_sheaf(m)
    for phi in all_formulas(("p", "q"), 5):
        for w in range(3):
            assert check_prop(m, w, phi) == check_sheaf(sheaf, w, {}, phi)


@settings(max_examples=200, deadline=None)
@given(st.sampled_from(all_formulas(("p", "q"), 4)), st.sampled_from(all_formulas(("p", "q"), 4)))
def test_rc1_countermodels_only_for_underivable(a, b):
    s = Sequent(a, b)
    if countermodel_search(s, 2) is not None:
        assert not decide_rc1(s)
