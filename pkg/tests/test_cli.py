import json

import pytest

from rcbench.cli import main


def run(capsys, *argv):
    code = main(list(argv))
    cap = capsys.readouterr()
    return code, cap.out, cap.err


@pytest.fixture
def split_model(tmp_path):
    doc = {"worlds": 3, "R": [[0, 1], [0, 2]], "constant": 2,
           "interp": {"P": {"1": [[0]], "2": [[1]]}}}
    path = tmp_path / "split.json"
    path.write_text(json.dumps(doc))
    return str(path)


# -- prove -----------------------------------------------------------------------------

def test_prove_derivable(capsys):
    code, out, _ = run(capsys, "prove", "--logic", "rc1", "<><>p |- <>p")
    assert code == 0
    assert out.splitlines()[0] == "DERIVABLE"
    assert "trans" in out


def test_prove_underivable_with_model(capsys, tmp_path):
    code, out, _ = run(capsys, "--format", "json", "prove", "A x0. <>P(x0) |- <> A x0. P(x0)")
    assert code == 1
    doc = json.loads(out)
    assert doc["verdict"] == "UNDERIVABLE"
    assert set(doc) >= {"verdict", "witness", "trace"}
    # the emitted countermodel re-verifies through the check command
    model = tmp_path / "cm.json"
    model.write_text(json.dumps(doc["witness"]["model"]))
    w = str(doc["witness"]["world"])
    assert run(capsys, "check", "--model", str(model), "--world", w, "A x0. <>P(x0)")[0] == 0
    assert run(capsys, "check", "--model", str(model), "--world", w, "<> A x0. P(x0)")[0] == 1


def test_prove_parse_error(capsys):
    code, _, err = run(capsys, "prove", "<>p |- (")
    assert code == 64
    assert "parse error" in err


def test_prove_budget_exhausted(capsys):
    code, out, _ = run(capsys, "prove", "--worlds", "1", "A x0. <>P(x0) |- <> A x0. P(x0)")
    assert code == 2
    assert out.startswith("BUDGET-EXHAUSTED")


def test_prove_rejects_zero_budget(capsys):
    assert run(capsys, "prove", "--budget", "0", "p |- p")[0] == 64


def test_prove_polymodal(capsys):
    assert run(capsys, "prove", "--logic", "rcw", "<1>p & <0>q |- <1>(p & <0>q)")[0] == 0
    code, out, _ = run(capsys, "prove", "--logic", "rcw", "<0>p |- <1>p")
    assert code == 1 and out.startswith("UNDERIVABLE")


def test_output_is_deterministic(capsys):
    a = run(capsys, "--format", "json", "prove", "A x0. <>P(x0) |- <> A x0. P(x0)")
    b = run(capsys, "--format", "json", "prove", "A x0. <>P(x0) |- <> A x0. P(x0)")
    assert a == b


# -- check --------------------------------------------------------------------------------

def test_check_examples(capsys, split_model):
    assert run(capsys, "check", "--model", split_model, "--world", "0", "A x0. <>P(x0)")[1].strip() == "TRUE"
    assert run(capsys, "check", "--model", split_model, "--world", "0", "<> A x0. P(x0)")[0] == 1
    assert run(capsys, "check", "--model", split_model, "--world", "2", "T")[0] == 0
    assert run(capsys, "check", "--model", split_model, "--world", "0", "--assign", "x0=1", "<>P(x0)")[0] == 0


def test_check_rejects_bad_model(capsys, tmp_path):
    doc = {"worlds": 3, "R": [[0, 1], [1, 2], [0, 2]], "domains": [2, 2, 2],
           "eta": {"0,1": [1, 0], "1,2": [1, 0], "0,2": [1, 0]}, "interp": {}}
    path = tmp_path / "bad.json"
    path.write_text(json.dumps(doc))
    code, _, err = run(capsys, "check", "--model", str(path), "--world", "0", "T")
    assert code == 65
    assert "clause (v)" in err


# -- realize --------------------------------------------------------------------------------

def test_realize_finitary(capsys, tmp_path):
    r = tmp_path / "r.json"
    r.write_text(json.dumps({"P": {"formula": "(pred G y0)", "arity": 1}}))
    code, out, _ = run(capsys, "--format", "json", "realize", "--style", "finitary", "--realization", str(r),
                       "--theory", "T", "A x0. <>P(x0) |- <>P(c0)")
    assert code == 0
    doc = json.loads(out)
    assert doc["statement"] == ("(forall z0 (imp (forall y0 (dia (named T) (pred G y0)))"
                                " (dia (named T) (pred G z0))))")
    assert doc["certificate"]


def test_realize_missing_entry(capsys, tmp_path):
    r = tmp_path / "r.json"
    r.write_text(json.dumps({"P": {"formula": "(pred G y0)", "arity": 1}}))
    code, _, _ = run(capsys, "realize", "--style", "finitary", "--realization", str(r), "Q(x0) |- T")
    assert code == 66


def test_realize_infinitary(capsys, tmp_path):
    r = tmp_path / "r.json"
    r.write_text(json.dumps({"p": "(eq (num 0) (num 1))"}))
    code, out, _ = run(capsys, "realize", "--style", "infinitary", "--realization", str(r), "<>p |- T")
    assert code == 0
    assert "forall-sent theta" in out


def test_realize_solovay(capsys, tmp_path):
    m = tmp_path / "m.json"
    m.write_text(json.dumps({"worlds": 2, "R": [[0, 1]], "constant": 1, "interp": {"S": {"1": [[0]]}}}))
    code, out, _ = run(capsys, "--format", "json", "realize", "--style", "solovay", "--model", str(m),
                       "--expand", "S(x0) |- T")
    assert code == 0
    doc = json.loads(out)
    assert doc["guarded"] is True


# -- classify, rewrite, depth, interpolate ---------------------------------------------------------

def test_classify(capsys):
    assert run(capsys, "classify", "(exists y (eq y (num 0)))")[1].strip() == "Sigma1"
    assert run(capsys, "classify", "(eq x")[0] == 64


def test_rewrite_rule_and_rejection(capsys):
    code, out, _ = run(capsys, "rewrite", "--rule", "R-FORALL-NEG", "(forall x (not (pred F x)))")
    assert code == 0 and "STEP 1: RULE R-FORALL-NEG @ root" in out
    code, out, _ = run(capsys, "rewrite", "--rule", "R-DN-DELTA",
                       "(not (not (exists s (forall t (pred F s t)))))")
    assert code == 1 and out.startswith("REJECTED")


def test_rewrite_chain(capsys):
    sig2 = "(exists s (forall t (pred F s t)))"
    code, out, _ = run(capsys, "rewrite", "--goal", f"(box (named PA) (not {sig2}))",
                       f"(box (named HA) (not {sig2}))")
    assert code == 0
    assert out.splitlines()[-1] == f"END: (box (named PA) (not {sig2}))"


def test_depth(capsys):
    assert run(capsys, "depth", "<>p & A x0. <><>P(x0)")[1].strip() == "2"
    assert run(capsys, "depth", "<>p |- <><>p")[0] == 1


def test_interpolate(capsys):
    code, out, _ = run(capsys, "interpolate", "A x0. P(x0) |- P(c0)")
    assert code == 0 and out.startswith("INTERPOLANT")
    assert run(capsys, "interpolate", "--logic", "rc1", "<>p |- <><>p")[0] == 1
