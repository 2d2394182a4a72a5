"""Command-line interface.

Exit codes: 0 positive verdict, 1 negative verdict, 2 inconclusive,
64 unparsable input, 65 invalid model file, 66 missing realization entry,
67 any other data error.
"""

from __future__ import annotations

import argparse
import json
import sys
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from . import arith, calculus, kripke, realize, rewriter
from .formula import Mode, ParseError, Sequent, SignatureError, free_vars, modal_depth, parse, parse_sequent, Var

EXIT_OK, EXIT_NO, EXIT_UNKNOWN = 0, 1, 2
EXIT_PARSE, EXIT_MODEL, EXIT_REALIZATION, EXIT_DATA = 64, 65, 66, 67

LOGICS = {"rc1": calculus.Logic.RC1, "rcw": calculus.Logic.RCW, "qrc1": calculus.Logic.QRC1}


@dataclass
class Config:
    logic: str = "qrc1"
    budget: int = calculus.DEFAULT_BUDGET
    worlds: int = 3
    timeout: Optional[float] = 30.0
    seed: int = 0
    fmt: str = "text"

    @classmethod
    def from_args(cls, a) -> "Config":
        return cls(**{k: getattr(a, k) for k in ("logic", "budget", "worlds", "timeout", "seed", "fmt")
                      if hasattr(a, k)})

    def validate(self) -> None:
        if self.budget < 1 or self.worlds < 1:
            raise ValueError("budgets must be at least 1")
        if self.timeout is not None and self.timeout <= 0:
            raise ValueError("the wall-clock cap must be positive")


class Output:
    """Collects the verdict and extra fields, then prints them in one go."""

    def __init__(self, fmt: str):
        self.fmt = fmt
        self.lines: list = []
        self.doc: dict = {"verdict": None, "witness": None, "trace": None}

    def verdict(self, v: str):
        self.doc["verdict"] = v
        self.lines.append(v)

    def add(self, key: str, value, line: Optional[str] = None):
        self.doc[key] = value
        if line is not None:
            self.lines.append(line)

    def flush(self):
        if self.fmt == "json":
            print(json.dumps(self.doc, sort_keys=True, indent=2))
        else:
            print("\n".join(self.lines))


def _mode(logic: str) -> Mode:
    return {"rc1": Mode.PROP, "rcw": Mode.POLY, "qrc1": Mode.QUANT}[logic]


def _witness_doc(model, world: int, assignment: dict) -> dict:
    return {"model": json.loads(kripke.model_to_json(model)), "world": world,
            "assignment": {str(k): v for k, v in sorted(assignment.items(), key=lambda kv: kv[0].index)}}


def _emit_witness(out: Output, model, world: int, assignment: dict):
    doc = _witness_doc(model, world, assignment)
    out.add("witness", doc, f"world {world}" + (f" assignment {doc['assignment']}" if assignment else ""))
    out.lines.append(kripke.model_to_json(model))


def cmd_prove(a, out: Output) -> int:
    s = parse_sequent(a.sequent, mode=_mode(a.logic))
    logic = LOGICS[a.logic]
    if logic is calculus.Logic.QRC1:
        cfg = calculus.QRC1Config(max_rounds=a.worlds, timeout=a.timeout)
        try:
            res = calculus.decide_qrc1(s, cfg)
        except (calculus.RoundLimit, calculus.SearchTimeout) as e:
            out.verdict("BUDGET-EXHAUSTED")
            out.add("reason", str(e), str(e))
            return EXIT_UNKNOWN
        if isinstance(res, calculus.Derivable):
            out.verdict("DERIVABLE")
            out.add("trace", calculus.serialize(res.derivation), calculus.serialize(res.derivation))
            return EXIT_OK
        out.verdict("UNDERIVABLE")
        _emit_witness(out, res.witness.model, res.witness.world, res.witness.assignment)
        return EXIT_NO
    if logic is calculus.Logic.RC1 and not calculus.decide_rc1(s):
        w = kripke.countermodel_search(s, max(a.worlds, modal_depth(s.lhs) + 2))
        out.verdict("UNDERIVABLE")
        if w is not None:
            _emit_witness(out, w.model, w.world, w.assignment)
        return EXIT_NO
    try:
        d = calculus.prove(s, logic, a.budget)
    except calculus.ProofNotFound as e:
        if logic is calculus.Logic.RCW:
            found = kripke.countermodel_search_poly(s, a.worlds)
            if found is not None:
                m, w = found
                out.verdict("UNDERIVABLE")
                out.add("witness", {"model": json.loads(kripke.model_to_json(m)), "world": w}, f"world {w}")
                out.lines.append(kripke.model_to_json(m))
                return EXIT_NO
        out.verdict("BUDGET-EXHAUSTED")
        out.add("reason", str(e), str(e))
        return EXIT_UNKNOWN
    out.verdict("DERIVABLE")
    out.add("trace", calculus.serialize(d), calculus.serialize(d))
    return EXIT_OK


def _parse_assign(spec: Optional[str]) -> Optional[dict]:
    if not spec:
        return None
    g = {}
    for item in spec.split(","):
        k, _, v = item.partition("=")
        k = k.strip()
        if not (k.startswith("x") and k[1:].isdigit()):
            raise ParseError(f"bad assignment key {k!r}", 0, spec)
        g[Var(int(k[1:]))] = int(v)
    return g


def cmd_check(a, out: Output) -> int:
    model = kripke.model_from_json(Path(a.model).read_text())
    phi = parse(a.formula)
    if isinstance(phi, Sequent):
        raise ParseError("check expects a formula, not a sequent", 0, a.formula)
    g = _parse_assign(a.assign)
    if g is None and free_vars(phi):
        ok = kripke.satisfied(model, a.world, phi)
    else:
        ok = kripke.check_sheaf(model, a.world, g or {}, phi)
    out.verdict("TRUE" if ok else "FALSE")
    return EXIT_OK if ok else EXIT_NO


def cmd_realize(a, out: Output) -> int:
    s = parse_sequent(a.sequent)
    theory = arith.Named(a.theory)
    if a.style == "solovay":
        if not a.model:
            raise ValueError("--model is required for the solovay style")
        model = kripke.model_from_json(Path(a.model).read_text())
        try:
            ctx = realize.SolovayContext(model)
        except arith.ShapeError:
            ctx = realize.SolovayContext.with_root(model)
        translate = lambda f: realize.extend_solovay(ctx, theory, f)
        lhs, rhs = translate(s.lhs), translate(s.rhs)
        if a.expand:
            lhs, rhs = realize.expand_all(lhs, ctx.m), realize.expand_all(rhs, ctx.m)
        statement = realize.emit_qpl_statement(realize.solovay_realization(ctx), theory, s)
        out.add("guarded", realize.is_guarded(lhs, ctx.m) and realize.is_guarded(rhs, ctx.m))
    else:
        if not a.realization:
            raise ValueError("--realization is required for the finitary and infinitary styles")
        r = realize.load_realization(Path(a.realization).read_text())
        if a.style == "finitary":
            translate = lambda f: realize.extend_finitary(r, theory, f)
            lhs, rhs = translate(s.lhs), translate(s.rhs)
            statement = realize.emit_qpl_statement(r, theory, s)
        else:
            ri = realize.lift_finitary_to_infinitary(r)
            lhs_ax = realize.extend_infinitary(ri, theory, s.lhs)
            rhs_ax = realize.extend_infinitary(ri, theory, s.rhs)
            statement = realize.emit_rl_statement(ri, theory, s)
            out.verdict("REALIZED")
            out.add("lhs", arith.ax_text(lhs_ax), f"lhs: {arith.ax_text(lhs_ax)}")
            out.add("rhs", arith.ax_text(rhs_ax), f"rhs: {arith.ax_text(rhs_ax)}")
            out.add("statement", arith.text(statement), f"statement: {arith.text(statement)}")
            if realize.quotes_mention_u(lhs_ax) or realize.quotes_mention_u(rhs_ax):
                out.add("note", "quoted formulas mention the axiom variable u",
                        "note: quoted formulas mention the axiom variable u")
            return EXIT_OK
    out.verdict("REALIZED")
    out.add("lhs", arith.text(lhs), f"lhs: {arith.text(lhs)}")
    out.add("rhs", arith.text(rhs), f"rhs: {arith.text(rhs)}")
    out.add("statement", arith.text(statement), f"statement: {arith.text(statement)}")
    cert = []
    for side in (s.lhs, s.rhs):
        for f, c in realize.certificate(side, translate):
            cert.append([str(f), str(c)])
    out.add("certificate", cert)
    out.lines.extend(f"class {c}: {f}" for f, c in cert)
    return EXIT_OK


def cmd_classify(a, out: Output) -> int:
    phi = arith.parse_arith(a.formula)
    c = arith.classify_ha(phi) if a.ha else arith.classify(phi)
    out.verdict(str(c))
    return EXIT_OK


def _path(spec: str) -> tuple:
    if spec in ("", "root"):
        return ()
    return tuple(int(i) for i in spec.split("."))


def cmd_rewrite(a, out: Output) -> int:
    start = arith.parse_arith(a.formula)
    if a.goal:
        goal = arith.parse_arith(a.goal)
        try:
            trace = rewriter.derive_chain(start, goal, bound=a.bound)
        except rewriter.ChainNotFound as e:
            out.verdict("NOT-FOUND")
            out.add("reason", str(e), str(e))
            return EXIT_UNKNOWN
    else:
        if not a.rule:
            raise ValueError("give --rule or --goal")
        if a.rule not in rewriter.RULES_BY_NAME:
            raise ValueError(f"unknown rule {a.rule}")
        d = rewriter.BACKWARD if a.reverse else rewriter.FORWARD
        try:
            steps = rewriter.step(a.rule, start, _path(a.path), d)
        except (rewriter.NoMatch, rewriter.SideConditionError) as e:
            out.verdict("REJECTED")
            out.add("reason", str(e), str(e))
            return EXIT_NO
        trace = rewriter.Trace(start, tuple(steps))
    out.verdict("REWRITTEN")
    out.add("trace", trace.to_text(), trace.to_text())
    return EXIT_OK


def cmd_depth(a, out: Output) -> int:
    obj = parse(a.input)
    if isinstance(obj, Sequent):
        dl, dr = modal_depth(obj.lhs), modal_depth(obj.rhs)
        ok = dl >= dr
        out.verdict("MONOTONE" if ok else "INCREASES")
        out.add("depth", [dl, dr], f"lhs depth {dl}, rhs depth {dr}")
        return EXIT_OK if ok else EXIT_NO
    d = modal_depth(obj)
    out.verdict(str(d))
    out.add("depth", d)
    return EXIT_OK


def cmd_interpolate(a, out: Output) -> int:
    s = parse_sequent(a.sequent, mode=_mode(a.logic))
    cfg = calculus.QRC1Config(max_rounds=a.worlds, timeout=a.timeout)
    try:
        chi = calculus.interpolate(s, LOGICS[a.logic], cfg)
    except calculus.NotDerivable:
        out.verdict("NOT-DERIVABLE")
        return EXIT_NO
    except (calculus.RoundLimit, calculus.SearchTimeout) as e:
        out.verdict("BUDGET-EXHAUSTED")
        out.add("reason", str(e), str(e))
        return EXIT_UNKNOWN
    out.verdict("INTERPOLANT")
    out.add("interpolant", str(chi), str(chi))
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="rcbench", description="Strictly positive provability logic workbench")
    p.add_argument("--format", dest="fmt", choices=("text", "json"), default="text")
    p.add_argument("--seed", type=int, default=0)
    sub = p.add_subparsers(dest="command", required=True)

    def search_opts(q):
        q.add_argument("--logic", choices=sorted(LOGICS), default="qrc1")
        q.add_argument("--budget", type=int, default=calculus.DEFAULT_BUDGET)
        q.add_argument("--worlds", type=int, default=3, help="countermodel bound (rounds for qrc1)")
        q.add_argument("--timeout", type=float, default=30.0, help="wall-clock cap in seconds")

    q = sub.add_parser("prove", help="decide a sequent")
    search_opts(q)
    q.add_argument("sequent")
    q.set_defaults(func=cmd_prove)

    q = sub.add_parser("check", help="evaluate a formula in a model file")
    q.add_argument("--model", required=True)
    q.add_argument("--world", type=int, required=True)
    q.add_argument("--assign", help="e.g. x0=1,x1=0")
    q.add_argument("formula")
    q.set_defaults(func=cmd_check)

    q = sub.add_parser("realize", help="translate a sequent into arithmetic")
    q.add_argument("--style", choices=("finitary", "infinitary", "solovay"), required=True)
    q.add_argument("--model")
    q.add_argument("--realization")
    q.add_argument("--theory", default="HA")
    q.add_argument("--expand", action="store_true", help="expand guarded universal quantifiers (solovay)")
    q.add_argument("sequent")
    q.set_defaults(func=cmd_realize)

    q = sub.add_parser("classify", help="arithmetical complexity of a prefix formula")
    q.add_argument("--ha", action="store_true", help="use the intuitionistic classifier")
    q.add_argument("formula")
    q.set_defaults(func=cmd_classify)

    q = sub.add_parser("rewrite", help="apply a rule or search for a chain")
    q.add_argument("--rule")
    q.add_argument("--path", default="root")
    q.add_argument("--reverse", action="store_true")
    q.add_argument("--goal")
    q.add_argument("--bound", type=int, default=16)
    q.add_argument("formula")
    q.set_defaults(func=cmd_rewrite)

    q = sub.add_parser("depth", help="modal depth of a formula or both sides of a sequent")
    q.add_argument("input")
    q.set_defaults(func=cmd_depth)

    q = sub.add_parser("interpolate", help="interpolant of a derivable sequent")
    search_opts(q)
    q.add_argument("sequent")
    q.set_defaults(func=cmd_interpolate)
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        Config.from_args(args).validate()
    except ValueError as e:
        print(f"usage error: {e}", file=sys.stderr)
        return EXIT_PARSE
    out = Output(args.fmt)
    try:
        code = args.func(args, out)
    except (ParseError, arith.ArithParseError, SignatureError) as e:
        print(f"parse error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except kripke.ModelError as e:
        print(f"model error: {e}", file=sys.stderr)
        return EXIT_MODEL
    except realize.RealizationError as e:
        print(f"missing realization: {e.args[0]}", file=sys.stderr)
        return EXIT_REALIZATION
    except calculus.ModeError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_PARSE
    except (ValueError, KeyError, OSError) as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DATA
    out.flush()
    return code
