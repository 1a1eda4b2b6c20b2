"""Command line front end: ``dgl <subcommand> ...``.

Exit codes: 0 success or true, 1 false or rejected, 2 usage or format
error, 3 search bounds reached without a certificate.
"""
import argparse
import json
import random
import sys

from . import formula as F
from .errors import DGLError, ModelError, QuasimodelError, StateError
from .model import SCHEMES, axiom_instance, evaluate, is_valid, random_formula, random_model, \
    scheme_variables, validate_model
from .quasimodel import Lasso, extend_to_lasso, lasso_coherence, neighbourhood_member, \
    validate_quasimodel
from .search import SearchBounds, sat_search
from .simformula import sim_formula
from .states import enumerate_types, simulates, state_from_document, state_of_point

OK, FALSE, USAGE, BOUNDS = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _load(path):
    try:
        if path == "-":
            return json.load(sys.stdin)
        if path.lstrip().startswith("{"):
            return json.loads(path)
        with open(path, encoding="utf-8") as fh:
            return json.load(fh)
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read {path}: {exc}") from None


def _emit(args, doc, text):
    if args.json:
        print(json.dumps(doc, indent=2, ensure_ascii=False))
    elif text:
        print(text)


def _formula(text):
    try:
        return F.parse(text)
    except F.FormulaSyntaxError as exc:
        raise UsageError(str(exc)) from None


def cmd_parse(args):
    f = _formula(args.formula)
    _emit(args, {"formula": F.to_string(f), "primitive": F.to_string(f, sugar=False),
                 "ast": F.show(f)}, F.show(f))
    return OK


def cmd_closure(args):
    sigma = F.closure_pm(_formula(args.formula))
    members = [str(g) for g in sigma.formulas]
    _emit(args, {"closure": members, "size": len(members)}, "\n".join(members))
    return OK


def cmd_types(args):
    sigma = F.closure_pm(_formula(args.formula))
    types = enumerate_types(sigma, args.limit)
    docs = [[str(g) for g in t.formulas()] for t in types]
    _emit(args, {"types": docs, "count": len(docs)},
          "\n".join("{" + ", ".join(d) + "}" for d in docs))
    return OK


def cmd_check_model(args):
    try:
        m = validate_model(_load(args.model))
    except ModelError as exc:
        _emit(args, {"valid": False, "error": exc.kind, "message": str(exc)}, f"rejected: {exc}")
        return FALSE
    _emit(args, {"valid": True, "points": len(m)}, f"ok: {len(m)} points")
    return OK


def _model(args):
    try:
        return validate_model(_load(args.model))
    except ModelError as exc:
        raise UsageError(f"invalid model: {exc}") from None


def cmd_valid(args):
    m = _model(args)
    f = _formula(args.formula)
    truth = evaluate(m, f)
    fails = sorted(set(m.points) - truth.points)
    ok = is_valid(m, f)
    _emit(args, {"valid": ok, "counterexamples": fails},
          "valid" if ok else "not valid; fails at " + ", ".join(fails))
    return OK if ok else FALSE


def cmd_fuzz(args):
    rng = random.Random(args.seed)
    names = sorted(SCHEMES)
    failures = []
    for k in range(args.trials):
        m = random_model(rng, args.max_points)
        scheme = rng.choice(names)
        subst = {v: random_formula(rng, args.depth) for v in scheme_variables(scheme)}
        inst = axiom_instance(scheme, subst)
        if not is_valid(m, inst):
            failures.append({"trial": k, "scheme": scheme, "instance": str(inst),
                             "model": m.to_document()})
    _emit(args, {"trials": args.trials, "failures": failures},
          f"{args.trials} trials, {len(failures)} failures")
    return OK if not failures else FALSE


def _state(path):
    try:
        return state_from_document(_load(path))
    except (StateError, F.FormulaSyntaxError) as exc:
        raise UsageError(f"invalid state: {exc}") from None


def cmd_simformula(args):
    w = _state(args.state)
    f = sim_formula(w)
    try:
        text = F.to_string(f, max_size=args.max_size)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    _emit(args, {"formula": text, "dag_size": F.dag_size(f)}, text)
    return OK


def cmd_simcheck(args):
    v, w = _state(args.left), _state(args.right)
    if v.sigma is not w.sigma:
        raise UsageError("the two states use different closures")
    ok = simulates(v, w)
    _emit(args, {"simulates": ok}, "simulates" if ok else "does not simulate")
    return OK if ok else FALSE


def cmd_state_of(args):
    m = _model(args)
    if args.point not in m.index:
        raise UsageError(f"unknown point {args.point!r}")
    sigma = F.closure_of([_formula(s) for s in args.formula])
    w = state_of_point(m, args.point, sigma)
    doc = w.to_document()
    print(json.dumps(doc, indent=2, ensure_ascii=False))
    return OK


def _quasimodel(path):
    try:
        return validate_quasimodel(_load(path))
    except QuasimodelError as exc:
        if exc.kind == "format":
            raise UsageError(str(exc)) from None
        raise


def cmd_check_quasimodel(args):
    try:
        q = _quasimodel(args.quasimodel)
    except QuasimodelError as exc:
        _emit(args, {"valid": False, "error": exc.kind, "message": str(exc),
                     "witnesses": list(exc.witnesses)}, f"rejected: {exc}")
        return FALSE
    _emit(args, {"valid": True, "points": len(q)}, f"ok: {len(q)} points")
    return OK


def cmd_unwind(args):
    q = _quasimodel(args.quasimodel)
    prefix = [p for p in (args.prefix or "").split(",") if p]
    for p in prefix + ([args.start] if args.start else []):
        if p not in q.index:
            raise UsageError(f"unknown point {p!r}")
    if not prefix and not args.start:
        raise UsageError("give --start or --prefix")
    try:
        lasso = extend_to_lasso(q, prefix, args.start)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    doc = lasso.to_document()
    doc["coherent"] = bool(lasso_coherence(q, lasso))
    print(json.dumps(doc, ensure_ascii=False))
    return OK


def _lasso(q, text):
    try:
        lasso = Lasso.from_document(_load(text))
    except (KeyError, ValueError, TypeError) as exc:
        raise UsageError(f"invalid lasso: {exc}") from None
    for p in lasso.stem + lasso.loop:
        if p not in q.index:
            raise UsageError(f"unknown point {p!r}")
    return lasso


def cmd_neighbourhood(args):
    q = _quasimodel(args.quasimodel)
    v, w = _lasso(q, args.v), _lasso(q, args.w)
    ok = neighbourhood_member(q, v, args.m, w)
    _emit(args, {"member": ok}, "member" if ok else "not a member")
    return OK if ok else FALSE


def cmd_sat(args):
    f = _formula(args.formula)
    bounds = SearchBounds(args.max_norm, args.max_states, args.max_path, args.seed, args.threads)
    out = sat_search(f, bounds)
    doc = out.to_document()
    if out.sat and args.certificate:
        with open(args.certificate, "w", encoding="utf-8") as fh:
            json.dump(out.certificate.to_document(), fh, indent=2, ensure_ascii=False)
    if out.sat:
        text = f"SAT: certificate with {len(out.certificate)} points, witness {out.witness}"
    else:
        text = f"NO_WITHIN_BOUNDS (exhausted={str(out.exhausted).lower()})"
    _emit(args, doc, text)
    return OK if out.sat else BOUNDS


def _positive(text):
    n = int(text)
    if n < 1:
        raise argparse.ArgumentTypeError("must be positive")
    return n


def build_parser():
    p = argparse.ArgumentParser(prog="dgl", description=__doc__.splitlines()[0])
    p.add_argument("--json", action="store_true", help="machine-readable output")
    sub = p.add_subparsers(dest="command", required=True)

    def add(name, fn, help):
        sp = sub.add_parser(name, help=help)
        sp.add_argument("--json", action="store_true", default=argparse.SUPPRESS)
        sp.set_defaults(fn=fn)
        return sp

    sp = add("parse", cmd_parse, "print the syntax tree of a formula")
    sp.add_argument("-f", "--formula", required=True)
    sp = add("closure", cmd_closure, "list the closure of a formula")
    sp.add_argument("-f", "--formula", required=True)
    sp = add("types", cmd_types, "list the types over the closure of a formula")
    sp.add_argument("-f", "--formula", required=True)
    sp.add_argument("--limit", type=_positive, default=1 << 16)
    sp = add("check-model", cmd_check_model, "validate a model document")
    sp.add_argument("--model", required=True)
    sp = add("valid", cmd_valid, "decide validity of a formula on a model")
    sp.add_argument("--model", required=True)
    sp.add_argument("-f", "--formula", required=True)
    sp = add("fuzz-axioms", cmd_fuzz, "check random axiom instances on random models")
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--trials", type=_positive, default=1000)
    sp.add_argument("--max-points", type=_positive, default=5)
    sp.add_argument("--depth", type=_positive, default=3)
    sp = add("simformula", cmd_simformula, "print the simulation formula of a state")
    sp.add_argument("--state", required=True)
    sp.add_argument("--max-size", type=_positive, default=20000)
    sp = add("simcheck", cmd_simcheck, "decide whether one state simulates another")
    sp.add_argument("--left", required=True)
    sp.add_argument("--right", required=True)
    sp = add("state-of", cmd_state_of, "extract the state of a model point")
    sp.add_argument("--model", required=True)
    sp.add_argument("--point", required=True)
    sp.add_argument("-f", "--formula", required=True, action="append",
                    help="closure generator (repeatable)")
    sp = add("check-quasimodel", cmd_check_quasimodel, "validate a quasimodel document")
    sp.add_argument("--quasimodel", required=True)
    sp = add("unwind", cmd_unwind, "extend a path to a realising lasso")
    sp.add_argument("--quasimodel", required=True)
    sp.add_argument("--start")
    sp.add_argument("--prefix", help="comma separated point names")
    sp = add("neighbourhood", cmd_neighbourhood, "decide lasso neighbourhood membership")
    sp.add_argument("--quasimodel", required=True)
    sp.add_argument("--v", required=True, help="lasso JSON (file or inline)")
    sp.add_argument("--w", required=True, help="lasso JSON (file or inline)")
    sp.add_argument("--m", type=int, required=True)
    sp = add("sat", cmd_sat, "bounded satisfiability search")
    sp.add_argument("-f", "--formula", required=True)
    sp.add_argument("--max-norm", type=_positive, default=4)
    sp.add_argument("--max-states", type=_positive, default=256)
    sp.add_argument("--max-path", type=_positive, default=16)
    sp.add_argument("--seed", type=int, required=True)
    sp.add_argument("--threads", type=_positive, default=1)
    sp.add_argument("--certificate")
    return p


def run(argv=None):
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else OK
    try:
        return args.fn(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE
    except QuasimodelError as exc:
        print(f"rejected: {exc}", file=sys.stderr)
        return FALSE
    except (DGLError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return USAGE


def main():
    sys.exit(run())


if __name__ == "__main__":
    main()
