"""Command-line driver.

Exit codes: 0 success (or the property holds), 1 the property fails,
2 usage, parse or data errors.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import dsl
from .approximation import (PowerBudgetExceeded, SignatureError, compare_power,
                            is_global_approx, is_local_approx, is_pointwise_approx,
                            predictive_power)
from .cause import (CausalSituation, CauseError, CauseQuery, actual_causes, default_max_size,
                    is_weak_cause)
from .domain import Domain, DomainError
from .expr import ExpressionError
from .model import ModelError, evaluate, intervene, model_dot
from .opm import audit, base_facts, datalog_closure
from .provenance import GraphError, graph_dot, to_causal_situation, validate
from .workspace import WorkspaceError, interp_for, load_semantics, load_situation_source, resolve

FAILED = 1
USAGE = 2

fmt = Domain.format_value


class CliError(Exception):
    pass


def _dump_json(out, doc) -> None:
    out.write(json.dumps(doc, indent=2, sort_keys=True, ensure_ascii=False) + "\n")


def _values(mapping) -> dict:
    return {k: fmt(v) for k, v in sorted(mapping.items())}


def _exo(model, text):
    if text is None:
        if model.context is None:
            raise CliError("no --exo given and the model declares no context")
        return dict(model.context)
    exo = dict(model.context or {})
    exo.update(dsl.parse_assignments(text, model.domain))
    unknown = sorted(set(exo) - set(model.exogenous))
    if unknown:
        raise CliError(f"--exo assigns non-exogenous variable(s) {', '.join(unknown)}")
    return exo


def _load_model(path):
    source, interp = load_situation_source(path)
    if interp is not None:
        raise CliError(f"{path} is a provenance graph; expected a .model file")
    return source


def _load_graph(path, interp=None):
    p = resolve(path)
    if p.suffix != ".json":
        raise CliError(f"{path} is not a provenance graph (.json)")
    return dsl.load_graph_file(p), p


# -- subcommands ---------------------------------------------------------

def cmd_eval(args, out) -> int:
    model = _load_model(args.model)
    values = evaluate(model, _exo(model, args.exo))
    if args.json:
        _dump_json(out, {"values": _values(values)})
    else:
        for name, value in sorted(values.items()):
            out.write(f"{name} = {fmt(value)}\n")
    return 0


def cmd_intervene(args, out) -> int:
    model = _load_model(args.model)
    assignments = dsl.parse_assignments(args.set, model.domain)
    if not assignments:
        raise CliError("--set needs at least one assignment")
    try:
        changed = intervene(model, *assignments.items())
    except ModelError as err:
        raise CliError(str(err)) from None
    values = evaluate(changed, _exo(model, args.exo))
    if args.json:
        _dump_json(out, {"intervention": _values(assignments), "values": _values(values)})
    else:
        out.write(f"intervention: {dsl.values_by_name(assignments)}\n")
        for name, value in sorted(values.items()):
            out.write(f"{name} = {fmt(value)}\n")
    return 0


def _situation(args) -> CausalSituation:
    source, interp = load_situation_source(args.source, args.interp)
    if interp is not None:
        if args.exo:
            raise CliError("--exo applies to models; a graph's situation comes from its labels")
        return to_causal_situation(source, interp, proxy_inputs=not args.no_proxies)
    return CausalSituation.from_exo(source, _exo(source, args.exo))


def cmd_cause(args, out) -> int:
    sit = _situation(args)
    (y, yv), = _one_effect(args.effect, sit)
    if args.cause:
        cause = dsl.parse_assignments(args.cause, sit.model.domain)
        found = is_weak_cause(sit, CauseQuery.of(cause, (y, yv)))
        if args.json:
            _dump_json(out, {"weak_cause": found.as_dict() if found else None})
        elif found:
            out.write(found.describe() + "\n")
        else:
            out.write(f"{{{dsl.values_by_name(cause)}}} is not a weak cause of {y}={fmt(yv)}\n")
        return 0 if found else FAILED
    max_size = args.max_size if args.max_size is not None else default_max_size()
    causes = actual_causes(sit, (y, yv), max_size)
    if args.json:
        _dump_json(out, {"effect": {y: fmt(yv)}, "max_size": max_size,
                         "actual_causes": [c.as_dict() for c in causes]})
        return 0
    out.write(f"actual causes of {y}={fmt(yv)} (max size {max_size}): {len(causes)}\n")
    for c in causes:
        out.write(f"  {c.describe()}\n")
    return 0


def _one_effect(text, sit):
    effect = dsl.parse_assignments(text, sit.model.domain)
    if len(effect) != 1:
        raise CliError("--effect takes exactly one Y=v")
    (y, yv), = effect.items()
    if y not in sit.model.endogenous:
        raise CliError(f"effect {y} is not an endogenous variable")
    if sit.sigma[y] != yv:
        raise CliError(f"{y}={fmt(yv)} does not hold in the situation ({y}={fmt(sit.sigma[y])})")
    return [(y, yv)]


def cmd_infer(args, out) -> int:
    g, _ = _load_graph(args.graph)
    closure = datalog_closure(base_facts(g))
    if args.json:
        _dump_json(out, {"facts": [[f.relation, f.subject, f.object] for f in sorted(closure, key=str)]})
        return 0
    if not args.derivations:
        out.write(closure.dump())
        return 0
    for fact in sorted(closure, key=str):
        how = closure.derivations[fact]
        why = "base" if how is None else f"{how.rule}: " + ", ".join(map(str, how.premises))
        out.write(f"{fact}    # {why}\n")
    return 0


def cmd_audit(args, out) -> int:
    g, path = _load_graph(args.graph)
    interp = dsl.load_interp_file(interp_for(path, args.interp))
    report = audit(g, interp, args.max_size)
    out.write(report.to_json() if args.json else report.text())
    return 0 if report.clean else FAILED


def cmd_power(args, out) -> int:
    P, f = load_semantics(args.semantics, args.target, args.causal, args.result)
    rel = predictive_power(P, f, budget=args.budget)
    other = None
    if args.compare:
        P2, f2 = load_semantics(args.compare, args.target, args.causal, args.result)
        other = compare_power(rel, predictive_power(P2, f2, budget=args.budget))
    if args.json:
        doc = {"mode": rel.mode, "inputs": list(rel.inputs), "points": len(rel.space),
               "related": int(rel.matrix.sum()), "reflexive": rel.reflexive, "total": rel.total,
               "density": round(rel.density, 6)}
        if args.dump:
            doc["pairs"] = [[[fmt(v) for v in a], [fmt(v) for v in b]] for a, b in rel.pairs()]
        if other is not None:
            doc["compare"] = other
        _dump_json(out, doc)
        return 0
    out.write(rel.summary())
    if other is not None:
        out.write(f"compared with {Path(args.compare).name}: {other}\n")
    if args.dump:
        out.write(rel.dump())
    return 0


def cmd_check(args, out) -> int:
    causal = args.causal or args.grade == "local"
    P, f = load_semantics(args.semantics, args.target, causal, args.result)
    if args.grade == "pointwise":
        res = is_pointwise_approx(P, f)
    elif args.grade == "local":
        res = is_local_approx(P, f)
    else:
        res = is_global_approx(P, f)
    mode = "causal" if causal else "functional"
    if args.json:
        cx = res.counterexample
        doc = {"grade": args.grade, "mode": mode, "holds": res.holds, "counterexample": None}
        if cx is not None:
            doc["counterexample"] = {"u": [fmt(v) for v in cx.u], "u_prime": [fmt(v) for v in cx.u_prime],
                                     "tau": {n: fmt(v) for n, v in cx.tau},
                                     "description": cx.describe(P.inputs)}
        _dump_json(out, doc)
    elif res.holds:
        out.write(f"{args.grade} approximation ({mode}): holds\n")
    else:
        out.write(f"{args.grade} approximation ({mode}): fails\n")
        out.write(f"counterexample: {res.counterexample.describe(P.inputs)}\n")
    return 0 if res.holds else FAILED


def cmd_validate(args, out) -> int:
    g, path = _load_graph(args.graph)
    interp = None
    if args.interp or path.with_suffix(".interp").exists():
        interp = dsl.load_interp_file(interp_for(path, args.interp))
    rep = validate(g, interp)
    if args.json:
        doc = {flag: getattr(rep, flag) for flag in rep.FLAGS}
        doc["diagnostics"] = list(rep.diagnostics)
        _dump_json(out, doc)
    else:
        for flag in rep.FLAGS:
            out.write(f"{flag}: {'yes' if getattr(rep, flag) else 'no'}\n")
        for d in rep.diagnostics:
            out.write(f"  {d}\n")
    return 0 if rep.ok else FAILED


def cmd_export_dot(args, out) -> int:
    p = resolve(args.source)
    if p.suffix == ".json":
        out.write(graph_dot(dsl.load_graph_file(p), p.stem))
    else:
        out.write(model_dot(dsl.load_model_file(p), p.stem))
    return 0


# -- argument parsing ----------------------------------------------------

def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--json", action="store_true", help="machine-readable output")
    common.add_argument("--seed", type=int, help="accepted and ignored; every algorithm is deterministic")

    ap = argparse.ArgumentParser(prog="causeway", parents=[common],
                                 description="Provenance graphs read as causal models.")
    sub = ap.add_subparsers(dest="command", required=True, metavar="command")

    def add(name, fn, help_):
        p = sub.add_parser(name, parents=[common], help=help_, description=help_)
        p.set_defaults(func=fn)
        return p

    p = add("eval", cmd_eval, "evaluate a model")
    p.add_argument("model")
    p.add_argument("--exo", help="exogenous values, e.g. uA=1,uB=0 (default: the model's context)")

    p = add("intervene", cmd_intervene, "evaluate a model after interventions")
    p.add_argument("model")
    p.add_argument("--set", required=True, help="interventions, e.g. X=0,Y=1 (applied left to right)")
    p.add_argument("--exo")

    p = add("cause", cmd_cause, "actual causes of an effect")
    p.add_argument("source", metavar="model-or-graph")
    p.add_argument("--effect", required=True, help="Y=v")
    p.add_argument("--cause", help="test one candidate weak cause instead, e.g. A=1,B=1")
    p.add_argument("--max-size", type=int)
    p.add_argument("--exo")
    p.add_argument("--interp", help="interpretation for a graph (default: <graph>.interp)")
    p.add_argument("--no-proxies", action="store_true",
                   help="keep graph inputs exogenous (they then cannot be causes)")

    p = add("infer", cmd_infer, "Datalog closure of a graph's OPM edges")
    p.add_argument("graph")
    p.add_argument("--derivations", action="store_true", help="show the rule instance behind each fact")

    p = add("audit", cmd_audit, "compare inferred edges with their causal reading")
    p.add_argument("graph")
    p.add_argument("--interp")
    p.add_argument("--max-size", type=int)

    for name, fn, help_ in (("power", cmd_power, "predictive power of a semantics"),
                            ("check", cmd_check, "check an approximation grade")):
        p = add(name, fn, help_)
        p.add_argument("semantics")
        p.add_argument("--target", help="model or .fn table (default: the semantics' target)")
        p.add_argument("--causal", action="store_true", help="compare causal functions, all interventions")
        p.add_argument("--result", help="result variable of a model target (functional mode)")
        if name == "power":
            p.add_argument("--dump", action="store_true", help="list every related pair")
            p.add_argument("--compare", metavar="SEMANTICS", help="order against a second semantics")
            p.add_argument("--budget", type=int, default=10**6, help="maximum number of input pairs")
        else:
            p.add_argument("--grade", required=True, choices=("pointwise", "local", "global"))

    p = add("validate", cmd_validate, "structural checks on a graph")
    p.add_argument("graph")
    p.add_argument("--interp")

    p = add("export-dot", cmd_export_dot, "Graphviz rendering of a graph or model")
    p.add_argument("source", metavar="graph-or-model")
    return ap


ERRORS = (CliError, dsl.ParseError, WorkspaceError, GraphError, ModelError, CauseError,
          SignatureError, DomainError, ExpressionError, PowerBudgetExceeded, OSError)


def run_cli(argv=None, out=None, err=None) -> int:
    out = out or sys.stdout
    err = err or sys.stderr
    ap = build_parser()
    try:
        args = ap.parse_args(argv)
    except SystemExit as exc:
        return USAGE if exc.code else 0
    try:
        return args.func(args, out)
    except ERRORS as exc:
        err.write(f"causeway {args.command}: error: {exc}\n")
        return USAGE


def main(argv=None) -> None:
    sys.exit(run_cli(argv))


if __name__ == "__main__":
    main()
