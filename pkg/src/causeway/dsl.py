"""Text formats: model DSL, interpretations, semantics specs, function tables, graph JSON.

Model DSL, one declaration per line (``#`` starts a comment)::

    domain bool | domain mod 7 | domain mod 7 with bottom
    exo Water Sugar U1
    var Mix := xor(and(Water, Sugar), U1)
    table Y (A B) { 0 0 -> 0 ; 0 1 -> 1 ; 1 0 -> 1 ; 1 1 -> 1 }
    context Water=1 Sugar=1 U1=0

Interpretations use ``process <name> (<param> ...) := <expr>`` or
``process <name> (<param> ...) table { ... }`` after a ``domain`` line.
Table bodies may span lines.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass
from typing import Mapping

from . import expr as ex
from .domain import ARITY, BOTTOM, Domain, DomainError
from .expr import Const, Op, Table, Var
from .model import CausalModel, CyclicModelError, ModelError
from .provenance import Interpretation, ProcessFunction, ProvenanceGraph


class ParseError(ValueError):
    def __init__(self, message: str, line: int = 0, column: int = 0, source: str | None = None):
        self.message = message
        self.line = line
        self.column = column
        self.source = source
        where = f"{source}:" if source else ""
        super().__init__(f"{where}{line}:{column}: {message}" if line else f"{where}{message}")


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r]+) | (?P<comment>\#[^\n]*) | (?P<nl>\n)
  | (?P<assign>:=) | (?P<arrow>->)
  | (?P<punct>[(){},;=])
  | (?P<bot>⊥)
  | (?P<int>\d+)
  | (?P<name>[A-Za-z_](?:[\w.']|-(?!>))*)
""", re.VERBOSE)


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    col: int


def tokenize(text: str, source: str | None = None) -> list:
    out, pos, line, line_start, depth = [], 0, 1, 0, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        col = pos - line_start + 1
        if kind == "nl":
            if depth == 0:
                out.append(Token("nl", "\n", line, col))
            line += 1
            line_start = m.end()
        elif kind not in ("ws", "comment"):
            tok = m.group()
            if kind == "punct":
                kind = tok
                depth += tok == "{"
                depth -= tok == "}"
            out.append(Token(kind, tok, line, col))
        pos = m.end()
    out.append(Token("nl", "\n", line, pos - line_start + 1))
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


class _Parser:
    def __init__(self, text: str, source: str | None = None):
        self.toks = tokenize(text, source)
        self.i = 0
        self.source = source
        self.domain: Domain | None = None

    def peek(self, offset=0) -> Token:
        return self.toks[self.i + offset]

    def next(self) -> Token:
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def error(self, message, tok: Token | None = None):
        tok = tok or self.peek()
        return ParseError(message, tok.line, tok.col, self.source)

    def expect(self, kind: str, what: str | None = None) -> Token:
        tok = self.next()
        if tok.kind != kind:
            got = "end of line" if tok.kind == "nl" else repr(tok.text)
            raise self.error(f"expected {what or kind}, got {got}", tok)
        return tok

    def accept(self, kind: str, text: str | None = None) -> Token | None:
        tok = self.peek()
        if tok.kind == kind and (text is None or tok.text == text):
            self.i += 1
            return tok
        return None

    def end_line(self):
        self.expect("nl", "end of line")

    def skip_blank(self):
        while self.accept("nl"):
            pass

    def keyword(self, *words) -> Token:
        tok = self.next()
        if tok.kind != "name" or tok.text not in words:
            raise self.error(f"expected {' or '.join(words)}", tok)
        return tok

    def parse_domain(self):
        tok = self.peek()
        if self.domain is not None:
            raise self.error("domain declared twice", tok)
        kind = self.keyword("bool", "mod")
        modulus = 2
        if kind.text == "mod":
            modulus = int(self.expect("int", "modulus").text)
        bottom = False
        if self.accept("name", "with"):
            self.keyword("bottom")
            bottom = True
        try:
            self.domain = Domain("bool" if kind.text == "bool" else "mod", modulus, bottom)
        except DomainError as err:
            raise self.error(str(err), tok) from None
        self.end_line()

    def dom(self) -> Domain:
        if self.domain is None:
            self.domain = Domain.boolean()
        return self.domain

    def value(self):
        tok = self.next()
        if tok.kind == "int":
            value = int(tok.text)
        elif tok.kind == "bot" or (tok.kind == "name" and tok.text == "bot"):
            value = BOTTOM
        else:
            raise self.error("expected a value", tok)
        if value not in self.dom():
            raise self.error(f"{tok.text} is not in {self.dom().describe()}", tok)
        return value

    def expression(self, refs: list):
        tok = self.peek()
        if tok.kind in ("int", "bot") or (tok.kind == "name" and tok.text == "bot"):
            return Const(self.value())
        name = self.expect("name", "expression")
        if not self.accept("("):
            refs.append((name.text, name))
            return Var(name.text)
        if name.text not in ARITY:
            raise self.error(f"unknown operator {name.text!r}", name)
        args = []
        if not self.accept(")"):
            while True:
                args.append(self.expression(refs))
                if self.accept(")"):
                    break
                self.expect(",", "',' or ')'")
        arity = ARITY[name.text]
        if (arity is None and not args) or (arity is not None and len(args) != arity):
            want = "at least 1" if arity is None else str(arity)
            raise self.error(f"{name.text} takes {want} argument(s), got {len(args)}", name)
        if name.text == "div" and not self.dom().bottom:
            raise self.error("div needs a domain 'with bottom'", name)
        return Op(name.text, tuple(args))

    def table_body(self, parents: tuple) -> Table:
        open_tok = self.expect("{", "'{'")
        rows = {}
        while not self.accept("}"):
            row_tok = self.peek()
            key = []
            if self.accept("("):
                while not self.accept(")"):
                    key.append(self.value())
                    self.accept(",")
            else:
                while self.peek().kind != "arrow":
                    key.append(self.value())
                    self.accept(",")
            self.expect("arrow", "'->'")
            out = self.value()
            if len(key) != len(parents):
                raise self.error(f"row has {len(key)} values for {len(parents)} parents", row_tok)
            if any(k is BOTTOM for k in key):
                raise self.error("table rows are keyed by ordinary values; ⊥ inputs give ⊥", row_tok)
            if tuple(key) in rows:
                raise self.error("duplicate table row", row_tok)
            rows[tuple(key)] = out
            if not self.accept(";") and self.peek().kind != "}":
                raise self.error("expected ';' or '}'")
        table = Table.from_mapping(parents, rows)
        try:
            ex.check(table, self.dom(), set(parents))
        except ex.ExpressionError as err:
            raise self.error(str(err), open_tok) from None
        return table

    def name_list(self, closing: str | None = None) -> list:
        names = []
        while True:
            tok = self.peek()
            if tok.kind == "name":
                names.append(self.next())
                self.accept(",")
            elif closing and tok.kind == closing:
                self.next()
                return names
            else:
                if closing:
                    raise self.error(f"expected a name or '{closing}'")
                return names


def parse_model(text: str, source: str | None = None) -> CausalModel:
    p = _Parser(text, source)
    exo: dict = {}
    defs: dict = {}   # name -> (expression, token)
    refs: list = []
    context = None
    while True:
        p.skip_blank()
        tok = p.peek()
        if tok.kind == "eof":
            break
        kw = p.keyword("domain", "exo", "var", "table", "context")
        if kw.text == "domain":
            if exo or defs:
                raise p.error("domain must come before variables", kw)
            p.parse_domain()
        elif kw.text == "exo":
            names = p.name_list()
            if not names:
                raise p.error("exo needs at least one name")
            for n in names:
                if n.text in exo or n.text in defs:
                    raise p.error(f"{n.text} declared twice", n)
                exo[n.text] = n
            p.end_line()
        elif kw.text == "var":
            name = p.expect("name", "variable name")
            if name.text in exo or name.text in defs:
                raise p.error(f"{name.text} declared twice", name)
            p.expect("assign", "':='")
            defs[name.text] = (p.expression(refs), name)
            p.end_line()
        elif kw.text == "table":
            name = p.expect("name", "variable name")
            if name.text in exo or name.text in defs:
                raise p.error(f"{name.text} declared twice", name)
            p.expect("(", "'('")
            parents = p.name_list(")")
            refs.extend((t.text, t) for t in parents)
            defs[name.text] = (p.table_body(tuple(t.text for t in parents)), name)
            p.end_line()
        else:
            if context is not None:
                raise p.error("context declared twice", kw)
            context = {}
            while p.peek().kind == "name":
                name = p.next()
                p.expect("=", "'='")
                context[name.text] = (p.value(), name)
                p.accept(",")
            p.end_line()
    known = set(exo) | set(defs)
    for name, tok in refs:
        if name not in known:
            raise p.error(f"unknown variable {name!r}", tok)
    if context is not None:
        for name, (_, tok) in context.items():
            if name not in exo:
                raise p.error(f"context assigns non-exogenous {name!r}", tok)
        missing = sorted(set(exo) - set(context))
        if missing:
            raise ParseError(f"context does not assign {', '.join(missing)}", source=source)
        context = {k: v for k, (v, _) in context.items()}
    try:
        return CausalModel(p.dom(), list(exo), {k: e for k, (e, _) in defs.items()}, context)
    except CyclicModelError as err:
        tok = defs[err.cycle[0]][1]
        raise ParseError(str(err), tok.line, tok.col, source) from None
    except ModelError as err:
        raise ParseError(str(err), source=source) from None


def print_model(model: CausalModel) -> str:
    lines = [f"domain {model.domain.describe()}"]
    if model.exogenous:
        lines.append("exo " + " ".join(model.exogenous))
    for v in model.endogenous:
        mech = model.mechanisms[v]
        if isinstance(mech, Table):
            lines.append(f"table {v} " + ex.format_expr(mech)[len("table "):])
        else:
            lines.append(f"var {v} := {ex.format_expr(mech)}")
    if model.context is not None:
        lines.append("context " + " ".join(f"{u}={Domain.format_value(x)}"
                                          for u, x in model.context.items()))
    return "\n".join(lines) + "\n"


def parse_interp(text: str, source: str | None = None) -> Interpretation:
    p = _Parser(text, source)
    functions: dict = {}
    while True:
        p.skip_blank()
        if p.peek().kind == "eof":
            break
        kw = p.keyword("domain", "process")
        if kw.text == "domain":
            if functions:
                raise p.error("domain must come before processes", kw)
            p.parse_domain()
            continue
        name = p.expect("name", "process name")
        if name.text in functions:
            raise p.error(f"process {name.text} defined twice", name)
        p.expect("(", "'('")
        params = tuple(t.text for t in p.name_list(")"))
        if len(set(params)) != len(params):
            raise p.error("duplicate parameter", name)
        if p.accept("assign"):
            refs: list = []
            body = p.expression(refs)
            for ref, tok in refs:
                if ref not in params:
                    raise p.error(f"unknown parameter {ref!r}", tok)
        else:
            p.keyword("table")
            body = p.table_body(params)
        functions[name.text] = ProcessFunction(params, body)
        p.end_line()
    return Interpretation.build(p.dom(), functions)


def print_interp(interp: Interpretation) -> str:
    lines = [f"domain {interp.domain.describe()}"]
    for name, fn in interp.functions:
        params = " ".join(fn.params)
        if isinstance(fn.body, Table):
            body = ex.format_expr(fn.body)
            lines.append(f"process {name} ({params}) table " + body[body.index("{"):])
        else:
            lines.append(f"process {name} ({params}) := {ex.format_expr(fn.body)}")
    return "\n".join(lines) + "\n"


@dataclass(frozen=True)
class SemanticsSpec:
    """How a semantics picks a provenance record for each input.

    kind is ``constant-graph``, ``fixed-graph`` (``graph`` names the record)
    or ``case-split`` (``split`` names the input, ``cases`` maps its values
    to record names).  Names refer to files next to the spec.
    """

    kind: str
    graph: str | None = None
    split: str | None = None
    cases: tuple = ()
    inputs: tuple | None = None
    result: str | None = None
    interp: str | None = None
    target: str | None = None


def parse_semantics(text: str, source: str | None = None, domain: Domain | None = None) -> SemanticsSpec:
    p = _Parser(text, source)
    p.domain = domain or Domain.mod(1 << 30, True)  # values are re-checked against the target later
    header: dict = {}
    spec = None
    while True:
        p.skip_blank()
        if p.peek().kind == "eof":
            break
        kw = p.keyword("inputs", "result", "interp", "target",
                       "constant-graph", "fixed-graph", "case-split")
        if kw.text in ("inputs", "result", "interp", "target"):
            if kw.text in header:
                raise p.error(f"{kw.text} declared twice", kw)
            if kw.text == "inputs":
                header["inputs"] = tuple(t.text for t in p.name_list())
            else:
                header[kw.text] = p.expect("name", "name").text
            p.end_line()
            continue
        if spec is not None:
            raise p.error("only one semantics per file", kw)
        if kw.text == "constant-graph":
            spec = {"kind": kw.text}
        elif kw.text == "fixed-graph":
            spec = {"kind": kw.text, "graph": p.expect("name", "graph name").text}
        else:
            split = p.expect("name", "input variable").text
            p.expect("{", "'{'")
            cases = []
            while not p.accept("}"):
                val_tok = p.peek()
                val = p.value()
                if any(v == val for v, _ in cases):
                    raise p.error("duplicate case", val_tok)
                p.expect("arrow", "'->'")
                cases.append((val, p.expect("name", "graph name").text))
                if not p.accept(";") and p.peek().kind != "}":
                    raise p.error("expected ';' or '}'")
            spec = {"kind": kw.text, "split": split, "cases": tuple(cases)}
        p.end_line()
    if spec is None:
        raise ParseError("no semantics declared (constant-graph, fixed-graph or case-split)", source=source)
    return SemanticsSpec(**spec, **header)


def parse_function_table(text: str, source: str | None = None):
    """A black-box function given extensionally::

        domain mod 3
        inputs a b
        0 0 -> 0
        ...
    """
    from .approximation import BlackBoxFunction

    p = _Parser(text, source)
    inputs = None
    rows = {}
    while True:
        p.skip_blank()
        tok = p.peek()
        if tok.kind == "eof":
            break
        if tok.kind == "name" and tok.text == "domain":
            p.next()
            if rows or inputs is not None:
                raise p.error("domain must come first", tok)
            p.parse_domain()
            continue
        if tok.kind == "name" and tok.text == "inputs":
            p.next()
            inputs = tuple(t.text for t in p.name_list())
            p.end_line()
            continue
        if inputs is None:
            raise p.error("inputs must be declared before rows", tok)
        key = []
        while p.peek().kind != "arrow":
            key.append(p.value())
            p.accept(",")
        p.expect("arrow", "'->'")
        out = p.value()
        if len(key) != len(inputs):
            raise p.error(f"row has {len(key)} values for {len(inputs)} inputs", tok)
        if tuple(key) in rows:
            raise p.error("duplicate row", tok)
        rows[tuple(key)] = out
        p.end_line()
    if inputs is None:
        raise ParseError("missing inputs declaration", source=source)
    try:
        return BlackBoxFunction(inputs, p.dom(), rows)
    except ValueError as err:
        raise ParseError(str(err), source=source) from None


# -- provenance graph JSON -----------------------------------------------

_GRAPH_KEYS = {"artifacts", "processes", "inputs", "result"}
_ARTIFACT_KEYS = {"id", "value"}
_PROCESS_KEYS = {"id", "name", "uses", "generates"}


def _json_value(raw, where: str):
    if raw in ("bot", "⊥"):
        return BOTTOM
    if isinstance(raw, bool) or not isinstance(raw, int) or raw < 0:
        raise ParseError(f"{where}: value must be a non-negative integer or \"bot\"")
    return raw


def _keys(obj, allowed: set, required: set, where: str):
    if not isinstance(obj, dict):
        raise ParseError(f"{where}: expected an object")
    unknown = set(obj) - allowed
    if unknown:
        raise ParseError(f"{where}: unknown key(s) {sorted(unknown)}")
    missing = required - set(obj)
    if missing:
        raise ParseError(f"{where}: missing key(s) {sorted(missing)}")


def parse_graph(text: str, source: str | None = None) -> ProvenanceGraph:
    """Parse the JSON graph format; structural checks beyond references are left to validate()."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as err:
        raise ParseError(f"malformed JSON: {err.msg}", err.lineno, err.colno, source) from None
    try:
        _keys(doc, _GRAPH_KEYS, _GRAPH_KEYS, "graph")
        if not isinstance(doc["artifacts"], list) or not isinstance(doc["processes"], list):
            raise ParseError("artifacts and processes must be lists")
        artifacts: dict = {}
        for i, art in enumerate(doc["artifacts"]):
            _keys(art, _ARTIFACT_KEYS, _ARTIFACT_KEYS, f"artifacts[{i}]")
            aid = art["id"]
            if not isinstance(aid, str) or not aid:
                raise ParseError(f"artifacts[{i}]: id must be a non-empty string")
            if aid in artifacts:
                raise ParseError(f"duplicate id {aid!r}")
            artifacts[aid] = _json_value(art["value"], f"artifact {aid}")
        processes, used, generated = {}, [], []
        for i, proc in enumerate(doc["processes"]):
            _keys(proc, _PROCESS_KEYS, _PROCESS_KEYS, f"processes[{i}]")
            pid = proc["id"]
            if not isinstance(pid, str) or not pid:
                raise ParseError(f"processes[{i}]: id must be a non-empty string")
            if pid in processes or pid in artifacts:
                raise ParseError(f"duplicate id {pid!r}")
            if not isinstance(proc["name"], str):
                raise ParseError(f"process {pid}: name must be a string")
            processes[pid] = proc["name"]
            for use in proc["uses"]:
                if (not isinstance(use, list) or len(use) != 2 or not isinstance(use[0], str)
                        or isinstance(use[1], bool) or not isinstance(use[1], int)):
                    raise ParseError(f"process {pid}: uses entries are [artifact-id, position]")
                if use[0] not in artifacts:
                    raise ParseError(f"process {pid} uses unknown artifact {use[0]!r}")
                used.append((pid, use[0], use[1]))
            outs = proc["generates"]
            outs = [outs] if isinstance(outs, str) else outs
            if not isinstance(outs, list):
                raise ParseError(f"process {pid}: generates must be an artifact id")
            for a in outs:
                if a not in artifacts:
                    raise ParseError(f"process {pid} generates unknown artifact {a!r}")
                generated.append((a, pid))
        inputs = doc["inputs"]
        if not isinstance(inputs, list) or not all(isinstance(v, str) for v in inputs):
            raise ParseError("inputs must be a list of artifact ids")
        for v in inputs:
            if v not in artifacts:
                raise ParseError(f"input {v!r} is not an artifact")
        result = doc["result"]
        if not isinstance(result, str):
            raise ParseError("result must be an artifact id")
        if result not in artifacts:
            raise ParseError(f"result {result!r} is not an artifact")
    except ParseError as err:
        if source and not err.source:
            raise ParseError(err.message, err.line, err.column, source) from None
        raise
    return ProvenanceGraph.build(artifacts, processes, used, generated, inputs, result)


def dump_graph(g: ProvenanceGraph) -> str:
    def val(v):
        return "bot" if v is BOTTOM else v

    outs: dict = {}
    for a, p in g.generated:
        outs.setdefault(p, []).append(a)
    procs = []
    for pid, name in g.processes:
        made = outs.get(pid, [])
        procs.append({
            "id": pid,
            "name": name,
            "uses": [[a, pos] for q, a, pos in sorted(g.used, key=lambda u: (u[0], u[2])) if q == pid],
            "generates": made[0] if len(made) == 1 else made,
        })
    doc = {
        "artifacts": [{"id": a, "value": val(v)} for a, v in g.labels],
        "processes": procs,
        "inputs": list(g.inputs),
        "result": g.result,
    }
    return json.dumps(doc, indent=2, ensure_ascii=False) + "\n"


def parse_assignments(text: str, domain: Domain) -> dict:
    """``"X=1,Y=bot"`` -> ``{"X": 1, "Y": ⊥}``."""
    out: dict = {}
    if not text.strip():
        return out
    for part in re.split(r"[,\s]+", text.strip()):
        if not part:
            continue
        if "=" not in part:
            raise ParseError(f"expected name=value, got {part!r}")
        name, _, raw = part.partition("=")
        try:
            out[name.strip()] = domain.parse_value(raw)
        except DomainError as err:
            raise ParseError(str(err)) from None
    return out


def load_model_file(path) -> CausalModel:
    with open(path, encoding="utf-8") as fh:
        return parse_model(fh.read(), str(path))


def load_graph_file(path) -> ProvenanceGraph:
    with open(path, encoding="utf-8") as fh:
        return parse_graph(fh.read(), str(path))


def load_interp_file(path) -> Interpretation:
    with open(path, encoding="utf-8") as fh:
        return parse_interp(fh.read(), str(path))


def values_by_name(mapping: Mapping) -> str:
    return ", ".join(f"{k}={Domain.format_value(v)}" for k, v in sorted(mapping.items()))
