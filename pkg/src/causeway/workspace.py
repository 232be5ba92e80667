"""Loading files by name, the bundled corpus, and semantics construction."""

from __future__ import annotations

from dataclasses import dataclass, field
from importlib import resources
from pathlib import Path

from . import dsl
from .approximation import (BlackBoxFunction, CausalFunction, ProvenanceSemantics,
                            case_split_semantics, causal_function_of_model,
                            constant_semantics, fixed_semantics)
from .domain import DomainError
from .model import CausalModel
from .provenance import GraphFunction, Interpretation, ProvenanceGraph, interpret_graph

DATA = resources.files("causeway") / "data"


class WorkspaceError(ValueError):
    pass


def bundled_dir() -> Path:
    return Path(str(DATA))


def bundled_files(suffix: str | None = None) -> list:
    files = sorted(p for p in bundled_dir().iterdir() if p.is_file())
    return [p for p in files if suffix is None or p.suffix == suffix]


def resolve(path) -> Path:
    """An existing path, else the bundled file with the same name."""
    p = Path(path)
    if p.exists():
        return p
    candidate = bundled_dir() / p.name
    if candidate.exists():
        return candidate
    raise WorkspaceError(f"no such file: {path}")


def interp_for(graph_path: Path, interp_path=None) -> Path:
    if interp_path is not None:
        return resolve(interp_path)
    sibling = graph_path.with_suffix(".interp")
    if sibling.exists():
        return sibling
    raise WorkspaceError(f"no interpretation given and {sibling.name} not found next to the graph")


@dataclass
class Workspace:
    """Models, graphs, interpretations and semantics loaded from one directory, by name."""

    root: Path
    models: dict = field(default_factory=dict)
    graphs: dict = field(default_factory=dict)
    interps: dict = field(default_factory=dict)
    semantics: dict = field(default_factory=dict)

    @classmethod
    def load(cls, root=None) -> "Workspace":
        root = Path(root) if root is not None else bundled_dir()
        ws = cls(root)
        for p in sorted(root.iterdir()):
            if p.suffix == ".model":
                ws.models[p.stem] = dsl.load_model_file(p)
            elif p.suffix == ".interp":
                ws.interps[p.stem] = dsl.load_interp_file(p)
            elif p.suffix == ".json":
                ws.graphs[p.stem] = dsl.load_graph_file(p)
            elif p.suffix == ".sem":
                ws.semantics[p.stem] = dsl.parse_semantics(p.read_text(encoding="utf-8"), str(p))
        for name, spec in ws.semantics.items():
            for ref in _record_names(spec):
                if ref not in ws.models and ref not in ws.graphs:
                    raise WorkspaceError(f"semantics {name} refers to unknown record {ref!r}")
            if spec.target and spec.target not in ws.models:
                raise WorkspaceError(f"semantics {name} refers to unknown target {spec.target!r}")
        for name in ws.graphs:
            ws.interpreted(name)
        return ws

    def graph_interp_name(self, graph: str, default: str | None = None) -> str | None:
        if graph in self.interps:
            return graph
        return default if default in self.interps else None

    def interpreted(self, graph: str, interp: str | None = None) -> tuple:
        name = self.graph_interp_name(graph, interp) if interp is None else interp
        if name is None:
            name = next((s.interp for s in self.semantics.values()
                         if s.interp and graph in _record_names(s)), None)
        if name not in self.interps:
            raise WorkspaceError(f"no interpretation for graph {graph}")
        return self.graphs[graph], self.interps[name]


def _record_names(spec: dsl.SemanticsSpec) -> list:
    if spec.kind == "fixed-graph":
        return [spec.graph]
    if spec.kind == "case-split":
        return [name for _, name in spec.cases]
    return []


def load_record(name: str, base: Path, interp_name: str | None = None):
    """A semantics record by name: ``<name>.model`` or ``<name>.json`` (+ interpretation)."""
    model_path = base / f"{name}.model"
    if model_path.exists():
        return dsl.load_model_file(model_path)
    graph_path = base / f"{name}.json"
    if graph_path.exists():
        graph = dsl.load_graph_file(graph_path)
        interp_path = base / f"{interp_name}.interp" if interp_name else graph_path.with_suffix(".interp")
        if not interp_path.exists():
            raise WorkspaceError(f"no interpretation for graph {name} ({interp_path.name})")
        return interpret_graph(graph, dsl.load_interp_file(interp_path))
    raise WorkspaceError(f"no record named {name!r} in {base}")


@dataclass
class Target:
    """What a semantics is measured against: a model (both modes) or a function table."""

    model: CausalModel | None = None
    table: BlackBoxFunction | None = None

    def functional(self, result: str | None, inputs=None) -> BlackBoxFunction:
        if self.table is not None:
            if inputs is not None and tuple(inputs) != self.table.inputs:
                raise WorkspaceError("semantics inputs do not match the function table")
            return self.table
        if result is None:
            raise WorkspaceError("functional mode needs a result variable ('result <name>' or --result)")
        return BlackBoxFunction.from_model(self.model, result, inputs)

    def causal(self, inputs=None) -> CausalFunction:
        if self.model is None:
            raise WorkspaceError("causal mode needs a model target, not a function table")
        return causal_function_of_model(self.model, inputs)


def load_target(path) -> Target:
    p = resolve(path)
    text = p.read_text(encoding="utf-8")
    if p.suffix == ".fn":
        return Target(table=dsl.parse_function_table(text, str(p)))
    return Target(model=dsl.parse_model(text, str(p)))


def build_semantics(spec: dsl.SemanticsSpec, base: Path, f, result: str | None = None) -> ProvenanceSemantics:
    """Instantiate a semantics spec against a functional or causal target."""
    result = result or spec.result
    inputs = f.inputs
    domain = f.domain
    if spec.inputs is not None and tuple(spec.inputs) != tuple(inputs):
        raise WorkspaceError(f"semantics inputs {spec.inputs} differ from target inputs {inputs}")
    if spec.kind == "constant-graph":
        P = constant_semantics(f)
        if isinstance(f, BlackBoxFunction):
            return P
        return ProvenanceSemantics(P.inputs, P.domain, P.choose, result, P.name)
    if spec.kind == "fixed-graph":
        record = load_record(spec.graph, base, spec.interp)
        _check_record_domain(record, domain, spec.graph)
        return fixed_semantics(record, inputs, domain, result, f"fixed-graph {spec.graph}")
    cases = {}
    for raw, name in spec.cases:
        if raw not in domain:
            raise WorkspaceError(f"case value {raw!r} is outside {domain.describe()}")
        record = load_record(name, base, spec.interp)
        _check_record_domain(record, domain, name)
        cases[raw] = record
    try:
        return case_split_semantics(spec.split, cases, inputs, domain, result,
                                    f"case-split {spec.split}")
    except ValueError as err:
        raise WorkspaceError(str(err)) from None


def _check_record_domain(record, domain, name):
    rd = record.domain if isinstance(record, CausalModel) else record.interp.domain
    if rd != domain:
        raise WorkspaceError(f"record {name} is over {rd.describe()}, target over {domain.describe()}")


def load_semantics(path, target_path=None, causal: bool = False, result: str | None = None):
    """(semantics, target function) from a ``.sem`` file, with the target resolved."""
    p = resolve(path)
    spec = dsl.parse_semantics(p.read_text(encoding="utf-8"), str(p))
    if target_path is None:
        if spec.target is None:
            raise WorkspaceError("no --target given and the semantics names no target")
        target_path = p.parent / f"{spec.target}.model"
    target = load_target(target_path)
    if causal:
        f = target.causal(spec.inputs)
    else:
        f = target.functional(result or spec.result, spec.inputs)
    return build_semantics(spec, p.parent, f, result), f


def load_situation_source(path, interp=None):
    """A ``.model`` file or a graph (with its interpretation)."""
    p = resolve(path)
    if p.suffix == ".json":
        graph = dsl.load_graph_file(p)
        return graph, dsl.load_interp_file(interp_for(p, interp))
    return dsl.load_model_file(p), None


__all__ = [
    "DomainError", "GraphFunction", "Interpretation", "ProvenanceGraph", "Target", "Workspace",
    "WorkspaceError", "build_semantics", "bundled_dir", "bundled_files", "interp_for",
    "load_record", "load_semantics", "load_situation_source", "load_target", "resolve",
]
