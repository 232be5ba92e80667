"""Bipartite provenance graphs, their functional reading and their causal model.

Artifacts carry data values; processes carry process names.  A graph is
read two ways:

* :func:`interpret_graph` - recompute every node from the inputs by
  walking the graph (the function ``D^n -> D``);
* :func:`to_causal_situation` - compile to a causal model whose variables
  are the nodes, paired with the stored labels.

Artifacts that are neither inputs nor generated by a process are constants:
their stored label is their value under both readings.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass, field
from functools import cached_property
from typing import Mapping, Sequence

from . import expr as ex
from .cause import CausalSituation
from .domain import Domain
from .expr import Const, Expression, Table, Var
from .model import CausalModel


class GraphError(ValueError):
    pass


class InconsistentLabelsError(GraphError):
    def __init__(self, node, expected, stored):
        self.node = node
        self.expected = expected
        self.stored = stored
        super().__init__(f"inconsistent label at {node}: stored {stored!r}, recomputed {expected!r}")


@dataclass(frozen=True)
class ProvenanceGraph:
    labels: tuple        # ((artifact_id, value), ...)
    processes: tuple     # ((process_id, process_name), ...)
    used: tuple          # ((process_id, artifact_id, position), ...)
    generated: tuple     # ((artifact_id, process_id), ...)
    inputs: tuple
    result: str

    @classmethod
    def build(cls, artifacts: Mapping, processes: Mapping, used: Sequence = (),
              generated: Sequence = (), inputs: Sequence = (), result: str = None):
        return cls(
            labels=tuple(sorted(artifacts.items())),
            processes=tuple(sorted(processes.items())),
            used=tuple(sorted(tuple(u) for u in used)),
            generated=tuple(sorted(tuple(g) for g in generated)),
            inputs=tuple(inputs),
            result=result,
        )

    @cached_property
    def artifacts(self) -> dict:
        return dict(self.labels)

    @cached_property
    def process_names(self) -> dict:
        return dict(self.processes)

    @cached_property
    def generator(self) -> dict:
        """artifact -> generating process (first one, if several)."""
        out = {}
        for a, p in self.generated:
            out.setdefault(a, p)
        return out

    @cached_property
    def output(self) -> dict:
        """process -> generated artifact (first one, if several)."""
        out = {}
        for a, p in self.generated:
            out.setdefault(p, a)
        return out

    def arguments(self, process: str) -> tuple:
        """Artifacts used by *process*, in argument-position order."""
        return tuple(a for p, a, _ in sorted(self.used, key=lambda u: u[2]) if p == process)

    def constants(self) -> tuple:
        inputs = set(self.inputs)
        return tuple(a for a, _ in self.labels if a not in inputs and a not in self.generator)

    @cached_property
    def order(self) -> tuple:
        """All nodes in dataflow order (lexicographic among ready nodes)."""
        succ = {n: set() for n in list(self.artifacts) + list(self.process_names)}
        indeg = dict.fromkeys(succ, 0)
        for p, a, _ in self.used:
            if a in succ and p in succ and p not in succ[a]:
                succ[a].add(p)
                indeg[p] += 1
        for a, p in self.generated:
            if a in succ and p in succ and a not in succ[p]:
                succ[p].add(a)
                indeg[a] += 1
        ready = [n for n, d in indeg.items() if d == 0]
        heapq.heapify(ready)
        out = []
        while ready:
            n = heapq.heappop(ready)
            out.append(n)
            for m in sorted(succ[n]):
                indeg[m] -= 1
                if indeg[m] == 0:
                    heapq.heappush(ready, m)
        if len(out) != len(succ):
            raise GraphError("provenance graph is cyclic")
        return tuple(out)

    def with_labels(self, labels: Mapping) -> "ProvenanceGraph":
        merged = dict(self.artifacts)
        merged.update(labels)
        return ProvenanceGraph(tuple(sorted(merged.items())), self.processes, self.used,
                               self.generated, self.inputs, self.result)


@dataclass(frozen=True)
class ProcessFunction:
    params: tuple
    body: Expression

    @property
    def arity(self) -> int:
        return len(self.params)


@dataclass(frozen=True)
class Interpretation:
    """Sorting plus one function per process name, all over one domain."""

    domain: Domain
    functions: tuple  # ((name, ProcessFunction), ...)

    @classmethod
    def build(cls, domain: Domain, functions: Mapping) -> "Interpretation":
        interp = cls(domain, tuple(sorted(functions.items())))
        for name, fn in interp.functions:
            if len(set(fn.params)) != len(fn.params):
                raise GraphError(f"process {name}: duplicate parameter")
            try:
                ex.check(fn.body, domain, set(fn.params))
            except ex.ExpressionError as err:
                raise GraphError(f"process {name}: {err}") from None
        return interp

    @cached_property
    def table(self) -> dict:
        return dict(self.functions)

    @property
    def sorting(self) -> dict:
        return {name: fn.arity for name, fn in self.functions}

    def apply(self, name: str, args: Sequence):
        fn = self.table[name]
        return ex.evaluate(fn.body, dict(zip(fn.params, args)), self.domain)


@dataclass
class ValidationReport:
    is_bipartite: bool = True
    is_acyclic: bool = True
    is_functional: bool = True
    is_sorted: bool = True
    is_uniquely_generated: bool = True
    has_valid_endpoints: bool = True
    labels_in_domain: bool = True
    diagnostics: list = field(default_factory=list)

    FLAGS = ("is_bipartite", "is_acyclic", "is_functional", "is_sorted",
             "is_uniquely_generated", "has_valid_endpoints", "labels_in_domain")

    @property
    def ok(self) -> bool:
        return all(getattr(self, f) for f in self.FLAGS)

    def fail(self, flag: str, message: str) -> None:
        setattr(self, flag, False)
        self.diagnostics.append(message)


def validate(g: ProvenanceGraph, interp: Interpretation | None = None) -> ValidationReport:
    """Structural checks.  Without *interp*, sortedness means "some sorting exists"."""
    rep = ValidationReport()
    arts, procs = g.artifacts, g.process_names
    for node in sorted(set(arts) & set(procs)):
        rep.fail("is_bipartite", f"{node} is both an artifact and a process")
    for p, a, pos in g.used:
        if p not in procs or a not in arts:
            rep.fail("is_bipartite", f"used edge ({p}, {a}) must run from a process to an artifact")
    for a, p in g.generated:
        if a not in arts or p not in procs:
            rep.fail("is_bipartite", f"generated edge ({a}, {p}) must run from an artifact to a process")
    try:
        g.order
    except GraphError:
        rep.fail("is_acyclic", "graph has a directed cycle")
    outs: dict = {p: [] for p in procs}
    gens: dict = {a: [] for a in arts}
    for a, p in g.generated:
        if p in outs:
            outs[p].append(a)
        if a in gens:
            gens[a].append(p)
    for p, made in sorted(outs.items()):
        if len(made) != 1:
            rep.fail("is_functional", f"process {p} generates {len(made)} artifacts")
    for a, makers in sorted(gens.items()):
        if len(makers) > 1:
            rep.fail("is_uniquely_generated", f"artifact {a} generated by {sorted(makers)}")
    if len(set(g.inputs)) != len(g.inputs):
        rep.fail("has_valid_endpoints", "duplicate input node")
    for v in g.inputs:
        if v not in arts:
            rep.fail("has_valid_endpoints", f"input {v} is not an artifact")
        elif gens.get(v):
            rep.fail("has_valid_endpoints", f"input {v} is generated by a process")
    if g.result not in arts:
        rep.fail("has_valid_endpoints", f"result {g.result!r} is not an artifact")
    sorting = interp.sorting if interp is not None else {}
    seen_arity: dict = {}
    for p, name in g.processes:
        positions = sorted(pos for q, _, pos in g.used if q == p)
        n = len(positions)
        if positions != list(range(1, n + 1)):
            rep.fail("is_sorted", f"process {p} has argument positions {positions}")
        if interp is not None:
            if name not in sorting:
                rep.fail("is_sorted", f"no interpretation for process name {name}")
            elif sorting[name] != n:
                rep.fail("is_sorted", f"process {p} ({name}) has {n} inputs, arity is {sorting[name]}")
        else:
            if seen_arity.setdefault(name, n) != n:
                rep.fail("is_sorted", f"process name {name} used with arities {seen_arity[name]} and {n}")
    if interp is not None:
        for a, value in g.labels:
            if value not in interp.domain:
                rep.fail("labels_in_domain", f"label of {a} ({value!r}) not in {interp.domain.describe()}")
    return rep


def _require_valid(g: ProvenanceGraph, interp: Interpretation) -> None:
    rep = validate(g, interp)
    if not rep.ok:
        raise GraphError("invalid provenance graph: " + "; ".join(rep.diagnostics))


@dataclass(frozen=True, eq=False)
class GraphFunction:
    """``⟦G⟧ : D^n -> D`` over the graph's input nodes, in order."""

    graph: ProvenanceGraph
    interp: Interpretation

    @property
    def inputs(self) -> tuple:
        return self.graph.inputs

    @property
    def arity(self) -> int:
        return len(self.graph.inputs)

    def values(self, args: Sequence) -> dict:
        g = self.graph
        if len(args) != len(g.inputs):
            raise GraphError(f"expected {len(g.inputs)} inputs, got {len(args)}")
        env = dict(zip(g.inputs, args))
        for node in g.order:
            if node in env:
                continue
            if node in g.process_names:
                env[node] = self.interp.apply(g.process_names[node],
                                              [env[a] for a in g.arguments(node)])
            elif node in g.generator:
                env[node] = env[g.generator[node]]
            else:
                env[node] = g.artifacts[node]
        return env

    def __call__(self, *args):
        if len(args) == 1 and isinstance(args[0], (tuple, list)):
            args = tuple(args[0])
        return self.values(args)[self.graph.result]

    def table(self) -> dict:
        elems = self.interp.domain.elements
        return {u: self(u) for u in itertools.product(elems, repeat=self.arity)}


def interpret_graph(g: ProvenanceGraph, interp: Interpretation) -> GraphFunction:
    _require_valid(g, interp)
    return GraphFunction(g, interp)


def proxy_name(g: ProvenanceGraph, artifact: str) -> str:
    taken = set(g.artifacts) | set(g.process_names)
    name = "u_" + artifact
    while name in taken:
        name = "u_" + name
    return name


def _process_mechanism(fn: ProcessFunction, args: tuple, domain: Domain) -> Expression:
    renaming = dict(zip(fn.params, args))
    body = fn.body
    if isinstance(body, Table) and len(set(renaming[p] for p in body.parents)) < len(body.parents):
        # the same artifact fills several positions: re-tabulate over distinct parents
        parents = tuple(dict.fromkeys(renaming[p] for p in body.parents))
        rows = {}
        for key in itertools.product(range(domain.modulus), repeat=len(parents)):
            env = dict(zip(parents, key))
            rows[key] = body.lookup[tuple(env[renaming[p]] for p in body.parents)]
        return Table.from_mapping(parents, rows)
    return ex.substitute(body, renaming)


def compile_model(g: ProvenanceGraph, interp: Interpretation, proxy_inputs: bool = False) -> CausalModel:
    """The causal model of a graph: nodes become variables, processes apply their function."""
    _require_valid(g, interp)
    mechanisms: dict = {}
    exogenous = []
    for a in g.inputs:
        if proxy_inputs:
            u = proxy_name(g, a)
            exogenous.append(u)
            mechanisms[a] = Var(u)
        else:
            exogenous.append(a)
    for a in g.constants():
        mechanisms[a] = Const(g.artifacts[a])
    for a, p in g.generated:
        mechanisms[a] = Var(p)
    for p, name in g.processes:
        mechanisms[p] = _process_mechanism(interp.table[name], g.arguments(p), interp.domain)
    return CausalModel(interp.domain, exogenous, mechanisms)


def to_causal_situation(g: ProvenanceGraph, interp: Interpretation,
                        proxy_inputs: bool = True) -> CausalSituation:
    """(M_G, σ_G): stored artifact labels are authoritative; process values are recomputed.

    Raises :class:`InconsistentLabelsError` naming the first node (dataflow
    order) whose stored label disagrees with its mechanism.
    """
    model = compile_model(g, interp, proxy_inputs)
    sigma = dict(g.artifacts)
    for p, name in g.processes:
        sigma[p] = interp.apply(name, [sigma[a] for a in g.arguments(p)])
    if proxy_inputs:
        for a in g.inputs:
            sigma[proxy_name(g, a)] = g.artifacts[a]
    for node in g.order:
        if node in model.endogenous:
            expected = ex.evaluate(model.mechanisms[node], sigma, model.domain)
            if expected != sigma[node]:
                raise InconsistentLabelsError(node, expected, sigma[node])
    return CausalSituation(model, sigma)


def graph_dot(g: ProvenanceGraph, name: str = "provenance") -> str:
    """Artifacts as ovals, processes as boxes; edges point from effect to cause."""
    fmt = Domain.format_value
    lines = [f'digraph "{name}" {{', "  rankdir=BT;"]
    for a, value in g.labels:
        role = ' peripheries=2' if a == g.result else ''
        lines.append(f'  "{a}" [shape=ellipse label="{a}\\n{fmt(value)}"{role}];')
    for p, pname in g.processes:
        lines.append(f'  "{p}" [shape=box label="{pname}"];')
    for p, a, pos in g.used:
        lines.append(f'  "{p}" -> "{a}" [label="used ({pos})"];')
    for a, p in g.generated:
        lines.append(f'  "{a}" -> "{p}" [label="wasGeneratedBy"];')
    lines.append("}")
    return "\n".join(lines) + "\n"


# -- first-order terms ---------------------------------------------------

@dataclass(frozen=True)
class Leaf:
    artifact: str
    value: object
    is_input: bool = True


@dataclass(frozen=True)
class Term:
    artifact: str
    value: object
    process: str
    name: str
    args: tuple


def graph_to_term(g: ProvenanceGraph, node: str | None = None):
    """The graph below *node* (default: the result) as a term; shared subgraphs are copied."""
    node = g.result if node is None else node
    if node not in g.generator:
        return Leaf(node, g.artifacts[node], node in g.inputs)
    p = g.generator[node]
    return Term(node, g.artifacts[node], p, g.process_names[p],
                tuple(graph_to_term(g, a) for a in g.arguments(p)))


def term_to_graph(term, inputs: Sequence | None = None) -> ProvenanceGraph:
    artifacts, processes, used, generated, leaves = {}, {}, [], [], []

    def walk(t):
        artifacts[t.artifact] = t.value
        if isinstance(t, Leaf):
            if t.is_input and t.artifact not in leaves:
                leaves.append(t.artifact)
            return
        processes[t.process] = t.name
        generated.append((t.artifact, t.process))
        for pos, arg in enumerate(t.args, start=1):
            used.append((t.process, arg.artifact, pos))
            walk(arg)

    walk(term)
    return ProvenanceGraph.build(artifacts, processes, used, generated,
                                 inputs if inputs is not None else sorted(leaves), term.artifact)


def format_term(term) -> str:
    fmt = Domain.format_value
    if isinstance(term, Leaf):
        return f"{term.artifact}:{fmt(term.value)}"
    args = ", ".join(format_term(a) for a in term.args)
    return f"{term.name}({args})"


def is_tree(g: ProvenanceGraph) -> bool:
    """No artifact feeds two argument slots (no sharing)."""
    uses = [a for _, a, _ in g.used]
    return len(uses) == len(set(uses))
