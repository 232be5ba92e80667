"""Finite-domain structural causal models.

A :class:`CausalModel` is immutable.  Interventions build new models;
evaluation runs the compiled program through the selected kernel.
"""

from __future__ import annotations

import heapq
import itertools
from dataclasses import dataclass
from functools import cached_property
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from . import expr as ex
from . import kernel
from .domain import Domain
from .expr import Const, Expression


class ModelError(ValueError):
    pass


class CyclicModelError(ModelError):
    def __init__(self, cycle):
        self.cycle = tuple(cycle)
        super().__init__("cyclic definition: " + " -> ".join(self.cycle))


@dataclass(frozen=True)
class CausalGraph:
    vertices: tuple
    edges: frozenset  # of (parent, child)

    def parents(self, node) -> set:
        return {p for p, c in self.edges if c == node}

    def children(self, node) -> set:
        return {c for p, c in self.edges if p == node}

    def ancestors(self, node) -> set:
        seen, todo = set(), [node]
        while todo:
            for p in self.parents(todo.pop()):
                if p not in seen:
                    seen.add(p)
                    todo.append(p)
        return seen

    def descendants(self, node) -> set:
        seen, todo = set(), [node]
        while todo:
            for c in self.children(todo.pop()):
                if c not in seen:
                    seen.add(c)
                    todo.append(c)
        return seen

    def issubgraph(self, other: "CausalGraph") -> bool:
        return set(self.vertices) <= set(other.vertices) and self.edges <= other.edges


class CausalModel:
    """M = (U, V, F) over a single finite domain.

    ``context`` is an optional default exogenous assignment carried along for
    convenience (the CLI uses it when no ``--exo`` is given).
    """

    def __init__(self, domain: Domain, exogenous: Iterable[str],
                 mechanisms: Mapping[str, Expression], context: Mapping | None = None):
        exogenous = list(exogenous)
        if len(set(exogenous)) != len(exogenous):
            raise ModelError("duplicate exogenous variable")
        clash = set(exogenous) & set(mechanisms)
        if clash:
            raise ModelError(f"variables both exogenous and endogenous: {sorted(clash)}")
        self.domain = domain
        self.exogenous = tuple(sorted(exogenous))
        self.endogenous = tuple(sorted(mechanisms))
        self.mechanisms = MappingProxyType({v: mechanisms[v] for v in self.endogenous})
        known = set(self.exogenous) | set(self.endogenous)
        for name, mech in self.mechanisms.items():
            try:
                ex.check(mech, domain, known)
            except ex.ExpressionError as err:
                raise ModelError(f"mechanism of {name}: {err}") from None
        self.context = None
        if context is not None:
            if set(context) != set(self.exogenous):
                raise ModelError("context must assign exactly the exogenous variables")
            for u, val in context.items():
                if val not in domain:
                    raise ModelError(f"context value {u}={val!r} not in domain")
            self.context = MappingProxyType(dict(sorted(context.items())))
        self.topological_order  # raises on cycles

    @property
    def variables(self) -> tuple:
        return tuple(sorted(self.exogenous + self.endogenous))

    def parents(self, name: str) -> frozenset:
        return ex.variables(self.mechanisms[name])

    @cached_property
    def topological_order(self) -> tuple:
        """Endogenous variables, parents first; ties broken lexicographically."""
        endo = set(self.endogenous)
        deps = {v: self.parents(v) & endo for v in self.endogenous}
        users = {v: [] for v in self.endogenous}
        for v, ps in deps.items():
            for p in ps:
                users[p].append(v)
        pending = {v: len(ps) for v, ps in deps.items()}
        ready = [v for v, n in pending.items() if n == 0]
        heapq.heapify(ready)
        order = []
        while ready:
            v = heapq.heappop(ready)
            order.append(v)
            for w in users[v]:
                pending[w] -= 1
                if pending[w] == 0:
                    heapq.heappush(ready, w)
        if len(order) != len(self.endogenous):
            raise CyclicModelError(_find_cycle(deps))
        return tuple(order)

    @cached_property
    def program(self) -> kernel.Program:
        return kernel.compile_model(self)

    def syntactic_graph(self) -> CausalGraph:
        edges = frozenset((p, v) for v in self.endogenous for p in self.parents(v))
        return CausalGraph(self.variables, edges)

    def replace(self, **changes) -> "CausalModel":
        fields = dict(domain=self.domain, exogenous=self.exogenous,
                      mechanisms=dict(self.mechanisms), context=self.context)
        fields.update(changes)
        return CausalModel(**fields)

    def _key(self):
        ctx = tuple(self.context.items()) if self.context is not None else None
        return (self.domain, self.exogenous, tuple(self.mechanisms.items()), ctx)

    def __eq__(self, other):
        if not isinstance(other, CausalModel):
            return NotImplemented
        return self._key() == other._key()

    def __hash__(self):
        return hash(self._key())

    def __repr__(self):
        return (f"CausalModel({self.domain.describe()}, exo={list(self.exogenous)}, "
                f"endo={list(self.endogenous)})")


def _find_cycle(deps) -> list:
    color = {}

    def visit(v, path):
        color[v] = 1
        path.append(v)
        for p in sorted(deps[v]):
            if color.get(p) == 1:
                return path[path.index(p):] + [p]
            if p not in color:
                found = visit(p, path)
                if found:
                    return found
        path.pop()
        color[v] = 2
        return None

    for v in sorted(deps):
        if v not in color:
            found = visit(v, [])
            if found:
                return found
    return []


def _exo_codes(model: CausalModel, exo: Mapping) -> list:
    missing = [u for u in model.exogenous if u not in exo]
    if missing:
        raise ModelError(f"missing exogenous assignment for {', '.join(missing)}")
    return [model.domain.code(exo[u]) for u in model.exogenous]


def run_batch(model: CausalModel, exo_rows: np.ndarray, forced: np.ndarray | None = None) -> np.ndarray:
    """Evaluate many rows at once, all in value *codes*.

    ``exo_rows`` is ``(K, |U|)`` in ``model.exogenous`` order; ``forced`` is
    ``(K, width)`` over ``model.program.names`` with -1 for "not intervened".
    Returns the ``(K, width)`` code matrix.
    """
    prog = model.program
    k = exo_rows.shape[0]
    regs = np.zeros((k, prog.width), dtype=np.int32)
    if len(prog.exo_idx):
        regs[:, prog.exo_idx] = exo_rows
    if forced is None:
        forced = np.full((k, prog.width), -1, dtype=np.int32)
    kernel.run(prog, regs, np.ascontiguousarray(forced, dtype=np.int32))
    return regs


def evaluate(model: CausalModel, exo: Mapping) -> dict:
    """The unique consistent valuation over U ∪ V extending *exo*."""
    codes = np.array([_exo_codes(model, exo)], dtype=np.int32).reshape(1, len(model.exogenous))
    row = run_batch(model, codes)[0]
    return {n: model.domain.value(int(c)) for n, c in zip(model.program.names, row)}


def evaluate_tree(model: CausalModel, exo: Mapping) -> dict:
    """Same result as :func:`evaluate`, by walking expression trees in any topological order."""
    _exo_codes(model, exo)
    env = {u: exo[u] for u in model.exogenous}
    for v in model.topological_order:
        env[v] = ex.evaluate(model.mechanisms[v], env, model.domain)
    return dict(sorted(env.items()))


def intervene(model: CausalModel, *assignments) -> CausalModel:
    """M[X:=x] for each ``(X, x)`` in order; later assignments to X win."""
    mechanisms = dict(model.mechanisms)
    for name, value in assignments:
        if name in model.exogenous:
            raise ModelError(f"cannot intervene on exogenous variable {name}")
        if name not in mechanisms:
            raise ModelError(f"unknown variable {name}")
        if value not in model.domain:
            raise ModelError(f"{value!r} not in {model.domain.describe()}")
        mechanisms[name] = Const(value)
    return model.replace(mechanisms=mechanisms)


def is_consistent(model: CausalModel, valuation: Mapping) -> bool:
    """True iff every endogenous variable equals its mechanism applied to *valuation*."""
    for v in model.endogenous:
        if ex.evaluate(model.mechanisms[v], valuation, model.domain) != valuation[v]:
            return False
    return True


def true_parents(model: CausalModel, name: str) -> frozenset:
    """Parents the mechanism of *name* actually depends on (exhaustive enumeration)."""
    mech = model.mechanisms[name]
    parents = sorted(ex.variables(mech))
    elems = model.domain.elements
    out = set()
    for i, p in enumerate(parents):
        others = parents[:i] + parents[i + 1:]
        for rest in itertools.product(elems, repeat=len(others)):
            env = dict(zip(others, rest))
            seen = set()
            for val in elems:
                env[p] = val
                seen.add(ex.evaluate(mech, env, model.domain))
                if len(seen) > 1:
                    break
            if len(seen) > 1:
                out.add(p)
                break
    return frozenset(out)


def least_causal_graph(model: CausalModel) -> CausalGraph:
    edges = frozenset((p, v) for v in model.endogenous for p in true_parents(model, v))
    return CausalGraph(model.variables, edges)


def exo_assignments(model: CausalModel):
    """All exogenous assignments, lexicographic in domain-element order."""
    for vals in itertools.product(model.domain.elements, repeat=len(model.exogenous)):
        yield dict(zip(model.exogenous, vals))


def model_dot(model: CausalModel, name: str = "model") -> str:
    """Syntactic dependency graph; exogenous variables dashed."""
    lines = [f'digraph "{name}" {{']
    for u in model.exogenous:
        lines.append(f'  "{u}" [shape=ellipse style=dashed];')
    for v in model.endogenous:
        lines.append(f'  "{v}" [shape=ellipse];')
    for p, c in sorted(model.syntactic_graph().edges):
        lines.append(f'  "{p}" -> "{c}";')
    lines.append("}")
    return "\n".join(lines) + "\n"
