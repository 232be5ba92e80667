"""Pointwise, local and global approximation, and predictive power.

A *provenance semantics* picks a provenance record for every input tuple:
either a provenance graph with its interpretation (a :class:`GraphFunction`)
or a causal model.  Functional mode compares the record's output with a
black-box function; causal mode compares full valuations under
interventions with a causal function.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Callable, Mapping, Sequence

import numpy as np

from .domain import Domain
from .expr import Const
from .model import CausalModel, evaluate, intervene, run_batch
from .provenance import GraphFunction, Interpretation, ProvenanceGraph, compile_model

DEFAULT_BUDGET = 10**6
TAU_UNCAPPED_UP_TO = 8
TAU_CAP = 3


class SignatureError(ValueError):
    pass


class PowerBudgetExceeded(ValueError):
    def __init__(self, required: int, budget: int):
        self.required = required
        self.budget = budget
        super().__init__(f"predictive power needs {required} input pairs, budget is {budget}")


@dataclass(frozen=True, eq=False)
class BlackBoxFunction:
    """A total function ``D^n -> D`` given by its table."""

    inputs: tuple
    domain: Domain
    rows: Mapping

    def __post_init__(self):
        object.__setattr__(self, "inputs", tuple(self.inputs))
        rows = dict(self.rows)
        for u in self.input_space():
            if u not in rows:
                raise ValueError(f"function is not total: no value for {u}")
            if rows[u] not in self.domain:
                raise ValueError(f"value {rows[u]!r} at {u} is outside the domain")
        if len(rows) != len(self.input_space()):
            raise ValueError("function table has rows outside the input space")
        object.__setattr__(self, "rows", rows)

    @property
    def arity(self) -> int:
        return len(self.inputs)

    def input_space(self) -> list:
        return list(itertools.product(self.domain.elements, repeat=len(self.inputs)))

    def __call__(self, u: Sequence):
        return self.rows[tuple(u)]

    @classmethod
    def from_model(cls, model: CausalModel, result: str, inputs: Sequence | None = None):
        inputs = tuple(inputs) if inputs is not None else model.exogenous
        if set(inputs) != set(model.exogenous):
            raise SignatureError("inputs must list exactly the model's exogenous variables")
        if result not in model.variables:
            raise SignatureError(f"unknown result variable {result!r}")
        space = list(itertools.product(model.domain.elements, repeat=len(inputs)))
        rows = {u: evaluate(model, dict(zip(inputs, u)))[result] for u in space}
        return cls(inputs, model.domain, rows)

    @classmethod
    def from_graph(cls, fn: GraphFunction):
        return cls(fn.inputs, fn.interp.domain, fn.table())


def partial_valuations(variables: Sequence, domain: Domain, cap: int | None = None) -> list:
    """Every τ over *variables*: subsets by size then name, values in domain order.

    Default cap: none up to 8 variables, subsets of size ≤ 3 beyond.
    """
    variables = sorted(variables)
    if cap is None:
        cap = len(variables) if len(variables) <= TAU_UNCAPPED_UP_TO else TAU_CAP
    out = []
    for size in range(min(cap, len(variables)) + 1):
        for names in itertools.combinations(variables, size):
            for vals in itertools.product(domain.elements, repeat=size):
                out.append(tuple(zip(names, vals)))
    return out


class CausalFunction:
    """A family ``f_τ : D^U -> D^V`` indexed by partial valuations τ over V.

    Built from a causal model (``⟦M⟧``) or from an arbitrary callable
    ``fn(tau, u) -> {V: value}``; either way ``τ ⊆ f_τ(u)`` is enforced.
    """

    def __init__(self, inputs: Sequence, variables: Sequence, domain: Domain,
                 model: CausalModel | None = None, fn: Callable | None = None):
        if (model is None) == (fn is None):
            raise ValueError("give exactly one of model or fn")
        self.inputs = tuple(inputs)
        self.variables = tuple(sorted(variables))
        self.domain = domain
        self.model = model
        self._fn = fn
        self._intervened: dict = {}

    def input_space(self) -> list:
        return list(itertools.product(self.domain.elements, repeat=len(self.inputs)))

    def _model_for(self, tau: tuple) -> CausalModel:
        if tau not in self._intervened:
            self._intervened[tau] = intervene(self.model, *tau)
        return self._intervened[tau]

    def __call__(self, tau, u) -> dict:
        tau = tuple(sorted(tau.items() if isinstance(tau, Mapping) else tau))
        for name, _ in tau:
            if name not in self.variables:
                raise SignatureError(f"τ assigns {name!r}, which is not in V")
        if not isinstance(u, Mapping):
            u = dict(zip(self.inputs, u))
        if self.model is not None:
            full = evaluate(self._model_for(tau), u)
            out = {v: full[v] for v in self.variables}
        else:
            out = dict(self._fn(dict(tau), dict(u)))
            if set(out) != set(self.variables):
                raise SignatureError("causal function must return a valuation over V")
        for name, value in tau:
            if out[name] != value:
                raise ValueError(f"τ ⊄ f_τ(u): {name} forced to {value!r} but got {out[name]!r}")
        return out

    def taus(self, cap: int | None = None) -> list:
        return partial_valuations(self.variables, self.domain, cap)


def causal_function_of_model(model: CausalModel, inputs: Sequence | None = None) -> CausalFunction:
    inputs = tuple(inputs) if inputs is not None else model.exogenous
    if set(inputs) != set(model.exogenous):
        raise SignatureError("inputs must list exactly the model's exogenous variables")
    return CausalFunction(inputs, model.endogenous, model.domain, model=model)


@dataclass(frozen=True, eq=False)
class ProvenanceSemantics:
    """``Pf``: input tuple (over ``inputs``) -> provenance record.

    Records are :class:`GraphFunction` or :class:`CausalModel`.  ``result``
    names the output variable when a model record is read as a function.
    """

    inputs: tuple
    domain: Domain
    choose: Callable
    result: str | None = None
    name: str = "semantics"

    def __call__(self, u: Sequence):
        return self.choose(tuple(u))

    def input_space(self) -> list:
        return list(itertools.product(self.domain.elements, repeat=len(self.inputs)))


def fixed_semantics(record, inputs: Sequence, domain: Domain, result: str | None = None,
                    name: str = "fixed-graph") -> ProvenanceSemantics:
    return ProvenanceSemantics(tuple(inputs), domain, lambda u: record, result, name)


def case_split_semantics(split: str, cases: Mapping, inputs: Sequence, domain: Domain,
                         result: str | None = None, name: str = "case-split") -> ProvenanceSemantics:
    inputs = tuple(inputs)
    if split not in inputs:
        raise SignatureError(f"case-split variable {split!r} is not an input")
    missing = [v for v in domain.elements if v not in cases]
    if missing:
        raise SignatureError(f"case-split on {split} misses value(s) {missing}")
    pos = inputs.index(split)
    cases = dict(cases)
    return ProvenanceSemantics(inputs, domain, lambda u: cases[u[pos]], result, name)


def constant_graph(value, domain: Domain) -> GraphFunction:
    g = ProvenanceGraph.build({"result": value}, {}, inputs=(), result="result")
    return GraphFunction(g, Interpretation.build(domain, {}))


def constant_semantics(f) -> ProvenanceSemantics:
    """The trivial semantics: for each input, a record with no link to the inputs."""
    if isinstance(f, BlackBoxFunction):
        cache: dict = {}

        def choose(u):
            value = f(u)
            if value not in cache:
                cache[value] = constant_graph(value, f.domain)
            return cache[value]

        return ProvenanceSemantics(f.inputs, f.domain, choose, "result", "constant-graph")

    cache = {}

    def choose_model(u):
        vals = f((), u)
        key = tuple(sorted(vals.items()))
        if key not in cache:
            cache[key] = CausalModel(f.domain, f.inputs, {v: Const(x) for v, x in vals.items()})
        return cache[key]

    return ProvenanceSemantics(f.inputs, f.domain, choose_model, None, "constant-graph")


@dataclass(frozen=True)
class Counterexample:
    u: tuple
    u_prime: tuple
    tau: tuple
    expected: object
    got: object

    def describe(self, inputs: Sequence = ()) -> str:
        fmt = Domain.format_value

        def tup(t):
            return "(" + ", ".join(fmt(v) for v in t) + ")"

        def val(v):
            if isinstance(v, dict):
                return "{" + ", ".join(f"{k}={fmt(x)}" for k, x in sorted(v.items())) + "}"
            return fmt(v)

        tau = "[" + ", ".join(f"{n}:={fmt(v)}" for n, v in self.tau) + "]"
        names = f" over ({', '.join(inputs)})" if inputs else ""
        return (f"record for u={tup(self.u)}{names} at u'={tup(self.u_prime)} under τ={tau}: "
                f"expected {val(self.expected)}, got {val(self.got)}")


@dataclass(frozen=True)
class ApproxResult:
    holds: bool
    counterexample: Counterexample | None = None

    def __bool__(self):
        return self.holds


# -- reading records ---------------------------------------------------------

def _record_value(record, P: ProvenanceSemantics, u_prime: tuple):
    env = dict(zip(P.inputs, u_prime))
    if isinstance(record, GraphFunction):
        missing = [v for v in record.inputs if v not in env]
        if missing:
            raise SignatureError(f"graph inputs {missing} are not semantics inputs")
        return record(tuple(env[v] for v in record.inputs))
    if isinstance(record, CausalModel):
        if P.result is None:
            raise SignatureError("model records need a result variable in functional mode")
        exo = {u: env[u] for u in record.exogenous}
        return evaluate(record, exo)[P.result]
    raise SignatureError(f"not a provenance record: {record!r}")


def record_model(record) -> CausalModel:
    if isinstance(record, CausalModel):
        return record
    if isinstance(record, GraphFunction):
        return compile_model(record.graph, record.interp, proxy_inputs=False)
    raise SignatureError(f"not a provenance record: {record!r}")


def _check_signature(model: CausalModel, f: CausalFunction) -> None:
    if not set(model.exogenous) <= set(f.inputs):
        raise SignatureError(f"record inputs {list(model.exogenous)} are not among {list(f.inputs)}")
    missing = set(f.variables) - set(model.endogenous)
    if missing:
        raise SignatureError(f"record lacks variables {sorted(missing)} of the causal function")


def _record_state(model: CausalModel, f: CausalFunction, tau: tuple, u_prime: tuple) -> dict:
    _check_signature(model, f)
    env = dict(zip(f.inputs, u_prime))
    full = evaluate(intervene(model, *tau), {u: env[u] for u in model.exogenous})
    return {v: full[v] for v in f.variables}


def _check_functional(P: ProvenanceSemantics, f: BlackBoxFunction) -> None:
    if tuple(P.inputs) != tuple(f.inputs) or P.domain != f.domain:
        raise SignatureError("semantics and function disagree on inputs or domain")


def _check_causal(P: ProvenanceSemantics, f: CausalFunction) -> None:
    if tuple(P.inputs) != tuple(f.inputs) or P.domain != f.domain:
        raise SignatureError("semantics and causal function disagree on inputs or domain")


# -- the three grades --------------------------------------------------------

def is_pointwise_approx(P: ProvenanceSemantics, f) -> ApproxResult:
    """Every record reproduces its own run (causal mode: the whole valuation, τ = ∅)."""
    if isinstance(f, CausalFunction):
        _check_causal(P, f)
        for u in f.input_space():
            want = f((), u)
            got = _record_state(record_model(P(u)), f, (), u)
            if got != want:
                return ApproxResult(False, Counterexample(u, u, (), want, got))
        return ApproxResult(True)
    _check_functional(P, f)
    for u in f.input_space():
        got = _record_value(P(u), P, u)
        if got != f(u):
            return ApproxResult(False, Counterexample(u, u, (), f(u), got))
    return ApproxResult(True)


def is_local_approx(P: ProvenanceSemantics, f: CausalFunction, tau_cap: int | None = None) -> ApproxResult:
    """Every record predicts its own run under every intervention τ."""
    if not isinstance(f, CausalFunction):
        raise SignatureError("local approximation is defined for causal functions")
    _check_causal(P, f)
    taus = f.taus(tau_cap)
    for u in f.input_space():
        model = record_model(P(u))
        for tau in taus:
            want = f(tau, u)
            got = _record_state(model, f, tau, u)
            if got != want:
                return ApproxResult(False, Counterexample(u, u, tau, want, got))
    return ApproxResult(True)


def is_global_approx(P: ProvenanceSemantics, f, tau_cap: int | None = None) -> ApproxResult:
    """Every record reproduces f on every input (causal mode: under every τ too)."""
    if isinstance(f, CausalFunction):
        _check_causal(P, f)
        space = f.input_space()
        taus = f.taus(tau_cap)
        want = _causal_table(f.model, f, taus, space) if f.model is not None else None
        seen: dict = {}
        for u in space:
            record = P(u)
            if id(record) in seen:
                continue
            seen[id(record)] = record
            got = _causal_table(record_model(record), f, taus, space)
            for j, u2 in enumerate(space):
                for t, tau in enumerate(taus):
                    expected = (_decode(f, want[t, j]) if want is not None else f(tau, u2))
                    actual = _decode(f, got[t, j])
                    if actual != expected:
                        return ApproxResult(False, Counterexample(u, u2, tau, expected, actual))
        return ApproxResult(True)
    _check_functional(P, f)
    space = f.input_space()
    for u in space:
        record = P(u)
        for u2 in space:
            got = _record_value(record, P, u2)
            if got != f(u2):
                return ApproxResult(False, Counterexample(u, u2, (), f(u2), got))
    return ApproxResult(True)


def _decode(f: CausalFunction, codes) -> dict:
    return {v: f.domain.value(int(c)) for v, c in zip(f.variables, codes)}


def _causal_table(model: CausalModel, f: CausalFunction, taus: list, space: list) -> np.ndarray:
    """Codes of f's variables for every (τ, u'): shape ``(len(taus), len(space), |V|)``."""
    _check_signature(model, f)
    prog = model.program
    dom = f.domain
    n_t, n_u = len(taus), len(space)
    exo_pos = [f.inputs.index(x) for x in model.exogenous]
    space_codes = np.array([[dom.code(v) for v in u] for u in space], dtype=np.int32).reshape(n_u, len(f.inputs))
    exo_rows = np.tile(space_codes[:, exo_pos], (n_t, 1)) if exo_pos else np.zeros((n_t * n_u, 0), np.int32)
    forced = np.full((n_t, prog.width), -1, dtype=np.int32)
    for t, tau in enumerate(taus):
        for name, value in tau:
            forced[t, prog.index[name]] = dom.code(value)
    forced = np.repeat(forced, n_u, axis=0)
    out = run_batch(model, exo_rows, forced)
    cols = [prog.index[v] for v in f.variables]
    return out[:, cols].reshape(n_t, n_u, len(cols))


# -- predictive power --------------------------------------------------------

@dataclass(frozen=True, eq=False)
class PredictivePowerRelation:
    """``u ⇝ u'`` as a boolean matrix indexed by the enumerated input space."""

    inputs: tuple          # variable names
    space: tuple           # input tuples, row/column order
    matrix: np.ndarray
    mode: str = "functional"

    @property
    def reflexive(self) -> bool:
        return bool(np.all(np.diag(self.matrix)))

    @property
    def total(self) -> bool:
        return bool(np.all(self.matrix))

    @property
    def density(self) -> float:
        return float(self.matrix.mean()) if self.matrix.size else 1.0

    def holds(self, u, u_prime) -> bool:
        index = {x: i for i, x in enumerate(self.space)}
        return bool(self.matrix[index[tuple(u)], index[tuple(u_prime)]])

    def pairs(self) -> list:
        return [(self.space[i], self.space[j]) for i, j in zip(*np.nonzero(self.matrix))]

    def dump(self) -> str:
        fmt = Domain.format_value

        def tup(t):
            return "(" + ", ".join(fmt(v) for v in t) + ")"

        return "".join(f"{tup(a)} ~> {tup(b)}\n" for a, b in self.pairs())

    def summary(self) -> str:
        n = len(self.space)
        return (f"mode: {self.mode}\ninputs: ({', '.join(self.inputs)})\npoints: {n}\n"
                f"related pairs: {int(self.matrix.sum())} of {n * n}\n"
                f"reflexive: {'yes' if self.reflexive else 'no'}\n"
                f"total: {'yes' if self.total else 'no'}\n"
                f"density: {self.density:.4f}\n")


def predictive_power(P: ProvenanceSemantics, f, mode: str | None = None,
                     budget: int = DEFAULT_BUDGET, tau_cap: int | None = None) -> PredictivePowerRelation:
    mode = mode or ("causal" if isinstance(f, CausalFunction) else "functional")
    if mode == "causal" and not isinstance(f, CausalFunction):
        raise SignatureError("causal mode needs a causal function")
    if mode == "functional" and not isinstance(f, BlackBoxFunction):
        raise SignatureError("functional mode needs a black-box function")
    space = f.input_space()
    required = len(space) ** 2
    if required > budget:
        raise PowerBudgetExceeded(required, budget)
    matrix = np.zeros((len(space), len(space)), dtype=bool)
    rows_of: dict = {}
    records: dict = {}
    for i, u in enumerate(space):
        record = P(u)
        records[id(record)] = record
        rows_of.setdefault(id(record), []).append(i)
    if mode == "functional":
        _check_functional(P, f)
        truth = [f(u) for u in space]
        for key, rows in rows_of.items():
            record = records[key]
            hits = np.array([_record_value(record, P, u2) == t for u2, t in zip(space, truth)])
            matrix[rows, :] = hits
    else:
        _check_causal(P, f)
        taus = f.taus(tau_cap)
        if f.model is not None:
            truth = _causal_table(f.model, f, taus, space)
        else:
            dom = f.domain
            truth = np.array([[[dom.code(f(t, u)[v]) for v in f.variables] for u in space]
                              for t in taus], dtype=np.int32).reshape(len(taus), len(space), -1)
        for key, rows in rows_of.items():
            got = _causal_table(record_model(records[key]), f, taus, space)
            matrix[rows, :] = np.all(got == truth, axis=(0, 2))
    return PredictivePowerRelation(tuple(P.inputs), tuple(space), matrix, mode)


def compare_power(r1: PredictivePowerRelation, r2: PredictivePowerRelation) -> str:
    """``equal``, ``less-or-equal`` (r1 ⊂ r2), ``greater-or-equal`` or ``incomparable``."""
    if r1.space != r2.space or r1.inputs != r2.inputs:
        raise SignatureError("relations are over different input spaces")
    sub = bool(np.all(~r1.matrix | r2.matrix))
    sup = bool(np.all(~r2.matrix | r1.matrix))
    if sub and sup:
        return "equal"
    if sub:
        return "less-or-equal"
    if sup:
        return "greater-or-equal"
    return "incomparable"
