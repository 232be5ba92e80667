"""Halpern-Pearl weak and actual causes by exhaustive search.

The search follows the definition literally (condition 1, then some
contingency ``W := w'`` and alternative ``X := x'`` with ``Y != y`` while
every ``Z`` restored to its actual value keeps ``Y = y``).  Two reductions
are applied that never change an answer or the first witness reported:

* ``W`` and ``Z`` range only over endogenous ancestors of ``Y``.  Fixing a
  non-ancestor cannot move ``Y``, and a witness containing one stays a
  witness without it, so the smallest (first) witness never contains one.
* In :func:`actual_causes`, candidate sets containing a non-ancestor of
  ``Y`` are skipped: they are either not weak causes or strict supersets of
  one, so never minimal.
"""

from __future__ import annotations

import itertools
import os
from dataclasses import dataclass
from types import MappingProxyType
from typing import Iterable, Mapping

import numpy as np

from .model import CausalModel, ModelError, evaluate, intervene, is_consistent, run_batch

DEFAULT_MAX_SIZE = 3


class CauseError(ValueError):
    pass


def default_max_size() -> int:
    raw = os.environ.get("CAUSEWAY_MAX_CAUSE_SIZE")
    if not raw:
        return DEFAULT_MAX_SIZE
    try:
        value = int(raw)
    except ValueError:
        raise CauseError(f"CAUSEWAY_MAX_CAUSE_SIZE must be an integer, got {raw!r}") from None
    if value < 1:
        raise CauseError("CAUSEWAY_MAX_CAUSE_SIZE must be positive")
    return value


@dataclass(frozen=True, eq=False)
class CausalSituation:
    """A causal model paired with a consistent valuation over U ∪ V."""

    model: CausalModel
    sigma: Mapping

    def __post_init__(self):
        names = set(self.model.variables)
        if set(self.sigma) != names:
            missing = sorted(names - set(self.sigma))
            extra = sorted(set(self.sigma) - names)
            raise CauseError(f"valuation must cover U and V (missing {missing}, extra {extra})")
        for name, value in self.sigma.items():
            if value not in self.model.domain:
                raise CauseError(f"{name}={value!r} is not in the domain")
        if not is_consistent(self.model, self.sigma):
            raise CauseError("valuation is not consistent with the model")
        object.__setattr__(self, "sigma", MappingProxyType(dict(sorted(self.sigma.items()))))

    @classmethod
    def from_exo(cls, model: CausalModel, exo: Mapping) -> "CausalSituation":
        return cls(model, evaluate(model, exo))

    @property
    def exo(self) -> dict:
        return {u: self.sigma[u] for u in self.model.exogenous}


@dataclass(frozen=True)
class CauseQuery:
    """``X⃗ = x⃗`` (sorted by name) as a candidate cause of ``Y = y``."""

    cause: tuple
    effect: tuple

    @classmethod
    def of(cls, cause: Mapping | Iterable, effect) -> "CauseQuery":
        items = cause.items() if isinstance(cause, Mapping) else cause
        return cls(tuple(sorted(items)), tuple(effect))

    @property
    def cause_vars(self) -> tuple:
        return tuple(name for name, _ in self.cause)

    @property
    def cause_values(self) -> tuple:
        return tuple(value for _, value in self.cause)


@dataclass(frozen=True)
class WitnessedCause:
    query: CauseQuery
    contingency: tuple
    contingency_values: tuple
    counterfactual_values: tuple
    kind: str = "weak"

    def describe(self) -> str:
        from .domain import Domain

        fmt = Domain.format_value
        cause = ", ".join(f"{n}={fmt(v)}" for n, v in self.query.cause)
        w = ", ".join(f"{n}:={fmt(v)}" for n, v in zip(self.contingency, self.contingency_values))
        x = ", ".join(f"{n}:={fmt(v)}"
                      for n, v in zip(self.query.cause_vars, self.counterfactual_values))
        y, yv = self.query.effect
        return f"{{{cause}}} causes {y}={fmt(yv)}  witness W={{{w}}} x'={{{x}}}"

    def as_dict(self) -> dict:
        from .domain import Domain

        fmt = Domain.format_value
        return {
            "cause": {n: fmt(v) for n, v in self.query.cause},
            "effect": {self.query.effect[0]: fmt(self.query.effect[1])},
            "contingency": {n: fmt(v) for n, v in zip(self.contingency, self.contingency_values)},
            "counterfactual": {n: fmt(v) for n, v in
                               zip(self.query.cause_vars, self.counterfactual_values)},
            "kind": self.kind,
        }


class _Search:
    """Per-(situation, effect variable) state shared by many cause checks."""

    def __init__(self, sit: CausalSituation, effect_var: str):
        model = sit.model
        self.sit = sit
        self.model = model
        self.prog = model.program
        self.col = self.prog.index
        self.domain = model.domain
        self.codes = list(range(self.domain.size))
        self.sigma = np.array([self.domain.code(sit.sigma[n]) for n in self.prog.names],
                              dtype=np.int32)
        self.exo = self.sigma[self.prog.exo_idx] if len(self.prog.exo_idx) else np.zeros(0, np.int32)
        self.y = effect_var
        endo = set(model.endogenous)
        self.ancestors = frozenset(model.syntactic_graph().ancestors(effect_var) & endo)

    def _run(self, forced: np.ndarray) -> np.ndarray:
        k = forced.shape[0]
        exo_rows = np.broadcast_to(self.exo, (k, self.exo.shape[0]))
        return run_batch(self.model, exo_rows, forced)[:, self.col[self.y]]

    def _holds_everywhere(self, pins: dict, rest: list, y_code: int) -> bool:
        """2(b): Y = y under ``pins`` for every Z ⊆ rest restored to its actual value."""
        r = len(rest)
        forced = np.full((1 << r, self.prog.width), -1, dtype=np.int32)
        for name, code in pins.items():
            forced[:, self.col[name]] = code
        if r:
            bits = (np.arange(1 << r)[:, None] >> np.arange(r)) & 1
            cols = [self.col[z] for z in rest]
            forced[:, cols] = np.where(bits == 1, self.sigma[cols], -1)
        return bool(np.all(self._run(forced) == y_code))

    def weak(self, xs: tuple, x_codes: tuple, y_code: int):
        """First witness ``(W, w', x')`` in codes, or None."""
        if any(self.sigma[self.col[x]] != c for x, c in zip(xs, x_codes)):
            return None
        if self.sigma[self.col[self.y]] != y_code:
            return None
        pool = sorted(self.ancestors - set(xs) - {self.y})
        width = self.prog.width
        x_cols = [self.col[x] for x in xs]
        for size in range(len(pool) + 1):
            for ws in itertools.combinations(pool, size):
                w_cols = [self.col[w] for w in ws]
                combos = np.array(list(itertools.product(self.codes, repeat=size + len(xs))),
                                  dtype=np.int32).reshape(-1, size + len(xs))
                forced = np.full((combos.shape[0], width), -1, dtype=np.int32)
                forced[:, w_cols + x_cols] = combos
                flipped = self._run(forced) != y_code
                if not flipped.any():
                    continue
                rest = [z for z in pool if z not in ws]
                per_w = len(self.codes) ** len(xs)
                flipped = flipped.reshape(-1, per_w)
                for wi in np.flatnonzero(flipped.any(axis=1)):
                    w_vals = tuple(int(c) for c in combos[wi * per_w, :size])
                    pins = dict(zip(xs, x_codes))
                    pins.update(zip(ws, w_vals))
                    if self._holds_everywhere(pins, rest, y_code):
                        xi = int(np.flatnonzero(flipped[wi])[0])
                        x_alt = tuple(int(c) for c in combos[wi * per_w + xi, size:])
                        return ws, w_vals, x_alt
        return None


def _check_query(sit: CausalSituation, q: CauseQuery) -> None:
    model = sit.model
    y, yv = q.effect
    if y not in model.endogenous:
        raise CauseError(f"effect {y} is not an endogenous variable")
    if not q.cause:
        raise CauseError("empty cause")
    if len(set(q.cause_vars)) != len(q.cause_vars):
        raise CauseError("duplicate cause variable")
    for x, v in q.cause:
        if x not in model.endogenous:
            raise CauseError(f"cause {x} is not an endogenous variable")
        if v not in model.domain:
            raise CauseError(f"{x}={v!r} is outside the domain")
    if y in q.cause_vars:
        raise CauseError("effect variable cannot be part of the cause")
    if yv not in model.domain:
        raise CauseError(f"{y}={yv!r} is outside the domain")


def _witness(search: _Search, q: CauseQuery, kind="weak"):
    dom = search.domain
    found = search.weak(q.cause_vars, tuple(dom.code(v) for v in q.cause_values),
                        dom.code(q.effect[1]))
    if found is None:
        return None
    ws, w_codes, x_codes = found
    return WitnessedCause(q, tuple(ws), tuple(dom.value(c) for c in w_codes),
                          tuple(dom.value(c) for c in x_codes), kind)


def is_weak_cause(sit: CausalSituation, q: CauseQuery) -> WitnessedCause | None:
    _check_query(sit, q)
    return _witness(_Search(sit, q.effect[0]), q)


def actual_causes(sit: CausalSituation, effect, max_size: int | None = None) -> list:
    """Every minimal weak cause of ``effect`` of size at most ``max_size``.

    Ordered by size, then lexicographically by variable names.
    """
    if max_size is None:
        max_size = default_max_size()
    if max_size < 1:
        raise CauseError("max_size must be at least 1")
    y, yv = effect
    if y not in sit.model.endogenous:
        raise CauseError(f"effect {y} is not an endogenous variable")
    if sit.sigma[y] != yv:
        raise CauseError(f"{y}={yv!r} does not hold in the situation")
    search = _Search(sit, y)
    pool = sorted(search.ancestors - {y})
    weak_sets: list = []
    out = []
    for size in range(1, max_size + 1):
        for xs in itertools.combinations(pool, size):
            if any(w <= set(xs) for w in weak_sets):
                continue
            q = CauseQuery(tuple((x, sit.sigma[x]) for x in xs), (y, yv))
            found = _witness(search, q, kind="actual")
            if found is not None:
                weak_sets.append(set(xs))
                out.append(found)
    return out


def is_part_of_cause(sit: CausalSituation, part, effect, max_size: int | None = None) -> bool:
    x, xv = part
    if x == effect[0]:
        return False
    if sit.sigma.get(x) != xv:
        return False
    return any((x, xv) in c.query.cause for c in actual_causes(sit, effect, max_size))


def part_of_cause_relation(sit: CausalSituation, max_size: int | None = None) -> set:
    """All ``(x, y)`` with ``x = σ(x)`` part of an actual cause of ``y = σ(y)``."""
    rel = set()
    for y in sit.model.endogenous:
        for c in actual_causes(sit, (y, sit.sigma[y]), max_size):
            rel.update((x, y) for x in c.query.cause_vars)
    return rel


def replay(sit: CausalSituation, w: WitnessedCause) -> bool:
    """Re-check a witness against the definition, without any pruning."""
    model = sit.model
    q = w.query
    y, yv = q.effect
    if any(sit.sigma[x] != v for x, v in q.cause) or sit.sigma[y] != yv:
        return False
    if set(w.contingency) & (set(q.cause_vars) | {y}):
        return False
    alt = intervene(model, *zip(q.cause_vars, w.counterfactual_values),
                    *zip(w.contingency, w.contingency_values))
    if evaluate(alt, sit.exo)[y] == yv:
        return False
    search = _Search(sit, y)
    dom = model.domain
    pins = {x: dom.code(v) for x, v in q.cause}
    pins.update((n, dom.code(v)) for n, v in zip(w.contingency, w.contingency_values))
    rest = [v for v in model.endogenous if v not in pins and v != y]
    return search._holds_everywhere(pins, rest, dom.code(yv))


__all__ = [
    "CausalSituation", "CauseError", "CauseQuery", "ModelError", "WitnessedCause",
    "actual_causes", "default_max_size", "is_part_of_cause", "is_weak_cause",
    "part_of_cause_relation", "replay",
]
