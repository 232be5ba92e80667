"""Mechanism expressions: variables, constants, operator calls and lookup tables."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from functools import cached_property
from typing import Mapping, Union

from .domain import ARITY, BOTTOM, Domain, apply_op


@dataclass(frozen=True)
class Var:
    name: str


@dataclass(frozen=True)
class Const:
    value: object


@dataclass(frozen=True)
class Op:
    op: str
    args: tuple


@dataclass(frozen=True)
class Table:
    """Explicit lookup table keyed by tuples of (ordinary) parent values.

    Tables are strict: any ⊥ parent gives ⊥.
    """

    parents: tuple
    rows: tuple  # ((in_tuple, out), ...) sorted by in_tuple

    @cached_property
    def lookup(self) -> dict:
        return dict(self.rows)

    @classmethod
    def from_mapping(cls, parents, mapping: Mapping) -> "Table":
        return cls(tuple(parents), tuple(sorted(mapping.items(), key=lambda kv: kv[0])))


Expression = Union[Var, Const, Op, Table]


class ExpressionError(ValueError):
    pass


def variables(expr: Expression) -> frozenset:
    """Names mentioned by an expression (its syntactic parents)."""
    if isinstance(expr, Var):
        return frozenset((expr.name,))
    if isinstance(expr, Const):
        return frozenset()
    if isinstance(expr, Table):
        return frozenset(expr.parents)
    return frozenset().union(*(variables(a) for a in expr.args))


def check(expr: Expression, domain: Domain, known) -> None:
    """Raise ExpressionError unless *expr* is well formed over *domain* and *known* names."""
    if isinstance(expr, Var):
        if expr.name not in known:
            raise ExpressionError(f"unknown variable {expr.name!r}")
    elif isinstance(expr, Const):
        if expr.value not in domain:
            raise ExpressionError(f"constant {expr.value!r} not in {domain.describe()}")
    elif isinstance(expr, Op):
        if expr.op not in ARITY:
            raise ExpressionError(f"unknown operator {expr.op!r}")
        arity = ARITY[expr.op]
        if (arity is None and not expr.args) or (arity is not None and len(expr.args) != arity):
            want = "at least 1" if arity is None else str(arity)
            raise ExpressionError(f"{expr.op} takes {want} argument(s), got {len(expr.args)}")
        if expr.op == "div" and not domain.bottom:
            raise ExpressionError("div needs a domain with bottom")
        for a in expr.args:
            check(a, domain, known)
    elif isinstance(expr, Table):
        for p in expr.parents:
            if p not in known:
                raise ExpressionError(f"unknown variable {p!r}")
        if len(set(expr.parents)) != len(expr.parents):
            raise ExpressionError("duplicate table parent")
        ordinary = range(domain.modulus)
        lookup = expr.lookup
        for key in itertools.product(ordinary, repeat=len(expr.parents)):
            if key not in lookup:
                raise ExpressionError(f"table is not total: missing row {key}")
        for key, out in expr.rows:
            if len(key) != len(expr.parents) or any(k not in ordinary for k in key):
                raise ExpressionError(f"bad table row {key}")
            if out not in domain:
                raise ExpressionError(f"table output {out!r} not in domain")
    else:
        raise ExpressionError(f"not an expression: {expr!r}")


def evaluate(expr: Expression, env: Mapping, domain: Domain):
    """Tree-walking evaluation on values (not codes)."""
    if isinstance(expr, Var):
        return env[expr.name]
    if isinstance(expr, Const):
        return expr.value
    if isinstance(expr, Table):
        key = tuple(env[p] for p in expr.parents)
        if any(k is BOTTOM for k in key):
            return BOTTOM
        return expr.lookup[key]
    codes = [domain.code(evaluate(a, env, domain)) for a in expr.args]
    return domain.value(apply_op(expr.op, codes, domain))


def substitute(expr: Expression, renaming: Mapping) -> Expression:
    """Rename variables; names missing from *renaming* are kept."""
    if isinstance(expr, Var):
        return Var(renaming.get(expr.name, expr.name))
    if isinstance(expr, Const):
        return expr
    if isinstance(expr, Table):
        return Table(tuple(renaming.get(p, p) for p in expr.parents), expr.rows)
    return Op(expr.op, tuple(substitute(a, renaming) for a in expr.args))


def format_expr(expr: Expression) -> str:
    if isinstance(expr, Var):
        return expr.name
    if isinstance(expr, Const):
        return Domain.format_value(expr.value)
    if isinstance(expr, Table):
        rows = " ; ".join(
            " ".join(Domain.format_value(v) for v in key) + " -> " + Domain.format_value(out)
            for key, out in expr.rows
        )
        return "table (" + " ".join(expr.parents) + ") { " + rows + " }"
    return expr.op + "(" + ", ".join(format_expr(a) for a in expr.args) + ")"
