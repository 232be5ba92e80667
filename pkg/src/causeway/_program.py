"""Compilation of a causal model into a flat postfix program.

The program is what both kernels execute: one instruction block per
endogenous variable, laid out in topological order.  Instructions are
``(opcode, operand)`` pairs in an int32 array.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass

import numpy as np

from .expr import Const, Op, Table, Var

VAR, CONST, AND, OR, NOT, XOR, ADD, SUB, MUL, DIV, POW, EQ, ITE, TABLE = range(14)

OPCODES = {
    "var": VAR,
    "const": CONST,
    "and": AND,
    "or": OR,
    "not": NOT,
    "xor": XOR,
    "add": ADD,
    "sub": SUB,
    "mul": MUL,
    "div": DIV,
    "pow": POW,
    "eq": EQ,
    "ite": ITE,
    "table": TABLE,
}


@dataclass(frozen=True, eq=False)
class Program:
    names: tuple
    index: dict
    exo_idx: np.ndarray
    order: np.ndarray
    starts: np.ndarray
    ends: np.ndarray
    code: np.ndarray
    tables: np.ndarray
    inv: np.ndarray
    modulus: int
    bottom: int
    stack_size: int

    @property
    def width(self) -> int:
        return len(self.names)


def compile_model(model) -> Program:
    domain = model.domain
    names = tuple(sorted(model.exogenous + model.endogenous))
    index = {n: i for i, n in enumerate(names)}
    code: list = []
    tables: list = []
    starts, ends = [], []
    max_depth = 1

    def emit(expr, depth):
        nonlocal max_depth
        max_depth = max(max_depth, depth + 1)
        if isinstance(expr, Var):
            code.extend((VAR, index[expr.name]))
        elif isinstance(expr, Const):
            code.extend((CONST, domain.code(expr.value)))
        elif isinstance(expr, Table):
            for i, p in enumerate(expr.parents):
                code.extend((VAR, index[p]))
                max_depth = max(max_depth, depth + i + 1)
            offset = len(tables)
            tables.append(len(expr.parents))
            lookup = expr.lookup
            # row-major over parents, first parent most significant
            for key in itertools.product(range(domain.modulus), repeat=len(expr.parents)):
                tables.append(domain.code(lookup[key]))
            code.extend((TABLE, offset))
        elif isinstance(expr, Op):
            for i, a in enumerate(expr.args):
                emit(a, depth + i)
            code.extend((OPCODES[expr.op], len(expr.args)))
        else:
            raise TypeError(expr)

    for name in model.topological_order:
        starts.append(len(code) // 2)
        emit(model.mechanisms[name], 0)
        ends.append(len(code) // 2)

    i32 = np.int32
    return Program(
        names=names,
        index=index,
        exo_idx=np.array([index[u] for u in model.exogenous], dtype=i32),
        order=np.array([index[v] for v in model.topological_order], dtype=i32),
        starts=np.array(starts, dtype=i32),
        ends=np.array(ends, dtype=i32),
        code=np.array(code, dtype=i32),
        tables=np.array(tables or [0], dtype=i32),
        inv=np.array(domain.inverses, dtype=i32),
        modulus=domain.modulus,
        bottom=domain.bottom_code,
        stack_size=max_depth + 1,
    )
