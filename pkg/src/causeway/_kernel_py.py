"""Pure-Python interpreter for compiled model programs (fallback kernel)."""

from ._program import (ADD, AND, CONST, DIV, EQ, ITE, MUL, NOT, OPCODES, OR,
                       POW, SUB, TABLE, VAR, XOR)

IMPLEMENTATION = "python"

__all__ = ["IMPLEMENTATION", "OPCODES", "run"]


def _exec(code, start, end, tables, inv, m, bot, row):
    stack = []
    push = stack.append
    for pc in range(start, end):
        op = code[2 * pc]
        arg = code[2 * pc + 1]
        if op == VAR:
            push(row[arg])
            continue
        if op == CONST:
            push(arg)
            continue
        if op == TABLE:
            n = tables[arg]
            args = stack[len(stack) - n:]
            del stack[len(stack) - n:]
            if bot >= 0 and bot in args:
                push(bot)
                continue
            idx = 0
            for a in args:
                idx = idx * m + a
            push(tables[arg + 1 + idx])
            continue
        args = stack[len(stack) - arg:]
        del stack[len(stack) - arg:]
        if bot >= 0 and bot in args:
            push(bot)
        elif op == AND:
            push(int(all(args)))
        elif op == OR:
            push(int(any(args)))
        elif op == NOT:
            push(int(args[0] == 0))
        elif op == XOR:
            push(sum(1 for a in args if a) & 1)
        elif op == ADD:
            push(sum(args) % m)
        elif op == SUB:
            push((args[0] - args[1]) % m)
        elif op == MUL:
            acc = 1 % m
            for a in args:
                acc = acc * a % m
            push(acc)
        elif op == DIV:
            b = inv[args[1]]
            push(bot if b < 0 else args[0] * b % m)
        elif op == POW:
            push(pow(args[0], args[1], m))
        elif op == EQ:
            push(int(args[0] == args[1]))
        elif op == ITE:
            push(args[1] if args[0] else args[2])
        else:
            raise ValueError(f"bad opcode {op}")
    return stack[0]


def run(program, regs, forced):
    """Fill the endogenous columns of every row of *regs* in place."""
    code = program.code.tolist()
    tables = program.tables.tolist()
    inv = program.inv.tolist()
    m, bot = program.modulus, program.bottom
    steps = list(zip(program.order.tolist(), program.starts.tolist(), program.ends.tolist()))
    pinned = forced.tolist()
    for k in range(regs.shape[0]):
        row = regs[k].tolist()
        pins = pinned[k]
        for v, start, end in steps:
            p = pins[v]
            row[v] = p if p >= 0 else _exec(code, start, end, tables, inv, m, bot, row)
        regs[k] = row
