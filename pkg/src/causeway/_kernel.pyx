# cython: language_level=3, boundscheck=False, wraparound=False, cdivision=True
"""Compiled evaluation kernel for postfix model programs.

Mirrors ``_kernel_py.run`` exactly; opcode numbers must match
``causeway._program``.
"""

from libc.stdlib cimport malloc, free

IMPLEMENTATION = "cython"

cdef enum:
    OP_VAR = 0
    OP_CONST = 1
    OP_AND = 2
    OP_OR = 3
    OP_NOT = 4
    OP_XOR = 5
    OP_ADD = 6
    OP_SUB = 7
    OP_MUL = 8
    OP_DIV = 9
    OP_POW = 10
    OP_EQ = 11
    OP_ITE = 12
    OP_TABLE = 13

OPCODES = {
    "var": OP_VAR, "const": OP_CONST, "and": OP_AND, "or": OP_OR, "not": OP_NOT,
    "xor": OP_XOR, "add": OP_ADD, "sub": OP_SUB, "mul": OP_MUL, "div": OP_DIV,
    "pow": OP_POW, "eq": OP_EQ, "ite": OP_ITE, "table": OP_TABLE,
}


cdef inline int _powmod(int a, int b, int m) nogil:
    cdef long r = 1
    cdef long base = a % m
    while b > 0:
        if b & 1:
            r = r * base % m
        base = base * base % m
        b >>= 1
    return <int>(r % m)


cdef int _exec(const int[:] code, int start, int end, const int[:] tables,
               const int[:] inv, int m, int bot, int* row, int* stack) nogil:
    cdef int pc, op, arg, sp = 0, i, a, b, c, n, acc, offset, idx, strict
    for pc in range(start, end):
        op = code[2 * pc]
        arg = code[2 * pc + 1]
        if op == OP_VAR:
            stack[sp] = row[arg]
            sp += 1
            continue
        if op == OP_CONST:
            stack[sp] = arg
            sp += 1
            continue
        if op == OP_TABLE:
            offset = arg
            n = tables[offset]
            sp -= n
            strict = 0
            idx = 0
            for i in range(n):
                a = stack[sp + i]
                if bot >= 0 and a == bot:
                    strict = 1
                idx = idx * m + a
            if strict:
                stack[sp] = bot
            else:
                stack[sp] = tables[offset + 1 + idx]
            sp += 1
            continue
        # operator: arg is the argument count
        n = arg
        sp -= n
        strict = 0
        if bot >= 0:
            for i in range(n):
                if stack[sp + i] == bot:
                    strict = 1
                    break
        if strict:
            stack[sp] = bot
            sp += 1
            continue
        if op == OP_AND:
            acc = 1
            for i in range(n):
                if stack[sp + i] == 0:
                    acc = 0
            stack[sp] = acc
        elif op == OP_OR:
            acc = 0
            for i in range(n):
                if stack[sp + i] != 0:
                    acc = 1
            stack[sp] = acc
        elif op == OP_NOT:
            stack[sp] = 1 if stack[sp] == 0 else 0
        elif op == OP_XOR:
            acc = 0
            for i in range(n):
                if stack[sp + i] != 0:
                    acc ^= 1
            stack[sp] = acc
        elif op == OP_ADD:
            acc = 0
            for i in range(n):
                acc = (acc + stack[sp + i]) % m
            stack[sp] = acc
        elif op == OP_SUB:
            stack[sp] = ((stack[sp] - stack[sp + 1]) % m + m) % m
        elif op == OP_MUL:
            acc = 1 % m
            for i in range(n):
                acc = (acc * stack[sp + i]) % m
            stack[sp] = acc
        elif op == OP_DIV:
            b = inv[stack[sp + 1]]
            if b < 0:
                stack[sp] = bot
            else:
                stack[sp] = (stack[sp] * b) % m
        elif op == OP_POW:
            stack[sp] = _powmod(stack[sp], stack[sp + 1], m)
        elif op == OP_EQ:
            stack[sp] = 1 if stack[sp] == stack[sp + 1] else 0
        elif op == OP_ITE:
            a = stack[sp]
            b = stack[sp + 1]
            c = stack[sp + 2]
            stack[sp] = b if a != 0 else c
        sp += 1
    return stack[0]


def run(program, int[:, ::1] regs, const int[:, :] forced):
    """Fill the endogenous columns of every row of *regs* in place.

    ``forced[k, v] >= 0`` pins variable ``v`` in row ``k`` to that code.
    """
    cdef const int[:] code = program.code
    cdef const int[:] order = program.order
    cdef const int[:] starts = program.starts
    cdef const int[:] ends = program.ends
    cdef const int[:] tables = program.tables
    cdef const int[:] inv = program.inv
    cdef int m = program.modulus
    cdef int bot = program.bottom
    cdef int depth = program.stack_size
    cdef Py_ssize_t k, j, nrows = regs.shape[0], nsteps = order.shape[0]
    cdef int v
    cdef int* stack = <int*> malloc(depth * sizeof(int))
    if stack == NULL:
        raise MemoryError()
    try:
        with nogil:
            for k in range(nrows):
                for j in range(nsteps):
                    v = order[j]
                    if forced[k, v] >= 0:
                        regs[k, v] = forced[k, v]
                    else:
                        regs[k, v] = _exec(code, starts[j], ends[j], tables, inv, m, bot,
                                           &regs[k, 0], stack)
    finally:
        free(stack)
