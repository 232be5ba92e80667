"""Finite value domains and the built-in operator semantics.

Values are plain ints (``0 .. m-1``) plus the optional :data:`BOTTOM`
error element.  Internally every value has an integer *code*: ordinary
values are their own code and ``BOTTOM`` is coded as ``m``.  The compiled
kernels work on codes only.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd


class _Bottom:
    _instance = None

    def __new__(cls):
        if cls._instance is None:
            cls._instance = super().__new__(cls)
        return cls._instance

    def __repr__(self) -> str:
        return "⊥"

    def __reduce__(self):
        return (_Bottom, ())


BOTTOM = _Bottom()
"""The distinguished error element (division by zero and anything strict in it)."""

OPERATORS = ("and", "or", "not", "xor", "add", "sub", "mul", "div", "pow", "eq", "ite")

# None means variadic with at least one argument.
ARITY = {
    "and": None,
    "or": None,
    "xor": None,
    "add": None,
    "mul": None,
    "not": 1,
    "sub": 2,
    "div": 2,
    "pow": 2,
    "eq": 2,
    "ite": 3,
}


class DomainError(ValueError):
    pass


@dataclass(frozen=True)
class Domain:
    """A finite domain: booleans or integers modulo ``modulus``, optionally with ⊥."""

    kind: str = "bool"
    modulus: int = 2
    bottom: bool = False

    def __post_init__(self):
        if self.kind not in ("bool", "mod"):
            raise DomainError(f"unknown domain kind {self.kind!r}")
        if self.kind == "bool" and self.modulus != 2:
            raise DomainError("boolean domain has modulus 2")
        if self.modulus < 2:
            raise DomainError("modulus must be at least 2")

    @classmethod
    def boolean(cls, bottom: bool = False) -> "Domain":
        return cls("bool", 2, bottom)

    @classmethod
    def mod(cls, m: int = 7, bottom: bool = False) -> "Domain":
        return cls("mod", m, bottom)

    @property
    def size(self) -> int:
        return self.modulus + (1 if self.bottom else 0)

    @property
    def bottom_code(self) -> int:
        return self.modulus if self.bottom else -1

    @cached_property
    def elements(self) -> tuple:
        ordinary = tuple(range(self.modulus))
        return ordinary + (BOTTOM,) if self.bottom else ordinary

    @cached_property
    def inverses(self) -> tuple:
        """Multiplicative inverse of each ordinary value, -1 where none exists."""
        out = []
        for b in range(self.modulus):
            out.append(pow(b, -1, self.modulus) if b and gcd(b, self.modulus) == 1 else -1)
        return tuple(out)

    def __contains__(self, value) -> bool:
        if value is BOTTOM:
            return self.bottom
        return isinstance(value, int) and not isinstance(value, bool) and 0 <= value < self.modulus

    def code(self, value) -> int:
        if value not in self:
            raise DomainError(f"{value!r} is not in {self.describe()}")
        return self.modulus if value is BOTTOM else value

    def value(self, code: int):
        if code == self.modulus and self.bottom:
            return BOTTOM
        if not 0 <= code < self.modulus:
            raise DomainError(f"bad value code {code}")
        return int(code)

    def parse_value(self, text: str):
        text = text.strip()
        if text in ("bot", "⊥"):
            value = BOTTOM
        else:
            try:
                value = int(text)
            except ValueError:
                raise DomainError(f"not a value: {text!r}") from None
        if value not in self:
            raise DomainError(f"{text} is not in {self.describe()}")
        return value

    @staticmethod
    def format_value(value) -> str:
        return "bot" if value is BOTTOM else str(value)

    def describe(self) -> str:
        base = "bool" if self.kind == "bool" else f"mod {self.modulus}"
        return base + (" with bottom" if self.bottom else "")


def apply_op(op: str, args, domain: Domain) -> int:
    """Apply a built-in operator to value *codes*; every operator is strict in ⊥."""
    m = domain.modulus
    bot = domain.bottom_code
    if bot >= 0 and bot in args:
        return bot
    if op == "and":
        return int(all(args))
    if op == "or":
        return int(any(args))
    if op == "not":
        return int(args[0] == 0)
    if op == "xor":
        return sum(1 for a in args if a) % 2
    if op == "add":
        return sum(args) % m
    if op == "sub":
        return (args[0] - args[1]) % m
    if op == "mul":
        acc = 1
        for a in args:
            acc = acc * a % m
        return acc
    if op == "div":
        inv = domain.inverses[args[1]]
        if inv < 0:
            if bot < 0:
                raise DomainError("division without an error element in the domain")
            return bot
        return args[0] * inv % m
    if op == "pow":
        return pow(args[0], args[1], m)
    if op == "eq":
        return int(args[0] == args[1])
    if op == "ite":
        return args[1] if args[0] else args[2]
    raise DomainError(f"unknown operator {op!r}")
