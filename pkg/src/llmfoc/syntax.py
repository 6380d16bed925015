"""Polarized linear-logic formulas.

Positive formulas::

    P, Q ::= a | 1 | P (x) Q | 0 | P (+) Q | !N | up N

Negative formulas::

    N, M ::= a^ | bot | N par M | top | N & M | ?P | down P

Formulas are immutable and hashable.  They carry a precomputed sort key so
that multisets of formulas can be kept as canonically sorted tuples.
"""

from __future__ import annotations

import re

from .sexpr import SExprError, Symbol, read_one

POS, NEG = "+", "-"

# constructor tags in the fixed structural order used for canonical sorting
TAGS = (
    "atom", "natom", "one", "bot", "zero", "top",
    "tensor", "par", "plus", "with", "bang", "quest", "up", "down",
)
_TAG_INDEX = {t: i for i, t in enumerate(TAGS)}

POLARITY = {
    "atom": POS, "one": POS, "zero": POS, "tensor": POS, "plus": POS,
    "bang": POS, "up": POS,
    "natom": NEG, "bot": NEG, "top": NEG, "par": NEG, "with": NEG,
    "quest": NEG, "down": NEG,
}

ARITY = {
    "atom": 0, "natom": 0, "one": 0, "bot": 0, "zero": 0, "top": 0,
    "tensor": 2, "par": 2, "plus": 2, "with": 2,
    "bang": 1, "quest": 1, "up": 1, "down": 1,
}

# polarity required of each operand
OPERAND_POLARITY = {
    "tensor": POS, "plus": POS, "par": NEG, "with": NEG,
    "bang": NEG, "quest": POS, "up": NEG, "down": POS,
}

DUAL_TAG = {
    "atom": "natom", "natom": "atom", "one": "bot", "bot": "one",
    "zero": "top", "top": "zero", "tensor": "par", "par": "tensor",
    "plus": "with", "with": "plus", "bang": "quest", "quest": "bang",
    "up": "down", "down": "up",
}

IDENT = re.compile(r"[a-zA-Z][a-zA-Z0-9_]*\Z")


class PolarityError(ValueError):
    """A connective was applied to an operand of the wrong polarity."""


class FormulaSyntaxError(ValueError):
    def __init__(self, message, line=None, column=None):
        self.line = line
        self.column = column
        if line is not None:
            message = f"{message} (at {line}:{column})"
        super().__init__(message)


class Formula:
    """A node of a polarized formula tree.

    Use the module-level constructors (:func:`atom`, :func:`tensor`, ...)
    rather than calling this class directly.
    """

    __slots__ = ("op", "args", "name", "key", "_hash", "_size")

    def __init__(self, op: str, args: tuple = (), name: str | None = None):
        if op not in _TAG_INDEX:
            raise ValueError(f"unknown connective {op!r}")
        if len(args) != ARITY[op]:
            raise ValueError(f"{op} takes {ARITY[op]} operand(s)")
        want = OPERAND_POLARITY.get(op)
        for a in args:
            if not isinstance(a, Formula):
                raise TypeError(f"operand of {op} is not a formula: {a!r}")
            if a.polarity != want:
                raise PolarityError(
                    f"{op} requires {'positive' if want == POS else 'negative'} "
                    f"operands, got {a}")
        if op in ("atom", "natom"):
            if not isinstance(name, str) or not IDENT.match(name):
                raise ValueError(f"invalid atom name {name!r}")
        else:
            name = None
        object.__setattr__(self, "op", op)
        object.__setattr__(self, "args", tuple(args))
        object.__setattr__(self, "name", name)
        key = (_TAG_INDEX[op], tuple(a.key for a in args), name or "")
        object.__setattr__(self, "key", key)
        object.__setattr__(self, "_hash", hash(key))
        object.__setattr__(self, "_size", 1 + sum(a._size for a in args))

    def __setattr__(self, attr, value):
        raise AttributeError("formulas are immutable")

    def __reduce__(self):
        return (Formula, (self.op, self.args, self.name))

    @property
    def polarity(self) -> str:
        return POLARITY[self.op]

    @property
    def positive(self) -> bool:
        return POLARITY[self.op] == POS

    def __eq__(self, other):
        if self is other:
            return True
        if not isinstance(other, Formula):
            return NotImplemented
        return self._hash == other._hash and self.key == other.key

    def __hash__(self):
        return self._hash

    def __lt__(self, other):
        return self.key < other.key

    def __le__(self, other):
        return self.key <= other.key

    def __gt__(self, other):
        return self.key > other.key

    def __ge__(self, other):
        return self.key >= other.key

    def __repr__(self):
        return f"Formula({print_formula(self)!r})"

    def __str__(self):
        return print_formula(self)


def atom(name: str) -> Formula:
    return Formula("atom", (), name)


def natom(name: str) -> Formula:
    return Formula("natom", (), name)


ONE = Formula("one")
BOT = Formula("bot")
ZERO = Formula("zero")
TOP = Formula("top")


def tensor(p: Formula, q: Formula) -> Formula:
    return Formula("tensor", (p, q))


def par(n: Formula, m: Formula) -> Formula:
    return Formula("par", (n, m))


def plus(p: Formula, q: Formula) -> Formula:
    return Formula("plus", (p, q))


def with_(n: Formula, m: Formula) -> Formula:
    return Formula("with", (n, m))


def bang(n: Formula) -> Formula:
    return Formula("bang", (n,))


def quest(p: Formula) -> Formula:
    return Formula("quest", (p,))


def up(n: Formula) -> Formula:
    return Formula("up", (n,))


def down(p: Formula) -> Formula:
    return Formula("down", (p,))


def dual(f: Formula) -> Formula:
    """Linear negation; flips polarity and swaps each connective with its dual."""
    return Formula(DUAL_TAG[f.op], tuple(dual(a) for a in f.args), f.name)


def fsize(f: Formula) -> int:
    """Number of connective and leaf nodes (shifts included)."""
    return f._size


def count_shifts(f: Formula) -> int:
    return (f.op in ("up", "down")) + sum(count_shifts(a) for a in f.args)


def print_formula(f: Formula) -> str:
    if f.op in ("atom", "natom"):
        return f"({f.op} {f.name})"
    if not f.args:
        return f.op
    return "(" + f.op + " " + " ".join(print_formula(a) for a in f.args) + ")"


def formula_from_sexpr(node) -> Formula:
    """Interpret an already-read s-expression node as a formula."""
    if isinstance(node, Symbol):
        if node in ("one", "bot", "zero", "top"):
            return Formula(str(node))
        raise FormulaSyntaxError(f"unexpected symbol {node!s}", node.line, node.column)
    if not isinstance(node, list) or not node:
        line, col = getattr(node, "line", None), getattr(node, "column", None)
        raise FormulaSyntaxError("expected a formula", line, col)
    head = node[0]
    if not isinstance(head, Symbol) or head not in _TAG_INDEX:
        line, col = getattr(head, "line", None), getattr(head, "column", None)
        raise FormulaSyntaxError(f"unknown connective {head!s}", line, col)
    op = str(head)
    if op in ("atom", "natom"):
        if len(node) != 2 or not isinstance(node[1], Symbol) or not IDENT.match(node[1]):
            raise FormulaSyntaxError(f"malformed {op}", head.line, head.column)
        return Formula(op, (), str(node[1]))
    if ARITY[op] == 0:
        raise FormulaSyntaxError(f"{op} takes no operands", head.line, head.column)
    if len(node) - 1 != ARITY[op]:
        raise FormulaSyntaxError(
            f"{op} takes {ARITY[op]} operand(s), got {len(node) - 1}",
            head.line, head.column)
    args = tuple(formula_from_sexpr(a) for a in node[1:])
    try:
        return Formula(op, args)
    except PolarityError as exc:
        raise PolarityError(f"{exc} (at {head.line}:{head.column})") from None


def parse_formula(text: str) -> Formula:
    try:
        node = read_one(text)
    except SExprError as exc:
        raise FormulaSyntaxError(exc.message, exc.line, exc.column) from None
    return formula_from_sexpr(node)
