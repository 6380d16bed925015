"""Minimal s-expression reader with source positions.

Atoms are read as :class:`Symbol` (a ``str`` carrying line/column), lists as
plain Python lists.  ``;`` starts a comment running to end of line.
"""

from __future__ import annotations

import re

_TOKEN = re.compile(r"\s+|;[^\n]*|\(|\)|[^\s();]+")


class SExprError(ValueError):
    def __init__(self, message, line, column):
        self.message = message
        self.line = line
        self.column = column
        super().__init__(f"{message} (at {line}:{column})")


class Symbol(str):
    line: int
    column: int

    def __new__(cls, text, line=0, column=0):
        s = super().__new__(cls, text)
        s.line = line
        s.column = column
        return s


class _List(list):
    line = 0
    column = 0


def _tokens(text):
    line, col = 1, 1
    pos = 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        tok = m.group()
        if not tok[0].isspace() and tok[0] != ";":
            yield tok, line, col
        nl = tok.count("\n")
        if nl:
            line += nl
            col = len(tok) - tok.rfind("\n")
        else:
            col += len(tok)
        pos = m.end()
    yield None, line, col


def read_all(text: str) -> list:
    """Read every top-level expression in ``text``."""
    stack = [_List()]
    for tok, line, col in _tokens(text):
        if tok is None:
            if len(stack) > 1:
                raise SExprError("unbalanced '('", stack[-1].line, stack[-1].column)
            return list(stack[0])
        if tok == "(":
            lst = _List()
            lst.line, lst.column = line, col
            stack.append(lst)
        elif tok == ")":
            if len(stack) == 1:
                raise SExprError("unexpected ')'", line, col)
            done = stack.pop()
            stack[-1].append(done)
        else:
            stack[-1].append(Symbol(tok, line, col))
    raise AssertionError("unreachable")


def read_one(text: str):
    items = read_all(text)
    if not items:
        raise SExprError("empty input", 1, 1)
    if len(items) > 1:
        extra = items[1]
        raise SExprError("trailing input", getattr(extra, "line", 0),
                         getattr(extra, "column", 0))
    return items[0]
