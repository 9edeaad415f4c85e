"""Reader and writer for the S-expression surface syntax of the IR.

Bare symbols are case-folded to lower case; ``|...|`` symbols keep their
exact spelling.  ``;`` starts a line comment.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from typing import Union


@dataclass(frozen=True)
class Pos:
    line: int
    col: int

    def __str__(self):
        return f'line {self.line}, column {self.col}'


class SexprError(ValueError):
    def __init__(self, msg: str, pos: Pos | None = None):
        super().__init__(f'{pos}: {msg}' if pos else msg)
        self.pos = pos


@dataclass(frozen=True)
class Sym:
    name: str
    quoted: bool = False
    pos: Pos | None = field(default=None, compare=False)

    def __str__(self):
        return f'|{self.name}|' if self.quoted else self.name


@dataclass(frozen=True)
class Int:
    value: int
    pos: Pos | None = field(default=None, compare=False)


@dataclass(frozen=True)
class SList:
    items: tuple
    pos: Pos | None = field(default=None, compare=False)

    def __len__(self):
        return len(self.items)

    def __getitem__(self, k):
        return self.items[k]


Sexpr = Union[Sym, Int, SList]

_INT_RE = re.compile(r'[+-]?[0-9]+\Z')
_DELIMS = set('()|;') | set(' \t\r\n\f\v')


def read_all(text: str) -> list[Sexpr]:
    """Parse every top-level form in ``text``."""
    out = []
    stack: list[tuple[list, Pos]] = []
    i, line, col = 0, 1, 1
    n = len(text)

    def emit(x):
        if stack:
            stack[-1][0].append(x)
        else:
            out.append(x)

    while i < n:
        c = text[i]
        pos = Pos(line, col)
        if c == '\n':
            i, line, col = i + 1, line + 1, 1
            continue
        if c.isspace():
            i, col = i + 1, col + 1
            continue
        if c == ';':
            while i < n and text[i] != '\n':
                i += 1
            continue
        if c == '(':
            stack.append(([], pos))
            i, col = i + 1, col + 1
            continue
        if c == ')':
            if not stack:
                raise SexprError('unbalanced )', pos)
            items, start = stack.pop()
            emit(SList(tuple(items), start))
            i, col = i + 1, col + 1
            continue
        if c == '|':
            j = text.find('|', i + 1)
            if j < 0:
                raise SexprError('unterminated |symbol|', pos)
            name = text[i + 1:j]
            if '\n' in name:
                raise SexprError('newline inside |symbol|', pos)
            emit(Sym(name, True, pos))
            col += j + 1 - i
            i = j + 1
            continue
        j = i
        while j < n and text[j] not in _DELIMS:
            j += 1
        tok = text[i:j]
        if _INT_RE.match(tok):
            emit(Int(int(tok), pos))
        else:
            emit(Sym(tok.lower(), False, pos))
        col += j - i
        i = j
    if stack:
        raise SexprError('unclosed (', stack[-1][1])
    return out


def write(x: Sexpr, width: int = 80, indent: int = 0) -> str:
    """Render ``x``, breaking lists across lines when they exceed ``width``."""
    flat = _flat(x)
    if len(flat) + indent <= width or not isinstance(x, SList) or len(x) < 2:
        return flat
    head = _flat(x.items[0])
    inner = indent + 2
    lines = ['(' + head]
    for item in x.items[1:]:
        lines.append(' ' * inner + write(item, width, inner))
    return '\n'.join(lines) + ')'


def _flat(x: Sexpr) -> str:
    if isinstance(x, SList):
        return '(' + ' '.join(_flat(i) for i in x.items) + ')'
    if isinstance(x, Int):
        return str(x.value)
    return str(x)


def sym(name: str) -> Sym:
    return Sym(name)


def qsym(name: str) -> Sym:
    return Sym(name, True)


def slist(*items) -> SList:
    return SList(tuple(Int(i) if isinstance(i, int) else i for i in items))
