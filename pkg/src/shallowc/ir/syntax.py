"""IR terms: the image of the shallow embedding, as plain data.

Positions are carried for error messages but do not take part in equality.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Union

from ..values import CIntType
from .sexpr import Pos


def _pos():
    return field(default=None, compare=False, repr=False)


@dataclass(frozen=True)
class ArrayType:
    elem: CIntType

    def __str__(self):
        return f'{self.elem.short_name}[]'


IrType = Union[CIntType, ArrayType]


# Terms

@dataclass(frozen=True)
class IVar:
    name: str
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IConst:
    type: CIntType
    value: int
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IUnop:
    op: str
    type: CIntType
    arg: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IBinop:
    op: str
    ltype: CIntType
    rtype: CIntType
    left: 'Term'
    right: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IConv:
    target: CIntType
    source: CIntType
    arg: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IBoolFrom:
    type: CIntType
    arg: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IFromBool:
    type: CIntType
    arg: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ILetDeclar:
    var: str
    rhs: 'Term'
    body: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ILetAssign:
    var: str
    rhs: 'Term'
    body: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ILetStmt:
    """Wrapperless ``let`` / ``mv-let``: binds variables affected by ``rhs``."""

    vars: tuple[str, ...]
    rhs: 'Term'
    body: 'Term'
    ignore: tuple[str, ...] = ()
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IIf:
    test: 'Term'
    then: 'Term'
    else_: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IAnd:
    left: 'Term'
    right: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IOr:
    left: 'Term'
    right: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ICondExpr:
    test: 'Term'
    then: 'Term'
    else_: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IArrayRead:
    elem: CIntType
    itype: CIntType
    array: str
    index: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IArrayWrite:
    elem: CIntType
    itype: CIntType
    array: str
    index: 'Term'
    value: 'Term'
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class ICall:
    fn: str
    args: tuple['Term', ...]
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IMv:
    items: tuple['Term', ...]
    pos: Optional[Pos] = _pos()


@dataclass(frozen=True)
class IRetVal:
    term: 'Term'
    pos: Optional[Pos] = _pos()


Term = Union[IVar, IConst, IUnop, IBinop, IConv, IBoolFrom, IFromBool, ILetDeclar,
             ILetAssign, ILetStmt, IIf, IAnd, IOr, ICondExpr, IArrayRead,
             IArrayWrite, ICall, IMv, IRetVal]

BOOLEAN_TERMS = (IBoolFrom, IAnd, IOr)


# Guard terms (assumptions on inputs; never translated)

@dataclass(frozen=True)
class GNum:
    value: int


@dataclass(frozen=True)
class GGet:
    """``(<type>->get x)``: the mathematical integer inside a C integer."""
    type: CIntType
    var: str


@dataclass(frozen=True)
class GLen:
    var: str


@dataclass(frozen=True)
class GArith:
    op: str  # '+', '-', '*'
    args: tuple


@dataclass(frozen=True)
class GCmp:
    op: str  # '<', '<=', '>', '>=', '='
    args: tuple


@dataclass(frozen=True)
class GIndexOk:
    elem: CIntType
    array: str
    index: str


@dataclass(frozen=True)
class GAnd:
    args: tuple


@dataclass(frozen=True)
class GOr:
    args: tuple


@dataclass(frozen=True)
class GNot:
    arg: object


@dataclass(frozen=True)
class GTerm:
    """An IR boolean term used as an assumption."""
    term: Term


Guard = Union[GNum, GGet, GLen, GArith, GCmp, GIndexOk, GAnd, GOr, GNot, GTerm]


@dataclass(frozen=True)
class IrFunction:
    name: str
    params: tuple[tuple[str, IrType], ...]
    extra_guards: tuple[Guard, ...]
    body: Term
    is_loop: bool = False
    pos: Optional[Pos] = _pos()

    @property
    def param_names(self) -> tuple[str, ...]:
        return tuple(n for n, _ in self.params)

    def param_type(self, name: str) -> IrType:
        return dict(self.params)[name]


@dataclass(frozen=True)
class IrProgram:
    functions: tuple[IrFunction, ...]

    def function(self, name: str) -> IrFunction:
        for f in self.functions:
            if f.name == name:
                return f
        raise KeyError(name)

    def __contains__(self, name: str) -> bool:
        return any(f.name == name for f in self.functions)


def children(t: Term) -> tuple:
    if isinstance(t, (IVar, IConst)):
        return ()
    if isinstance(t, (IUnop, IConv, IBoolFrom, IFromBool)):
        return (t.arg,)
    if isinstance(t, IBinop):
        return (t.left, t.right)
    if isinstance(t, (ILetDeclar, ILetAssign, ILetStmt)):
        return (t.rhs, t.body)
    if isinstance(t, (IIf, ICondExpr)):
        return (t.test, t.then, t.else_)
    if isinstance(t, (IAnd, IOr)):
        return (t.left, t.right)
    if isinstance(t, IArrayRead):
        return (t.index,)
    if isinstance(t, IArrayWrite):
        return (t.index, t.value)
    if isinstance(t, (ICall,)):
        return t.args
    if isinstance(t, IMv):
        return t.items
    if isinstance(t, IRetVal):
        return (t.term,)
    raise TypeError(f'not an IR term: {t!r}')


def walk(t: Term):
    yield t
    for c in children(t):
        yield from walk(c)


def calls_in(t: Term) -> set[str]:
    return {x.fn for x in walk(t) if isinstance(x, ICall)}
