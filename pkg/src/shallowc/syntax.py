"""Abstract syntax of the generated C subset.

The same tree is consumed by the pretty-printer, the static checker and the
interpreter.  Constructors validate local invariants (identifier shape,
constant types, distinct parameters); ``syntax_check`` re-validates a whole
translation unit, including the cross-function ones.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Optional, Union

from .values import (BINARY_OPS, INT_TYPES, UNARY_OPS, CIntType, Rank)


class CSyntaxError(ValueError):
    pass


C_KEYWORDS = frozenset("""
    auto break case char const continue default do double else enum extern
    float for goto if inline int long register restrict return short signed
    sizeof static struct switch typedef union unsigned void volatile while
    _Alignas _Alignof _Atomic _Bool _Complex _Generic _Imaginary _Noreturn
    _Static_assert _Thread_local
""".split())

_IDENT_RE = re.compile(r'[A-Za-z_][A-Za-z0-9_]*\Z')


def is_c_identifier(name: object) -> bool:
    return (isinstance(name, str) and _IDENT_RE.match(name) is not None
            and name not in C_KEYWORDS)


def check_ident(name: object, what: str = 'identifier') -> None:
    if not isinstance(name, str) or not _IDENT_RE.match(name):
        raise CSyntaxError(f'{what} {name!r} is not a valid C ASCII identifier')
    if name in C_KEYWORDS:
        raise CSyntaxError(f'{what} {name!r} is a C keyword')


# Types

@dataclass(frozen=True)
class Pointer:
    referent: CIntType

    def __str__(self):
        return f'{self.referent.c_name} *'


@dataclass(frozen=True)
class Void:
    def __str__(self):
        return 'void'


VOID = Void()

CType = Union[CIntType, Pointer, Void]

# Only ranks >= int have literal forms.
CONST_TYPES = tuple(t for t in INT_TYPES if t.rank >= Rank.INT)


# Expressions

@dataclass(frozen=True)
class Const:
    value: int
    type: CIntType

    def __post_init__(self):
        if self.type not in CONST_TYPES:
            raise CSyntaxError(f'no constants of type {self.type}')
        if not isinstance(self.value, int) or self.value < 0:
            raise CSyntaxError(f'decimal constants are non-negative: {self.value!r}')


@dataclass(frozen=True)
class Var:
    name: str

    def __post_init__(self):
        check_ident(self.name, 'variable')


@dataclass(frozen=True)
class Unary:
    op: str
    arg: 'Expr'

    def __post_init__(self):
        if self.op not in UNARY_OPS:
            raise CSyntaxError(f'unknown unary operator {self.op!r}')


@dataclass(frozen=True)
class Binary:
    op: str
    left: 'Expr'
    right: 'Expr'

    def __post_init__(self):
        if self.op not in BINARY_OPS:
            raise CSyntaxError(f'unknown binary operator {self.op!r}')


@dataclass(frozen=True)
class Cond:
    test: 'Expr'
    then: 'Expr'
    else_: 'Expr'


@dataclass(frozen=True)
class Cast:
    type: CIntType
    arg: 'Expr'


@dataclass(frozen=True)
class Index:
    array: str
    index: 'Expr'

    def __post_init__(self):
        check_ident(self.array, 'array')


@dataclass(frozen=True)
class Call:
    fn: str
    args: tuple['Expr', ...] = ()

    def __post_init__(self):
        check_ident(self.fn, 'function')
        object.__setattr__(self, 'args', tuple(self.args))


@dataclass(frozen=True)
class LogAnd:
    left: 'Expr'
    right: 'Expr'


@dataclass(frozen=True)
class LogOr:
    left: 'Expr'
    right: 'Expr'


Expr = Union[Const, Var, Unary, Binary, Cond, Cast, Index, Call, LogAnd, LogOr]


def subexprs(e: Expr) -> tuple[Expr, ...]:
    if isinstance(e, (Const, Var)):
        return ()
    if isinstance(e, (Unary, Cast)):
        return (e.arg,)
    if isinstance(e, (Binary, LogAnd, LogOr)):
        return (e.left, e.right)
    if isinstance(e, Cond):
        return (e.test, e.then, e.else_)
    if isinstance(e, Index):
        return (e.index,)
    if isinstance(e, Call):
        return e.args
    raise CSyntaxError(f'not an expression: {e!r}')


def contains_call(e: Expr) -> bool:
    return isinstance(e, Call) or any(contains_call(s) for s in subexprs(e))


# Statements

@dataclass(frozen=True)
class Block:
    stmts: tuple['Stmt', ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'stmts', tuple(self.stmts))


@dataclass(frozen=True)
class Declare:
    type: CIntType
    name: str
    init: Expr

    def __post_init__(self):
        check_ident(self.name, 'variable')


@dataclass(frozen=True)
class Assign:
    name: str
    rhs: Expr

    def __post_init__(self):
        check_ident(self.name, 'variable')


@dataclass(frozen=True)
class AssignIndex:
    array: str
    index: Expr
    rhs: Expr

    def __post_init__(self):
        check_ident(self.array, 'array')


@dataclass(frozen=True)
class If:
    test: Expr
    then: Block


@dataclass(frozen=True)
class IfElse:
    test: Expr
    then: Block
    else_: Block


@dataclass(frozen=True)
class While:
    test: Expr
    body: Block


@dataclass(frozen=True)
class Return:
    value: Optional[Expr] = None


@dataclass(frozen=True)
class ExprStmt:
    call: Call

    def __post_init__(self):
        if not isinstance(self.call, Call):
            raise CSyntaxError('expression statements must be function calls')


Stmt = Union[Declare, Assign, AssignIndex, If, IfElse, While, Return, ExprStmt]


@dataclass(frozen=True)
class FunDef:
    name: str
    params: tuple[tuple[str, CType], ...]
    return_type: CType
    body: Block

    def __post_init__(self):
        object.__setattr__(self, 'params', tuple(tuple(p) for p in self.params))
        check_ident(self.name, 'function')
        seen = set()
        for pname, ptype in self.params:
            check_ident(pname, 'parameter')
            if pname in seen:
                raise CSyntaxError(f'duplicate parameter {pname!r} in {self.name}')
            seen.add(pname)
            if not isinstance(ptype, (CIntType, Pointer)):
                raise CSyntaxError(f'parameter {pname!r} of {self.name} has type {ptype}')
        if not isinstance(self.return_type, (CIntType, Void)):
            raise CSyntaxError(f'{self.name} returns unsupported type {self.return_type}')


@dataclass(frozen=True)
class TransUnit:
    fundefs: tuple[FunDef, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, 'fundefs', tuple(self.fundefs))

    def fundef(self, name: str) -> FunDef:
        for f in self.fundefs:
            if f.name == name:
                return f
        raise KeyError(name)


def block_stmts_calls(block: Block):
    """Yield every function name called anywhere in the block."""
    for s in block.stmts:
        yield from _stmt_calls(s)


def _expr_calls(e: Expr):
    if isinstance(e, Call):
        yield e.fn
    for s in subexprs(e):
        yield from _expr_calls(s)


def _stmt_calls(s: Stmt):
    if isinstance(s, (Declare,)):
        yield from _expr_calls(s.init)
    elif isinstance(s, Assign):
        yield from _expr_calls(s.rhs)
    elif isinstance(s, AssignIndex):
        yield from _expr_calls(s.index)
        yield from _expr_calls(s.rhs)
    elif isinstance(s, (If, While)):
        yield from _expr_calls(s.test)
        yield from block_stmts_calls(s.then if isinstance(s, If) else s.body)
    elif isinstance(s, IfElse):
        yield from _expr_calls(s.test)
        yield from block_stmts_calls(s.then)
        yield from block_stmts_calls(s.else_)
    elif isinstance(s, Return):
        if s.value is not None:
            yield from _expr_calls(s.value)
    elif isinstance(s, ExprStmt):
        yield from _expr_calls(s.call)


def _check_expr_syntax(e, where):
    if not isinstance(e, (Const, Var, Unary, Binary, Cond, Cast, Index, Call, LogAnd, LogOr)):
        raise CSyntaxError(f'{where}: not an expression: {e!r}')
    if isinstance(e, Cast) and not isinstance(e.type, CIntType):
        raise CSyntaxError(f'{where}: cast to non-integer type {e.type!r}')
    for s in subexprs(e):
        _check_expr_syntax(s, where)


def _check_block_syntax(block, where):
    if not isinstance(block, Block):
        raise CSyntaxError(f'{where}: expected a block, got {block!r}')
    for k, s in enumerate(block.stmts):
        loc = f'{where}, statement {k + 1}'
        if isinstance(s, Declare):
            if not isinstance(s.type, CIntType):
                raise CSyntaxError(f'{loc}: declaration of non-integer type {s.type}')
            _check_expr_syntax(s.init, loc)
        elif isinstance(s, Assign):
            _check_expr_syntax(s.rhs, loc)
        elif isinstance(s, AssignIndex):
            _check_expr_syntax(s.index, loc)
            _check_expr_syntax(s.rhs, loc)
        elif isinstance(s, If):
            _check_expr_syntax(s.test, loc)
            _check_block_syntax(s.then, loc)
        elif isinstance(s, IfElse):
            _check_expr_syntax(s.test, loc)
            _check_block_syntax(s.then, loc)
            _check_block_syntax(s.else_, loc)
        elif isinstance(s, While):
            _check_expr_syntax(s.test, loc)
            _check_block_syntax(s.body, loc)
        elif isinstance(s, Return):
            if s.value is not None:
                _check_expr_syntax(s.value, loc)
        elif isinstance(s, ExprStmt):
            _check_expr_syntax(s.call, loc)
        else:
            raise CSyntaxError(f'{loc}: not a statement: {s!r}')


def syntax_check(tu: TransUnit) -> None:
    """Raise CSyntaxError unless every structural invariant of ``tu`` holds."""
    seen: set[str] = set()
    for f in tu.fundefs:
        if not isinstance(f, FunDef):
            raise CSyntaxError(f'not a function definition: {f!r}')
        # FunDef.__post_init__ covers names and parameters; re-run it
        FunDef(f.name, f.params, f.return_type, f.body)
        if f.name in seen:
            raise CSyntaxError(f'duplicate function {f.name!r}')
        _check_block_syntax(f.body, f'function {f.name}')
        for callee in block_stmts_calls(f.body):
            if callee not in seen and callee != f.name:
                raise CSyntaxError(
                    f'function {f.name} calls {callee!r}, which is not defined before it')
        seen.add(f.name)
