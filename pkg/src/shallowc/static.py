"""Static semantics: the checks a C compiler performs on the subset.

Expressions check to their C type; statements check to the set of types
they may return, where ``VOID`` stands for completing without a value.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping

from .syntax import (VOID, Assign, AssignIndex, Binary, Block, Call, Cast, Cond,
                     Const, CType, Declare, Expr, ExprStmt, FunDef, If, IfElse,
                     Index, LogAnd, LogOr, Pointer, Return, Stmt, TransUnit,
                     Unary, Var, Void, While)
from .values import (DEFAULT_PARAMS, SINT, CIntType, ImplParams,
                     binary_result_type, common_type, unary_result_type)

WELLFORMED = 'wellformed'


class StaticError(Exception):
    pass


@dataclass(frozen=True)
class VarTable:
    """Stack of scopes, innermost last."""

    scopes: tuple[Mapping[str, CType], ...] = (MappingProxyType({}),)

    def lookup(self, name: str):
        for scope in reversed(self.scopes):
            if name in scope:
                return scope[name]
        return None

    def declare(self, name: str, t: CType) -> 'VarTable':
        if name in self.scopes[-1]:
            raise StaticError(f'variable {name!r} already declared in this scope')
        top = dict(self.scopes[-1])
        top[name] = t
        return VarTable(self.scopes[:-1] + (MappingProxyType(top),))

    def push(self) -> 'VarTable':
        return VarTable(self.scopes + (MappingProxyType({}),))

    def pop(self) -> 'VarTable':
        if len(self.scopes) == 1:
            raise StaticError('cannot pop the outermost scope')
        return VarTable(self.scopes[:-1])


@dataclass(frozen=True)
class FunInfo:
    params: tuple[CType, ...]
    return_type: CType


@dataclass
class FunTable:
    funs: dict[str, FunInfo] = field(default_factory=dict)

    def add(self, name: str, info: FunInfo) -> None:
        if name in self.funs:
            raise StaticError(f'duplicate function {name!r}')
        self.funs[name] = info


def _int_operand(t: CType, what: str) -> CIntType:
    if not isinstance(t, CIntType):
        raise StaticError(f'{what} has non-integer type {t}')
    return t


def check_expr(e: Expr, vars: VarTable, funs: FunTable, *,
               call_ok: bool = False, params: ImplParams = DEFAULT_PARAMS) -> CType:
    """Type of ``e``.  Calls are accepted only at the top when ``call_ok``."""

    def go(e: Expr) -> CType:
        return check_expr(e, vars, funs, params=params)

    if isinstance(e, Const):
        if not params.in_range(e.type, e.value):
            raise StaticError(f'constant {e.value} out of range for {e.type}')
        return e.type
    if isinstance(e, Var):
        t = vars.lookup(e.name)
        if t is None:
            raise StaticError(f'unbound variable {e.name!r}')
        return t
    if isinstance(e, Unary):
        return unary_result_type(e.op, _int_operand(go(e.arg), f'operand of {e.op}'), params)
    if isinstance(e, Binary):
        t1 = _int_operand(go(e.left), f'left operand of {e.op}')
        t2 = _int_operand(go(e.right), f'right operand of {e.op}')
        return binary_result_type(e.op, t1, t2, params)
    if isinstance(e, (LogAnd, LogOr)):
        _int_operand(go(e.left), 'left operand of logical operator')
        _int_operand(go(e.right), 'right operand of logical operator')
        return SINT
    if isinstance(e, Cond):
        _int_operand(go(e.test), 'conditional test')
        t1 = _int_operand(go(e.then), 'conditional branch')
        t2 = _int_operand(go(e.else_), 'conditional branch')
        return common_type(t1, t2, params)
    if isinstance(e, Cast):
        _int_operand(go(e.arg), 'cast operand')
        return e.type
    if isinstance(e, Index):
        at = vars.lookup(e.array)
        if at is None:
            raise StaticError(f'unbound variable {e.array!r}')
        if not isinstance(at, Pointer):
            raise StaticError(f'{e.array!r} is indexed but has type {at}')
        _int_operand(go(e.index), 'array index')
        return at.referent
    if isinstance(e, Call):
        if not call_ok:
            raise StaticError(f'call to {e.fn!r} not allowed in this position')
        info = funs.funs.get(e.fn)
        if info is None:
            raise StaticError(f'unbound function {e.fn!r}')
        if len(e.args) != len(info.params):
            raise StaticError(
                f'{e.fn} expects {len(info.params)} arguments, got {len(e.args)}')
        for k, (a, pt) in enumerate(zip(e.args, info.params)):
            at = go(a)
            if at != pt:
                raise StaticError(f'argument {k + 1} of {e.fn} has type {at}, expected {pt}')
        return info.return_type
    raise StaticError(f'not an expression: {e!r}')


def _nonvoid_value(e: Expr, vars, funs, params) -> CType:
    t = check_expr(e, vars, funs, call_ok=True, params=params)
    if isinstance(t, Void):
        raise StaticError(f'void value of {e.fn!r} used as an expression')
    return t


def check_stmt(s: Stmt, vars: VarTable, funs: FunTable,
               params: ImplParams = DEFAULT_PARAMS) -> tuple[frozenset, VarTable]:
    if isinstance(s, Declare):
        t = _nonvoid_value(s.init, vars, funs, params)
        if t != s.type:
            raise StaticError(f'initializer of {s.name!r} has type {t}, declared {s.type}')
        return frozenset({VOID}), vars.declare(s.name, s.type)
    if isinstance(s, Assign):
        target = vars.lookup(s.name)
        if target is None:
            raise StaticError(f'assignment to undeclared variable {s.name!r}')
        if not isinstance(target, CIntType):
            raise StaticError(f'assignment to non-integer variable {s.name!r}')
        t = _nonvoid_value(s.rhs, vars, funs, params)
        if t != target:
            raise StaticError(f'assigning {t} to {s.name!r} of type {target}')
        return frozenset({VOID}), vars
    if isinstance(s, AssignIndex):
        at = vars.lookup(s.array)
        if not isinstance(at, Pointer):
            raise StaticError(f'{s.array!r} is not an array pointer')
        _int_operand(check_expr(s.index, vars, funs, params=params), 'array index')
        t = check_expr(s.rhs, vars, funs, params=params)
        if t != at.referent:
            raise StaticError(f'storing {t} into {s.array!r} with elements {at.referent}')
        return frozenset({VOID}), vars
    if isinstance(s, If):
        _int_operand(check_expr(s.test, vars, funs, params=params), 'if test')
        return check_block(s.then, vars.push(), funs, params) | {VOID}, vars
    if isinstance(s, IfElse):
        _int_operand(check_expr(s.test, vars, funs, params=params), 'if test')
        return (check_block(s.then, vars.push(), funs, params)
                | check_block(s.else_, vars.push(), funs, params)), vars
    if isinstance(s, While):
        _int_operand(check_expr(s.test, vars, funs, params=params), 'while test')
        return check_block(s.body, vars.push(), funs, params) | {VOID}, vars
    if isinstance(s, Return):
        if s.value is None:
            return frozenset({VOID}), vars
        return frozenset({_nonvoid_value(s.value, vars, funs, params)}), vars
    if isinstance(s, ExprStmt):
        check_expr(s.call, vars, funs, call_ok=True, params=params)
        return frozenset({VOID}), vars
    raise StaticError(f'not a statement: {s!r}')


def check_block_items(stmts, vars: VarTable, funs: FunTable,
                      params: ImplParams = DEFAULT_PARAMS) -> frozenset:
    """Return-type set of a statement sequence in the current scope."""
    result = frozenset({VOID})
    reachable = True
    for s in stmts:
        types, vars = check_stmt(s, vars, funs, params)
        if reachable:
            result = (result - {VOID}) | types
            reachable = VOID in types
    return result


def check_block(block: Block, vars: VarTable, funs: FunTable,
                params: ImplParams = DEFAULT_PARAMS) -> frozenset:
    return check_block_items(block.stmts, vars, funs, params)


def check_fundef(f: FunDef, funs: FunTable, params: ImplParams = DEFAULT_PARAMS) -> None:
    vars = VarTable()
    for pname, ptype in f.params:
        vars = vars.declare(pname, ptype)
    try:
        types = check_block(f.body, vars, funs, params)
    except StaticError as exc:
        raise StaticError(f'in function {f.name}: {exc}') from None
    if isinstance(f.return_type, Void):
        if types != {VOID}:
            raise StaticError(f'void function {f.name} returns a value')
    elif not types <= {f.return_type}:
        if VOID in types:
            raise StaticError(f'function {f.name} may end without returning a value')
        raise StaticError(f'function {f.name} returns {sorted(map(str, types))}, '
                          f'declared {f.return_type}')


def check_transunit(tu: TransUnit, params: ImplParams = DEFAULT_PARAMS) -> str:
    funs = FunTable()
    for f in tu.fundefs:
        funs.add(f.name, FunInfo(tuple(t for _, t in f.params), f.return_type))
        check_fundef(f, funs, params)
    return WELLFORMED
