"""Dynamic semantics: computation states and a defensive, fuel-bounded
big-step interpreter for the C subset.

Failures never escape as host errors: a semantic problem raises ``DynError``
and running out of fuel raises ``LimitExceeded``.  The two are deliberately
unrelated exception types.

Fuel is consumed at fixed points so that bounds are reproducible:

* ``exec_fun``, ``exec_stmt``, ``exec_stmt_while`` (each iteration) and every
  position in a statement list check ``fuel > 0`` and pass ``fuel - 1`` on;
* a call in a non-pure expression position checks ``fuel > 0`` and passes
  ``fuel - 1`` to ``exec_fun``;
* pure expressions consume nothing.
"""

from __future__ import annotations

from dataclasses import dataclass
from types import MappingProxyType
from typing import Mapping, Optional, Sequence, Union

from .syntax import (Assign, AssignIndex, Binary, Block, Call, Cast, Cond, Const,
                     Declare, Expr, ExprStmt, FunDef, If, IfElse, Index, LogAnd,
                     LogOr, Pointer, Return, Stmt, TransUnit, Unary, Var, Void,
                     While)
from .values import (DEFAULT_PARAMS, SINT, ArrayValue, BoundsError, CIntType,
                     ImplParams, IntegerValue, ValueTypeError, WellDefError,
                     array_read, array_write, binary_result_type, common_type,
                     convert, exec_binary, exec_unary, unary_result_type)

ERROR_KINDS = frozenset({
    'unbound-var', 'unbound-fun', 'type-mismatch', 'well-definedness', 'bounds',
    'null-deref', 'no-such-array', 'no-frame', 'arity', 'missing-return',
    'unsupported',
})


class DynError(Exception):
    def __init__(self, kind: str, detail: str = ''):
        assert kind in ERROR_KINDS, kind
        super().__init__(f'{kind} ({detail})' if detail else kind)
        self.kind = kind
        self.detail = detail


class LimitExceeded(Exception):
    """Fuel ran out before execution completed."""


class _VoidReturn:
    def __repr__(self):
        return 'VOID_RETURN'


# Result of ``return;``: execution stops without a value.
VOID_RETURN = _VoidReturn()


@dataclass(frozen=True)
class PointerValue:
    referent: CIntType
    address: Optional[int]

    @property
    def is_null(self) -> bool:
        return self.address is None

    def __str__(self):
        return f'{self.referent.short_name}* @{self.address}'


Value = Union[IntegerValue, PointerValue]


def _same_type(a: Value, b: Value) -> bool:
    if isinstance(a, IntegerValue):
        return isinstance(b, IntegerValue) and a.type == b.type
    return isinstance(b, PointerValue) and a.referent == b.referent


def value_matches(v: object, t) -> bool:
    if isinstance(t, CIntType):
        return isinstance(v, IntegerValue) and v.type == t
    if isinstance(t, Pointer):
        return isinstance(v, PointerValue) and v.referent == t.referent
    return False


@dataclass(frozen=True)
class Frame:
    function: str
    scopes: tuple[Mapping[str, Value], ...]


@dataclass(frozen=True)
class ComputationState:
    frames: tuple[Frame, ...] = ()
    heap: Mapping[int, ArrayValue] = MappingProxyType({})


def empty_state() -> ComputationState:
    return ComputationState()


def init_fun_env(tu: TransUnit) -> Mapping[str, FunDef]:
    env = {}
    for f in tu.fundefs:
        if f.name in env:
            raise DynError('unsupported', f'duplicate function {f.name!r}')
        env[f.name] = f
    return MappingProxyType(env)


# State operations

def push_frame(st: ComputationState, frame: Frame) -> ComputationState:
    return ComputationState(st.frames + (frame,), st.heap)


def top_frame(st: ComputationState) -> Frame:
    if not st.frames:
        raise DynError('no-frame')
    return st.frames[-1]


def pop_frame(st: ComputationState) -> ComputationState:
    top_frame(st)
    return ComputationState(st.frames[:-1], st.heap)


def _replace_top(st: ComputationState, frame: Frame) -> ComputationState:
    return ComputationState(st.frames[:-1] + (frame,), st.heap)


def push_scope(st: ComputationState) -> ComputationState:
    f = top_frame(st)
    return _replace_top(st, Frame(f.function, f.scopes + (MappingProxyType({}),)))


def pop_scope(st: ComputationState) -> ComputationState:
    f = top_frame(st)
    if not f.scopes:
        raise DynError('no-frame', 'no scope to pop')
    return _replace_top(st, Frame(f.function, f.scopes[:-1]))


def create_var(st: ComputationState, name: str, val: Value) -> ComputationState:
    f = top_frame(st)
    if not f.scopes:
        raise DynError('no-frame', 'no scope')
    top = f.scopes[-1]
    if name in top:
        raise DynError('type-mismatch', f'variable {name!r} already exists in this scope')
    new = dict(top)
    new[name] = val
    return _replace_top(st, Frame(f.function, f.scopes[:-1] + (MappingProxyType(new),)))


def read_var(st: ComputationState, name: str) -> Value:
    for scope in reversed(top_frame(st).scopes):
        if name in scope:
            return scope[name]
    raise DynError('unbound-var', name)


def write_var(st: ComputationState, name: str, val: Value) -> ComputationState:
    f = top_frame(st)
    for k in range(len(f.scopes) - 1, -1, -1):
        scope = f.scopes[k]
        if name in scope:
            if not _same_type(scope[name], val):
                raise DynError('type-mismatch', f'writing {val} to {name!r}')
            new = dict(scope)
            new[name] = val
            scopes = f.scopes[:k] + (MappingProxyType(new),) + f.scopes[k + 1:]
            return _replace_top(st, Frame(f.function, scopes))
    raise DynError('unbound-var', name)


def read_array(st: ComputationState, address: int) -> ArrayValue:
    try:
        return st.heap[address]
    except KeyError:
        raise DynError('no-such-array', f'address {address}') from None


def write_array(st: ComputationState, address: int, arr: ArrayValue) -> ComputationState:
    old = read_array(st, address)
    if old.elem_type != arr.elem_type:
        raise DynError('type-mismatch', f'array at {address} has elements {old.elem_type}')
    heap = dict(st.heap)
    heap[address] = arr
    return ComputationState(st.frames, MappingProxyType(heap))


# Pure expressions

def _int(v: Value, what: str) -> IntegerValue:
    if not isinstance(v, IntegerValue):
        raise DynError('type-mismatch', f'{what} is not an integer')
    return v


def _array_of(name: str, st: ComputationState) -> tuple[int, ArrayValue]:
    ptr = read_var(st, name)
    if not isinstance(ptr, PointerValue):
        raise DynError('type-mismatch', f'{name!r} is not a pointer')
    if ptr.is_null:
        raise DynError('null-deref', name)
    arr = read_array(st, ptr.address)
    if arr.elem_type != ptr.referent:
        raise DynError('type-mismatch', f'{name!r} points to {arr.elem_type} array')
    return ptr.address, arr


def expr_type(e: Expr, st: ComputationState, params: ImplParams = DEFAULT_PARAMS):
    """Type of a pure expression, read off the types carried by the state's values."""
    if isinstance(e, Const):
        return e.type
    if isinstance(e, Var):
        v = read_var(st, e.name)
        return v.type if isinstance(v, IntegerValue) else Pointer(v.referent)
    if isinstance(e, (Unary, Binary, Cond, Cast, LogAnd, LogOr, Index)):
        def it(x):
            t = expr_type(x, st, params)
            if not isinstance(t, CIntType):
                raise DynError('type-mismatch', 'non-integer operand')
            return t
        if isinstance(e, Unary):
            return unary_result_type(e.op, it(e.arg), params)
        if isinstance(e, Binary):
            return binary_result_type(e.op, it(e.left), it(e.right), params)
        if isinstance(e, Cond):
            it(e.test)
            return common_type(it(e.then), it(e.else_), params)
        if isinstance(e, Cast):
            it(e.arg)
            return e.type
        if isinstance(e, Index):
            v = read_var(st, e.array)
            if not isinstance(v, PointerValue):
                raise DynError('type-mismatch', f'{e.array!r} is not a pointer')
            it(e.index)
            return v.referent
        it(e.left)
        it(e.right)
        return SINT
    raise DynError('unsupported', f'not a pure expression: {type(e).__name__}')


def exec_expr_pure(e: Expr, st: ComputationState,
                   params: ImplParams = DEFAULT_PARAMS) -> Value:
    try:
        return _pure(e, st, params)
    except WellDefError as exc:
        raise DynError('well-definedness', exc.op) from exc
    except BoundsError as exc:
        raise DynError('bounds', str(exc)) from exc
    except ValueTypeError as exc:
        raise DynError('type-mismatch', str(exc)) from exc


def _pure(e: Expr, st: ComputationState, params: ImplParams) -> Value:
    if isinstance(e, Const):
        if not params.in_range(e.type, e.value):
            raise DynError('type-mismatch', f'constant {e.value} out of range for {e.type}')
        return IntegerValue(e.type, e.value)
    if isinstance(e, Var):
        return read_var(st, e.name)
    if isinstance(e, Unary):
        return exec_unary(e.op, _int(_pure(e.arg, st, params), 'operand'), params)
    if isinstance(e, Binary):
        a = _int(_pure(e.left, st, params), 'left operand')
        b = _int(_pure(e.right, st, params), 'right operand')
        return exec_binary(e.op, a, b, params)
    if isinstance(e, LogAnd):
        if _int(_pure(e.left, st, params), 'left operand').value == 0:
            return IntegerValue(SINT, 0)
        return IntegerValue(SINT, int(_int(_pure(e.right, st, params), 'right operand').value != 0))
    if isinstance(e, LogOr):
        if _int(_pure(e.left, st, params), 'left operand').value != 0:
            return IntegerValue(SINT, 1)
        return IntegerValue(SINT, int(_int(_pure(e.right, st, params), 'right operand').value != 0))
    if isinstance(e, Cond):
        t = expr_type(e, st, params)
        if _int(_pure(e.test, st, params), 'test').value != 0:
            v = _pure(e.then, st, params)
        else:
            v = _pure(e.else_, st, params)
        return convert(_int(v, 'branch'), t, params)
    if isinstance(e, Cast):
        return convert(_int(_pure(e.arg, st, params), 'cast operand'), e.type, params)
    if isinstance(e, Index):
        _, arr = _array_of(e.array, st)
        return array_read(arr, _int(_pure(e.index, st, params), 'index'))
    raise DynError('unsupported', f'not a pure expression: {type(e).__name__}')


# Statements and functions

def _exec_expr(e: Expr, st: ComputationState, env, fuel: int, params: ImplParams):
    """Evaluate an expression that may be a top-level call."""
    if isinstance(e, Call):
        if fuel <= 0:
            raise LimitExceeded()
        args = [exec_expr_pure(a, st, params) for a in e.args]
        return exec_fun(e.fn, args, st, env, fuel - 1, params)
    return exec_expr_pure(e, st, params), st


def exec_block_items(stmts: Sequence[Stmt], st: ComputationState, env, fuel: int,
                     params: ImplParams = DEFAULT_PARAMS):
    for k, s in enumerate(stmts):
        if fuel - k <= 0:
            raise LimitExceeded()
        val, st = exec_stmt(s, st, env, fuel - k - 1, params)
        if val is not None:
            return val, st
    if fuel - len(stmts) <= 0:
        raise LimitExceeded()
    return None, st


def _exec_scoped_block(block: Block, st, env, fuel, params):
    st = push_scope(st)
    val, st = exec_block_items(block.stmts, st, env, fuel, params)
    return val, pop_scope(st)


def exec_stmt(s: Stmt, st: ComputationState, env, fuel: int,
              params: ImplParams = DEFAULT_PARAMS):
    """Execute ``s``; return (returned value or None, new state)."""
    if fuel <= 0:
        raise LimitExceeded()
    fuel -= 1
    if isinstance(s, Declare):
        v, st = _exec_expr(s.init, st, env, fuel, params)
        if not value_matches(v, s.type):
            raise DynError('type-mismatch', f'initializer of {s.name!r}')
        return None, create_var(st, s.name, v)
    if isinstance(s, Assign):
        v, st = _exec_expr(s.rhs, st, env, fuel, params)
        if v is None:
            raise DynError('type-mismatch', f'void value assigned to {s.name!r}')
        return None, write_var(st, s.name, v)
    if isinstance(s, AssignIndex):
        address, arr = _array_of(s.array, st)
        i = _int(exec_expr_pure(s.index, st, params), 'index')
        v = _int(exec_expr_pure(s.rhs, st, params), 'stored value')
        try:
            new = array_write(arr, i, v)
        except BoundsError as exc:
            raise DynError('bounds', str(exc)) from exc
        except ValueTypeError as exc:
            raise DynError('type-mismatch', str(exc)) from exc
        return None, write_array(st, address, new)
    if isinstance(s, If):
        if _int(exec_expr_pure(s.test, st, params), 'test').value != 0:
            return _exec_scoped_block(s.then, st, env, fuel, params)
        return None, st
    if isinstance(s, IfElse):
        taken = s.then if _int(exec_expr_pure(s.test, st, params), 'test').value != 0 else s.else_
        return _exec_scoped_block(taken, st, env, fuel, params)
    if isinstance(s, While):
        return exec_stmt_while(s.test, s.body, st, env, fuel, params)
    if isinstance(s, Return):
        if s.value is None:
            return VOID_RETURN, st
        v, st = _exec_expr(s.value, st, env, fuel, params)
        if v is None:
            raise DynError('type-mismatch', 'returning the result of a void function')
        return v, st
    if isinstance(s, ExprStmt):
        if not isinstance(s.call, Call):
            raise DynError('unsupported', 'expression statement is not a call')
        _, st = _exec_expr(s.call, st, env, fuel, params)
        return None, st
    raise DynError('unsupported', f'not a statement: {type(s).__name__}')


def exec_stmt_while(test: Expr, body: Block, st: ComputationState, env, fuel: int,
                    params: ImplParams = DEFAULT_PARAMS):
    while True:
        if fuel <= 0:
            raise LimitExceeded()
        if _int(exec_expr_pure(test, st, params), 'test').value == 0:
            return None, st
        val, st = _exec_scoped_block(body, st, env, fuel - 1, params)
        if val is not None:
            return val, st
        fuel -= 1


def exec_fun(name: str, args: Sequence[Value], st: ComputationState, env, fuel: int,
             params: ImplParams = DEFAULT_PARAMS):
    """Call ``name``; return (result value or None for void, new state)."""
    if fuel <= 0:
        raise LimitExceeded()
    f = env.get(name)
    if f is None:
        raise DynError('unbound-fun', name)
    if len(args) != len(f.params):
        raise DynError('arity', f'{name} expects {len(f.params)} arguments, got {len(args)}')
    scope = {}
    for (pname, ptype), a in zip(f.params, args):
        if not value_matches(a, ptype):
            raise DynError('type-mismatch', f'argument {pname!r} of {name}')
        scope[pname] = a
    depth = len(st.frames)
    st = push_frame(st, Frame(name, (MappingProxyType(scope),)))
    val, st = exec_block_items(f.body.stmts, st, env, fuel - 1, params)
    if isinstance(f.return_type, Void):
        if val is not None and val is not VOID_RETURN:
            raise DynError('type-mismatch', f'void function {name} returned a value')
        val = None
    elif val is None or val is VOID_RETURN:
        raise DynError('missing-return', name)
    elif not value_matches(val, f.return_type):
        raise DynError('type-mismatch', f'{name} returned {val}')
    st = pop_frame(st)
    assert len(st.frames) == depth
    return val, st
