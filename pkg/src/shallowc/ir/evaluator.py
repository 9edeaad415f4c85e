"""Reference evaluator for IR programs.

Every operation runs in guard-checking mode: an operand of the wrong type, an
operation without a well-defined result, or an input outside a function's
guard raises ``GuardViolation``.  Loop functions iterate instead of recursing
and are bounded by a step cap.

Two array strategies are offered.  ``'cow'`` treats arrays as immutable values
(each write builds a new array); ``'inplace'`` mutates a single shared buffer
per array.  On programs accepted by ``check_ir`` they must agree.
"""

from __future__ import annotations

from typing import Optional, Sequence

from ..values import (DEFAULT_PARAMS, ArrayValue, BoundsError, CIntType, ImplParams,
                      IntegerValue, RangeError, ValueTypeError, WellDefError,
                      array_read, array_write, convert, exec_binary, exec_unary,
                      int_from_bool, make_int)
from .syntax import (ArrayType, GAnd, GArith, GCmp, GGet, GIndexOk, GLen, GNot, GNum,
                     GOr, GTerm, IAnd, IArrayRead, IArrayWrite, IBinop, IBoolFrom,
                     ICall, ICondExpr, IConst, IConv, IFromBool, IIf, ILetAssign,
                     ILetDeclar, ILetStmt, IMv, IOr, IrFunction, IrProgram, IRetVal,
                     IUnop, IVar)

DEFAULT_STEP_CAP = 2 ** 20
STRATEGIES = ('cow', 'inplace')


class GuardViolation(Exception):
    def __init__(self, condition: str, where: str = ''):
        super().__init__(f'{where}: {condition}' if where else condition)
        self.condition = condition
        self.where = where


class CapExceeded(Exception):
    """A loop ran for more iterations than the step cap allows."""


class _Box:
    """Mutable array buffer used by the in-place strategy."""

    __slots__ = ('elem_type', 'cells')

    def __init__(self, arr: ArrayValue):
        self.elem_type = arr.elem_type
        self.cells = list(arr.elements)

    def freeze(self) -> ArrayValue:
        return ArrayValue(self.elem_type, tuple(self.cells))

    def __len__(self):
        return len(self.cells)


class _Recur:
    __slots__ = ('args',)

    def __init__(self, args):
        self.args = args


def _is_array(v) -> bool:
    return isinstance(v, (ArrayValue, _Box))


def value_has_type(v, t) -> bool:
    if isinstance(t, ArrayType):
        return _is_array(v) and v.elem_type == t.elem
    return isinstance(v, IntegerValue) and v.type == t


class _Evaluator:
    def __init__(self, p: IrProgram, params: ImplParams, step_cap: int, strategy: str):
        if strategy not in STRATEGIES:
            raise ValueError(f'unknown array strategy {strategy!r}')
        self.funs = {f.name: f for f in p.functions}
        self.params = params
        self.step_cap = step_cap
        self.inplace = strategy == 'inplace'
        self.steps = 0

    # guards

    def check_entry(self, f: IrFunction, args: Sequence) -> None:
        for (n, t), a in zip(f.params, args):
            if not value_has_type(a, t):
                raise GuardViolation(f'{n} is not of type {t}', f.name)
        env = dict(zip(f.param_names, args))
        for g in f.extra_guards:
            if not self.guard_holds(g, env):
                raise GuardViolation('guard conjunct does not hold', f.name)

    def guard_holds(self, g, env) -> bool:
        if isinstance(g, GAnd):
            return all(self.guard_holds(a, env) for a in g.args)
        if isinstance(g, GOr):
            return any(self.guard_holds(a, env) for a in g.args)
        if isinstance(g, GNot):
            return not self.guard_holds(g.arg, env)
        if isinstance(g, GCmp):
            nums = [self.guard_num(a, env) for a in g.args]
            if any(n is None for n in nums):
                return False
            ok = {'<': int.__lt__, '<=': int.__le__, '>': int.__gt__,
                  '>=': int.__ge__, '=': int.__eq__}[g.op]
            return all(ok(a, b) for a, b in zip(nums, nums[1:]))
        if isinstance(g, GIndexOk):
            a, i = env.get(g.array), env.get(g.index)
            return (_is_array(a) and a.elem_type == g.elem and isinstance(i, IntegerValue)
                    and 0 <= i.value < len(a))
        if isinstance(g, GTerm):
            try:
                v = self.ev(g.term, env, None)
            except GuardViolation:
                return False
            return v is True
        raise TypeError(f'not a guard: {g!r}')

    def guard_num(self, g, env) -> Optional[int]:
        if isinstance(g, GNum):
            return g.value
        if isinstance(g, GGet):
            v = env.get(g.var)
            return v.value if isinstance(v, IntegerValue) and v.type == g.type else None
        if isinstance(g, GLen):
            v = env.get(g.var)
            return len(v) if _is_array(v) else None
        if isinstance(g, GArith):
            nums = [self.guard_num(a, env) for a in g.args]
            if any(n is None for n in nums):
                return None
            if g.op == '-' and len(nums) == 1:
                return -nums[0]
            acc = nums[0]
            for n in nums[1:]:
                acc = acc + n if g.op == '+' else acc - n if g.op == '-' else acc * n
            return acc
        raise TypeError(f'not a guard number: {g!r}')

    # terms

    def int_arg(self, v, t: CIntType, what: str) -> IntegerValue:
        if not isinstance(v, IntegerValue) or v.type != t:
            raise GuardViolation(f'{what} is not of type {t.short_name}')
        return v

    def bool_arg(self, v, what: str) -> bool:
        if not isinstance(v, bool):
            raise GuardViolation(f'{what} is not a boolean')
        return v

    def array_arg(self, env, name: str, elem: CIntType):
        a = env.get(name)
        if not _is_array(a) or a.elem_type != elem:
            raise GuardViolation(f'{name} is not a {elem.short_name} array')
        return a

    def ev(self, t, env, fn: Optional[str]):
        try:
            return self._ev(t, env, fn)
        except WellDefError as exc:
            raise GuardViolation(str(exc), fn or '') from exc
        except BoundsError as exc:
            raise GuardViolation(f'index out of bounds: {exc}', fn or '') from exc
        except (RangeError, ValueTypeError) as exc:
            raise GuardViolation(str(exc), fn or '') from exc

    def _ev(self, t, env, fn):
        ev = self._ev
        if isinstance(t, IVar):
            if t.name not in env:
                raise GuardViolation(f'unbound variable {t.name}')
            return env[t.name]
        if isinstance(t, IConst):
            return make_int(t.type, t.value, self.params)
        if isinstance(t, IUnop):
            return exec_unary(t.op, self.int_arg(ev(t.arg, env, fn), t.type, t.op), self.params)
        if isinstance(t, IBinop):
            a = self.int_arg(ev(t.left, env, fn), t.ltype, t.op)
            b = self.int_arg(ev(t.right, env, fn), t.rtype, t.op)
            return exec_binary(t.op, a, b, self.params)
        if isinstance(t, IConv):
            return convert(self.int_arg(ev(t.arg, env, fn), t.source, 'conversion'),
                           t.target, self.params)
        if isinstance(t, IBoolFrom):
            return self.int_arg(ev(t.arg, env, fn), t.type, 'boolean-from').value != 0
        if isinstance(t, IFromBool):
            return int_from_bool(self.bool_arg(ev(t.arg, env, fn), 'from-boolean'), t.type)
        if isinstance(t, ILetDeclar):
            return ev(t.body, {**env, t.var: ev(t.rhs, env, fn)}, fn)
        if isinstance(t, ILetAssign):
            v = ev(t.rhs, env, fn)
            old = env.get(t.var)
            if old is None or type(old) is not type(v) and not (_is_array(old) and _is_array(v)):
                raise GuardViolation(f'assignment to {t.var} changes its kind')
            if isinstance(v, IntegerValue) and v.type != old.type:
                raise GuardViolation(f'assignment to {t.var} changes its type')
            return ev(t.body, {**env, t.var: v}, fn)
        if isinstance(t, ILetStmt):
            v = ev(t.rhs, env, fn)
            new = dict(env)
            if len(t.vars) == 1:
                new[t.vars[0]] = v
            else:
                if not isinstance(v, tuple) or len(v) != len(t.vars):
                    raise GuardViolation(f'expected {len(t.vars)} values')
                new.update(zip(t.vars, v))
            return ev(t.body, new, fn)
        if isinstance(t, IIf):
            if self.bool_arg(ev(t.test, env, fn), 'if test'):
                return ev(t.then, env, fn)
            return ev(t.else_, env, fn)
        if isinstance(t, IAnd):
            return self.bool_arg(ev(t.left, env, fn), 'and') and \
                self.bool_arg(ev(t.right, env, fn), 'and')
        if isinstance(t, IOr):
            return self.bool_arg(ev(t.left, env, fn), 'or') or \
                self.bool_arg(ev(t.right, env, fn), 'or')
        if isinstance(t, ICondExpr):
            if self.bool_arg(ev(t.test, env, fn), 'condexpr test'):
                return ev(t.then, env, fn)
            return ev(t.else_, env, fn)
        if isinstance(t, IArrayRead):
            a = self.array_arg(env, t.array, t.elem)
            i = self.int_arg(ev(t.index, env, fn), t.itype, 'array index')
            if isinstance(a, _Box):
                if not 0 <= i.value < len(a):
                    raise BoundsError(i.value, len(a))
                return a.cells[i.value]
            return array_read(a, i)
        if isinstance(t, IArrayWrite):
            a = self.array_arg(env, t.array, t.elem)
            i = self.int_arg(ev(t.index, env, fn), t.itype, 'array index')
            v = self.int_arg(ev(t.value, env, fn), t.elem, 'stored value')
            if isinstance(a, _Box):
                if not 0 <= i.value < len(a):
                    raise BoundsError(i.value, len(a))
                a.cells[i.value] = v
                return a
            return array_write(a, i, v)
        if isinstance(t, ICall):
            args = [ev(a, env, fn) for a in t.args]
            if t.fn == fn:
                return _Recur(args)
            return self.call(t.fn, args)
        if isinstance(t, IMv):
            return tuple(ev(i, env, fn) for i in t.items)
        if isinstance(t, IRetVal):
            return ev(t.term, env, fn)
        raise TypeError(f'not an IR term: {t!r}')

    def call(self, name: str, args: list):
        f = self.funs.get(name)
        if f is None:
            raise GuardViolation(f'call to undefined function {name}')
        if len(args) != len(f.params):
            raise GuardViolation(f'{name} expects {len(f.params)} arguments')
        while True:
            self.check_entry(f, args)
            result = self.ev(f.body, dict(zip(f.param_names, args)), f.name)
            if not isinstance(result, _Recur):
                return result
            self.steps += 1
            if self.steps > self.step_cap:
                raise CapExceeded(f'{name}: more than {self.step_cap} iterations')
            args = result.args


def _freeze(v):
    return v.freeze() if isinstance(v, _Box) else v


def eval_ir(p: IrProgram, fn: str, args: Sequence, step_cap: int = DEFAULT_STEP_CAP,
            params: ImplParams = DEFAULT_PARAMS, strategy: str = 'cow') -> list:
    """Evaluate ``fn`` on ``args``; return its values as a list.

    A function returning a single value yields a one-element list; an ``mv``
    result yields its components in order.
    """
    ev = _Evaluator(p, params, step_cap, strategy)
    if ev.inplace:
        args = [_Box(a) if isinstance(a, ArrayValue) else a for a in args]
    result = ev.call(fn, list(args))
    out = list(result) if isinstance(result, tuple) else [result]
    return [_freeze(v) for v in out]


def guard_holds(f: IrFunction, args: Sequence, p: Optional[IrProgram] = None,
                params: ImplParams = DEFAULT_PARAMS) -> bool:
    """Whether ``args`` satisfy the type conjuncts and extra guards of ``f``."""
    ev = _Evaluator(p or IrProgram((f,)), params, DEFAULT_STEP_CAP, 'cow')
    if len(args) != len(f.params):
        return False
    try:
        ev.check_entry(f, args)
    except (GuardViolation, CapExceeded):
        return False
    return True
