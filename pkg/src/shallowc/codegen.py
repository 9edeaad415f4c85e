"""Inverse shallow embedding: recognize C constructs in checked IR and emit C.

The translation is driven by the shapes of IR terms.  A term that falls
outside the recognized image raises ``TranslationError`` naming the
location and the closest pattern it failed to match.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from types import MappingProxyType
from typing import Mapping, Optional, Union

from .ir.checker import Shape, analyze
from .ir.syntax import (ArrayType, IAnd, IArrayRead, IArrayWrite, IBinop, IBoolFrom,
                        ICall, ICondExpr, IConst, IConv, IFromBool, IIf, ILetAssign,
                        ILetDeclar, ILetStmt, IMv, IOr, IrFunction, IrProgram,
                        IUnop, IVar)
from .static import StaticError, check_transunit
from .syntax import (VOID, Assign, AssignIndex, Binary, Block, Call, Cast, Cond, Const,
                     CType, Declare, Expr, ExprStmt, FunDef, If, IfElse, Index, LogAnd,
                     LogOr, Pointer, Return, Stmt, TransUnit, Unary, Var, While)
from .values import (DEFAULT_PARAMS, SINT, CIntType, ImplParams, binary_result_type,
                     promoted_type, unary_result_type)


class TranslationError(ValueError):
    def __init__(self, msg: str, where: str = '', pos=None, pattern: str = ''):
        text = msg
        if pattern:
            text += f' (expected {pattern})'
        loc = where + (f' at {pos}' if pos else '')
        super().__init__(f'{loc}: {text}' if loc else text)
        self.pos = pos
        self.pattern = pattern


@dataclass(frozen=True)
class FuelBound:
    kind: str  # 'constant' or 'loop_dependent'
    value: Optional[int] = None

    @property
    def is_constant(self) -> bool:
        return self.kind == 'constant'

    def __str__(self):
        return str(self.value) if self.is_constant else 'loop-dependent'


LOOP_DEPENDENT = FuelBound('loop_dependent')


@dataclass(frozen=True)
class Outputs:
    result: Optional[CType]
    arrays: tuple[str, ...]
    vars: Optional[tuple[str, ...]]


def _ctype(t) -> CType:
    return Pointer(t.elem) if isinstance(t, ArrayType) else t


class TypeCtx:
    """Scoped map from IR variables to C types.

    ``assignable`` holds names from enclosing scopes that the current branch
    or loop body is allowed to update (the variables its enclosing binding
    rebinds).
    """

    def __init__(self, scopes=(), assignable=frozenset()):
        self.scopes: tuple[Mapping[str, CType], ...] = scopes or (MappingProxyType({}),)
        self.assignable = frozenset(assignable)

    def lookup(self, name: str) -> Optional[CType]:
        for s in reversed(self.scopes):
            if name in s:
                return s[name]
        return None

    def declare(self, name: str, t: CType) -> 'TypeCtx':
        top = dict(self.scopes[-1])
        top[name] = t
        return TypeCtx(self.scopes[:-1] + (MappingProxyType(top),), self.assignable)

    def push(self, assignable) -> 'TypeCtx':
        return TypeCtx(self.scopes + (MappingProxyType({}),), assignable)

    def can_assign(self, name: str) -> bool:
        return name in self.scopes[-1] or name in self.assignable


@dataclass
class Translation:
    transunit: TransUnit
    loops: dict[str, While] = field(default_factory=dict)
    shapes: dict[str, Shape] = field(default_factory=dict)
    return_types: dict[str, CType] = field(default_factory=dict)

    def outputs(self, fn: str) -> Outputs:
        s = self.shapes[fn]
        if s.is_loop:
            return Outputs(None, s.arrays, s.vars)
        return Outputs(self.return_types.get(fn) if s.result else None, s.arrays, None)


# Function results: tail positions either return, fall through (void), or
# end a branch/loop body whose effects are explicit in IR only.
_FUN, _BRANCH, _LOOP = 'function', 'branch', 'loop'


class _Translator:
    def __init__(self, p: IrProgram, params: ImplParams):
        self.p = p
        self.params = params
        self.shapes = analyze(p)
        self.loops: dict[str, While] = {}
        self.return_types: dict[str, CType] = {}
        self.fn: Optional[IrFunction] = None
        self.returns: list[CType] = []

    def err(self, msg, t=None, pattern=''):
        where = f'function {self.fn.name}' if self.fn else ''
        raise TranslationError(msg, where, getattr(t, 'pos', None), pattern)

    # expressions

    def expr(self, t, ctx: TypeCtx) -> tuple[Expr, CIntType]:
        if isinstance(t, IVar):
            ty = ctx.lookup(t.name)
            if ty is None:
                self.err(f'variable {t.name!r} is not in scope', t)
            if not isinstance(ty, CIntType):
                self.err(f'array {t.name!r} used as an integer expression', t)
            return Var(t.name), ty
        if isinstance(t, IConst):
            if not self.params.in_range(t.type, t.value):
                self.err(f'constant {t.value} out of range for {t.type.c_name}', t)
            return Const(t.value, t.type), t.type
        if isinstance(t, IUnop):
            e, ty = self.typed(t.arg, t.type, ctx, t.op)
            return Unary(t.op, e), unary_result_type(t.op, ty, self.params)
        if isinstance(t, IBinop):
            l, lt = self.typed(t.left, t.ltype, ctx, t.op)
            r, rt = self.typed(t.right, t.rtype, ctx, t.op)
            return Binary(t.op, l, r), binary_result_type(t.op, lt, rt, self.params)
        if isinstance(t, IConv):
            e, _ = self.typed(t.arg, t.source, ctx, 'conversion')
            return Cast(t.target, e), t.target
        if isinstance(t, IFromBool):
            if t.type != SINT or not isinstance(t.arg, (IAnd, IOr)):
                self.err('a boolean is turned into an integer only as '
                         '(sint-from-boolean (and ...)) or (sint-from-boolean (or ...))', t)
            return self.test(t.arg, ctx), SINT
        if isinstance(t, ICondExpr):
            test = self.test(t.test, ctx)
            a, at = self.expr(t.then, ctx)
            b, bt = self.expr(t.else_, ctx)
            if at != bt:
                self.err(f'condexpr branches have types {at} and {bt}', t)
            if promoted_type(at, self.params) != at:
                self.err(f'condexpr on {at.c_name} operands would be promoted in C', t,
                         'condexpr branches of rank int or higher')
            return Cond(test, a, b), at
        if isinstance(t, IArrayRead):
            self.array_var(t.array, t.elem, ctx, t)
            i, _ = self.typed(t.index, t.itype, ctx, 'array index')
            return Index(t.array, i), t.elem
        if isinstance(t, (IBoolFrom, IAnd, IOr)):
            self.err('boolean term used where a C integer is expected', t,
                     'an integer-valued term')
        if isinstance(t, ICall):
            self.err(f'call to {t.fn} nested inside an expression', t,
                     'calls only as the whole right-hand side of declar/assign or a result')
        self.err(f'{type(t).__name__} is not an expression', t, 'a pure expression term')

    def typed(self, t, want: CIntType, ctx, what):
        e, ty = self.expr(t, ctx)
        if ty != want:
            self.err(f'{what} expects {want.c_name}, got {ty.c_name}', t)
        return e, ty

    def test(self, t, ctx) -> Expr:
        if isinstance(t, IBoolFrom):
            e, _ = self.typed(t.arg, t.type, ctx, 'boolean-from')
            return e
        if isinstance(t, IAnd):
            return LogAnd(self.test(t.left, ctx), self.test(t.right, ctx))
        if isinstance(t, IOr):
            return LogOr(self.test(t.left, ctx), self.test(t.right, ctx))
        self.err('test is not a boolean term', t, '(boolean-from-<type> ...), and, or')

    def array_var(self, name, elem, ctx, t):
        ty = ctx.lookup(name)
        if ty != Pointer(elem):
            self.err(f'{name!r} is not a {elem.short_name} array here', t)

    def call_args(self, t: ICall, ctx) -> tuple[Expr, ...]:
        callee = self.p.function(t.fn)
        args = []
        for (pname, ptype), a in zip(callee.params, t.args):
            if isinstance(ptype, ArrayType):
                if not isinstance(a, IVar):
                    self.err(f'array argument {pname!r} of {t.fn} must be a variable', t)
                self.array_var(a.name, ptype.elem, ctx, t)
                args.append(Var(a.name))
            else:
                args.append(self.typed(a, ptype, ctx, f'argument {pname!r} of {t.fn}')[0])
        return tuple(args)

    def rhs(self, t, ctx) -> tuple[Expr, CIntType]:
        """An expression that may be a call to a function returning a result."""
        if isinstance(t, ICall):
            shape = self.shapes[t.fn]
            if shape.is_loop or not shape.result or shape.arrays:
                self.err(f'{t.fn} does not return a plain result', t,
                         'a call to a function returning only a result')
            return Call(t.fn, self.call_args(t, ctx)), self.return_types[t.fn]
        return self.expr(t, ctx)

    # statements

    def stmts(self, t, ctx: TypeCtx, mode: str, ends=()) -> list[Stmt]:
        if isinstance(t, ILetDeclar):
            if ctx.lookup(t.var) is not None:
                self.err(f'declar of {t.var!r}, which is already in scope', t,
                         'a fresh variable name')
            if isinstance(t.rhs, IArrayWrite):
                self.err('array write bound with declar', t)
            e, ty = self.rhs(t.rhs, ctx)
            return [Declare(ty, t.var, e)] + self.stmts(t.body, ctx.declare(t.var, ty), mode, ends)
        if isinstance(t, ILetAssign):
            return [self.assign(t.var, t.rhs, ctx, t)] + self.stmts(t.body, ctx, mode, ends)
        if isinstance(t, ILetStmt):
            return self.let_stmt(t, ctx) + self.stmts(t.body, ctx, mode, ends)
        if isinstance(t, IIf):
            test = self.test(t.test, ctx)
            inner = ctx.push(ctx.assignable | set(ctx.scopes[-1]))
            then = self.stmts(t.then, inner, mode, ends)
            else_ = self.stmts(t.else_, inner, mode, ends)
            return [IfElse(test, Block(then), Block(else_))]
        return self.tail(t, ctx, mode, ends)

    def tail(self, t, ctx, mode, ends) -> list[Stmt]:
        if mode == _BRANCH:
            names = (t.name,) if isinstance(t, IVar) else \
                tuple(i.name for i in t.items if isinstance(i, IVar)) if isinstance(t, IMv) else None
            if names != ends:
                self.err('branch does not end in the bound variables', t, f'{ends}')
            return []
        if mode == _LOOP:
            if isinstance(t, ICall) and t.fn == self.fn.name:
                return []
            self.err('loop body path does not end in the recursive call', t,
                     'a recursive call; exits in the middle of a loop body are not supported')
        shape = self.shapes[self.fn.name]
        if not shape.result:
            return []
        if isinstance(t, IMv):
            t = t.items[0].term
        e, ty = self.rhs(t, ctx)
        self.returns.append(ty)
        return [Return(e)]

    def assign(self, var, rhs, ctx, t) -> Stmt:
        if not ctx.can_assign(var):
            if ctx.lookup(var) is None:
                self.err(f'assignment to undeclared variable {var!r}', t)
            self.err(f'{var!r} is updated inside a branch or loop but is not among the '
                     'variables bound to it', t, 'the updated variable in the binding list')
        if isinstance(rhs, IArrayWrite):
            if rhs.array != var:
                self.err(f'write to array {rhs.array!r} bound to {var!r}', t)
            self.array_var(var, rhs.elem, ctx, t)
            i, _ = self.typed(rhs.index, rhs.itype, ctx, 'array index')
            v, _ = self.typed(rhs.value, rhs.elem, ctx, 'array element')
            return AssignIndex(var, i, v)
        want = ctx.lookup(var)
        e, ty = self.rhs(rhs, ctx)
        if ty != want:
            self.err(f'assign to {var!r} of type {want} with a {ty} value', t,
                     'a value of the declared type')
        return Assign(var, e)

    def let_stmt(self, t: ILetStmt, ctx: TypeCtx) -> list[Stmt]:
        for v in t.vars:
            if not ctx.can_assign(v):
                self.err(f'{v!r} cannot be updated here', t)
        rhs = t.rhs
        if isinstance(rhs, IArrayWrite):
            return [self.assign(t.vars[0], rhs, ctx, t)]
        if isinstance(rhs, IIf):
            test = self.test(rhs.test, ctx)
            inner = ctx.push(set(t.vars))
            then = self.stmts(rhs.then, inner, _BRANCH, t.vars)
            else_ = self.stmts(rhs.else_, inner, _BRANCH, t.vars)
            if not else_:
                return [If(test, Block(then))]
            return [IfElse(test, Block(then), Block(else_))]
        if isinstance(rhs, ICall):
            callee = self.p.function(rhs.fn)
            if self.shapes[rhs.fn].is_loop:
                for n, ty in callee.params:
                    if ctx.lookup(n) != _ctype(ty):
                        self.err(f'loop {rhs.fn} needs {n!r} of type {_ctype(ty)} in scope', t)
                return [self.loop(callee)]
            return [ExprStmt(Call(rhs.fn, self.call_args(rhs, ctx)))]
        self.err('unrecognized statement binding', t,
                 'an if, a loop call, an array write, or an array-updating call')

    # loops and functions

    def loop(self, f: IrFunction) -> While:
        if f.name in self.loops:
            return self.loops[f.name]
        saved, self.fn = self.fn, f
        body = f.body
        if not isinstance(body, IIf) or (isinstance(body.then, (IVar, IMv))):
            self.err('loop body must be (if test <recursive branch> <exit>)', body,
                     '(if test (... (loop formals)) formals)')
        if not isinstance(body.else_, (IVar, IMv)):
            self.err('loop exit branch must be just the affected formals', body.else_)
        ctx = TypeCtx((MappingProxyType({n: _ctype(ty) for n, ty in f.params}),))
        test = self.test(body.test, ctx)
        stmts = self.stmts(body.then, ctx.push(set(self.shapes[f.name].outputs)), _LOOP)
        w = While(test, Block(stmts))
        self.fn = saved
        self.loops[f.name] = w
        return w

    def function(self, f: IrFunction) -> FunDef:
        self.fn = f
        self.returns = []
        ctx = TypeCtx((MappingProxyType({n: _ctype(ty) for n, ty in f.params}),))
        body = self.stmts(f.body, ctx, _FUN)
        shape = self.shapes[f.name]
        if shape.result:
            kinds = set(self.returns)
            if len(kinds) != 1:
                self.err(f'control paths return different types {sorted(map(str, kinds))}',
                         f.body)
            ret: CType = kinds.pop()
        else:
            ret = VOID
        self.return_types[f.name] = ret
        self.fn = None
        return FunDef(f.name, tuple((n, _ctype(ty)) for n, ty in f.params), ret, Block(body))


def translate_program(p: IrProgram, params: ImplParams = DEFAULT_PARAMS) -> Translation:
    tr = _Translator(p, params)
    fundefs = []
    for f in p.functions:
        if f.is_loop:
            tr.loop(f)
        else:
            fundefs.append(tr.function(f))
    tu = TransUnit(tuple(fundefs))
    try:
        check_transunit(tu, params)
    except StaticError as exc:
        raise TranslationError(f'generated code is not well-formed: {exc}') from None
    return Translation(tu, tr.loops, tr.shapes, tr.return_types)


def translate(p: IrProgram, params: ImplParams = DEFAULT_PARAMS) -> TransUnit:
    return translate_program(p, params).transunit


def affected_outputs(fn: Union[IrFunction, str], p: Optional[IrProgram] = None,
                     params: ImplParams = DEFAULT_PARAMS) -> Outputs:
    """Output shape of a function: (result type, updated arrays, loop variables)."""
    if isinstance(fn, IrFunction):
        name = fn.name
        p = p or IrProgram((fn,))
    else:
        name = fn
    if p.function(name).is_loop:
        s = analyze(p)[name]
        return Outputs(None, s.arrays, s.vars)
    return translate_program(p, params).outputs(name)


# Fuel bounds, following the consumption points of the interpreter.

def _expr_fuel(e: Expr, bounds: dict) -> Optional[int]:
    if isinstance(e, Call):
        b = bounds[e.fn]
        return None if b is None else 1 + b
    return 0


def _block_fuel(stmts, bounds) -> Optional[int]:
    need = len(stmts) + 1
    for k, s in enumerate(stmts):
        sf = _stmt_fuel(s, bounds)
        if sf is None:
            return None
        need = max(need, k + 1 + sf)
    return need


def _stmt_fuel(s: Stmt, bounds) -> Optional[int]:
    if isinstance(s, (Declare, Assign, Return, ExprStmt)):
        e = {Declare: 'init', Assign: 'rhs', Return: 'value', ExprStmt: 'call'}[type(s)]
        expr = getattr(s, e)
        inner = 0 if expr is None else _expr_fuel(expr, bounds)
        return None if inner is None else 1 + inner
    if isinstance(s, AssignIndex):
        return 1
    if isinstance(s, If):
        b = _block_fuel(s.then.stmts, bounds)
        return None if b is None else 1 + b
    if isinstance(s, IfElse):
        a = _block_fuel(s.then.stmts, bounds)
        b = _block_fuel(s.else_.stmts, bounds)
        return None if a is None or b is None else 1 + max(a, b)
    return None  # loops


def transunit_fuel_bounds(tu: TransUnit) -> dict[str, FuelBound]:
    raw: dict[str, Optional[int]] = {}
    for f in tu.fundefs:
        b = _block_fuel(f.body.stmts, raw)
        raw[f.name] = None if b is None else 1 + b
    return {n: (LOOP_DEPENDENT if b is None else FuelBound('constant', b))
            for n, b in raw.items()}


def fuel_bound(fn: str, p: Union[IrProgram, Translation, TransUnit],
               params: ImplParams = DEFAULT_PARAMS) -> FuelBound:
    if isinstance(p, IrProgram):
        p = translate(p, params)
    elif isinstance(p, Translation):
        p = p.transunit
    return transunit_fuel_bounds(p)[fn]
