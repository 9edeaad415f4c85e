"""Well-formedness of IR programs: the representation rules a program must
follow for its functions to denote C functions and loops.
"""

from __future__ import annotations

from dataclasses import dataclass

from ..syntax import is_c_identifier
from .syntax import (ArrayType, IArrayWrite, ICall, IIf, ILetAssign, ILetDeclar,
                     ILetStmt, IMv, IrFunction, IrProgram, IRetVal, IVar, children,
                     walk)


class IrError(ValueError):
    def __init__(self, rule: str, msg: str, where: str = '', pos=None):
        loc = where + (f' at {pos}' if pos else '')
        super().__init__(f'[{rule}] {loc}: {msg}' if loc else f'[{rule}] {msg}')
        self.rule = rule
        self.pos = pos


@dataclass(frozen=True)
class Shape:
    """What a function hands back.

    Non-loop functions: an optional result plus the arrays they update.
    Loop functions: the ordered tuple of formals they update (``outputs``).
    """

    result: bool
    arrays: tuple[str, ...]
    outputs: tuple[str, ...]
    is_loop: bool = False

    @property
    def vars(self) -> tuple[str, ...]:
        return tuple(n for n in self.outputs if n not in self.arrays)


def _tuple_names(t) -> tuple[str, ...] | None:
    if isinstance(t, IVar):
        return (t.name,)
    if isinstance(t, IMv) and all(isinstance(i, IVar) for i in t.items):
        return tuple(i.name for i in t.items)
    return None


def _loop_shape(f: IrFunction) -> Shape:
    where = f'loop function {f.name}'
    formals = f.param_names
    bases: set[tuple[str, ...]] = set()
    tail_calls = 0

    def tail(t):
        nonlocal tail_calls
        if isinstance(t, IIf):
            _no_self_call(t.test)
            tail(t.then)
            tail(t.else_)
        elif isinstance(t, (ILetDeclar, ILetAssign, ILetStmt)):
            _no_self_call(t.rhs)
            tail(t.body)
        elif isinstance(t, ICall) and t.fn == f.name:
            names = [a.name if isinstance(a, IVar) else None for a in t.args]
            if tuple(names) != formals:
                raise IrError('loop-shape', 'recursive call must pass the formals unchanged',
                              where, t.pos)
            tail_calls += 1
        else:
            names = _tuple_names(t)
            if names is None or not set(names) <= set(formals) or len(set(names)) != len(names):
                raise IrError('loop-shape', 'control path must end in a recursive call '
                              'or in (a subset of) the formal parameters', where,
                              getattr(t, 'pos', None))
            bases.add(names)

    def _no_self_call(t):
        if any(isinstance(x, ICall) and x.fn == f.name for x in walk(t)):
            raise IrError('tail-recursion', 'recursive call not in tail position', where,
                          getattr(t, 'pos', None))

    tail(f.body)
    total = sum(1 for x in walk(f.body) if isinstance(x, ICall) and x.fn == f.name)
    if total != tail_calls:
        raise IrError('tail-recursion', 'recursive call not in tail position', where, f.pos)
    if not bases:
        raise IrError('loop-shape', 'no control path exits the loop', where, f.pos)
    if len(bases) > 1:
        raise IrError('loop-shape', f'exit paths return different variables: {sorted(bases)}',
                      where, f.pos)
    outputs = bases.pop()
    arrays = tuple(n for n in outputs if isinstance(f.param_type(n), ArrayType))
    return Shape(False, arrays, outputs, True)


def _fun_shape(f: IrFunction) -> Shape:
    where = f'function {f.name}'
    array_params = {n for n, t in f.params if isinstance(t, ArrayType)}
    shapes: set[tuple[bool, tuple[str, ...]]] = set()

    def tail(t):
        if isinstance(t, IIf):
            tail(t.then)
            tail(t.else_)
        elif isinstance(t, (ILetDeclar, ILetAssign, ILetStmt)):
            tail(t.body)
        elif isinstance(t, IMv):
            items = list(t.items)
            result = bool(items) and isinstance(items[0], IRetVal)
            if result:
                items = items[1:]
            if not items or not all(isinstance(i, IVar) and i.name in array_params for i in items):
                raise IrError('result-shape', 'mv must hold an optional (retval ...) followed '
                              'by updated array parameters', where, t.pos)
            names = tuple(i.name for i in items)
            if len(set(names)) != len(names):
                raise IrError('result-shape', 'array returned twice', where, t.pos)
            shapes.add((result, names))
        elif isinstance(t, IVar) and t.name in array_params:
            shapes.add((False, (t.name,)))
        elif isinstance(t, IRetVal):
            raise IrError('result-shape', 'retval only marks the first value of an mv',
                          where, t.pos)
        else:
            shapes.add((True, ()))

    tail(f.body)
    if len(shapes) != 1:
        raise IrError('result-shape', 'control paths return different shapes', where, f.pos)
    result, arrays = shapes.pop()
    return Shape(result, arrays, arrays, False)


def function_shape(f: IrFunction) -> Shape:
    return _loop_shape(f) if f.is_loop else _fun_shape(f)


def _check_names(f: IrFunction) -> None:
    if not f.is_loop and not is_c_identifier(f.name):
        raise IrError('identifier', f'{f.name!r} is not a valid C identifier',
                      f'function {f.name}', f.pos)
    for n, _ in f.params:
        if not is_c_identifier(n):
            raise IrError('identifier', f'parameter {n!r} is not a valid C identifier',
                          f'function {f.name}', f.pos)
    for t in walk(f.body):
        names = (t.var,) if isinstance(t, (ILetDeclar, ILetAssign)) else \
            t.vars if isinstance(t, ILetStmt) else ()
        for n in names:
            if not is_c_identifier(n):
                raise IrError('identifier', f'variable {n!r} is not a valid C identifier',
                              f'function {f.name}', t.pos)


def _branch_ends(t, vars: tuple[str, ...], where: str) -> None:
    if isinstance(t, IIf):
        _branch_ends(t.then, vars, where)
        _branch_ends(t.else_, vars, where)
    elif isinstance(t, (ILetDeclar, ILetAssign, ILetStmt)):
        _branch_ends(t.body, vars, where)
    elif _tuple_names(t) != vars or (len(vars) > 1 and not isinstance(t, IMv)):
        raise IrError('statement-binding', f'branch must end in the bound variables {vars}',
                      where, getattr(t, 'pos', None))


def _check_bindings(f: IrFunction, shapes: dict[str, Shape], p: IrProgram) -> None:
    where = f'function {f.name}'
    arrays = {n for n, t in f.params if isinstance(t, ArrayType)}
    for t in walk(f.body):
        if isinstance(t, (ILetDeclar, ILetAssign)):
            if isinstance(t.rhs, IArrayWrite):
                if not isinstance(t, ILetAssign) or t.rhs.array != t.var:
                    raise IrError('single-threaded', f'array {t.rhs.array!r} written without '
                                  'rebinding the same name', where, t.pos)
            elif t.var in arrays:
                raise IrError('single-threaded', f'array {t.var!r} rebound to a non-array',
                              where, t.pos)
        if not isinstance(t, ILetStmt):
            continue
        rhs = t.rhs
        if isinstance(rhs, IIf):
            _branch_ends(rhs.then, t.vars, where)
            _branch_ends(rhs.else_, t.vars, where)
        elif isinstance(rhs, IArrayWrite):
            if t.vars != (rhs.array,):
                raise IrError('single-threaded', f'array {rhs.array!r} written without '
                              'rebinding the same name', where, t.pos)
        elif isinstance(rhs, ICall) and rhs.fn != f.name and rhs.fn in shapes:
            callee = p.function(rhs.fn)
            shape = shapes[rhs.fn]
            if shape.is_loop:
                names = tuple(a.name if isinstance(a, IVar) else None for a in rhs.args)
                if names != callee.param_names:
                    raise IrError('loop-call', f'loop {rhs.fn} must be called on variables '
                                  f'named like its formals {callee.param_names}', where, t.pos)
                if t.vars != shape.outputs:
                    raise IrError('statement-binding', f'loop {rhs.fn} updates '
                                  f'{shape.outputs}, bound {t.vars}', where, t.pos)
            else:
                if shape.result:
                    raise IrError('statement-binding', f'{rhs.fn} returns a result; bind it '
                                  'with declar or assign', where, t.pos)
                passed = []
                for out in shape.arrays:
                    arg = rhs.args[callee.param_names.index(out)]
                    passed.append(arg.name if isinstance(arg, IVar) else None)
                if t.vars != tuple(passed):
                    raise IrError('statement-binding', f'{rhs.fn} updates arrays passed as '
                                  f'{tuple(passed)}, bound {t.vars}', where, t.pos)
        else:
            raise IrError('statement-binding', 'a let without declar/assign must bind an if, '
                          'a loop call, an array write, or a call that updates arrays',
                          where, t.pos)
    for t in walk(f.body):
        if isinstance(t, ICall) and t.fn in shapes and not shapes[t.fn].is_loop:
            if shapes[t.fn].arrays and not _is_bound_call(t, f.body):
                raise IrError('single-threaded', f'arrays updated by {t.fn} must be rebound',
                              where, t.pos)


def _is_bound_call(call: ICall, body) -> bool:
    return any(isinstance(t, ILetStmt) and t.rhs is call for t in walk(body))


def _check_array_uses(f: IrFunction) -> None:
    where = f'function {f.name}'
    arrays = {n for n, t in f.params if isinstance(t, ArrayType)}

    def tail_ok(t, ok):
        # IVar of an array is allowed only where ``ok`` is set.
        if isinstance(t, IVar):
            if t.name in arrays and not ok:
                raise IrError('single-threaded', f'array {t.name!r} used as a value',
                              where, t.pos)
            return
        if isinstance(t, ICall):
            seen = set()
            for a in t.args:
                if isinstance(a, IVar) and a.name in arrays:
                    if a.name in seen:
                        raise IrError('single-threaded', f'array {a.name!r} passed twice',
                                      where, t.pos)
                    seen.add(a.name)
                    continue
                tail_ok(a, False)
            return
        if isinstance(t, IArrayWrite):
            tail_ok(t.index, False)
            tail_ok(t.value, False)
            return
        if isinstance(t, IIf):
            tail_ok(t.test, False)
            tail_ok(t.then, ok)
            tail_ok(t.else_, ok)
            return
        if isinstance(t, (ILetDeclar, ILetAssign, ILetStmt)):
            tail_ok(t.rhs, isinstance(t, ILetStmt))
            tail_ok(t.body, ok)
            return
        if isinstance(t, IMv):
            for i in t.items:
                tail_ok(i, ok)
            return
        for c in children(t):
            tail_ok(c, False)

    tail_ok(f.body, True)
    # writes must only appear as let-bound right-hand sides (checked above);
    # any other IArrayWrite occurrence is nested inside an expression
    bound = {id(t.rhs) for t in walk(f.body) if isinstance(t, (ILetStmt, ILetAssign))}
    for t in walk(f.body):
        if isinstance(t, IArrayWrite) and id(t) not in bound:
            raise IrError('single-threaded', f'array {t.array!r} written without rebinding '
                          'the same name', where, t.pos)


def _modified_arrays(f: IrFunction) -> set[str]:
    arrays = {n for n, t in f.params if isinstance(t, ArrayType)}
    out = set()
    for t in walk(f.body):
        if isinstance(t, ILetStmt):
            out |= arrays & set(t.vars)
        elif isinstance(t, ILetAssign) and t.var in arrays:
            out.add(t.var)
    return out


def analyze(p: IrProgram) -> dict[str, Shape]:
    """Check ``p`` and return the output shape of every function."""
    shapes: dict[str, Shape] = {}
    for f in p.functions:
        where = f'function {f.name}'
        if f.name in shapes:
            raise IrError('duplicate', f'function {f.name!r} defined twice', where, f.pos)
        _check_names(f)
        for callee in sorted({t.fn for t in walk(f.body) if isinstance(t, ICall)}):
            if callee == f.name:
                continue
            if callee not in shapes:
                raise IrError('bottom-up', f'call to {callee!r}, which is not defined '
                              'before this function', where, f.pos)
        for t in walk(f.body):
            if isinstance(t, ICall) and t.fn in shapes:
                n = len(p.function(t.fn).params)
                if len(t.args) != n:
                    raise IrError('arity', f'{t.fn} takes {n} arguments', where, t.pos)
                if shapes[t.fn].is_loop and not _is_bound_call(t, f.body):
                    raise IrError('loop-call', f'loop {t.fn} must be bound by let/mv-let',
                                  where, t.pos)
        shape = function_shape(f)
        _check_bindings(f, shapes, p)
        _check_array_uses(f)
        missing = _modified_arrays(f) - set(shape.outputs)
        if missing:
            raise IrError('single-threaded', f'updated arrays {sorted(missing)} are not '
                          'returned', where, f.pos)
        if f.is_loop:
            # in C the loop updates the caller's variables in place, so every
            # formal it assigns must be handed back
            assigned = set()
            for t in walk(f.body):
                if isinstance(t, (ILetAssign, ILetDeclar)):
                    assigned.add(t.var)
                elif isinstance(t, ILetStmt):
                    assigned |= set(t.vars)
            missing = (assigned & set(f.param_names)) - set(shape.outputs)
            if missing:
                raise IrError('loop-shape', f'formals {sorted(missing)} are updated but not '
                              'returned by the loop', where, f.pos)
        shapes[f.name] = shape
    return shapes


def check_ir(p: IrProgram) -> None:
    analyze(p)
