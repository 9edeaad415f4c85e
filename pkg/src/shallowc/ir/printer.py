"""Render IR back to its surface syntax."""

from __future__ import annotations

from .sexpr import Int, SList, qsym, slist, sym, write
from .syntax import (ArrayType, GAnd, GArith, GCmp, GGet, GIndexOk, GLen, GNot,
                     GNum, GOr, GTerm, IAnd, IArrayRead, IArrayWrite, IBinop,
                     IBoolFrom, ICall, ICondExpr, IConst, IConv, IFromBool, IIf,
                     ILetAssign, ILetDeclar, ILetStmt, IMv, IOr, IrFunction,
                     IrProgram, IRetVal, IUnop, IVar)


def term_sexpr(t):
    if isinstance(t, IVar):
        return qsym(t.name)
    if isinstance(t, IConst):
        return slist(sym(f'{t.type.short_name}-dec-const'), Int(t.value))
    if isinstance(t, IUnop):
        return slist(sym(f'{t.op}-{t.type.short_name}'), term_sexpr(t.arg))
    if isinstance(t, IBinop):
        return slist(sym(f'{t.op}-{t.ltype.short_name}-{t.rtype.short_name}'),
                     term_sexpr(t.left), term_sexpr(t.right))
    if isinstance(t, IConv):
        return slist(sym(f'{t.target.short_name}-from-{t.source.short_name}'),
                     term_sexpr(t.arg))
    if isinstance(t, IBoolFrom):
        return slist(sym(f'boolean-from-{t.type.short_name}'), term_sexpr(t.arg))
    if isinstance(t, IFromBool):
        return slist(sym(f'{t.type.short_name}-from-boolean'), term_sexpr(t.arg))
    if isinstance(t, (ILetDeclar, ILetAssign)):
        wrapper = 'declar' if isinstance(t, ILetDeclar) else 'assign'
        binding = slist(qsym(t.var), slist(sym(wrapper), term_sexpr(t.rhs)))
        return slist(sym('let'), slist(binding), term_sexpr(t.body))
    if isinstance(t, ILetStmt):
        if len(t.vars) == 1:
            return slist(sym('let'), slist(slist(qsym(t.vars[0]), term_sexpr(t.rhs))),
                         term_sexpr(t.body))
        parts = [sym('mv-let'), slist(*map(qsym, t.vars)), term_sexpr(t.rhs)]
        if t.ignore:
            parts.append(slist(sym('declare'), slist(sym('ignore'), *map(qsym, t.ignore))))
        parts.append(term_sexpr(t.body))
        return slist(*parts)
    if isinstance(t, IIf):
        return slist(sym('if'), term_sexpr(t.test), term_sexpr(t.then), term_sexpr(t.else_))
    if isinstance(t, (IAnd, IOr)):
        return slist(sym('and' if isinstance(t, IAnd) else 'or'),
                     term_sexpr(t.left), term_sexpr(t.right))
    if isinstance(t, ICondExpr):
        return slist(sym('condexpr'), slist(sym('if'), term_sexpr(t.test),
                                            term_sexpr(t.then), term_sexpr(t.else_)))
    if isinstance(t, IArrayRead):
        return slist(sym(f'{t.elem.short_name}-array-read-{t.itype.short_name}'),
                     qsym(t.array), term_sexpr(t.index))
    if isinstance(t, IArrayWrite):
        return slist(sym(f'{t.elem.short_name}-array-write-{t.itype.short_name}'),
                     qsym(t.array), term_sexpr(t.index), term_sexpr(t.value))
    if isinstance(t, ICall):
        return slist(qsym(t.fn), *map(term_sexpr, t.args))
    if isinstance(t, IMv):
        return slist(sym('mv'), *map(term_sexpr, t.items))
    if isinstance(t, IRetVal):
        return slist(sym('retval'), term_sexpr(t.term))
    raise TypeError(f'not an IR term: {t!r}')


def guard_sexpr(g):
    if isinstance(g, GNum):
        return Int(g.value)
    if isinstance(g, GGet):
        return slist(sym(f'{g.type.short_name}->get'), qsym(g.var))
    if isinstance(g, GLen):
        return slist(sym('len'), qsym(g.var))
    if isinstance(g, (GArith, GCmp)):
        return slist(sym(g.op), *map(guard_sexpr, g.args))
    if isinstance(g, GIndexOk):
        return slist(sym(f'{g.elem.short_name}-array-index-okp'), qsym(g.array), qsym(g.index))
    if isinstance(g, (GAnd, GOr)):
        return slist(sym('and' if isinstance(g, GAnd) else 'or'), *map(guard_sexpr, g.args))
    if isinstance(g, GNot):
        return slist(sym('not'), guard_sexpr(g.arg))
    if isinstance(g, GTerm):
        return term_sexpr(g.term)
    raise TypeError(f'not a guard: {g!r}')


def _type_conjunct(name, t):
    if isinstance(t, ArrayType):
        return slist(sym(f'{t.elem.short_name}-arrayp'), qsym(name))
    return slist(sym(f'{t.short_name}p'), qsym(name))


def function_sexpr(f: IrFunction) -> SList:
    conjuncts = [_type_conjunct(n, t) for n, t in f.params]
    conjuncts += [guard_sexpr(g) for g in f.extra_guards]
    parts = [sym('defun'), qsym(f.name), slist(*(qsym(n) for n, _ in f.params))]
    if conjuncts:
        guard = conjuncts[0] if len(conjuncts) == 1 else slist(sym('and'), *conjuncts)
        parts.append(slist(sym('declare'), slist(sym('xargs'), sym(':guard'), guard)))
    parts.append(term_sexpr(f.body))
    return slist(*parts)


def print_ir(p: IrProgram, width: int = 80) -> str:
    return '\n\n'.join(write(function_sexpr(f), width) for f in p.functions) + '\n'
