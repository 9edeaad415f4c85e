"""Parse IR source text (``defun`` forms) into an ``IrProgram``."""

from __future__ import annotations

import re

from ..values import BINARY_OPS, TYPES_BY_SHORT_NAME, UNARY_OPS, CIntType
from .sexpr import Int, Pos, SexprError, SList, Sym, read_all
from .syntax import (ArrayType, GAnd, GArith, GCmp, GGet, GIndexOk, GLen, GNot,
                     GNum, GOr, GTerm, IAnd, IArrayRead, IArrayWrite, IBinop,
                     IBoolFrom, ICall, ICondExpr, IConst, IConv, IFromBool, IIf,
                     ILetAssign, ILetDeclar, ILetStmt, IMv, IOr, IrFunction,
                     IrProgram, IRetVal, IUnop, IVar, calls_in)


class IrParseError(ValueError):
    def __init__(self, msg: str, pos: Pos | None = None):
        super().__init__(f'line {pos.line}, column {pos.col}: {msg}' if pos else msg)
        self.pos = pos


_T = '(' + '|'.join(TYPES_BY_SHORT_NAME) + ')'
_UNOP_RE = re.compile(f'({"|".join(UNARY_OPS)})-{_T}\\Z')
_BINOP_RE = re.compile(f'({"|".join(BINARY_OPS)}|bitior)-{_T}-{_T}\\Z')
# alternative spelling of bitwise inclusive or
_OP_ALIASES = {'bitior': 'bitor'}
_CONV_RE = re.compile(f'{_T}-from-{_T}\\Z')
_BOOL_FROM_RE = re.compile(f'boolean-from-{_T}\\Z')
_FROM_BOOL_RE = re.compile(f'{_T}-from-boolean\\Z')
_CONST_RE = re.compile(f'{_T}-dec-const\\Z')
_READ_RE = re.compile(f'{_T}-array-read-{_T}\\Z')
_WRITE_RE = re.compile(f'{_T}-array-write-{_T}\\Z')
_TYPEP_RE = re.compile(f'{_T}p\\Z')
_ARRAYP_RE = re.compile(f'{_T}-arrayp\\Z')
_INDEX_OK_RE = re.compile(f'{_T}-array-index-okp\\Z')
_GET_RE = re.compile(f'{_T}->get\\Z')

CONST_TYPE_NAMES = ('sint', 'uint', 'slong', 'ulong', 'sllong', 'ullong')


def _ty(name: str) -> CIntType:
    return TYPES_BY_SHORT_NAME[name]


def _is(x, name: str) -> bool:
    return isinstance(x, Sym) and not x.quoted and x.name == name


def _head(x) -> str | None:
    if isinstance(x, SList) and x.items and isinstance(x[0], Sym) and not x[0].quoted:
        return x[0].name
    return None


def _name(x, what: str) -> str:
    if not isinstance(x, Sym) or (not x.quoted and (x.name.startswith(':') or x.name in _RESERVED)):
        raise IrParseError(f'expected a {what} name', getattr(x, 'pos', None))
    return x.name


_RESERVED = {'let', 'let*', 'mv-let', 'if', 'and', 'or', 'mv', 'declar', 'assign',
             'condexpr', 'retval', 'defun', 'declare', 'nil', 't'}


def _arity(x: SList, n: int, what: str) -> None:
    if len(x) - 1 != n:
        raise IrParseError(f'{what} takes {n} argument(s), got {len(x) - 1}', x.pos)


def parse_term(x):
    if isinstance(x, Sym):
        return IVar(_name(x, 'variable'), pos=x.pos)
    if isinstance(x, Int):
        raise IrParseError('bare integer; use a (<type>-dec-const n) form', x.pos)
    if not isinstance(x, SList) or not x.items:
        raise IrParseError('empty form', getattr(x, 'pos', None))
    head = x[0]
    if isinstance(head, Sym) and head.quoted:
        return ICall(head.name, tuple(parse_term(a) for a in x.items[1:]), pos=x.pos)
    if not isinstance(head, Sym):
        raise IrParseError('form head must be a symbol', x.pos)
    h = head.name
    args = x.items[1:]
    pos = x.pos

    if h in ('let', 'let*'):
        return _parse_let(x, h == 'let*')
    if h == 'mv-let':
        return _parse_mv_let(x)
    if h == 'if':
        _arity(x, 3, 'if')
        return IIf(*(parse_term(a) for a in args), pos=pos)
    if h in ('and', 'or'):
        if len(args) < 2:
            raise IrParseError(f'{h} needs at least two arguments', pos)
        cls = IAnd if h == 'and' else IOr
        t = parse_term(args[0])
        for a in args[1:]:
            t = cls(t, parse_term(a), pos=pos)
        return t
    if h == 'condexpr':
        _arity(x, 1, 'condexpr')
        inner = args[0]
        if _head(inner) != 'if' or len(inner) != 4:
            raise IrParseError('condexpr wraps an (if test then else) form', pos)
        return ICondExpr(*(parse_term(a) for a in inner.items[1:]), pos=pos)
    if h == 'mv':
        if len(args) < 2:
            raise IrParseError('mv needs at least two values', pos)
        return IMv(tuple(parse_term(a) for a in args), pos=pos)
    if h == 'retval':
        _arity(x, 1, 'retval')
        return IRetVal(parse_term(args[0]), pos=pos)
    if h in ('declar', 'assign'):
        raise IrParseError(f'{h} may only wrap the bound term of a let', pos)

    if m := _CONST_RE.match(h):
        _arity(x, 1, h)
        if m.group(1) not in CONST_TYPE_NAMES:
            raise IrParseError(f'no decimal constants of type {m.group(1)}', pos)
        if not isinstance(args[0], Int) or args[0].value < 0:
            raise IrParseError('constant must be a non-negative integer literal', pos)
        return IConst(_ty(m.group(1)), args[0].value, pos=pos)
    if m := _UNOP_RE.match(h):
        _arity(x, 1, h)
        return IUnop(m.group(1), _ty(m.group(2)), parse_term(args[0]), pos=pos)
    if m := _BINOP_RE.match(h):
        _arity(x, 2, h)
        op = _OP_ALIASES.get(m.group(1), m.group(1))
        return IBinop(op, _ty(m.group(2)), _ty(m.group(3)),
                      parse_term(args[0]), parse_term(args[1]), pos=pos)
    if m := _BOOL_FROM_RE.match(h):
        _arity(x, 1, h)
        return IBoolFrom(_ty(m.group(1)), parse_term(args[0]), pos=pos)
    if m := _FROM_BOOL_RE.match(h):
        _arity(x, 1, h)
        return IFromBool(_ty(m.group(1)), parse_term(args[0]), pos=pos)
    if m := _CONV_RE.match(h):
        _arity(x, 1, h)
        if m.group(1) == m.group(2):
            raise IrParseError(f'{h} is not a conversion', pos)
        return IConv(_ty(m.group(1)), _ty(m.group(2)), parse_term(args[0]), pos=pos)
    if m := _READ_RE.match(h):
        _arity(x, 2, h)
        return IArrayRead(_ty(m.group(1)), _ty(m.group(2)), _name(args[0], 'array'),
                          parse_term(args[1]), pos=pos)
    if m := _WRITE_RE.match(h):
        _arity(x, 3, h)
        return IArrayWrite(_ty(m.group(1)), _ty(m.group(2)), _name(args[0], 'array'),
                           parse_term(args[1]), parse_term(args[2]), pos=pos)
    raise IrParseError(f'unknown operator symbol {h!r}', pos)


def _binding_term(var: str, bound, body, pos):
    h = _head(bound)
    if h in ('declar', 'assign'):
        _arity(bound, 1, h)
        cls = ILetDeclar if h == 'declar' else ILetAssign
        return cls(var, parse_term(bound[1]), body, pos=pos)
    return ILetStmt((var,), parse_term(bound), body, pos=pos)


def _parse_let(x: SList, star: bool):
    if len(x) != 3 or not isinstance(x[1], SList):
        raise IrParseError('let needs a binding list and one body form', x.pos)
    bindings = x[1].items
    if not bindings:
        raise IrParseError('let with no bindings', x.pos)
    if len(bindings) > 1 and not star:
        raise IrParseError('use let* for more than one binding', x.pos)
    body = parse_term(x[2])
    for b in reversed(bindings):
        if not isinstance(b, SList) or len(b) != 2:
            raise IrParseError('a binding is (var term)', getattr(b, 'pos', x.pos))
        body = _binding_term(_name(b[0], 'variable'), b[1], body, b.pos)
    return body


def _parse_mv_let(x: SList):
    if len(x) not in (4, 5) or not isinstance(x[1], SList):
        raise IrParseError('mv-let form is (mv-let (vars) term [declare] body)', x.pos)
    vars = tuple(_name(v, 'variable') for v in x[1].items)
    if len(vars) < 2:
        raise IrParseError('mv-let binds at least two variables', x.pos)
    ignore: tuple[str, ...] = ()
    if len(x) == 5:
        decl = x[3]
        if (_head(decl) != 'declare' or len(decl) != 2 or _head(decl[1]) != 'ignore'):
            raise IrParseError('expected (declare (ignore ...))', getattr(decl, 'pos', x.pos))
        ignore = tuple(_name(v, 'variable') for v in decl[1].items[1:])
        for v in ignore:
            if v not in vars:
                raise IrParseError(f'ignored variable {v!r} is not bound', decl.pos)
    return ILetStmt(vars, parse_term(x[2]), parse_term(x[-1]), ignore, pos=x.pos)


# Guards

def _flatten_and(g):
    if _head(g) == 'and':
        for a in g.items[1:]:
            yield from _flatten_and(a)
    else:
        yield g


def parse_guard(x):
    h = _head(x)
    if h in ('and', 'or'):
        cls = GAnd if h == 'and' else GOr
        return cls(tuple(parse_guard(a) for a in x.items[1:]))
    if h == 'not':
        _arity(x, 1, 'not')
        return GNot(parse_guard(x[1]))
    if h in ('<', '<=', '>', '>=', '='):
        if len(x) < 3:
            raise IrParseError(f'{h} needs at least two arguments', x.pos)
        return GCmp(h, tuple(_parse_guard_num(a) for a in x.items[1:]))
    if h and (m := _INDEX_OK_RE.match(h)):
        _arity(x, 2, h)
        return GIndexOk(_ty(m.group(1)), _name(x[1], 'array'), _name(x[2], 'index'))
    return GTerm(parse_term(x))


def _parse_guard_num(x):
    if isinstance(x, Int):
        return GNum(x.value)
    h = _head(x)
    if h in ('+', '-', '*'):
        if len(x) < 2:
            raise IrParseError(f'{h} needs arguments', x.pos)
        return GArith(h, tuple(_parse_guard_num(a) for a in x.items[1:]))
    if h == 'len':
        _arity(x, 1, 'len')
        return GLen(_name(x[1], 'array'))
    if h and (m := _GET_RE.match(h)):
        _arity(x, 1, h)
        return GGet(_ty(m.group(1)), _name(x[1], 'variable'))
    raise IrParseError('expected an integer guard expression', getattr(x, 'pos', None))


def _type_conjunct(g):
    """Return (param, IrType) when ``g`` is a type recognizer conjunct."""
    h = _head(g)
    if h is None or len(g) != 2 or not isinstance(g[1], Sym):
        return None
    if m := _ARRAYP_RE.match(h):
        return g[1].name, ArrayType(_ty(m.group(1)))
    if m := _TYPEP_RE.match(h):
        return g[1].name, _ty(m.group(1))
    return None


def _parse_declare(decl):
    """Extract the guard form from (declare (xargs :guard G ...))."""
    if _head(decl) != 'declare':
        return None
    for item in decl.items[1:]:
        if _head(item) == 'xargs':
            kv = item.items[1:]
            for k in range(0, len(kv) - 1, 2):
                if _is(kv[k], ':guard'):
                    return kv[k + 1]
    return None


def parse_defun(x) -> IrFunction:
    if _head(x) != 'defun':
        raise IrParseError('expected a (defun ...) form', getattr(x, 'pos', None))
    if len(x) < 4 or not isinstance(x[2], SList):
        raise IrParseError('defun form is (defun name (params) (declare ...) body)', x.pos)
    name = _name(x[1], 'function')
    params = [_name(p, 'parameter') for p in x[2].items]
    if len(set(params)) != len(params):
        raise IrParseError(f'duplicate parameters in {name}', x[2].pos)
    guard = None
    for decl in x.items[3:-1]:
        g = _parse_declare(decl)
        if g is None:
            raise IrParseError('expected (declare (xargs :guard ...))', getattr(decl, 'pos', x.pos))
        guard = g
    if guard is None and params:
        raise IrParseError(f'{name}: guard missing type conjunct for {params[0]!r}', x.pos)
    types: dict[str, object] = {}
    extra = []
    for g in (_flatten_and(guard) if guard is not None else ()):
        tc = _type_conjunct(g)
        if tc is not None and tc[0] in params and tc[0] not in types:
            types[tc[0]] = tc[1]
        else:
            extra.append(parse_guard(g))
    for p in params:
        if p not in types:
            raise IrParseError(f'{name}: guard missing type conjunct for {p!r}',
                               getattr(guard, 'pos', x.pos))
    body = parse_term(x[-1])
    return IrFunction(name, tuple((p, types[p]) for p in params), tuple(extra), body,
                      name in calls_in(body), pos=x.pos)


def parse_ir(text: str) -> IrProgram:
    try:
        forms = read_all(text)
    except SexprError as exc:
        raise IrParseError(str(exc).split(': ', 1)[-1], exc.pos) from None
    return IrProgram(tuple(parse_defun(f) for f in forms))
