"""Concrete syntax for the C subset: a printer that emits the fewest
parentheses the C18 grammar allows, and an expression parser used to check
that printing is faithful.
"""

from __future__ import annotations

import re

from .syntax import (Assign, AssignIndex, Binary, Block, Call, Cast, Cond, Const,
                     Declare, Expr, ExprStmt, FunDef, If, IfElse, Index, LogAnd,
                     LogOr, Pointer, Return, Stmt, TransUnit, Unary, Var, Void,
                     While, C_KEYWORDS)
from .values import (DEFAULT_PARAMS, SINT, SLLONG, SLONG, UINT, ULLONG, ULONG,
                     CIntType, ImplParams, Rank)

# Higher level binds tighter.
PRIMARY, POSTFIX, UNARY = 16, 15, 14
CONDITIONAL = 3

BINARY_LEVEL = {
    'mul': 13, 'div': 13, 'rem': 13,
    'add': 12, 'sub': 12,
    'shl': 11, 'shr': 11,
    'lt': 10, 'gt': 10, 'le': 10, 'ge': 10,
    'eq': 9, 'ne': 9,
    'bitand': 8, 'bitxor': 7, 'bitor': 6,
}
LOGAND, LOGOR = 5, 4

BINARY_TOKEN = {
    'mul': '*', 'div': '/', 'rem': '%', 'add': '+', 'sub': '-',
    'shl': '<<', 'shr': '>>', 'lt': '<', 'gt': '>', 'le': '<=', 'ge': '>=',
    'eq': '==', 'ne': '!=', 'bitand': '&', 'bitxor': '^', 'bitor': '|',
}
UNARY_TOKEN = {'plus': '+', 'minus': '-', 'bitnot': '~', 'lognot': '!'}

CONST_SUFFIX = {SINT: '', UINT: 'U', SLONG: 'L', ULONG: 'UL', SLLONG: 'LL', ULLONG: 'ULL'}


def level(e: Expr) -> int:
    if isinstance(e, (Const, Var)):
        return PRIMARY
    if isinstance(e, (Call, Index)):
        return POSTFIX
    if isinstance(e, (Unary, Cast)):
        return UNARY
    if isinstance(e, Binary):
        return BINARY_LEVEL[e.op]
    if isinstance(e, LogAnd):
        return LOGAND
    if isinstance(e, LogOr):
        return LOGOR
    if isinstance(e, Cond):
        return CONDITIONAL
    raise TypeError(f'not an expression: {e!r}')


def _wrap(e: Expr, needs_parens: bool) -> str:
    s = print_expr(e)
    return f'({s})' if needs_parens else s


def print_expr(e: Expr) -> str:
    if isinstance(e, Const):
        return f'{e.value}{CONST_SUFFIX[e.type]}'
    if isinstance(e, Var):
        return e.name
    if isinstance(e, Call):
        return f'{e.fn}(' + ', '.join(print_expr(a) for a in e.args) + ')'
    if isinstance(e, Index):
        return f'{e.array}[{print_expr(e.index)}]'
    if isinstance(e, Unary):
        tok = UNARY_TOKEN[e.op]
        arg = e.arg
        inner = _wrap(arg, level(arg) < UNARY)
        # keep "- -x" and "+ +x" from lexing as -- and ++
        if inner[0] == tok and tok in '+-':
            inner = f'({print_expr(arg)})'
        return tok + inner
    if isinstance(e, Cast):
        return f'({e.type.c_name}) ' + _wrap(e.arg, level(e.arg) < UNARY)
    if isinstance(e, (Binary, LogAnd, LogOr)):
        lvl = level(e)
        tok = BINARY_TOKEN[e.op] if isinstance(e, Binary) else ('&&' if isinstance(e, LogAnd) else '||')
        left = _wrap(e.left, level(e.left) < lvl)
        right = _wrap(e.right, level(e.right) <= lvl)
        return f'{left} {tok} {right}'
    if isinstance(e, Cond):
        test = _wrap(e.test, level(e.test) <= CONDITIONAL)
        return f'{test} ? {print_expr(e.then)} : {print_expr(e.else_)}'
    raise TypeError(f'not an expression: {e!r}')


def _type_text(t) -> str:
    if isinstance(t, Void):
        return 'void'
    return t.c_name


def _param_text(name: str, t) -> str:
    if isinstance(t, Pointer):
        return f'{t.referent.c_name} *{name}'
    return f'{t.c_name} {name}'


def _print_block(block: Block, depth: int, indent: int, out: list[str]) -> None:
    for s in block.stmts:
        _print_stmt(s, depth, indent, out)


def _print_stmt(s: Stmt, depth: int, indent: int, out: list[str]) -> None:
    pad = ' ' * (depth * indent)
    if isinstance(s, Declare):
        out.append(f'{pad}{s.type.c_name} {s.name} = {print_expr(s.init)};')
    elif isinstance(s, Assign):
        out.append(f'{pad}{s.name} = {print_expr(s.rhs)};')
    elif isinstance(s, AssignIndex):
        out.append(f'{pad}{s.array}[{print_expr(s.index)}] = {print_expr(s.rhs)};')
    elif isinstance(s, (If, IfElse)):
        out.append(f'{pad}if ({print_expr(s.test)}) {{')
        _print_block(s.then, depth + 1, indent, out)
        if isinstance(s, IfElse):
            out.append(f'{pad}}} else {{')
            _print_block(s.else_, depth + 1, indent, out)
        out.append(f'{pad}}}')
    elif isinstance(s, While):
        out.append(f'{pad}while ({print_expr(s.test)}) {{')
        _print_block(s.body, depth + 1, indent, out)
        out.append(f'{pad}}}')
    elif isinstance(s, Return):
        if s.value is None:
            out.append(f'{pad}return;')
        else:
            out.append(f'{pad}return {print_expr(s.value)};')
    elif isinstance(s, ExprStmt):
        out.append(f'{pad}{print_expr(s.call)};')
    else:
        raise TypeError(f'not a statement: {s!r}')


def print_fundef(f: FunDef, indent: int = 4) -> str:
    params = ', '.join(_param_text(n, t) for n, t in f.params) or 'void'
    out = [f'{_type_text(f.return_type)} {f.name}({params}) {{']
    _print_block(f.body, 1, indent, out)
    out.append('}')
    return '\n'.join(out)


def print_transunit(tu: TransUnit, indent: int = 4) -> str:
    return '\n\n'.join(print_fundef(f, indent) for f in tu.fundefs) + '\n'


# Expression parser

class ParseError(ValueError):
    def __init__(self, msg: str, pos: int):
        super().__init__(f'{msg} at offset {pos}')
        self.pos = pos


_TOKEN_RE = re.compile(r'''
    (?P<ws>\s+)
  | (?P<num>[0-9]+[A-Za-z_0-9]*)
  | (?P<ident>[A-Za-z_][A-Za-z_0-9]*)
  | (?P<punct><<|>>|<=|>=|==|!=|&&|\|\||\+\+|--|[-+*/%<>&|^~!?:()\[\],])
''', re.VERBOSE)

_TYPE_WORDS = {'signed', 'unsigned', 'char', 'short', 'int', 'long'}


def tokenize(text: str) -> list[tuple[str, str, int]]:
    toks = []
    pos = 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f'unexpected character {text[pos]!r}', pos)
        kind = m.lastgroup
        if kind != 'ws':
            toks.append((kind, m.group(), pos))
        pos = m.end()
    toks.append(('eof', '', len(text)))
    return toks


def _constant_type(digits: int, suffix: str, params: ImplParams, pos: int) -> CIntType:
    s = suffix.upper()
    candidates = {
        '': (SINT, SLONG, SLLONG),
        'U': (UINT, ULONG, ULLONG),
        'L': (SLONG, SLLONG),
        'UL': (ULONG, ULLONG), 'LU': (ULONG, ULLONG),
        'LL': (SLLONG,),
        'ULL': (ULLONG,), 'LLU': (ULLONG,),
    }.get(s)
    if candidates is None or 'lL' in suffix or 'Ll' in suffix:
        raise ParseError(f'invalid integer suffix {suffix!r}', pos)
    for t in candidates:
        if digits <= params.max(t):
            return t
    raise ParseError(f'integer constant {digits} too large', pos)


def _type_from_words(words: list[str], pos: int) -> CIntType:
    counts = {w: words.count(w) for w in _TYPE_WORDS}
    if counts['signed'] and counts['unsigned']:
        raise ParseError('both signed and unsigned', pos)
    signed = not counts['unsigned']
    nlong = counts['long']
    if counts['char']:
        if counts['char'] > 1 or counts['short'] or nlong or counts['int']:
            raise ParseError('invalid type specifiers', pos)
        if not (counts['signed'] or counts['unsigned']):
            raise ParseError('plain char is not supported', pos)
        rank = Rank.CHAR
    elif counts['short']:
        if counts['short'] > 1 or nlong or counts['int'] > 1:
            raise ParseError('invalid type specifiers', pos)
        rank = Rank.SHORT
    elif nlong:
        if nlong > 2 or counts['int'] > 1:
            raise ParseError('invalid type specifiers', pos)
        rank = Rank.LONG if nlong == 1 else Rank.LLONG
    else:
        if counts['int'] > 1 or (not counts['int'] and not (counts['signed'] or counts['unsigned'])):
            raise ParseError('invalid type specifiers', pos)
        if counts['signed'] > 1 or counts['unsigned'] > 1:
            raise ParseError('invalid type specifiers', pos)
        rank = Rank.INT
    return CIntType(signed, rank)


class _Parser:
    def __init__(self, text: str, params: ImplParams):
        self.toks = tokenize(text)
        self.i = 0
        self.params = params

    def peek(self, k: int = 0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        tok = self.toks[self.i]
        self.i += 1
        return tok

    def expect(self, text: str):
        kind, val, pos = self.next()
        if val != text or kind == 'eof':
            raise ParseError(f'expected {text!r}, found {val or "end of input"!r}', pos)

    def expression(self) -> Expr:
        return self.conditional()

    def conditional(self) -> Expr:
        test = self.binary(LOGOR)
        if self.peek()[1] == '?':
            self.next()
            then = self.expression()
            self.expect(':')
            else_ = self.conditional()
            return Cond(test, then, else_)
        return test

    def binary(self, lvl: int) -> Expr:
        if lvl > BINARY_LEVEL['mul']:
            return self.unary()
        left = self.binary(lvl + 1)
        while True:
            tok = self.peek()[1]
            op = _OP_AT_LEVEL.get((lvl, tok))
            if op is None:
                return left
            self.next()
            right = self.binary(lvl + 1)
            if op == '&&':
                left = LogAnd(left, right)
            elif op == '||':
                left = LogOr(left, right)
            else:
                left = Binary(op, left, right)

    def unary(self) -> Expr:
        kind, val, pos = self.peek()
        if kind == 'punct' and val in _UNARY_BY_TOKEN:
            self.next()
            return Unary(_UNARY_BY_TOKEN[val], self.unary())
        if kind == 'punct' and val in ('++', '--'):
            raise ParseError(f'{val} is not supported', pos)
        if val == '(' and self.peek(1)[0] == 'ident' and self.peek(1)[1] in _TYPE_WORDS:
            self.next()
            words = []
            while self.peek()[0] == 'ident' and self.peek()[1] in _TYPE_WORDS:
                words.append(self.next()[1])
            self.expect(')')
            return Cast(_type_from_words(words, pos), self.unary())
        return self.postfix()

    def postfix(self) -> Expr:
        kind, val, pos = self.next()
        if kind == 'num':
            m = re.match(r'([0-9]+)(.*)\Z', val)
            digits, suffix = m.group(1), m.group(2)
            if len(digits) > 1 and digits[0] == '0':
                raise ParseError('only decimal constants are supported', pos)
            n = int(digits)
            return Const(n, _constant_type(n, suffix, self.params, pos))
        if kind == 'ident':
            if val in C_KEYWORDS:
                raise ParseError(f'unexpected keyword {val!r}', pos)
            nxt = self.peek()[1]
            if nxt == '(':
                self.next()
                args = []
                if self.peek()[1] != ')':
                    args.append(self.expression())
                    while self.peek()[1] == ',':
                        self.next()
                        args.append(self.expression())
                self.expect(')')
                return Call(val, tuple(args))
            if nxt == '[':
                self.next()
                idx = self.expression()
                self.expect(']')
                return Index(val, idx)
            return Var(val)
        if val == '(':
            e = self.expression()
            self.expect(')')
            return e
        raise ParseError(f'unexpected {val or "end of input"!r}', pos)


_OP_AT_LEVEL = {(lvl, BINARY_TOKEN[op]): op for op, lvl in BINARY_LEVEL.items()}
_OP_AT_LEVEL[(LOGAND, '&&')] = '&&'
_OP_AT_LEVEL[(LOGOR, '||')] = '||'
_UNARY_BY_TOKEN = {tok: op for op, tok in UNARY_TOKEN.items()}


def parse_expr(text: str, params: ImplParams = DEFAULT_PARAMS) -> Expr:
    p = _Parser(text, params)
    e = p.expression()
    kind, val, pos = p.peek()
    if kind != 'eof':
        raise ParseError(f'unexpected {val!r} after expression', pos)
    return e
