import re

import pytest
from hypothesis import given, strategies as st

from cgen import ExprGen
from shallowc.pretty import ParseError, parse_expr, print_expr, print_transunit, tokenize
from shallowc.syntax import (Binary, Cast, Cond, Const, Index, LogAnd, LogOr, TransUnit,
                             Unary, Var)
from shallowc.values import SINT, SLLONG, SLONG, UCHAR, UINT, ULLONG, ULONG

x, y, z = Var('x'), Var('y'), Var('z')


def tokens(text):
    return [t[1] for t in tokenize(text)[:-1]]


def same_tokens(a, b):
    # listing comparison: any C text, whitespace-insensitive
    def words(t):
        return re.findall(r'\w+|!=|==|<=|>=|[^\s\w]', t)
    return words(a) == words(b)


def test_print_f_expression():
    e = Binary('mul', Binary('add', x, y), Binary('sub', z, Const(3, SINT)))
    assert print_expr(e) == '(x + y) * (z - 3)'


def test_left_associativity():
    assert print_expr(Binary('add', Binary('add', x, y), z)) == 'x + y + z'
    assert print_expr(Binary('sub', x, Binary('sub', y, z))) == 'x - (y - z)'


def test_no_token_fusion():
    text = print_expr(Unary('minus', Unary('minus', x)))
    assert text == '-(-x)'
    assert '--' not in tokens(text)
    assert '++' not in tokens(print_expr(Unary('plus', Unary('plus', x))))
    assert parse_expr(print_expr(Binary('sub', x, Unary('minus', y)))) == \
        Binary('sub', x, Unary('minus', y))


@pytest.mark.parametrize('c,text', [(Const(1, SINT), '1'), (Const(1, UINT), '1U'),
                                    (Const(1, SLONG), '1L'), (Const(1, ULONG), '1UL'),
                                    (Const(1, SLLONG), '1LL'), (Const(1, ULLONG), '1ULL')])
def test_constant_suffixes(c, text):
    assert print_expr(c) == text
    assert parse_expr(text) == c


def test_parse_examples():
    assert parse_expr('1 + 2 * 3') == Binary('add', Const(1, SINT),
                                             Binary('mul', Const(2, SINT), Const(3, SINT)))
    assert parse_expr('(x)') == x
    assert parse_expr('x ? y : z') == Cond(x, y, z)
    assert parse_expr('(unsigned char) 1') == Cast(UCHAR, Const(1, SINT))
    assert parse_expr('a[i] && !b[0]') == LogAnd(Index('a', Var('i')),
                                                 Unary('lognot', Index('b', Const(0, SINT))))
    assert parse_expr('x || y && z') == LogOr(x, LogAnd(y, z))


def test_unsuffixed_constant_type_follows_c():
    assert parse_expr('2147483648') == Const(2 ** 31, SLONG)
    assert parse_expr('4294967295U') == Const(2 ** 32 - 1, UINT)


@pytest.mark.parametrize('text', ['x +', '(x', 'x y', 'x ? y', '1LUL', '@', 'a[1',
                                  '(char) x', 'x = 1', '--x'])
def test_parse_errors(text):
    with pytest.raises(ParseError):
        parse_expr(text)


def test_parse_error_position():
    with pytest.raises(ParseError) as exc:
        parse_expr('x + @')
    assert exc.value.pos == 4


def test_empty_transunit():
    assert print_transunit(TransUnit(())) == '\n'


def test_corpus_listings(corpus_tr):
    text = print_transunit(corpus_tr.transunit)
    assert same_tokens(text.split('unsigned int g')[0],
                       'int f(int x, int y, int z) { return (x + y) * (z - 3); }')
    assert 'unsigned int z = 1U;' in text
    assert re.search(r'while \(n != 0U\) \{\s*r = r \* n;\s*n = n - 1U;\s*\}', text)
    assert 'void i(unsigned char *a, int x, int y) {' in text
    assert 'a[x] = (unsigned char) 1;' in text
    assert text.isascii() and '\r' not in text


def test_indent_is_configurable(corpus_tr):
    text = print_transunit(corpus_tr.transunit, indent=2)
    assert '\n  return (x + y) * (z - 3);\n' in text


def test_determinism(corpus_tr):
    assert print_transunit(corpus_tr.transunit) == print_transunit(corpus_tr.transunit)


@given(st.integers(0, 2 ** 32))
def test_round_trip_property(seed):
    e = ExprGen(seed, calls=True).expr()
    assert parse_expr(print_expr(e)) == e


def paren_pairs(text):
    stack, pairs = [], []
    for k, ch in enumerate(text):
        if ch == '(':
            stack.append(k)
        elif ch == ')':
            pairs.append((stack.pop(), k))
    return pairs


def removal_changes_parse(text, e):
    for i, j in paren_pairs(text):
        mutated = text[:i] + text[i + 1:j] + text[j + 1:]
        try:
            if parse_expr(mutated) == e:
                return mutated
        except ParseError:
            pass
    return None


@given(st.integers(0, 2 ** 32))
def test_parentheses_are_minimal(seed):
    e = ExprGen(seed, calls=True).expr()
    text = print_expr(e)
    assert removal_changes_parse(text, e) is None
