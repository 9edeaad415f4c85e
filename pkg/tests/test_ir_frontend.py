import pytest
from hypothesis import given, strategies as st

from conftest import corpus_text
from irgen import random_program
from shallowc.ir import IrError, IrParseError, check_ir, parse_ir, print_ir
from shallowc.ir.checker import analyze
from shallowc.ir.syntax import ArrayType, GCmp, IBinop, IConst, ILetStmt, IVar
from shallowc.values import SINT, UCHAR, UINT


def defun(name, params, body, extra=''):
    guard = ' '.join(f'({t}p |{p}|)' for p, t in params)
    names = ' '.join(f'|{p}|' for p, _ in params)
    return f'(defun |{name}| ({names}) (declare (xargs :guard (and {guard} {extra}))) {body})'


def test_parse_f(corpus):
    f = corpus.function('f')
    assert f.params == (('x', SINT), ('y', SINT), ('z', SINT))
    assert f.body == IBinop('mul', SINT, SINT,
                            IBinop('add', SINT, SINT, IVar('x'), IVar('y')),
                            IBinop('sub', SINT, SINT, IVar('z'), IConst(SINT, 3)))
    assert not f.is_loop
    assert len(f.extra_guards) == 3 and isinstance(f.extra_guards[0], GCmp)


def test_parse_loop_and_arrays(corpus):
    assert corpus.function('h$loop').is_loop
    assert not corpus.function('h').is_loop
    assert corpus.function('i').params[0] == ('a', ArrayType(UCHAR))
    assert [f.name for f in corpus.functions] == ['f', 'g', 'h$loop', 'h', 'i']
    body = corpus.function('h').body.body
    assert isinstance(body, ILetStmt) and body.vars == ('n', 'r') and body.ignore == ('n',)


def test_missing_guard():
    with pytest.raises(IrParseError) as exc:
        parse_ir('(defun |f| (|x|) |x|)')
    assert 'guard missing type conjunct' in str(exc.value)
    with pytest.raises(IrParseError):
        parse_ir('(defun |f| (|x| |y|) (declare (xargs :guard (sintp |x|))) |x|)')


@pytest.mark.parametrize('text,where', [
    ('(defun |f| (|x|)\n  (declare (xargs :guard (sintp |x|)))\n  (frob-sint |x|))', 'line 3'),
    ('(defun |f| (|x|) (declare (xargs :guard (sintp |x|))) (add-sint-sint |x|))', 'line 1'),
    ('(defun |f| (|x|) (declare (xargs :guard (sintp |x|))) (sint-from-sint |x|))', 'line 1'),
    ('(defun |f| (|x|) (declare (xargs :guard (sintp |x|))) |x|', 'line 1'),
    ('(defun |f| (|x|) (declare (xargs :guard (sintp |x|))) (uchar-dec-const 1))', 'line 1'),
])
def test_parse_errors_have_positions(text, where):
    with pytest.raises(IrParseError) as exc:
        parse_ir(text)
    assert where in str(exc.value)


def test_bitior_alias():
    p = parse_ir(defun('f', [('x', 'sint')], '(bitior-sint-sint |x| |x|)'))
    assert p.functions[0].body.op == 'bitor'
    assert '(bitor-sint-sint' in print_ir(p)


def test_comments_and_case():
    p = parse_ir('; comment\n' + defun('Fx', [('Ab', 'uint')], '|Ab| ; trailing\n'))
    assert p.functions[0].name == 'Fx' and p.functions[0].param_names == ('Ab',)


def test_corpus_round_trip(corpus):
    assert parse_ir(print_ir(corpus)) == corpus


@given(st.integers(0, 10 ** 6))
def test_random_program_round_trip(seed):
    p = random_program(seed)
    assert parse_ir(print_ir(p)) == p


def test_corpus_checks(corpus):
    check_ir(corpus)
    shapes = analyze(corpus)
    assert shapes['h$loop'].outputs == ('n', 'r') and shapes['h$loop'].is_loop
    assert shapes['i'].arrays == ('a',) and not shapes['i'].result
    assert shapes['f'].result and shapes['f'].arrays == ()


def check_fails(text, rule):
    with pytest.raises(IrError) as exc:
        check_ir(parse_ir(text))
    assert exc.value.rule == rule, str(exc.value)
    return exc.value


def test_non_tail_recursion_rejected():
    body = ('(if (boolean-from-sint (ne-uint-uint |n| (uint-dec-const 0)))'
            ' (add-uint-uint |n| (|l$loop| (sub-uint-uint |n| (uint-dec-const 1))))'
            ' |n|)')
    err = check_fails(defun('l$loop', [('n', 'uint')], body), 'loop-shape')
    assert 'l$loop' in str(err)


def test_array_write_without_rebinding():
    body = ('(let ((|b| (uchar-array-write-sint |a| |x| (uchar-from-sint (sint-dec-const 1)))))'
            ' |b|)')
    text = defun('w', [('a', 'uchar-array'), ('x', 'sint')], body,
                 '(uchar-array-index-okp |a| |x|)')
    with pytest.raises(IrError) as exc:
        check_ir(parse_ir(text))
    assert exc.value.rule in ('single-threaded', 'binding')


def test_bottom_up_order():
    text = defun('a', [('x', 'sint')], '(|b| |x|)') + defun('b', [('x', 'sint')], '|x|')
    check_fails(text, 'bottom-up')


def test_duplicate_function():
    text = defun('a', [('x', 'sint')], '|x|') * 2
    check_fails(text, 'duplicate')


def test_identifier_rules():
    check_fails(defun('bad$name', [('x', 'sint')], '|x|'), 'identifier')
    check_fails(defun('f', [('int', 'sint')], '|int|'), 'identifier')
    body = '(let ((|y$1| (declar |x|))) |y$1|)'
    check_fails(defun('f', [('x', 'sint')], body), 'identifier')


def test_if_branches_must_end_in_bound_vars():
    body = ('(let ((|z| (declar (uint-dec-const 1))))'
            ' (let ((|z| (if (boolean-from-sint (lt-uint-uint |x| |z|))'
            '   (let ((|z| (assign |x|))) |z|) |x|))) |z|))')
    with pytest.raises(IrError):
        check_ir(parse_ir(defun('g', [('x', 'uint')], body)))


def test_updated_array_must_be_returned():
    body = ('(let ((|a| (uchar-array-write-sint |a| |x| (uchar-from-sint (sint-dec-const 1)))))'
            ' |x|)')
    text = defun('w', [('a', 'uchar-array'), ('x', 'sint')], body,
                 '(uchar-array-index-okp |a| |x|)')
    with pytest.raises(IrError):
        check_ir(parse_ir(text))


def test_error_message_has_location():
    text = '\n\n' + defun('a', [('x', 'sint')], '(|b| |x|)')
    with pytest.raises(IrError) as exc:
        check_ir(parse_ir(text))
    assert 'line 3' in str(exc.value) and '[bottom-up]' in str(exc.value)


def test_loop_exempt_from_identifier_rules():
    assert '$' in parse_ir(corpus_text()).functions[2].name
    check_ir(parse_ir(corpus_text()))


def test_uint_uses_are_typed(corpus):
    assert corpus.function('g').params == (('x', UINT), ('y', UINT))
