import shutil
import subprocess

import pytest
from hypothesis import given, settings, strategies as st

from irgen import random_program
from shallowc.codegen import (LOOP_DEPENDENT, FuelBound, TranslationError, affected_outputs,
                              fuel_bound, translate, translate_program)
from shallowc.dynamic import ComputationState, LimitExceeded, exec_fun, init_fun_env
from shallowc.ir import parse_ir
from shallowc.pretty import parse_expr, print_transunit
from shallowc.static import WELLFORMED, check_transunit
from shallowc.syntax import (VOID, Assign, AssignIndex, Block, Cast, Const, Declare, FunDef,
                             If, IfElse, Pointer, Return, Var, While)
from shallowc.values import SINT, UCHAR, UINT, IntegerValue


def defun(name, params, body, extra=''):
    guard = ' '.join(f'({t}p |{p}|)' for p, t in params)
    names = ' '.join(f'|{p}|' for p, _ in params)
    return f'(defun |{name}| ({names}) (declare (xargs :guard (and {guard} {extra}))) {body})'


def translate_text(text):
    return translate(parse_ir(text))


def test_f(corpus_tr):
    f = corpus_tr.transunit.fundef('f')
    assert f == FunDef('f', (('x', SINT), ('y', SINT), ('z', SINT)), SINT,
                       Block((Return(parse_expr('(x + y) * (z - 3)')),)))


def test_g(corpus_tr):
    g = corpus_tr.transunit.fundef('g')
    u = parse_expr
    assert g.body == Block((
        Declare(UINT, 'z', Const(1, UINT)),
        IfElse(u('x < y'), Block((Assign('z', u('z + x')),)), Block((Assign('z', u('z + y')),))),
        Return(u('2U * z')),
    ))


def test_h(corpus_tr):
    h = corpus_tr.transunit.fundef('h')
    loop = While(parse_expr('n != 0U'), Block((Assign('r', parse_expr('r * n')),
                                               Assign('n', parse_expr('n - 1U')))))
    assert h.body == Block((Declare(UINT, 'r', Const(1, UINT)), loop, Return(Var('r'))))
    assert corpus_tr.loops['h$loop'] == loop


def test_i(corpus_tr):
    i = corpus_tr.transunit.fundef('i')
    assert i.return_type == VOID
    assert i.params[0] == ('a', Pointer(UCHAR))
    assert i.body == Block((AssignIndex('a', Var('x'), Cast(UCHAR, Const(1, SINT))),
                            AssignIndex('a', Var('y'), Cast(UCHAR, Const(2, SINT)))))


def test_order_and_wellformed(corpus, corpus_tr):
    assert [f.name for f in corpus_tr.transunit.fundefs] == \
        [f.name for f in corpus.functions if not f.is_loop]
    assert check_transunit(corpus_tr.transunit) == WELLFORMED


def test_translate_is_deterministic(corpus):
    assert translate(corpus) == translate(corpus)


def test_affected_outputs(corpus):
    i = affected_outputs('i', corpus)
    assert (i.result, i.arrays) == (None, ('a',))
    loop = affected_outputs(corpus.function('h$loop'))
    assert loop.arrays == () and loop.vars == ('n', 'r')
    f = affected_outputs('f', corpus)
    assert (f.result, f.arrays, f.vars) == (SINT, (), None)


def test_fuel_bounds(corpus):
    assert fuel_bound('f', corpus) == FuelBound('constant', 3)
    assert fuel_bound('g', corpus) == FuelBound('constant', 6)
    assert fuel_bound('h', corpus) == LOOP_DEPENDENT
    assert fuel_bound('i', corpus) == FuelBound('constant', 4)
    assert str(fuel_bound('h', corpus)) == 'loop-dependent'


def test_callee_bounds_compose():
    text = (defun('a', [('x', 'sint')], '(add-sint-sint |x| (sint-dec-const 1))',
                  '(< (sint->get |x|) 100)')
            + defun('b', [('x', 'sint')],
                    '(let ((|y| (declar (|a| |x|)))) |y|)', '(< (sint->get |x|) 100)'))
    p = parse_ir(text)
    assert fuel_bound('a', p).value == 3
    # b: its call 1, block position 0 takes 1, declare 1, inner call 1, then a's 3
    assert fuel_bound('b', p).value == 1 + 1 + 1 + 1 + 3
    env = init_fun_env(translate(p))
    args = [IntegerValue(SINT, 5)]
    with pytest.raises(LimitExceeded):
        exec_fun('b', args, ComputationState(), env, 6)
    assert exec_fun('b', args, ComputationState(), env, 7)[0] == IntegerValue(SINT, 6)


@pytest.mark.parametrize('body,msg', [
    ('(let ((|z| (declar (uint-dec-const 1)))) (let ((|z| (assign (sint-dec-const 2)))) |z|))',
     'assign'),
    ('(condexpr (if (boolean-from-uint |x|) (sint-dec-const 1) (uint-dec-const 2)))',
     'condexpr'),
    ('(let ((|x| (declar (uint-dec-const 1)))) |x|)', 'already in scope'),
    ('(if (boolean-from-uint |x|) (sint-dec-const 1) (uint-dec-const 2))', 'different types'),
    ('(uint-from-boolean (boolean-from-uint |x|))', 'sint-from-boolean'),
])
def test_translation_errors(body, msg):
    with pytest.raises(TranslationError) as exc:
        translate_text(defun('f', [('x', 'uint')], body))
    assert msg in str(exc.value)
    assert 'line 1' in str(exc.value)


def test_condexpr():
    tu = translate_text(defun(
        'f', [('x', 'uint')],
        '(condexpr (if (boolean-from-uint |x|) (uint-dec-const 1) (uint-dec-const 2)))'))
    assert 'return x ? 1U : 2U;' in print_transunit(tu)


def test_logical_operators():
    body = ('(sint-from-boolean (and (boolean-from-uint |x|) '
            '(boolean-from-sint (lt-uint-uint |x| (uint-dec-const 9)))))')
    assert 'return x && x < 9U;' in print_transunit(translate_text(defun('f', [('x', 'uint')],
                                                                          body)))


def loop_depth(block):
    depth = 0
    for s in block.stmts:
        if isinstance(s, While):
            depth = max(depth, 1 + loop_depth(s.body))
        elif isinstance(s, If):
            depth = max(depth, loop_depth(s.then))
        elif isinstance(s, IfElse):
            depth = max(depth, loop_depth(s.then), loop_depth(s.else_))
    return depth


def test_nested_loops():
    depths = []
    for seed in range(200):
        tr = translate_program(random_program(seed))
        assert check_transunit(tr.transunit) == WELLFORMED
        depths += [loop_depth(f.body) for f in tr.transunit.fundefs]
    assert max(depths) >= 2


@settings(max_examples=100)
@given(st.integers(0, 10 ** 6))
def test_translation_is_wellformed(seed):
    tr = translate_program(random_program(seed))
    assert check_transunit(tr.transunit) == WELLFORMED


@pytest.mark.skipif(shutil.which('cc') is None, reason='no C compiler available')
def test_generated_corpus_compiles(corpus_tr, tmp_path):
    src = tmp_path / 'prog.c'
    src.write_text(print_transunit(corpus_tr.transunit), encoding='ascii')
    r = subprocess.run(['cc', '-std=c18', '-pedantic', '-Wall', '-fsyntax-only', str(src)],
                       capture_output=True, text=True)
    assert r.returncode == 0, r.stderr
