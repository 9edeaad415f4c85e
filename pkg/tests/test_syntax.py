import pytest

from shallowc.syntax import (VOID, Binary, Block, Call, Const, CSyntaxError, Declare,
                             ExprStmt, FunDef, Pointer, Return, TransUnit, Var,
                             is_c_identifier, syntax_check)
from shallowc.values import SINT, UCHAR, UINT, UCHAR as U8


def fun_f():
    body = Binary('mul', Binary('add', Var('x'), Var('y')),
                  Binary('sub', Var('z'), Const(3, SINT)))
    return FunDef('f', (('x', SINT), ('y', SINT), ('z', SINT)), SINT, Block((Return(body),)))


def test_well_formed_f():
    syntax_check(TransUnit((fun_f(),)))


def test_keyword_function_name():
    with pytest.raises(CSyntaxError):
        FunDef('while', (), SINT, Block((Return(Const(0, SINT)),)))


def test_duplicate_parameters():
    with pytest.raises(CSyntaxError):
        FunDef('g', (('x', SINT), ('x', UINT)), SINT, Block())


@pytest.mark.parametrize('name,ok', [('x', True), ('_a1', True), ('h$loop', False),
                                     ('1x', False), ('int', False), ('', False),
                                     ('café', False)])
def test_identifiers(name, ok):
    assert is_c_identifier(name) is ok


def test_constant_types_restricted():
    with pytest.raises(CSyntaxError):
        Const(1, UCHAR)
    with pytest.raises(CSyntaxError):
        Const(-1, SINT)


def test_unknown_operator():
    with pytest.raises(CSyntaxError):
        Binary('pow', Var('x'), Var('y'))


def test_expr_stmt_requires_call():
    with pytest.raises(CSyntaxError):
        ExprStmt(Var('x'))
    ExprStmt(Call('f', ()))


def test_pointer_params_and_void_return():
    f = FunDef('i', (('a', Pointer(U8)), ('x', SINT)), VOID, Block())
    syntax_check(TransUnit((f,)))
    with pytest.raises(CSyntaxError):
        FunDef('bad', (('p', VOID),), SINT, Block())


def test_duplicate_functions():
    with pytest.raises(CSyntaxError):
        syntax_check(TransUnit((fun_f(), fun_f())))


def test_callee_must_precede_caller():
    g = FunDef('g', (), SINT, Block((Declare(SINT, 'r', Call('f', (Const(1, SINT),) * 3)),
                                     Return(Var('r')))))
    with pytest.raises(CSyntaxError):
        syntax_check(TransUnit((g, fun_f())))
    syntax_check(TransUnit((fun_f(), g)))


def test_structural_equality():
    assert fun_f() == fun_f()
    assert hash(fun_f()) == hash(fun_f())
