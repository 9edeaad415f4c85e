"""The eight acceptance criteria, each timed and reported as one PASS/FAIL line."""

import json
import random
import re
from contextlib import contextmanager
from itertools import product
from time import perf_counter
from types import MappingProxyType

import pytest

import oracles
from cgen import ExprGen
from irgen import random_program
from shallowc.cli import main
from shallowc.codegen import fuel_bound, transunit_fuel_bounds, translate, translate_program
from shallowc.dynamic import (ComputationState, DynError, Frame, LimitExceeded, PointerValue,
                              exec_expr_pure, exec_fun, init_fun_env)
from shallowc.ir import CapExceeded, GuardViolation, eval_ir, gen_inputs
from shallowc.ir.syntax import ArrayType
from shallowc.pretty import ParseError, parse_expr, print_expr
from shallowc.static import WELLFORMED, check_transunit
from shallowc.syntax import Const, Index
from shallowc.values import (BINARY_OPS, DEFAULT_PARAMS, INT_TYPES, SINT, UCHAR, UINT,
                             UNARY_OPS, BoundsError, IntegerValue, WellDefError, array_read,
                             array_write, convert, exec_binary, exec_unary, make_array)

LISTINGS = {
    'f': 'int f(int x, int y, int z) { return (x + y) * (z - 3); }',
    'g': '''unsigned int g(unsigned int x, unsigned int y) {
              unsigned int z = 1U;
              if (x < y) { z = z + x; } else { z = z + y; }
              return 2U * z; }''',
    'h': '''unsigned int h(unsigned int n) {
              unsigned int r = 1U;
              while (n != 0U) { r = r * n; n = n - 1U; }
              return r; }''',
    'i': '''void i(unsigned char *a, int x, int y) {
              a[x] = (unsigned char) 1;
              a[y] = (unsigned char) 2; }''',
}


def words(text):
    return re.findall(r'\w+|!=|==|<=|>=|[^\s\w]', text)


@contextmanager
def criterion(capsys, n, title, limit=None):
    start = perf_counter()
    ok = False
    try:
        yield
        ok = True
    finally:
        took = perf_counter() - start
        in_time = limit is None or took < limit
        budget = f' < {limit}s' if limit else ''
        with capsys.disabled():
            print(f'\n{"PASS" if ok and in_time else "FAIL"} criterion {n}: {title} '
                  f'({took:.2f}s{budget})')
    assert in_time, f'criterion {n} took {took:.1f}s, limit {limit}s'


def sint(n):
    return IntegerValue(SINT, n)


def uint(n):
    return IntegerValue(UINT, n)


def c_call(f, args):
    """Heap and C arguments for an IR function's inputs (arrays at addresses 1, 2, ...)."""
    heap, c_args = {}, []
    for (_, t), a in zip(f.params, args):
        if isinstance(t, ArrayType):
            heap[len(heap) + 1] = a
            c_args.append(PointerValue(t.elem, len(heap)))
        else:
            c_args.append(a)
    return ComputationState((), MappingProxyType(heap)), c_args


def test_1_listing_reproduction(capsys, corpus_file, tmp_path):
    with criterion(capsys, 1, 'gen reproduces the four listings', 1.0):
        out = tmp_path / 'prog.c'
        assert main(['gen', corpus_file, '--out', str(out)]) == 0
        capsys.readouterr()
        text = out.read_text(encoding='ascii')
        want = [w for name in 'fghi' for w in words(LISTINGS[name])]
        assert words(text) == want


def test_2_static_correctness(capsys, corpus):
    with criterion(capsys, 2, 'corpus and 250 random programs are wellformed', 30.0):
        assert check_transunit(translate(corpus)) == WELLFORMED
        for seed in range(250):
            assert check_transunit(translate(random_program(seed))) == WELLFORMED, seed


def test_3_dynamic_correctness(capsys, corpus_file, corpus, corpus_tr):
    with criterion(capsys, 3, 'validate: 1000 inputs per function, seed 42, no divergences',
                   60.0):
        code = main(['validate', corpus_file, '--tests', '1000', '--seed', '42'])
        report = json.loads(capsys.readouterr().out)
        assert code == 0 and report['static'] == WELLFORMED
        records = {r['name']: r for r in report['functions'] + report['loops']}
        assert set(records) == {'f', 'g', 'h', 'i', 'h$loop'}
        for r in records.values():
            assert r['tried'] == r['agreements'] == 1000 and r['divergences'] == 0
        env = init_fun_env(corpus_tr.transunit)
        st0 = ComputationState()
        for n in (0, 5, 13):
            assert exec_fun('h', [uint(n)], st0, env, 10 ** 6)[0] == \
                uint(oracles.factorial_mod(n))
            assert eval_ir(corpus, 'h', [uint(n)]) == [uint(oracles.factorial_mod(n))]
        assert oracles.factorial_mod(13) == 1932053504
        assert exec_fun('f', [sint(3), sint(4), sint(5)], st0, env, 10)[0] == sint(14)
        st1 = ComputationState((), MappingProxyType({1: make_array(UCHAR, [9, 9, 9])}))
        _, st2 = exec_fun('i', [PointerValue(UCHAR, 1), sint(0), sint(2)], st1, env, 10)
        assert st2.heap[1].values == [1, 9, 2]


SHIFT_COUNTS = (7, 8, 15, 16, 31, 32, 63, 64)


def _samples(t, rng):
    lo, hi = DEFAULT_PARAMS.min(t), DEFAULT_PARAMS.max(t)
    return sorted({lo, hi, 0, min(1, hi), max(-1, lo), rng.randint(lo, hi)})


def _outcome(fn, *args):
    try:
        v = fn(*args)
    except WellDefError:
        return oracles.UB
    return (v.type.short_name, v.value)


def test_4_ub_matrix(capsys):
    with criterion(capsys, 4, 'UB matrix: 40 unary, 1600 binary, 100 conversion cells', 30.0):
        rng = random.Random(4)
        samples = {t: _samples(t, rng) for t in INT_TYPES}
        cells = 0
        for op, t in product(UNARY_OPS, INT_TYPES):
            cells += 1
            for n in samples[t]:
                got = _outcome(exec_unary, op, IntegerValue(t, n))
                assert got == oracles.unary(op, t.short_name, n), (op, t, n)
        for op, t1, t2 in product(BINARY_OPS, INT_TYPES, INT_TYPES):
            cells += 1
            pairs = list(product(samples[t1], samples[t2]))
            # shift counts around each width
            pairs += [(rng.choice(samples[t1]), y) for y in SHIFT_COUNTS
                      if y <= DEFAULT_PARAMS.max(t2)]
            for x, y in pairs:
                got = _outcome(exec_binary, op, IntegerValue(t1, x), IntegerValue(t2, y))
                assert got == oracles.binary(op, t1.short_name, x, t2.short_name, y), \
                    (op, t1, x, t2, y)
        for src, dst in product(INT_TYPES, INT_TYPES):
            cells += 1
            for n in samples[src]:
                got = _outcome(convert, IntegerValue(src, n), dst)
                assert got == oracles.conv(dst.short_name, n), (src, dst, n)
        assert cells == 40 + 1600 + 100

        int_max, int_min = 2 ** 31 - 1, -2 ** 31
        with pytest.raises(WellDefError):
            exec_binary('add', sint(int_max), sint(1))
        assert exec_binary('sub', uint(0), uint(1)) == uint(2 ** 32 - 1)
        with pytest.raises(WellDefError):
            exec_binary('shl', sint(1), sint(32))
        with pytest.raises(WellDefError):
            exec_binary('shr', uint(1), sint(32))
        with pytest.raises(WellDefError):
            exec_binary('div', sint(1), sint(0))
        with pytest.raises(WellDefError):
            exec_binary('div', sint(int_min), sint(-1))
        a = make_array(UCHAR, [1, 2, 3])
        for i in (-1, 3):
            with pytest.raises(BoundsError):
                array_read(a, sint(i))
            with pytest.raises(BoundsError):
                array_write(a, sint(i), IntegerValue(UCHAR, 0))
        scope = MappingProxyType({'p': PointerValue(UCHAR, 1)})
        st1 = ComputationState((Frame('t', (scope,)),), MappingProxyType({1: a}))
        with pytest.raises(DynError) as exc:
            exec_expr_pure(Index('p', Const(3, SINT)), st1)
        assert exc.value.kind == 'bounds'


def _attempt(fn, args, st, env, fuel):
    try:
        val, st2 = exec_fun(fn, args, st, env, fuel)
    except LimitExceeded:
        return 'limit'
    except DynError as exc:
        return ('error', exc.kind, str(exc))
    return ('ok', val, st2)


FUELS = [2 ** k for k in range(1, 17)]


def test_5_fuel_properties(capsys, corpus, corpus_tr):
    with criterion(capsys, 5, 'fuel monotonicity and exact constant bounds', 60.0):
        pairs = 0
        seed = 0
        while pairs < 600:
            p = random_program(seed)
            seed += 1
            tr = translate_program(p)
            env = init_fun_env(tr.transunit)
            f = p.functions[-1]
            for args in gen_inputs(f, seed, 3, program=p, max_rejects=10 ** 4):
                st0, c_args = c_call(f, args)
                outcomes = [_attempt(f.name, c_args, st0, env, fuel) for fuel in FUELS]
                first = next((k for k, o in enumerate(outcomes) if o != 'limit'), None)
                if first is None:
                    continue
                pairs += 1
                for later in outcomes[first:]:
                    assert later == outcomes[first], (seed, f.name)
                for extra in (FUELS[first] + 1, FUELS[first] + 1000):
                    assert _attempt(f.name, c_args, st0, env, extra) == outcomes[first]
        assert pairs >= 500

        checked = 0
        programs = [(corpus, corpus_tr)] + [(p, translate_program(p))
                                            for p in map(random_program, range(60))]
        for p, tr in programs:
            env = init_fun_env(tr.transunit)
            bounds = transunit_fuel_bounds(tr.transunit)
            for f in p.functions:
                if f.is_loop or not bounds[f.name].is_constant:
                    continue
                assert fuel_bound(f.name, p) == bounds[f.name]
                for args in gen_inputs(f, 5, 40, program=p, max_rejects=10 ** 4):
                    st0, c_args = c_call(f, args)
                    assert _attempt(f.name, c_args, st0, env, bounds[f.name].value) != 'limit'
                    checked += 1
        assert checked >= 1000


def test_6_pretty_printer(capsys):
    with criterion(capsys, 6, 'round trip over 5000 and minimality over 600 expressions',
                   60.0):
        for seed in range(5000):
            e = ExprGen(seed, calls=True).expr()
            assert parse_expr(print_expr(e)) == e, seed
        for seed in range(600):
            e = ExprGen(10 ** 6 + seed, calls=True).expr()
            text = print_expr(e)
            for i, j in _paren_pairs(text):
                mutated = text[:i] + text[i + 1:j] + text[j + 1:]
                try:
                    same = parse_expr(mutated) == e
                except ParseError:
                    same = False
                assert not same, (text, mutated)


def _paren_pairs(text):
    stack, pairs = [], []
    for k, ch in enumerate(text):
        if ch == '(':
            stack.append(k)
        elif ch == ')':
            pairs.append((stack.pop(), k))
    return pairs


def _eval(p, fn, args, strategy):
    try:
        return eval_ir(p, fn, args, step_cap=10 ** 4, strategy=strategy)
    except (GuardViolation, CapExceeded) as exc:
        return type(exc).__name__, str(exc)


def test_7_single_threadedness(capsys, corpus):
    with criterion(capsys, 7, 'copy-on-write and in-place evaluation agree', 30.0):
        programs = [corpus] + [random_program(seed) for seed in range(220)]
        for p in programs:
            for f in p.functions:
                for args in gen_inputs(f, 11, 5, program=p, max_rejects=10 ** 4):
                    cow = _eval(p, f.name, args, 'cow')
                    assert _eval(p, f.name, args, 'inplace') == cow, f.name


def test_8_reproducibility(capsys, corpus_file, tmp_path):
    with criterion(capsys, 8, 'two validate runs give byte-identical reports'):
        outs = [tmp_path / 'a.json', tmp_path / 'b.json']
        for out in outs:
            assert main(['validate', corpus_file, '--out', str(out)]) == 0
        assert outs[0].read_bytes() == outs[1].read_bytes()
