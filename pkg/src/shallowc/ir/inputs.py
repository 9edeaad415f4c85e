"""Deterministic generation of guard-satisfying inputs for IR functions."""

from __future__ import annotations

import random
from typing import Optional

from ..values import DEFAULT_PARAMS, CIntType, ImplParams, make_array, make_int
from .evaluator import guard_holds
from .syntax import GAnd, GCmp, GGet, GIndexOk, GNum, IrFunction, IrProgram

DEFAULT_MAX_ARRAY_LEN = 8
DEFAULT_MAX_REJECTS = 1000


class SamplingExhausted(Exception):
    pass


def _conjuncts(guards):
    for g in guards:
        if isinstance(g, GAnd):
            yield from _conjuncts(g.args)
        else:
            yield g


def _bounds(f: IrFunction) -> dict[str, list]:
    """Intervals [lo, hi] implied by simple comparisons of a parameter with a number."""
    out: dict[str, list] = {}

    def tighten(var, lo=None, hi=None):
        b = out.setdefault(var, [None, None])
        if lo is not None and (b[0] is None or lo > b[0]):
            b[0] = lo
        if hi is not None and (b[1] is None or hi < b[1]):
            b[1] = hi

    for g in _conjuncts(f.extra_guards):
        if not isinstance(g, GCmp):
            continue
        for a, b in zip(g.args, g.args[1:]):
            op = g.op
            if isinstance(a, GNum) and isinstance(b, GGet):
                a, b = b, a
                op = {'<': '>', '<=': '>=', '>': '<', '>=': '<=', '=': '='}[op]
            if not (isinstance(a, GGet) and isinstance(b, GNum)):
                continue
            n = b.value
            if op == '<':
                tighten(a.var, hi=n - 1)
            elif op == '<=':
                tighten(a.var, hi=n)
            elif op == '>':
                tighten(a.var, lo=n + 1)
            elif op == '>=':
                tighten(a.var, lo=n)
            else:
                tighten(a.var, lo=n, hi=n)
    return out


def _index_arrays(f: IrFunction) -> dict[str, str]:
    return {g.index: g.array for g in _conjuncts(f.extra_guards) if isinstance(g, GIndexOk)}


def sample_int(rng: random.Random, lo: int, hi: int) -> int:
    """Pick from [lo, hi], biased toward the ends and toward small magnitudes."""
    r = rng.random()
    if r < 0.3:
        edges = [x for x in (lo, lo + 1, hi - 1, hi, 0, 1, -1) if lo <= x <= hi]
        return rng.choice(edges)
    if r < 0.6:
        a, b = max(lo, -16), min(hi, 16)
        if a <= b:
            return rng.randint(a, b)
    return rng.randint(lo, hi)


def gen_inputs(fn: IrFunction, seed: int, count: int, params: ImplParams = DEFAULT_PARAMS,
               max_array_len: int = DEFAULT_MAX_ARRAY_LEN,
               max_rejects: int = DEFAULT_MAX_REJECTS,
               program: Optional[IrProgram] = None) -> list[tuple]:
    """Return ``count`` argument tuples satisfying the guard of ``fn``.

    Raises ``SamplingExhausted`` when ``max_rejects`` candidates in a row fail
    the guard.
    """
    if max_array_len < 1:
        raise ValueError('max_array_len must be positive')
    rng = random.Random(f'{seed}/{fn.name}')
    bounds = _bounds(fn)
    index_of = _index_arrays(fn)
    out = []
    while len(out) < count:
        for _ in range(max_rejects):
            cand = _candidate(fn, rng, params, max_array_len, bounds, index_of)
            if cand is not None and guard_holds(fn, cand, program, params):
                out.append(cand)
                break
        else:
            raise SamplingExhausted(f'{fn.name}: {max_rejects} consecutive candidates '
                                    'violated the guard')
    return out


def _candidate(fn, rng, params, max_array_len, bounds, index_of):
    vals: dict[str, object] = {}
    for name, t in fn.params:
        if not isinstance(t, CIntType):
            n = rng.randint(1, max_array_len)
            elem = t.elem
            vals[name] = make_array(elem, [sample_int(rng, params.min(elem), params.max(elem))
                                           for _ in range(n)], params)
    for name, t in fn.params:
        if not isinstance(t, CIntType):
            continue
        lo, hi = params.min(t), params.max(t)
        b = bounds.get(name)
        if b:
            lo = max(lo, b[0]) if b[0] is not None else lo
            hi = min(hi, b[1]) if b[1] is not None else hi
        arr = vals.get(index_of.get(name, ''))
        if arr is not None and rng.random() < 0.95:
            lo, hi = max(lo, 0), min(hi, len(arr) - 1)
        if lo > hi:
            return None
        vals[name] = make_int(t, sample_int(rng, lo, hi), params)
    return tuple(vals[n] for n in fn.param_names)

