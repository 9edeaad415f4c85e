"""Translation validation by differential execution.

Each generated C function (and each loop) is run in the C interpreter and
compared with the IR evaluator on guard-satisfying inputs.  The comparison
follows the shape of a correctness statement for generated code: same
result, same final arrays at their addresses, nothing else in the heap
touched, and the frame stack restored.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from types import MappingProxyType
from typing import Optional, Union

from .codegen import FuelBound, Translation, transunit_fuel_bounds, translate_program
from .config import FUEL_BASE, HarnessConfig
from .dynamic import (ComputationState, DynError, Frame, LimitExceeded, PointerValue,
                      exec_fun, exec_stmt_while, init_fun_env, read_var)
from .ir.evaluator import CapExceeded, GuardViolation, eval_ir
from .ir.inputs import gen_inputs
from .ir.syntax import ArrayType, IrProgram
from .static import WELLFORMED, check_transunit
from .syntax import TransUnit
from .values import SINT, IntegerValue, make_array

# Exit codes
EXIT_OK, EXIT_ERROR, EXIT_IO, EXIT_DIVERGENCE, EXIT_INCONCLUSIVE = 0, 1, 2, 3, 4

DECOY_VALUES = (90, -90, 7)


@dataclass
class Record:
    name: str
    kind: str  # 'function' or 'loop'
    fuel_bound: str
    tried: int = 0
    agreements: int = 0
    divergences: int = 0
    inconclusive: int = 0
    max_fuel_used: int = 0
    first_divergence: Optional[dict] = None
    first_inconclusive: Optional[dict] = None

    def to_json(self) -> dict:
        return {
            'name': self.name, 'kind': self.kind, 'fuel_bound': self.fuel_bound,
            'tried': self.tried, 'agreements': self.agreements,
            'divergences': self.divergences, 'inconclusive': self.inconclusive,
            'max_fuel_used': self.max_fuel_used,
            'first_divergence': self.first_divergence,
            'first_inconclusive': self.first_inconclusive,
        }


class _Inconclusive(Exception):
    pass


def fuel_schedule(bound: Optional[FuelBound], cap: int):
    """Fuel amounts to try: the constant bound alone, or doubling up to ``cap``."""
    if bound is not None and bound.is_constant:
        if bound.value > cap:
            return []
        return [bound.value]
    fuels, f = [], min(FUEL_BASE, cap)
    while True:
        fuels.append(f)
        if f >= cap:
            return fuels
        f = min(2 * f, cap)


def _show(v) -> str:
    if v is None:
        return 'void'
    if isinstance(v, (list, tuple)):
        return '[' + ', '.join(_show(x) for x in v) + ']'
    return str(v)


def _as_translation(tu: Union[TransUnit, Translation], p: IrProgram, cfg) -> Translation:
    if isinstance(tu, Translation):
        return tu
    ref = translate_program(p, cfg.params)
    return Translation(tu, ref.loops, ref.shapes, ref.return_types)


def _heap_for(f, args, cfg):
    """Place each array argument at a fresh address, followed by a decoy array."""
    heap, c_args, addresses = {}, [], {}
    for (name, t), a in zip(f.params, args):
        if isinstance(t, ArrayType):
            addr = len(heap) + 1
            heap[addr] = a
            addresses[name] = addr
            c_args.append(PointerValue(t.elem, addr))
        else:
            c_args.append(a)
    decoy = len(heap) + 1
    heap[decoy] = make_array(SINT, DECOY_VALUES, cfg.params)
    assert len(set(addresses.values()) | {decoy}) == len(addresses) + 1
    return heap, c_args, addresses


def _run_with_fuel(run, schedule):
    """Call ``run(fuel)`` with increasing fuel; return (outcome, fuel)."""
    for fuel in schedule:
        try:
            return run(fuel), fuel
        except LimitExceeded:
            continue
    raise _Inconclusive('fuel cap reached' if schedule else 'fuel bound exceeds the cap')


def _compare_function(outputs, c_val, st, st0, addresses, vals):
    """Return a list of mismatch descriptions (empty when the runs agree)."""
    problems = []
    vals = list(vals)
    if outputs.result is not None:
        want = vals.pop(0)
        if c_val != want:
            problems.append(f'result: C {_show(c_val)}, IR {_show(want)}')
    elif c_val is not None:
        problems.append(f'void function returned {_show(c_val)}')
    updated = dict(zip(outputs.arrays, vals))
    if len(vals) != len(outputs.arrays):
        problems.append(f'IR returned {len(vals)} arrays, expected {len(outputs.arrays)}')
    for name, addr in addresses.items():
        want = updated.get(name, st0.heap[addr])
        got = st.heap.get(addr)
        if got != want:
            problems.append(f'array {name}: C {_show(got)}, IR {_show(want)}')
    for addr, arr in st0.heap.items():
        if addr not in addresses.values() and st.heap.get(addr) != arr:
            problems.append(f'unrelated array at {addr} changed')
    if set(st.heap) != set(st0.heap):
        problems.append('heap addresses changed')
    if st.frames != st0.frames:
        problems.append('frame stack not restored')
    return problems


def validate_function(fn: str, tu: Union[TransUnit, Translation], p: IrProgram,
                      config: HarnessConfig = HarnessConfig(), inputs=None) -> Record:
    tr = _as_translation(tu, p, config)
    f = p.function(fn)
    outputs = tr.outputs(fn)
    env = init_fun_env(tr.transunit)
    bound = transunit_fuel_bounds(tr.transunit)[fn]
    schedule = fuel_schedule(bound, config.fuel_cap)
    rec = Record(fn, 'function', str(bound))
    if inputs is None:
        inputs = gen_inputs(f, config.seed, config.tests, config.params,
                            config.max_array_len, config.max_rejects, p)
    caller = Frame('<caller>', (MappingProxyType({'x': IntegerValue(SINT, 1)}),))
    for args in inputs:
        rec.tried += 1
        heap, c_args, addresses = _heap_for(f, args, config)
        st0 = ComputationState((caller,), MappingProxyType(heap))
        shown = [str(a) for a in args]
        try:
            try:
                vals = eval_ir(p, fn, args, config.step_cap, config.params)
            except (GuardViolation, CapExceeded) as exc:
                raise _Inconclusive(f'IR: {exc}') from None

            def run(fuel):
                return exec_fun(fn, c_args, st0, env, fuel, config.params)
            try:
                (c_val, st), fuel = _run_with_fuel(run, schedule)
            except DynError as exc:
                _diverge(rec, shown, f'error: {exc}', _show(vals), [])
                continue
        except _Inconclusive as exc:
            rec.inconclusive += 1
            if rec.first_inconclusive is None:
                rec.first_inconclusive = {'input': shown, 'reason': str(exc)}
            continue
        rec.max_fuel_used = max(rec.max_fuel_used, fuel)
        problems = _compare_function(outputs, c_val, st, st0, addresses, vals)
        if problems:
            _diverge(rec, shown, _show(c_val), _show(vals), problems)
        else:
            rec.agreements += 1
    return rec


def _diverge(rec: Record, shown, c_out: str, ir_out: str, problems) -> None:
    rec.divergences += 1
    if rec.first_divergence is None:
        rec.first_divergence = {'input': shown, 'c': c_out, 'ir': ir_out,
                                'mismatches': list(problems)}


def validate_loop(loop_fn: str, tu: Union[TransUnit, Translation], p: IrProgram,
                  config: HarnessConfig = HarnessConfig(), inputs=None) -> Record:
    tr = _as_translation(tu, p, config)
    f = p.function(loop_fn)
    shape = tr.shapes[loop_fn]
    loop = tr.loops[loop_fn]
    env = init_fun_env(tr.transunit)
    schedule = fuel_schedule(None, config.fuel_cap)
    rec = Record(loop_fn, 'loop', 'loop-dependent')
    if inputs is None:
        inputs = gen_inputs(f, config.seed, config.tests, config.params,
                            config.max_array_len, config.max_rejects, p)
    for args in inputs:
        rec.tried += 1
        heap, c_args, addresses = _heap_for(f, args, config)
        scope = dict(zip(f.param_names, c_args))
        st0 = ComputationState((Frame(loop_fn, (MappingProxyType(scope),)),),
                               MappingProxyType(heap))
        shown = [str(a) for a in args]
        try:
            try:
                vals = eval_ir(p, loop_fn, args, config.step_cap, config.params)
            except (GuardViolation, CapExceeded) as exc:
                raise _Inconclusive(f'IR: {exc}') from None

            def run(fuel):
                return exec_stmt_while(loop.test, loop.body, st0, env, fuel, config.params)
            try:
                (c_val, st), fuel = _run_with_fuel(run, schedule)
            except DynError as exc:
                _diverge(rec, shown, f'error: {exc}', _show(vals), [])
                continue
        except _Inconclusive as exc:
            rec.inconclusive += 1
            if rec.first_inconclusive is None:
                rec.first_inconclusive = {'input': shown, 'reason': str(exc)}
            continue
        rec.max_fuel_used = max(rec.max_fuel_used, fuel)
        problems = []
        if c_val is not None:
            problems.append(f'loop returned {_show(c_val)}')
        expected = dict(zip(shape.outputs, vals))
        if len(vals) != len(shape.outputs):
            problems.append(f'IR returned {len(vals)} values, expected {len(shape.outputs)}')
        c_final = []
        for (name, t), a, ca in zip(f.params, args, c_args):
            if isinstance(t, ArrayType):
                got = st.heap.get(addresses[name])
                if read_var(st, name) != ca:
                    problems.append(f'pointer {name} changed')
            else:
                got = read_var(st, name)
            c_final.append(got)
            want = expected.get(name, a)
            if got != want:
                problems.append(f'{name}: C {_show(got)}, IR {_show(want)}')
        for addr, arr in st0.heap.items():
            if addr not in addresses.values() and st.heap.get(addr) != arr:
                problems.append(f'unrelated array at {addr} changed')
        if len(st.frames) != 1 or len(st.frames[0].scopes) != 1:
            problems.append('frame or scope structure changed')
        if problems:
            _diverge(rec, shown, _show(c_final), _show(vals), problems)
        else:
            rec.agreements += 1
    return rec


def validate_program(p: IrProgram, config: HarnessConfig = HarnessConfig(),
                     program_id: str = '<program>') -> dict:
    """Translate, check and validate every function and loop; return the report."""
    tr = translate_program(p, config.params)
    static = check_transunit(tr.transunit, config.params)
    bounds = transunit_fuel_bounds(tr.transunit)
    records = []
    for f in p.functions:
        if f.is_loop:
            records.append(validate_loop(f.name, tr, p, config))
        else:
            records.append(validate_function(f.name, tr, p, config))
    return make_report(program_id, config, static, bounds, records)


def make_report(program_id: str, config: HarnessConfig, static: str,
                bounds: dict[str, FuelBound], records: list[Record]) -> dict:
    div = sum(r.divergences for r in records)
    inc = sum(r.inconclusive for r in records)
    ok = static == WELLFORMED
    status = 'ok' if ok and not div and not inc else \
        'divergence' if div else 'inconclusive' if inc else 'static-error'

    def by_kind(kind):
        return [r.to_json() for r in sorted(records, key=lambda r: r.name) if r.kind == kind]

    return {
        'program': program_id,
        'config': config.to_json(),
        'static': static,
        'fuel_bounds': {n: str(b) for n, b in sorted(bounds.items())},
        'functions': by_kind('function'),
        'loops': by_kind('loop'),
        'summary': {'divergences': div, 'inconclusive': inc, 'status': status},
    }


def report_exit_code(report: dict) -> int:
    s = report['summary']
    if report['static'] != WELLFORMED:
        return EXIT_ERROR
    if s['divergences']:
        return EXIT_DIVERGENCE
    if s['inconclusive']:
        return EXIT_INCONCLUSIVE
    return EXIT_OK


def dump_report(report: dict) -> str:
    return json.dumps(report, sort_keys=True, indent=2) + '\n'
