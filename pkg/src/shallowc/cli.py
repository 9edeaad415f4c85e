"""Command-line driver: ``gen``, ``check``, ``validate`` and ``run``."""

from __future__ import annotations

import argparse
import sys
from dataclasses import replace
from types import MappingProxyType
from typing import Optional, Sequence

from .codegen import TranslationError, transunit_fuel_bounds, translate_program
from .config import ConfigError, HarnessConfig, load_config, load_sizes
from .dynamic import (ComputationState, DynError, LimitExceeded, PointerValue, exec_fun,
                      init_fun_env)
from .harness import (EXIT_ERROR, EXIT_INCONCLUSIVE, EXIT_IO, EXIT_OK,
                      dump_report, fuel_schedule, report_exit_code, validate_program)
from .ir.checker import IrError
from .ir.parser import IrParseError, parse_ir
from .ir.syntax import ArrayType, IrProgram
from .pretty import print_transunit
from .static import StaticError, check_transunit
from .syntax import Void
from .values import INT_TYPES, CIntType, ImplParams, RangeError, make_array, make_int

# Spellings of the integer types in ``run`` arguments and output.
CLI_TYPE_NAMES = {
    'schar': 'schar', 'uchar': 'uchar', 'sshort': 'short', 'ushort': 'ushort',
    'sint': 'int', 'uint': 'uint', 'slong': 'long', 'ulong': 'ulong',
    'sllong': 'llong', 'ullong': 'ullong',
}
_TYPE_BY_CLI = {CLI_TYPE_NAMES[t.short_name]: t for t in INT_TYPES}
_TYPE_BY_CLI.update({t.short_name: t for t in INT_TYPES})

_LIMIT_NAMES = {
    'SCHAR': 'schar', 'UCHAR': 'uchar', 'SHRT': 'short', 'USHRT': 'ushort',
    'INT': 'int', 'UINT': 'uint', 'LONG': 'long', 'ULONG': 'ulong',
    'LLONG': 'llong', 'ULLONG': 'ullong',
}


class ArgError(ValueError):
    pass


class _Failure(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def type_name(t: CIntType) -> str:
    return CLI_TYPE_NAMES[t.short_name]


def show_value(v) -> str:
    if v is None:
        return 'void'
    if hasattr(v, 'elements'):
        return f'{type_name(v.elem_type)}[] ' + ','.join(str(x) for x in v.values)
    return f'{type_name(v.type)} {v.value}'


def _named_int(text: str, params: ImplParams) -> Optional[int]:
    for suffix, fn in (('_MAX', params.max), ('_MIN', params.min)):
        if text.endswith(suffix) and text[:-len(suffix)] in _LIMIT_NAMES:
            return fn(_TYPE_BY_CLI[_LIMIT_NAMES[text[:-len(suffix)]]])
    return None


def _int_text(text: str, params: ImplParams) -> int:
    n = _named_int(text.strip(), params)
    if n is not None:
        return n
    try:
        return int(text, 0)
    except ValueError:
        raise ArgError(f'not an integer: {text!r}') from None


def parse_arg(text: str, ptype, params: ImplParams):
    """Parse ``int:3``, ``uchar[]:1,2,3``, ``INT_MAX`` or a bare number/list."""
    tname, sep, body = text.partition(':')
    if not sep:
        tname, body = None, text
    if isinstance(ptype, ArrayType):
        if tname is not None:
            if not tname.endswith('[]') or _TYPE_BY_CLI.get(tname[:-2]) != ptype.elem:
                raise ArgError(f'{text!r} is not a {type_name(ptype.elem)}[] argument')
        ns = [_int_text(x, params) for x in body.split(',') if x.strip()]
        if not ns:
            raise ArgError('arrays need at least one element')
        try:
            return make_array(ptype.elem, ns, params)
        except RangeError as exc:
            raise ArgError(str(exc)) from None
    if tname is not None and _TYPE_BY_CLI.get(tname) != ptype:
        raise ArgError(f'{text!r} is not a {type_name(ptype)} argument')
    try:
        return make_int(ptype, _int_text(body, params), params)
    except RangeError as exc:
        raise ArgError(str(exc)) from None


def _read(path: str) -> str:
    try:
        with open(path, encoding='utf-8') as fh:
            return fh.read()
    except (OSError, UnicodeDecodeError) as exc:
        raise _Failure(EXIT_IO, f'error: cannot read {path}: {exc}') from None


def _load(path: str, cfg: HarnessConfig):
    p = _parse(path)
    try:
        return p, translate_program(p, cfg.params)
    except (IrError, TranslationError) as exc:
        stage = 'check' if isinstance(exc, IrError) else 'translate'
        raise _Failure(EXIT_ERROR, f'{stage} error: {exc}') from None


def _parse(path: str) -> IrProgram:
    text = _read(path)
    try:
        return parse_ir(text)
    except IrParseError as exc:
        raise _Failure(EXIT_ERROR, f'parse error: {path}: {exc}') from None


def _write(path: str, text: str) -> None:
    try:
        with open(path, 'w', encoding='ascii', newline='\n') as fh:
            fh.write(text)
    except (OSError, UnicodeEncodeError) as exc:
        raise _Failure(EXIT_IO, f'error: cannot write {path}: {exc}') from None


def cmd_gen(args, cfg: HarnessConfig) -> int:
    _, tr = _load(args.ir, cfg)
    text = print_transunit(tr.transunit, cfg.indent)
    table = sys.stdout
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
        table = sys.stderr
    bounds = transunit_fuel_bounds(tr.transunit)
    width = max([len('function')] + [len(n) for n in bounds])
    print(f'{"function":<{width}}  fuel bound', file=table)
    for name, b in bounds.items():
        print(f'{name:<{width}}  {b}', file=table)
    return EXIT_OK


def cmd_check(args, cfg: HarnessConfig) -> int:
    _, tr = _load(args.ir, cfg)
    try:
        print(check_transunit(tr.transunit, cfg.params))
    except StaticError as exc:
        raise _Failure(EXIT_ERROR, f'static error: {exc}') from None
    return EXIT_OK


def cmd_validate(args, cfg: HarnessConfig) -> int:
    p = _parse(args.ir)
    try:
        report = validate_program(p, cfg, args.ir)
    except (IrError, TranslationError) as exc:
        stage = 'check' if isinstance(exc, IrError) else 'translate'
        raise _Failure(EXIT_ERROR, f'{stage} error: {exc}') from None
    except Exception as exc:  # sampling and similar harness-stage failures
        raise _Failure(EXIT_ERROR, f'validate error: {type(exc).__name__}: {exc}') from None
    text = dump_report(report)
    if args.out:
        _write(args.out, text)
    else:
        sys.stdout.write(text)
    return report_exit_code(report)


def cmd_run(args, cfg: HarnessConfig) -> int:
    p, tr = _load(args.ir, cfg)
    if args.fn not in p or p.function(args.fn).is_loop:
        raise _Failure(EXIT_ERROR, f'error: no C function named {args.fn!r}')
    f = p.function(args.fn)
    raw = list(args.args or []) + list(getattr(args, 'rest', None) or [])
    if len(raw) != len(f.params):
        raise _Failure(EXIT_ERROR, f'error: {f.name} takes {len(f.params)} arguments, '
                                   f'got {len(raw)}')
    try:
        vals = [parse_arg(a, t, cfg.params) for a, (_, t) in zip(raw, f.params)]
    except ArgError as exc:
        raise _Failure(EXIT_ERROR, f'argument error: {exc}') from None
    heap, c_args, arrays = {}, [], []
    for (name, t), v in zip(f.params, vals):
        if isinstance(t, ArrayType):
            heap[len(heap) + 1] = v
            arrays.append((name, len(heap)))
            c_args.append(PointerValue(t.elem, len(heap)))
        else:
            c_args.append(v)
    st = ComputationState((), MappingProxyType(heap))
    env = init_fun_env(tr.transunit)
    schedule = fuel_schedule(transunit_fuel_bounds(tr.transunit)[f.name], cfg.fuel_cap)
    for fuel in schedule:
        try:
            val, st = exec_fun(f.name, c_args, st, env, fuel, cfg.params)
        except LimitExceeded:
            continue
        except DynError as exc:
            print(f'error: {exc}')
            return EXIT_ERROR
        if isinstance(env[f.name].return_type, Void):
            print('void')
        else:
            print(show_value(val))
        for name, addr in arrays:
            print(f'{name} = {show_value(st.heap[addr])}')
        return EXIT_OK
    print(f'limit: fuel exhausted (cap {cfg.fuel_cap})')
    return EXIT_INCONCLUSIVE


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(
        prog='shallowc', description='Generate C from IR and validate the translation.')
    sub = ap.add_subparsers(dest='command', required=True)

    def common(sp):
        sp.add_argument('ir', help='IR source file')
        sp.add_argument('--config', help='flat key = value configuration file')
        sp.add_argument('--sizes', help='file with bits_* integer width settings')
        sp.add_argument('--seed', type=int)
        sp.add_argument('--tests', type=int, help='inputs per function')
        sp.add_argument('--fuel-cap', type=int, dest='fuel_cap')

    sp = sub.add_parser('gen', help='write the generated C file')
    common(sp)
    sp.add_argument('--out', help='output .c file (default: stdout)')
    sp.set_defaults(func=cmd_gen)

    sp = sub.add_parser('check', help='parse, check and statically check the generated C')
    common(sp)
    sp.set_defaults(func=cmd_check)

    sp = sub.add_parser('validate', help='differential validation; prints a JSON report')
    common(sp)
    sp.add_argument('--out', help='report file (default: stdout)')
    sp.set_defaults(func=cmd_validate)

    sp = sub.add_parser('run', help='execute one generated function in the interpreter')
    common(sp)
    sp.add_argument('--fn', required=True, help='function name')
    sp.add_argument('--args', nargs='*', help='arguments, e.g. int:3 uchar[]:1,2,3')
    sp.set_defaults(func=cmd_run)
    return ap


def make_config(args) -> HarnessConfig:
    cfg = HarnessConfig()
    if args.config:
        cfg = load_config(args.config, cfg)
    if args.sizes:
        cfg = load_sizes(args.sizes, cfg)
    overrides = {k: getattr(args, k) for k in ('seed', 'tests', 'fuel_cap')
                 if getattr(args, k) is not None}
    return replace(cfg, **overrides) if overrides else cfg


def main(argv: Optional[Sequence[str]] = None) -> int:
    ap = build_parser()
    args, extra = ap.parse_known_args(argv)
    extra = [x for x in extra if x != '--']
    if extra and (args.command != 'run' or any(x.startswith('--') for x in extra)):
        ap.error(f'unrecognized arguments: {" ".join(extra)}')
    args.rest = extra
    try:
        try:
            cfg = make_config(args)
        except OSError as exc:
            raise _Failure(EXIT_IO, f'error: cannot read configuration: {exc}') from None
        except (ConfigError, ValueError) as exc:
            raise _Failure(EXIT_ERROR, f'config error: {exc}') from None
        return args.func(args, cfg)
    except _Failure as exc:
        print(exc, file=sys.stderr)
        return exc.code

