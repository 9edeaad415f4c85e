"""C integer and array values, with C18 operations and their well-definedness
conditions.

Every operation either returns a value or raises an error describing which
condition failed; nothing wraps silently unless C18 defines it to (unsigned
arithmetic and conversions to unsigned types).
"""

from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import Sequence


class Rank(enum.IntEnum):
    CHAR = 0
    SHORT = 1
    INT = 2
    LONG = 3
    LLONG = 4


@dataclass(frozen=True, order=True)
class CIntType:
    signed: bool
    rank: Rank

    @property
    def short_name(self) -> str:
        """Name used in IR operator symbols, e.g. ``sint`` or ``uchar``."""
        return ('s' if self.signed else 'u') + _RANK_SHORT[self.rank]

    @property
    def c_name(self) -> str:
        return _C_NAMES[self]

    def __str__(self) -> str:
        return self.c_name

    def __repr__(self) -> str:
        return self.short_name.upper()


_RANK_SHORT = {
    Rank.CHAR: 'char', Rank.SHORT: 'short', Rank.INT: 'int',
    Rank.LONG: 'long', Rank.LLONG: 'llong',
}

SCHAR = CIntType(True, Rank.CHAR)
UCHAR = CIntType(False, Rank.CHAR)
SSHORT = CIntType(True, Rank.SHORT)
USHORT = CIntType(False, Rank.SHORT)
SINT = CIntType(True, Rank.INT)
UINT = CIntType(False, Rank.INT)
SLONG = CIntType(True, Rank.LONG)
ULONG = CIntType(False, Rank.LONG)
SLLONG = CIntType(True, Rank.LLONG)
ULLONG = CIntType(False, Rank.LLONG)

INT_TYPES: tuple[CIntType, ...] = (
    SCHAR, UCHAR, SSHORT, USHORT, SINT, UINT, SLONG, ULONG, SLLONG, ULLONG,
)

_C_NAMES = {
    SCHAR: 'signed char', UCHAR: 'unsigned char',
    SSHORT: 'short', USHORT: 'unsigned short',
    SINT: 'int', UINT: 'unsigned int',
    SLONG: 'long', ULONG: 'unsigned long',
    SLLONG: 'long long', ULLONG: 'unsigned long long',
}

TYPES_BY_SHORT_NAME = {t.short_name: t for t in INT_TYPES}


def unsigned_of(t: CIntType) -> CIntType:
    return CIntType(False, t.rank)


@dataclass(frozen=True)
class ImplParams:
    """Implementation-defined integer widths (in bits)."""

    bits_char: int = 8
    bits_short: int = 16
    bits_int: int = 32
    bits_long: int = 64
    bits_llong: int = 64

    def __post_init__(self):
        widths = [self.bits_char, self.bits_short, self.bits_int,
                  self.bits_long, self.bits_llong]
        if self.bits_char != 8:
            raise ValueError('bits_char must be 8')
        for w, least in zip(widths, (8, 16, 16, 32, 64)):
            if not isinstance(w, int) or w < least:
                raise ValueError(f'integer width {w!r} below C18 minimum {least}')
        if widths != sorted(widths):
            raise ValueError(f'integer widths must be non-decreasing by rank: {widths}')

    def bits(self, t: CIntType) -> int:
        return (self.bits_char, self.bits_short, self.bits_int,
                self.bits_long, self.bits_llong)[t.rank]

    def min(self, t: CIntType) -> int:
        return -(1 << (self.bits(t) - 1)) if t.signed else 0

    def max(self, t: CIntType) -> int:
        n = self.bits(t)
        return (1 << (n - 1)) - 1 if t.signed else (1 << n) - 1

    def in_range(self, t: CIntType, n: int) -> bool:
        return self.min(t) <= n <= self.max(t)


DEFAULT_PARAMS = ImplParams()


class WellDefError(Exception):
    """An operation whose result is not well-defined in C18.

    ``op`` names the operation (``add``, ``convert``, ...) and ``condition``
    the failed requirement.
    """

    def __init__(self, op: str, condition: str):
        super().__init__(f'{op}: {condition}')
        self.op = op
        self.condition = condition


class RangeError(ValueError):
    pass


class BoundsError(Exception):
    def __init__(self, index: int, length: int):
        super().__init__(f'index {index} out of bounds for array of length {length}')
        self.index = index
        self.length = length


class ValueTypeError(TypeError):
    pass


@dataclass(frozen=True)
class IntegerValue:
    type: CIntType
    value: int

    def __str__(self):
        return f'{self.type.short_name} {self.value}'


@dataclass(frozen=True)
class ArrayValue:
    elem_type: CIntType
    elements: tuple[IntegerValue, ...]

    def __post_init__(self):
        if not self.elements:
            raise ValueError('arrays are non-empty')
        for e in self.elements:
            if e.type != self.elem_type:
                raise ValueTypeError(
                    f'element {e} does not have array type {self.elem_type.short_name}')

    def __len__(self):
        return len(self.elements)

    @property
    def values(self) -> list[int]:
        return [e.value for e in self.elements]

    def __str__(self):
        return f'{self.elem_type.short_name}[] ' + ','.join(str(v) for v in self.values)


def make_int(type: CIntType, n: int, params: ImplParams = DEFAULT_PARAMS) -> IntegerValue:
    if not params.in_range(type, n):
        raise RangeError(f'{n} is out of range for {type.c_name}')
    return IntegerValue(type, n)


def make_array(elem_type: CIntType, ns: Sequence[int],
               params: ImplParams = DEFAULT_PARAMS) -> ArrayValue:
    return ArrayValue(elem_type, tuple(make_int(elem_type, n, params) for n in ns))


# Type rules

def promoted_type(t: CIntType, params: ImplParams = DEFAULT_PARAMS) -> CIntType:
    if t.rank >= Rank.INT:
        return t
    if params.min(t) >= params.min(SINT) and params.max(t) <= params.max(SINT):
        return SINT
    return UINT


def common_type(t1: CIntType, t2: CIntType, params: ImplParams = DEFAULT_PARAMS) -> CIntType:
    """Common type of the usual arithmetic conversions (C18 6.3.1.8)."""
    t1 = promoted_type(t1, params)
    t2 = promoted_type(t2, params)
    if t1 == t2:
        return t1
    if t1.signed == t2.signed:
        return max(t1, t2, key=lambda t: t.rank)
    u, s = (t1, t2) if not t1.signed else (t2, t1)
    if u.rank >= s.rank:
        return u
    if params.max(s) >= params.max(u):
        return s
    return unsigned_of(s)


UNARY_OPS = ('plus', 'minus', 'bitnot', 'lognot')
BINARY_OPS = ('add', 'sub', 'mul', 'div', 'rem', 'bitand', 'bitor', 'bitxor',
              'shl', 'shr', 'lt', 'gt', 'le', 'ge', 'eq', 'ne')
ARITH_OPS = frozenset({'add', 'sub', 'mul', 'div', 'rem', 'bitand', 'bitor', 'bitxor'})
SHIFT_OPS = frozenset({'shl', 'shr'})
COMPARISON_OPS = frozenset({'lt', 'gt', 'le', 'ge', 'eq', 'ne'})


def unary_result_type(op: str, t: CIntType, params: ImplParams = DEFAULT_PARAMS) -> CIntType:
    if op not in UNARY_OPS:
        raise ValueError(f'unknown unary operator {op!r}')
    return SINT if op == 'lognot' else promoted_type(t, params)


def binary_result_type(op: str, t1: CIntType, t2: CIntType,
                       params: ImplParams = DEFAULT_PARAMS) -> CIntType:
    if op in COMPARISON_OPS:
        return SINT
    if op in SHIFT_OPS:
        return promoted_type(t1, params)
    if op in ARITH_OPS:
        return common_type(t1, t2, params)
    raise ValueError(f'unknown binary operator {op!r}')


# Conversions and operations

def convert(v: IntegerValue, target: CIntType,
            params: ImplParams = DEFAULT_PARAMS) -> IntegerValue:
    if v.type == target:
        return v
    if not target.signed:
        return IntegerValue(target, v.value % (1 << params.bits(target)))
    if not params.in_range(target, v.value):
        raise WellDefError('convert', f'{v.value} not representable in {target.c_name}')
    return IntegerValue(target, v.value)


def promote(v: IntegerValue, params: ImplParams = DEFAULT_PARAMS) -> IntegerValue:
    return convert(v, promoted_type(v.type, params), params)


def usual_arith_conversions(a: IntegerValue, b: IntegerValue,
                            params: ImplParams = DEFAULT_PARAMS
                            ) -> tuple[IntegerValue, IntegerValue, CIntType]:
    t = common_type(a.type, b.type, params)
    return convert(a, t, params), convert(b, t, params), t


def _result(op: str, t: CIntType, n: int, params: ImplParams) -> IntegerValue:
    """Wrap for unsigned types, range-check for signed ones."""
    if not t.signed:
        return IntegerValue(t, n % (1 << params.bits(t)))
    if not params.in_range(t, n):
        raise WellDefError(op, f'result {n} not representable in {t.c_name}')
    return IntegerValue(t, n)


def exec_unary(op: str, v: IntegerValue, params: ImplParams = DEFAULT_PARAMS) -> IntegerValue:
    if op == 'lognot':
        return IntegerValue(SINT, int(v.value == 0))
    p = promote(v, params)
    if op == 'plus':
        return p
    if op == 'minus':
        return _result(op, p.type, -p.value, params)
    if op == 'bitnot':
        return _result(op, p.type, ~p.value, params)
    raise ValueError(f'unknown unary operator {op!r}')


def _trunc_div(x: int, y: int) -> int:
    q = abs(x) // abs(y)
    return q if (x < 0) == (y < 0) else -q


def _shift(op: str, a: IntegerValue, b: IntegerValue, params: ImplParams) -> IntegerValue:
    a = promote(a, params)
    b = promote(b, params)
    width = params.bits(a.type)
    if b.value < 0:
        raise WellDefError(op, f'negative shift count {b.value}')
    if b.value >= width:
        raise WellDefError(op, f'shift count {b.value} >= width {width}')
    if op == 'shr':
        # arithmetic shift for negative signed operands (implementation-defined in C18)
        return IntegerValue(a.type, a.value >> b.value)
    if a.type.signed and a.value < 0:
        raise WellDefError(op, f'left shift of negative value {a.value}')
    return _result(op, a.type, a.value << b.value, params)


def exec_binary(op: str, a: IntegerValue, b: IntegerValue,
                params: ImplParams = DEFAULT_PARAMS) -> IntegerValue:
    if op in SHIFT_OPS:
        return _shift(op, a, b, params)
    if op not in ARITH_OPS and op not in COMPARISON_OPS:
        raise ValueError(f'unknown binary operator {op!r}')
    a, b, t = usual_arith_conversions(a, b, params)
    x, y = a.value, b.value
    if op in COMPARISON_OPS:
        r = {'lt': x < y, 'gt': x > y, 'le': x <= y,
             'ge': x >= y, 'eq': x == y, 'ne': x != y}[op]
        return IntegerValue(SINT, int(r))
    if op == 'add':
        return _result(op, t, x + y, params)
    if op == 'sub':
        return _result(op, t, x - y, params)
    if op == 'mul':
        return _result(op, t, x * y, params)
    if op in ('div', 'rem'):
        if y == 0:
            raise WellDefError(op, 'division by zero')
        q = _trunc_div(x, y)
        if t.signed and not params.in_range(t, q):
            # C18 6.5.5p6: a % b is undefined whenever a / b is
            raise WellDefError(op, f'quotient {q} not representable in {t.c_name}')
        return IntegerValue(t, q if op == 'div' else x - q * y)
    # two's complement bitwise ops never leave the common type's range
    if op == 'bitand':
        return IntegerValue(t, x & y)
    if op == 'bitor':
        return IntegerValue(t, x | y)
    return IntegerValue(t, x ^ y)


def bool_from_int(v: IntegerValue) -> bool:
    return v.value != 0


def int_from_bool(b: bool, type: CIntType = SINT) -> IntegerValue:
    return IntegerValue(type, int(bool(b)))


def _check_index(a: ArrayValue, i: IntegerValue) -> int:
    if not 0 <= i.value < len(a.elements):
        raise BoundsError(i.value, len(a.elements))
    return i.value


def array_read(a: ArrayValue, i: IntegerValue) -> IntegerValue:
    return a.elements[_check_index(a, i)]


def array_write(a: ArrayValue, i: IntegerValue, v: IntegerValue) -> ArrayValue:
    k = _check_index(a, i)
    if v.type != a.elem_type:
        raise ValueTypeError(
            f'cannot store {v.type.c_name} into {a.elem_type.c_name} array')
    return ArrayValue(a.elem_type, a.elements[:k] + (v,) + a.elements[k + 1:])
