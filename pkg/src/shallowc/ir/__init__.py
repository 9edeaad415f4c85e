"""The IR: S-expression surface syntax, well-formedness checks and evaluation."""

from .checker import IrError, Shape, analyze, check_ir, function_shape
from .evaluator import CapExceeded, GuardViolation, eval_ir, guard_holds
from .inputs import SamplingExhausted, gen_inputs
from .parser import IrParseError, parse_ir
from .printer import print_ir
from .syntax import IrFunction, IrProgram

__all__ = [
    'CapExceeded', 'GuardViolation', 'IrError', 'IrFunction', 'IrParseError', 'IrProgram',
    'SamplingExhausted', 'Shape', 'analyze', 'check_ir', 'eval_ir', 'function_shape',
    'gen_inputs', 'guard_holds', 'parse_ir', 'print_ir',
]
