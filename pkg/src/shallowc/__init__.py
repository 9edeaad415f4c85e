"""C code generation from a shallowly embedded IR, with a deeply embedded C
subset (syntax, static and dynamic semantics) used to validate the output."""

__version__ = '0.1.0'
