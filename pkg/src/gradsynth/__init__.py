"""Gradient-based program synthesis over a list-manipulation DSL."""

from gradsynth.state import Config, ValidationReport, decode_sharp, encode, encode_batch, is_sharp, validate
from gradsynth.dsl import (
    FUNCTION_NAMES,
    Function,
    apply_concrete,
    function_from_name,
    program_from_names,
    program_to_names,
    run_program,
    transform_adjoint,
    transform_fuzzy,
)

__version__ = "0.1.0"

__all__ = [
    "Config",
    "Function",
    "FUNCTION_NAMES",
    "ValidationReport",
    "apply_concrete",
    "decode_sharp",
    "encode",
    "encode_batch",
    "function_from_name",
    "is_sharp",
    "program_from_names",
    "program_to_names",
    "run_program",
    "transform_adjoint",
    "transform_fuzzy",
    "validate",
    "__version__",
]
