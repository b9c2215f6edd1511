"""Exact-arithmetic tools for finite valued constraint satisfaction problems."""
from .blp import blp_optimum, build_blp, gap_report, round_by_self_reduction
from .core import (
    Constraint,
    CostFunction,
    Gadget,
    Instance,
    Language,
    PinningSpec,
    brute_optimum,
    cost,
    decide,
    expressed_function,
    gamma_c,
)
from .errors import FormatError, SizeLimitError, ValidationError, VcspError
from .exactlp import LinearProgram, LPOutcome, Status, check_certificate, simplex_solve

__version__ = "0.1.0"
