"""Toolkit for ground answer-set programs.

Parse and emit the aspif intermediate format, compile a small ground
text language, reify programs to facts, solve with a conflict-driven
engine extensible by theory propagators (difference logic included),
and run branch-and-bound, incremental, hybrid and guess-and-check
reasoning loops — all validated against brute-force semantic oracles.
"""

from . import aspif, dl, drivers, gtext, oracle, program, reify, solver
from .program import GroundProgram
from .solver import Solver

__version__ = "0.1.0"

__all__ = [
    "aspif",
    "dl",
    "drivers",
    "gtext",
    "oracle",
    "program",
    "reify",
    "solver",
    "GroundProgram",
    "Solver",
    "__version__",
]
