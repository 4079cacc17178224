"""Simulator for classical programs with time-travel registers."""

from .dsl import DslError, Program, parse, pretty, validate
from .interpreter import Limits, ReceivedAssignment, RunRecord, consistency_of, run
from .solver import SolveReport, compare_to_paper, resolve_domains, solve, verify

__version__ = "0.1.0"

__all__ = [
    "DslError", "Limits", "Program", "ReceivedAssignment", "RunRecord", "SolveReport",
    "compare_to_paper", "consistency_of", "parse", "pretty", "resolve_domains", "run",
    "solve", "validate", "verify",
]
