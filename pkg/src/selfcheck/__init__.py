"""Self-checking integer arithmetic with fault-injection coverage analysis."""
from .checked import (CheckedValue, CheckPolicy, CheckTechnique, Operator,
                      checked_add, checked_div, checked_mul, checked_sub,
                      checking, make_checked, observe, run_check)
from .engines import ArithmeticEngine, ReferenceEngine
from .words import Word

__version__ = "0.1.0"

__all__ = [
    "ArithmeticEngine", "CheckPolicy", "CheckTechnique", "CheckedValue",
    "Operator", "ReferenceEngine", "Word", "checked_add", "checked_div",
    "checked_mul", "checked_sub", "checking", "make_checked", "observe",
    "run_check",
]
