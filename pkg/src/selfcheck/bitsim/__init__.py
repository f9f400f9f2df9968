"""Bit-level models of the datapath units with injectable faults."""
from .engine import FaultyEngine
from .faults import (FAULTS_PER_CELL, GOOD_CODE, FaultDescriptor, FaultModel,
                     cell_faults, enumerate_faults, full_adder)
from .units import (DivisionByZero, DivisionOverflow, negate, restoring_div,
                    ripple_add, ripple_sub, shiftadd_mul)

__all__ = [
    "FAULTS_PER_CELL", "GOOD_CODE", "DivisionByZero", "DivisionOverflow",
    "FaultDescriptor", "FaultModel", "FaultyEngine", "cell_faults",
    "enumerate_faults", "full_adder", "negate", "restoring_div", "ripple_add",
    "ripple_sub", "shiftadd_mul",
]
