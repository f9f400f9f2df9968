from __future__ import annotations

import numpy as np

from ..engines import ArithmeticEngine
from ..words import as_int, check_width, mask
from .faults import GOOD_CODE, FaultDescriptor
from .units import (check_divisor, chain_add, chain_divrem, chain_mul,
                    chain_neg, chain_sub)


class FaultyEngine(ArithmeticEngine):
    """All operations share one ripple chain carrying at most one fault.

    The fault is permanent, so it is active in the nominal operation and in
    any control operation run on the same engine.  Engines are stateless and
    may be shared between threads.
    """

    unit_kind = "chain"

    def __init__(self, width: int, fault: FaultDescriptor = None):
        self.width = check_width(width)
        self.fault = fault
        if fault is None:
            self._cell, self._code = 0, GOOD_CODE
        else:
            if fault.cell_index >= self.width:
                raise ValueError(f"fault on cell {fault.cell_index} outside a {self.width}-bit chain")
            self._cell, self._code = fault.cell_index, fault.table_code

    @classmethod
    def lanes(cls, width: int, cells, codes) -> "FaultyEngine":
        """Engine whose fault differs per lane: ``cells[i]``/``codes[i]`` apply to lane i."""
        eng = cls(width)
        eng.fault = "lanes"
        eng._cell = np.asarray(cells, dtype=np.int64)
        eng._code = np.asarray(codes, dtype=np.int64)
        return eng

    def __repr__(self):
        return f"FaultyEngine(width={self.width}, fault={self.fault!r})"

    def add(self, a, b):
        return as_int(chain_add(a, b, 0, self.width, self._cell, self._code)[0])

    def sub(self, a, b):
        return as_int(chain_sub(a, b, self.width, self._cell, self._code))

    def neg(self, a):
        return as_int(chain_neg(a, self.width, self._cell, self._code))

    def mul(self, a, b):
        return as_int(chain_mul(a, b, self.width, self._cell, self._code))

    def divrem(self, a, b):
        if not isinstance(a, np.ndarray) and not isinstance(b, np.ndarray):
            check_divisor(a, b, self.width)
        q, r = chain_divrem(a, b, self.width, self._cell, self._code)
        return as_int(q), as_int(r)
