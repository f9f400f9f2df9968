"""Single full-adder faults.

A faulty adder chain contains exactly one faulty cell.  The cell is the usual
two-half-adder full adder::

    x     = a XOR b          g     = a AND b
    sum   = x XOR cin        p     = x AND cin
    carry = g OR p

Two kinds of fault live on that cell:

* stem faults: one of the eight signals above stuck at 0 or 1, active on
  every evaluation of the cell;
* minterm faults: one output line forced to a value, but only when the cell
  inputs equal a given ``(a, b, cin)`` combination.

Each fault compiles down to a 16-bit truth-table code (bits ``2m`` and
``2m+1`` hold sum and carry for minterm ``m = a<<2 | b<<1 | cin``), which is
what the fast chain models consume.
"""
from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from ..words import check_width

STEM_LINES = ("a", "b", "cin", "x", "g", "p", "sum", "carry")
OUTPUT_LINES = ("sum", "carry")
MINTERMS = tuple(itertools.product((0, 1), repeat=3))

FAULTS_PER_CELL = 32


class FaultModel(str, enum.Enum):
    """Which 32 faults make up one cell's fault universe."""

    #: 16 stem stuck-at faults + 16 single-minterm output inversions.
    HYBRID = "hybrid"
    #: 8 minterms x {sum, carry} x {forced 0, forced 1}; half are no-ops.
    MINTERM = "minterm"


@dataclass(frozen=True)
class FaultDescriptor:
    """One injectable fault on cell ``cell_index`` (0 = least significant).

    ``minterm`` is ``None`` for stem faults, which fire on every evaluation;
    otherwise ``line`` must be an output line and the fault only fires when
    the cell inputs equal ``minterm``.
    """

    cell_index: int
    line: str
    forced_value: int
    minterm: Optional[tuple] = None

    def __post_init__(self):
        if self.cell_index < 0:
            raise ValueError("cell_index must be non-negative")
        if self.forced_value not in (0, 1):
            raise ValueError("forced_value must be 0 or 1")
        if self.minterm is None:
            if self.line not in STEM_LINES:
                raise ValueError(f"unknown line {self.line!r}")
        else:
            if self.line not in OUTPUT_LINES:
                raise ValueError("minterm faults act on 'sum' or 'carry' only")
            if tuple(self.minterm) not in MINTERMS:
                raise ValueError(f"bad minterm {self.minterm!r}")
            object.__setattr__(self, "minterm", tuple(int(v) for v in self.minterm))

    @property
    def output_line(self) -> str:
        return self.line

    def fires_on(self, a: int, b: int, cin: int) -> bool:
        """Whether a minterm fault is triggered by these cell inputs.

        Stem faults are always present, so this is True for them.
        """
        return self.minterm is None or self.minterm == (a, b, cin)

    @property
    def table_code(self) -> int:
        return _table_code(self.line, self.forced_value, self.minterm)

    def describe(self) -> str:
        where = "always" if self.minterm is None else "on a,b,cin=%d%d%d" % self.minterm
        return f"cell {self.cell_index}: {self.line} stuck-at-{self.forced_value} ({where})"


def full_adder(a: int, b: int, cin: int, fault: Optional[FaultDescriptor] = None,
               this_cell_matches: bool = True) -> tuple:
    """Evaluate one full-adder cell, applying ``fault`` if it targets this cell."""
    active = fault is not None and this_cell_matches
    stuck = fault.line if active and fault.minterm is None else None
    v = fault.forced_value if active else 0

    def sig(name, value):
        return v if stuck == name else value

    a, b, cin = sig("a", a), sig("b", b), sig("cin", cin)
    x = sig("x", a ^ b)
    g = sig("g", a & b)
    p = sig("p", x & cin)
    s = sig("sum", x ^ cin)
    c = sig("carry", g | p)
    if active and fault.minterm is not None and fault.minterm == (a, b, cin):
        if fault.line == "sum":
            s = fault.forced_value
        else:
            c = fault.forced_value
    return s, c


@lru_cache(maxsize=None)
def _table_code(line: str, forced_value: int, minterm) -> int:
    probe = FaultDescriptor(0, line, forced_value, minterm)
    code = 0
    for m, (a, b, cin) in enumerate(MINTERMS):
        s, c = full_adder(a, b, cin, probe)
        code |= (s << (2 * m)) | (c << (2 * m + 1))
    return code


def _good_code() -> int:
    code = 0
    for m, (a, b, cin) in enumerate(MINTERMS):
        s, c = full_adder(a, b, cin)
        code |= (s << (2 * m)) | (c << (2 * m + 1))
    return code


GOOD_CODE = _good_code()


def cell_faults(cell_index: int, model: FaultModel = FaultModel.HYBRID) -> list:
    """The 32 faults of one cell, in a fixed order."""
    model = FaultModel(model)
    out = []
    if model is FaultModel.HYBRID:
        for line in STEM_LINES:
            for v in (0, 1):
                out.append(FaultDescriptor(cell_index, line, v))
        for m in MINTERMS:
            s, c = full_adder(*m)
            out.append(FaultDescriptor(cell_index, "sum", 1 - s, m))
            out.append(FaultDescriptor(cell_index, "carry", 1 - c, m))
    else:
        for m in MINTERMS:
            for line in OUTPUT_LINES:
                for v in (0, 1):
                    out.append(FaultDescriptor(cell_index, line, v, m))
    assert len(out) == FAULTS_PER_CELL
    return out


UNIT_KINDS = ("adder", "subtractor", "multiplier", "divider")


def enumerate_faults(width: int, unit_kind: str = "adder",
                     model: FaultModel = FaultModel.HYBRID) -> list:
    """All ``32 * width`` faults of an n-bit chain, cell 0 first.

    Multiplier and divider reuse the same ripple chain, so every unit kind
    shares one fault universe.
    """
    width = check_width(width)
    if unit_kind not in UNIT_KINDS:
        raise ValueError(f"unknown unit kind {unit_kind!r}")
    return [f for k in range(width) for f in cell_faults(k, model)]
