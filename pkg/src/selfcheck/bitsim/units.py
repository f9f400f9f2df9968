"""Bit-level datapath units built on one ripple-carry chain.

The ``chain_*`` functions work on raw bit patterns and accept either Python
ints or numpy int64 arrays (one lane per element).  The faulty cell and its
truth-table code may also be arrays, so one call can evaluate many
(fault, operand) situations at once.

Cells other than the faulty one behave exactly, so the chain is evaluated as
``low + faulty cell + high`` instead of stepping through every cell; the
naive per-cell simulator in :mod:`selfcheck.coverage.oracle` cross-checks
this against a literal truth-table walk.
"""
from __future__ import annotations

import numpy as np

from ..words import (DivisionByZero, DivisionOverflow, Word, as_int,  # noqa: F401
                     check_divisor, mask, to_signed)
from .faults import GOOD_CODE, FaultDescriptor


def _where(cond, a, b):
    if isinstance(cond, np.ndarray):
        return np.where(cond, a, b)
    return a if cond else b


def chain_add(x, y, cin, width: int, cell=0, code=GOOD_CODE):
    """Ripple add of two ``width``-bit patterns with one (possibly) faulty cell.

    Returns ``(sum, cout, carry_into_msb)``.
    """
    lo_mask = (1 << cell) - 1
    low = (x & lo_mask) + (y & lo_mask) + cin
    ck = low >> cell
    m = (((x >> cell) & 1) << 2) | (((y >> cell) & 1) << 1) | ck
    sk = (code >> (2 * m)) & 1
    c1 = (code >> (2 * m + 1)) & 1
    hw = width - 1 - cell
    hi = (x >> (cell + 1)) + (y >> (cell + 1)) + c1
    result = (low & lo_mask) | (sk << cell) | ((hi & ((1 << hw) - 1)) << (cell + 1))
    cout = hi >> hw
    top = width - 1
    c_msb = _where(cell == top, ck, ((result ^ x ^ y) >> top) & 1)
    return result, cout, c_msb


def chain_sub(x, y, width: int, cell=0, code=GOOD_CODE):
    """``x - y``: fault-free 1's complement of ``y`` fed to the chain with cin=1."""
    return chain_add(x, y ^ mask(width), 1, width, cell, code)[0]


def chain_neg(x, width: int, cell=0, code=GOOD_CODE):
    return chain_add(x ^ mask(width), 0, 1, width, cell, code)[0]


def chain_mul(x, y, width: int, cell=0, code=GOOD_CODE):
    """Low word of ``x * y`` by ``width`` shift-and-add steps on the chain.

    Partial-product gating is fault-free; every step, including those with a
    zero partial product, runs through the chain.
    """
    m = mask(width)
    acc = x & 0  # zero of the right shape/type
    for i in range(width):
        pp = (((y >> i) & 1) * x << i) & m
        acc = chain_add(acc, pp, 0, width, cell, code)[0]
    return acc


def chain_divrem(x, y, width: int, cell=0, code=GOOD_CODE):
    """Truncated signed division by restoring division on magnitudes.

    Trial subtractions use the chain and their carry-out decides restore;
    taking magnitudes and the final sign fix-up are fault-free.  Lanes with
    ``y == 0`` or the overflow pair produce meaningless values; callers
    filter them out.
    """
    m = mask(width)
    sx = to_signed(x, width)
    sy = to_signed(y, width)
    ax = abs(sx)
    ay = abs(sy)
    nb = ay ^ m
    rem = x & 0
    quo = x & 0
    for i in range(width - 1, -1, -1):
        rem = ((rem << 1) | ((ax >> i) & 1)) & m
        trial, cout, _ = chain_add(rem, nb, 1, width, cell, code)
        rem = _where(cout == 1, trial, rem)
        quo = quo | (cout << i)
    q = _where((sx < 0) != (sy < 0), (-quo) & m, quo)
    r = _where(sx < 0, (-rem) & m, rem)
    return q, r


def _fault_args(fault, width):
    if fault is None:
        return 0, GOOD_CODE
    if fault.cell_index >= width:
        raise ValueError(f"fault on cell {fault.cell_index} outside a {width}-bit chain")
    return fault.cell_index, fault.table_code


def _same_width(*words):
    widths = {w.width for w in words}
    if len(widths) != 1:
        raise ValueError(f"width mismatch: {sorted(widths)}")
    return widths.pop()


def ripple_add(a: Word, b: Word, cin: int = 0, fault: FaultDescriptor = None):
    """Return ``(sum, cout, overflow)`` of an n-cell ripple-carry adder."""
    n = _same_width(a, b)
    cell, code = _fault_args(fault, n)
    s, cout, c_msb = chain_add(a.bits, b.bits, cin, n, cell, code)
    return Word(as_int(s), n), as_int(cout), as_int(cout ^ c_msb)


def ripple_sub(a: Word, b: Word, fault: FaultDescriptor = None) -> Word:
    return ripple_add(a, ~b, 1, fault)[0]


def negate(x: Word, fault: FaultDescriptor = None) -> Word:
    return ripple_add(~x, Word(0, x.width), 1, fault)[0]


def shiftadd_mul(a: Word, b: Word, fault: FaultDescriptor = None) -> Word:
    n = _same_width(a, b)
    cell, code = _fault_args(fault, n)
    return Word(as_int(chain_mul(a.bits, b.bits, n, cell, code)), n)


def restoring_div(a: Word, b: Word, fault: FaultDescriptor = None):
    n = _same_width(a, b)
    check_divisor(a.bits, b.bits, n)
    cell, code = _fault_args(fault, n)
    q, r = chain_divrem(a.bits, b.bits, n, cell, code)
    return Word(as_int(q), n), Word(as_int(r), n)
