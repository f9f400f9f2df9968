"""Arithmetic engines: the functional units a checked operation runs on.

An engine works on ``width``-bit patterns (ints or numpy int64 lane arrays)
and returns patterns.  :class:`ReferenceEngine` is exact modular host
arithmetic; :class:`selfcheck.bitsim.FaultyEngine` routes every operation
through a simulated ripple chain that may carry one fault.

Scalar ``divrem`` raises :class:`~selfcheck.words.DivisionByZero` or
:class:`~selfcheck.words.DivisionOverflow` on its two precondition
violations; lane arrays never raise and callers mask the bad lanes.
"""
from __future__ import annotations

import abc

import numpy as np

from .words import check_divisor, check_width, mask, to_signed


class ArithmeticEngine(abc.ABC):
    width: int

    @abc.abstractmethod
    def add(self, a, b): ...

    @abc.abstractmethod
    def sub(self, a, b): ...

    @abc.abstractmethod
    def neg(self, a): ...

    @abc.abstractmethod
    def mul(self, a, b): ...

    @abc.abstractmethod
    def divrem(self, a, b): ...


class ReferenceEngine(ArithmeticEngine):
    """Trusted two's-complement arithmetic modulo ``2**width``."""

    def __init__(self, width: int):
        self.width = check_width(width)
        self.mask = mask(self.width)

    def __repr__(self):
        return f"ReferenceEngine(width={self.width})"

    def __eq__(self, other):
        return type(other) is ReferenceEngine and other.width == self.width

    def __hash__(self):
        return hash(("ref", self.width))

    def add(self, a, b):
        return (a + b) & self.mask

    def sub(self, a, b):
        return (a - b) & self.mask

    def neg(self, a):
        return -a & self.mask

    def mul(self, a, b):
        if self.width > 31 and (isinstance(a, np.ndarray) or isinstance(b, np.ndarray)):
            # int64 would overflow; uint64 wraps modulo 2**64, which keeps the low word.
            prod = np.asarray(a).astype(np.uint64) * np.asarray(b).astype(np.uint64)
            return (prod & np.uint64(self.mask)).astype(np.int64)
        return (a * b) & self.mask

    def divrem(self, a, b):
        n = self.width
        if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
            sa = to_signed(np.asarray(a, dtype=np.int64), n)
            sb = to_signed(np.asarray(b, dtype=np.int64), n)
            safe = np.where(sb == 0, 1, sb)
            mag = np.abs(sa) // np.abs(safe)
            q = np.where((sa < 0) != (safe < 0), -mag, mag)
            r = sa - q * safe
            return q & self.mask, r & self.mask
        check_divisor(a, b, n)
        sa, sb = to_signed(a, n), to_signed(b, n)
        mag = abs(sa) // abs(sb)
        q = -mag if (sa < 0) != (sb < 0) else mag
        return q & self.mask, (sa - q * sb) & self.mask
