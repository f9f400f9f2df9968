"""Fixed-width two's-complement words.

Every unit in the toolkit passes operands around as unsigned bit patterns
(``0 <= pattern < 2**width``).  Helpers here accept plain ints or numpy
integer arrays interchangeably.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MIN_WIDTH = 1
MAX_WIDTH = 32


def check_width(width: int) -> int:
    if not isinstance(width, (int, np.integer)) or isinstance(width, bool):
        raise TypeError(f"width must be an int, got {type(width).__name__}")
    if not MIN_WIDTH <= width <= MAX_WIDTH:
        raise ValueError(f"width {width} out of range {MIN_WIDTH}..{MAX_WIDTH}")
    return int(width)


def mask(width: int) -> int:
    return (1 << width) - 1


def wrap(value, width: int):
    """Reduce ``value`` to its canonical ``width``-bit pattern."""
    return value & mask(width)


def to_signed(pattern, width: int):
    """Interpret a bit pattern as a two's-complement integer."""
    sign = 1 << (width - 1)
    return (pattern ^ sign) - sign


def min_signed(width: int) -> int:
    """Bit pattern of the most negative value."""
    return 1 << (width - 1)


def as_int(x):
    """Collapse 0-d numpy results back to Python ints; leave arrays alone."""
    if isinstance(x, np.ndarray) and x.ndim > 0:
        return x
    return int(x)


class DivisionByZero(ZeroDivisionError):
    pass


class DivisionOverflow(ArithmeticError):
    """Most negative value divided by -1."""


def check_divisor(x: int, y: int, width: int) -> None:
    if y == 0:
        raise DivisionByZero("division by zero")
    if x == 1 << (width - 1) and y == mask(width):
        raise DivisionOverflow(f"{to_signed(x, width)} / -1 overflows {width} bits")


@dataclass(frozen=True)
class Word:
    bits: int
    width: int

    def __post_init__(self):
        check_width(self.width)
        if not 0 <= self.bits <= mask(self.width):
            raise ValueError(f"bit pattern {self.bits:#x} does not fit in {self.width} bits")

    @classmethod
    def of(cls, value: int, width: int) -> "Word":
        """Build a word from any integer, reducing modulo 2**width."""
        check_width(width)
        return cls(int(value) & mask(width), width)

    @property
    def signed(self) -> int:
        return to_signed(self.bits, self.width)

    def bit(self, k: int) -> int:
        return (self.bits >> k) & 1

    def __int__(self) -> int:
        return self.bits

    def __invert__(self) -> "Word":
        return Word(self.bits ^ mask(self.width), self.width)

    def __str__(self) -> str:
        return format(self.bits, f"0{self.width}b")
