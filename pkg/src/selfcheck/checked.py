"""Checked integers: values that verify every operation by an inverse control.

``CheckedValue`` carries an n-bit two's-complement pattern and a sticky error
bit.  Each arithmetic operation runs the nominal operation on an engine, runs
the control operation(s) selected by the policy, and sets the error bit when
a control fails or either operand was already flagged.

The control recipes per operator (``op1``, ``op2`` operands, ``ris`` result):

=====  =========================================  ===============================================
op     tech1                                      tech2
=====  =========================================  ===============================================
add    op2' = ris - op1;  op2 == op2'             op1' = ris - op2;  op1 == op1'
sub    op1' = ris + op2;  op1 == op1'             ris' = op2 - op1;  0 == ris + ris'
mul    ris' = (-op1) * op2;  0 == ris + ris'      ris' = op1 * (-op2);  0 == ris + ris'
div    op1' = ris * op2 + rem;  op1 == op1'       op1' = (-ris) * op2 - rem;  0 == op1 + op1'
=====  =========================================  ===============================================

``both`` runs the two controls and fails if either does; division has no
``both``.  ``rem`` is ``op1 % op2`` computed by the control itself on the
checking engine.  Reusing the remainder of the nominal divrem would let a
faulty restoring divider pass its own check: a wrong restore decision keeps
``q * b + r == a`` modulo ``2**n``.
"""
from __future__ import annotations

import contextlib
import functools
import contextvars
import enum
from dataclasses import dataclass
from typing import Callable, NamedTuple, Optional

import numpy as np

from .words import DivisionByZero, DivisionOverflow
from .engines import ArithmeticEngine, ReferenceEngine
from .words import check_width, min_signed, to_signed, wrap


class CheckTechnique(str, enum.Enum):
    TECH1 = "tech1"
    TECH2 = "tech2"
    BOTH = "both"


class Operator(str, enum.Enum):
    ADD = "add"
    SUB = "sub"
    MUL = "mul"
    DIV = "div"

    @property
    def symbol(self) -> str:
        return {"add": "+", "sub": "-", "mul": "*", "div": "/"}[self.value]

    @classmethod
    def parse(cls, text) -> "Operator":
        if isinstance(text, Operator):
            return text
        aliases = {"+": "add", "-": "sub", "−": "sub", "*": "mul", "×": "mul",
                   "x": "mul", "/": "div", "÷": "div"}
        return cls(aliases.get(text, text))


@dataclass(frozen=True)
class CheckPolicy:
    """Which technique guards each operator."""

    add: CheckTechnique = CheckTechnique.BOTH
    sub: CheckTechnique = CheckTechnique.BOTH
    mul: CheckTechnique = CheckTechnique.BOTH
    div: CheckTechnique = CheckTechnique.TECH2

    def __post_init__(self):
        for name in ("add", "sub", "mul", "div"):
            object.__setattr__(self, name, CheckTechnique(getattr(self, name)))
        if self.div is CheckTechnique.BOTH:
            raise ValueError("division has no 'both' technique")
        # control functions per operator, resolved once for the hot path
        object.__setattr__(self, "_controls", {
            op: tuple(CHECKS[op, t].control for t in _techs(getattr(self, op.value)))
            for op in Operator})

    @classmethod
    def uniform(cls, tech) -> "CheckPolicy":
        """Same technique everywhere; division falls back to tech2 under 'both'."""
        tech = CheckTechnique(tech)
        div = CheckTechnique.TECH2 if tech is CheckTechnique.BOTH else tech
        return cls(tech, tech, tech, div)

    def technique(self, op) -> CheckTechnique:
        return getattr(self, Operator.parse(op).value)


class CheckDefinition(NamedTuple):
    op: Operator
    technique: CheckTechnique
    recipe: str
    control: Callable


def _add_t1(e, op1, op2, ris, rem):
    return e.sub(ris, op1) == op2


def _add_t2(e, op1, op2, ris, rem):
    return e.sub(ris, op2) == op1


def _sub_t1(e, op1, op2, ris, rem):
    return e.add(ris, op2) == op1


def _sub_t2(e, op1, op2, ris, rem):
    return e.add(ris, e.sub(op2, op1)) == 0


def _mul_t1(e, op1, op2, ris, rem):
    return e.add(ris, e.mul(e.neg(op1), op2)) == 0


def _mul_t2(e, op1, op2, ris, rem):
    return e.add(ris, e.mul(op1, e.neg(op2))) == 0


def _div_t1(e, op1, op2, ris, rem):
    if rem is None:
        rem = e.divrem(op1, op2)[1]
    return e.add(e.mul(ris, op2), rem) == op1


def _div_t2(e, op1, op2, ris, rem):
    if rem is None:
        rem = e.divrem(op1, op2)[1]
    return e.add(op1, e.sub(e.mul(e.neg(ris), op2), rem)) == 0


T1, T2 = CheckTechnique.TECH1, CheckTechnique.TECH2
CHECKS = {
    (Operator.ADD, T1): CheckDefinition(Operator.ADD, T1, "op2' = ris - op1; op2 == op2'", _add_t1),
    (Operator.ADD, T2): CheckDefinition(Operator.ADD, T2, "op1' = ris - op2; op1 == op1'", _add_t2),
    (Operator.SUB, T1): CheckDefinition(Operator.SUB, T1, "op1' = ris + op2; op1 == op1'", _sub_t1),
    (Operator.SUB, T2): CheckDefinition(Operator.SUB, T2, "ris' = op2 - op1; 0 == ris + ris'", _sub_t2),
    (Operator.MUL, T1): CheckDefinition(Operator.MUL, T1, "ris' = (-op1) * op2; 0 == ris + ris'", _mul_t1),
    (Operator.MUL, T2): CheckDefinition(Operator.MUL, T2, "ris' = op1 * (-op2); 0 == ris + ris'", _mul_t2),
    (Operator.DIV, T1): CheckDefinition(Operator.DIV, T1, "op1' = ris * op2 + rem; op1 == op1'", _div_t1),
    (Operator.DIV, T2): CheckDefinition(Operator.DIV, T2, "op1' = (-ris) * op2 - rem; 0 == op1 + op1'", _div_t2),
}


def _techs(tech: CheckTechnique):
    return (T1, T2) if tech is CheckTechnique.BOTH else (tech,)


DEFAULT_POLICY = CheckPolicy()


def run_check(op, tech, op1, op2, ris, rem=None, engine: ArithmeticEngine = None):
    """True iff every control enabled by ``tech`` passes.

    For division, ``rem`` overrides the remainder the control would otherwise
    compute on ``engine``.  Works lane-wise when the operands are numpy
    arrays.
    """
    op = Operator.parse(op)
    tech = CheckTechnique(tech)
    if op is Operator.DIV and tech is CheckTechnique.BOTH:
        raise ValueError("division has no 'both' technique")
    ok = True
    for t in _techs(tech):
        ok = ok & CHECKS[op, t].control(engine, op1, op2, ris, rem)
    if isinstance(ok, np.ndarray):
        return ok
    return bool(ok)


# --- checked values -------------------------------------------------------

@dataclass(frozen=True)
class CheckedValue:
    """An n-bit pattern with its sticky error bit.

    ``value`` may also be a numpy array of lanes (with ``error`` a boolean
    array of the same shape) when a computation is batched.
    """

    value: int
    error: bool
    width: int

    def __post_init__(self):
        check_width(self.width)
        if not isinstance(self.error, np.ndarray):
            object.__setattr__(self, "error", bool(self.error))

    @property
    def signed(self):
        return to_signed(self.value, self.width)

    # operators use the ambient policy/engine, see ``checking``
    def _apply(self, fn, other, reflected=False):
        other = _promote(other, self)
        if other is NotImplemented:
            return NotImplemented
        x, y = (other, self) if reflected else (self, other)
        return fn(x, y, *_ambient(self.width))

    def __add__(self, other):
        return self._apply(checked_add, other)

    def __radd__(self, other):
        return self._apply(checked_add, other, True)

    def __sub__(self, other):
        return self._apply(checked_sub, other)

    def __rsub__(self, other):
        return self._apply(checked_sub, other, True)

    def __mul__(self, other):
        return self._apply(checked_mul, other)

    def __rmul__(self, other):
        return self._apply(checked_mul, other, True)

    def __floordiv__(self, other):
        return self._apply(checked_div, other)

    def __rfloordiv__(self, other):
        return self._apply(checked_div, other, True)

    __truediv__ = __floordiv__
    __rtruediv__ = __rfloordiv__

    def __neg__(self):
        return checked_sub(make_checked(0, self.width), self, *_ambient(self.width))


def make_checked(v, width: int) -> CheckedValue:
    return CheckedValue(wrap(v, width), False, width)


def observe(x: CheckedValue):
    return x.value, x.error


def _promote(other, like: CheckedValue) -> CheckedValue:
    if isinstance(other, CheckedValue):
        return other
    if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
        return make_checked(int(other), like.width)
    return NotImplemented


_policy = contextvars.ContextVar("selfcheck_policy", default=DEFAULT_POLICY)
_engine = contextvars.ContextVar("selfcheck_engine", default=None)


def _ambient(width):
    engine = _engine.get()
    if engine is None or engine.width != width:
        engine = _reference(width)
    return _policy.get(), engine


@contextlib.contextmanager
def checking(policy: Optional[CheckPolicy] = None, engine: Optional[ArithmeticEngine] = None):
    """Set the policy and engine used by ``CheckedValue`` operators."""
    tokens = []
    if policy is not None:
        tokens.append((_policy, _policy.set(policy)))
    if engine is not None:
        tokens.append((_engine, _engine.set(engine)))
    try:
        yield
    finally:
        for var, tok in reversed(tokens):
            var.reset(tok)


def _widths(x, y, engine):
    if not x.width == y.width == engine.width:
        raise ValueError(f"width mismatch: {x.width}, {y.width}, engine {engine.width}")


def _flag(ok, e1, e2):
    if isinstance(ok, np.ndarray) or isinstance(e1, np.ndarray) or isinstance(e2, np.ndarray):
        return ~np.asarray(ok, dtype=bool) | e1 | e2
    return not ok or bool(e1) or bool(e2)


def _result(value, error, width):
    # width is already validated on this path, skip __post_init__
    out = object.__new__(CheckedValue)
    out.__dict__.update(value=value, error=error, width=width)
    return out


@functools.lru_cache(maxsize=None)
def _reference(width):
    return ReferenceEngine(width)


def _checked(op, nominal, x, y, policy, engine, checker):
    if not x.width == y.width == engine.width:
        _widths(x, y, engine)
    a, b = x.value, y.value
    ris = nominal(a, b)
    ctrl = checker or engine
    err = x.error | y.error
    for control in policy._controls[op]:
        err = err | (control(ctrl, a, b, ris, None) ^ True)
    return _result(ris, err, x.width)


def checked_add(x, y, policy=DEFAULT_POLICY, engine=None, checker=None):
    engine = engine or _reference(x.width)
    return _checked(Operator.ADD, engine.add, x, y, policy, engine, checker)


def checked_sub(x, y, policy=DEFAULT_POLICY, engine=None, checker=None):
    engine = engine or _reference(x.width)
    return _checked(Operator.SUB, engine.sub, x, y, policy, engine, checker)


def checked_mul(x, y, policy=DEFAULT_POLICY, engine=None, checker=None):
    engine = engine or _reference(x.width)
    return _checked(Operator.MUL, engine.mul, x, y, policy, engine, checker)


def checked_div(x, y, policy=DEFAULT_POLICY, engine=None, checker=None):
    """Truncated division; divide-by-zero and MIN / -1 set the error bit.

    Division by zero yields value 0 and the overflow pair yields the most
    negative value, both flagged.  Lane arrays get the same treatment per
    lane.

    ``checker``, when given, runs the control operations instead of
    ``engine`` (a separate, trusted unit); the same applies to the other
    ``checked_*`` functions.
    """
    engine = engine or _reference(x.width)
    _widths(x, y, engine)
    a, b = x.value, y.value
    if isinstance(a, np.ndarray) or isinstance(b, np.ndarray):
        return _checked_div_lanes(x, y, policy, engine, checker)
    try:
        ris, _ = engine.divrem(a, b)
    except DivisionByZero:
        return CheckedValue(0, True, x.width)
    except DivisionOverflow:
        return CheckedValue(min_signed(x.width), True, x.width)
    ok = run_check(Operator.DIV, policy.div, a, b, ris, None, checker or engine)
    return CheckedValue(ris, _flag(ok, x.error, y.error), x.width)


def _checked_div_lanes(x, y, policy, engine, checker):
    n = x.width
    a, b = np.broadcast_arrays(np.asarray(x.value, dtype=np.int64),
                               np.asarray(y.value, dtype=np.int64))
    zero = b == 0
    overflow = (a == min_signed(n)) & (b == (1 << n) - 1)
    bad = zero | overflow
    # park the bad lanes on a harmless pair so no unit sees them
    sa, sb = np.where(bad, 0, a), np.where(bad, 1, b)
    ris, _ = engine.divrem(sa, sb)
    ok = run_check(Operator.DIV, policy.div, sa, sb, ris, None, checker or engine)
    value = np.where(zero, 0, np.where(overflow, min_signed(n), ris))
    return CheckedValue(value, _flag(ok, x.error, y.error) | bad, n)
