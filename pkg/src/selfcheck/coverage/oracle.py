"""Naive reference simulator for campaign cross-checks.

Deliberately slow and literal: every full-adder cell of every operation is
evaluated bit by bit from its own netlist, the multiplier and divider
schedules are spelled out step by step, and the control recipes are written
out again here instead of being shared with :mod:`selfcheck.checked`.  Only
meant for tiny widths.
"""
from __future__ import annotations

from collections import Counter

from ..bitsim.faults import FaultModel, enumerate_faults


def _cell(a, b, c, fault, k):
    if fault is None or fault.cell_index != k:
        return (a + b + c) & 1, (a + b + c) >> 1
    if fault.minterm is not None:
        s, co = (a + b + c) & 1, (a + b + c) >> 1
        if (a, b, c) == fault.minterm:
            if fault.line == "sum":
                s = fault.forced_value
            else:
                co = fault.forced_value
        return s, co
    net = {}

    def put(name, value):
        net[name] = fault.forced_value if name == fault.line else value
        return net[name]

    a = put("a", a)
    b = put("b", b)
    c = put("cin", c)
    x = put("x", 1 if a != b else 0)
    g = put("g", 1 if (a == 1 and b == 1) else 0)
    p = put("p", 1 if (x == 1 and c == 1) else 0)
    s = put("sum", 1 if x != c else 0)
    co = put("carry", 1 if (g == 1 or p == 1) else 0)
    return s, co


def _bits(v, n):
    return [(v >> i) & 1 for i in range(n)]


def _val(bits):
    return sum(bit << i for i, bit in enumerate(bits))


class NaiveUnit:
    """One n-bit ripple chain, optionally faulty, evaluated cell by cell."""

    def __init__(self, n, fault=None):
        self.n = n
        self.fault = fault

    def adder(self, x, y, cin):
        out = []
        c = cin
        for k, (xi, yi) in enumerate(zip(_bits(x, self.n), _bits(y, self.n))):
            s, c = _cell(xi, yi, c, self.fault, k)
            out.append(s)
        return _val(out), c

    def inv(self, v):
        return _val([1 - bit for bit in _bits(v, self.n)])

    def add(self, x, y):
        return self.adder(x, y, 0)[0]

    def sub(self, x, y):
        return self.adder(x, self.inv(y), 1)[0]

    def neg(self, x):
        return self.adder(self.inv(x), 0, 1)[0]

    def mul(self, x, y):
        acc = 0
        for i in range(self.n):
            partial = [0] * self.n
            if (y >> i) & 1:
                for j in range(self.n - i):
                    partial[i + j] = (x >> j) & 1
            acc = self.add(acc, _val(partial))
        return acc

    def divrem(self, x, y):
        n = self.n
        sx, sy = _signed(x, n), _signed(y, n)
        ax, ay = abs(sx), abs(sy)
        r = 0
        q = [0] * n
        for i in reversed(range(n)):
            r = ((r << 1) | ((ax >> i) & 1)) % (1 << n)
            trial, no_borrow = self.adder(r, self.inv(ay), 1)
            if no_borrow:
                r = trial
                q[i] = 1
        qv = _val(q)
        if (sx < 0) != (sy < 0):
            qv = (-qv) % (1 << n)
        if sx < 0:
            r = (-r) % (1 << n)
        return qv, r


def _signed(v, n):
    return v - (1 << n) if v >= 1 << (n - 1) else v


def exact(op, x, y, n):
    """Mathematically exact result reduced to n bits."""
    sx, sy = _signed(x, n), _signed(y, n)
    if op == "add":
        v = sx + sy
    elif op == "sub":
        v = sx - sy
    elif op == "mul":
        v = sx * sy
    else:
        q = abs(sx) // abs(sy)
        v = q if (sx >= 0) == (sy >= 0) else -q
    return v % (1 << n)


def controls_pass(op, tech, u, op1, op2, ris):
    """Evaluate the control recipe(s) on unit ``u``."""
    results = []
    rem = u.divrem(op1, op2)[1] if op == "div" else None
    if tech in ("tech1", "both"):
        if op == "add":
            results.append(u.sub(ris, op1) == op2)
        elif op == "sub":
            results.append(u.add(ris, op2) == op1)
        elif op == "mul":
            results.append(u.add(ris, u.mul(u.neg(op1), op2)) == 0)
        else:
            results.append(u.add(u.mul(ris, op2), rem) == op1)
    if tech in ("tech2", "both"):
        if op == "add":
            results.append(u.sub(ris, op2) == op1)
        elif op == "sub":
            results.append(u.add(ris, u.sub(op2, op1)) == 0)
        elif op == "mul":
            results.append(u.add(ris, u.mul(op1, u.neg(op2))) == 0)
        else:
            results.append(u.add(op1, u.sub(u.mul(u.neg(ris), op2), rem)) == 0)
    return all(results)


def naive_classify(op, tech, mode, n, fault, op1, op2):
    unit = NaiveUnit(n, fault)
    if op == "add":
        ris = unit.add(op1, op2)
    elif op == "sub":
        ris = unit.sub(op1, op2)
    elif op == "mul":
        ris = unit.mul(op1, op2)
    else:
        ris = unit.divrem(op1, op2)[0]
    checker = unit if mode == "same-unit" else NaiveUnit(n)
    ok = controls_pass(op, tech, checker, op1, op2, ris)
    wrong = ris != exact(op, op1, op2, n)
    if wrong:
        return "masked" if ok else "detected_erroneous"
    return "correct_silent" if ok else "detected_silent"


def naive_counts(op, tech, mode, n, model=FaultModel.HYBRID):
    """Per-class counts over the whole situation space, plus skipped pairs."""
    counts = Counter()
    masked = set()
    pairs = 1 << (2 * n)
    for fi, fault in enumerate(enumerate_faults(n, model=model)):
        for op1 in range(1 << n):
            for op2 in range(1 << n):
                if op == "div" and (op2 == 0 or (op1 == 1 << (n - 1) and op2 == (1 << n) - 1)):
                    counts["skipped"] += 1
                    continue
                cls = naive_classify(op, tech, mode, n, fault, op1, op2)
                counts[cls] += 1
                if cls == "masked":
                    masked.add(fi * pairs + (op1 << n) + op2)
    return counts, masked
