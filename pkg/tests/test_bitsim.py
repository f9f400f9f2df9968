import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from selfcheck.bitsim import (FAULTS_PER_CELL, GOOD_CODE, FaultDescriptor, FaultModel,
                              FaultyEngine, cell_faults, enumerate_faults, full_adder,
                              negate, restoring_div, ripple_add, ripple_sub, shiftadd_mul)
from selfcheck.bitsim.units import chain_add
from selfcheck.coverage.oracle import NaiveUnit
from selfcheck.words import DivisionByZero, DivisionOverflow, Word, to_signed

MODELS = list(FaultModel)


def W(v, n):
    return Word.of(v, n)


# --- full adder ---------------------------------------------------------------

def test_full_adder_truth_table():
    for a, b, c in itertools.product((0, 1), repeat=3):
        assert full_adder(a, b, c) == ((a + b + c) & 1, (a + b + c) >> 1)


def test_minterm_fault_forces_output_only_on_its_minterm():
    f = FaultDescriptor(0, "sum", 1, (1, 1, 0))
    assert full_adder(1, 1, 0) == (0, 1)
    assert full_adder(1, 1, 0, f) == (1, 1)
    assert full_adder(0, 1, 0, f) == (1, 0)
    assert full_adder(1, 1, 0, f, this_cell_matches=False) == (0, 1)


def test_stem_fault_acts_on_every_evaluation():
    f = FaultDescriptor(0, "g", 0)  # generate stuck at 0: 1+1 loses its carry
    assert full_adder(1, 1, 0, f) == (0, 0)
    assert full_adder(1, 1, 1, f) == (1, 0)
    assert full_adder(1, 0, 1, f) == (0, 1)


def test_descriptor_validation():
    with pytest.raises(ValueError):
        FaultDescriptor(-1, "sum", 0)
    with pytest.raises(ValueError):
        FaultDescriptor(0, "sum", 2)
    with pytest.raises(ValueError):
        FaultDescriptor(0, "nope", 0)
    with pytest.raises(ValueError):
        FaultDescriptor(0, "x", 0, (0, 0, 0))
    with pytest.raises(ValueError):
        FaultDescriptor(0, "sum", 0, (0, 0, 2))


def test_good_code_is_the_plain_truth_table():
    code = 0
    for m, (a, b, c) in enumerate(itertools.product((0, 1), repeat=3)):
        total = a + b + c
        code |= ((total & 1) << (2 * m)) | ((total >> 1) << (2 * m + 1))
    assert GOOD_CODE == code


@pytest.mark.parametrize("model", MODELS)
def test_table_code_matches_gate_evaluation(model):
    for f in cell_faults(0, model):
        for m, (a, b, c) in enumerate(itertools.product((0, 1), repeat=3)):
            s, co = full_adder(a, b, c, f)
            assert (f.table_code >> (2 * m)) & 1 == s
            assert (f.table_code >> (2 * m + 1)) & 1 == co


def test_fault_counts():
    assert len(enumerate_faults(1)) == 32
    assert len(enumerate_faults(4)) == 128
    assert FAULTS_PER_CELL == 32
    for kind in ("adder", "subtractor", "multiplier", "divider"):
        assert enumerate_faults(3, kind) == enumerate_faults(3)
    with pytest.raises(ValueError):
        enumerate_faults(3, "shifter")


@pytest.mark.parametrize("model", MODELS)
def test_enumeration_is_deterministic_and_distinct(model):
    first = enumerate_faults(3, model=model)
    assert first == enumerate_faults(3, model=model)
    assert len(set(first)) == len(first)
    assert [f.cell_index for f in first] == sorted(f.cell_index for f in first)


def test_hybrid_cell_has_no_null_faults():
    assert all(f.table_code != GOOD_CODE for f in cell_faults(0, FaultModel.HYBRID))


def test_minterm_model_has_sixteen_null_faults():
    nulls = [f for f in cell_faults(0, FaultModel.MINTERM) if f.table_code == GOOD_CODE]
    assert len(nulls) == 16


# --- ripple units ---------------------------------------------------------------

def test_ripple_add_examples():
    s, cout, ovf = ripple_add(W(0b0101, 4), W(0b0011, 4))
    assert (s.bits, cout, ovf) == (0b1000, 0, 1)
    f = FaultDescriptor(0, "sum", 1, (1, 1, 0))
    s, cout, _ = ripple_add(W(1, 2), W(1, 2), fault=f)
    assert (s.bits, cout) == (0b11, 0)


@pytest.mark.parametrize("model", MODELS)
def test_fault_that_never_fires_leaves_zero_sum(model):
    for f in enumerate_faults(4, model=model):
        if f.minterm is not None and f.minterm != (0, 0, 0):
            assert ripple_add(W(0, 4), W(0, 4), fault=f) == (W(0, 4), 0, 0)


def test_sub_neg_mul_div_examples():
    assert ripple_sub(W(5, 4), W(3, 4)).bits == 2
    assert ripple_sub(W(3, 4), W(5, 4)).bits == 14
    assert negate(W(5, 4)).bits == 11
    assert negate(W(0, 4)).bits == 0
    assert negate(W(8, 4)).bits == 8
    assert shiftadd_mul(W(3, 8), W(5, 8)).bits == 15
    assert shiftadd_mul(W(5, 4), W(6, 4)).bits == 14
    q, r = restoring_div(W(7, 8), W(2, 8))
    assert (q.bits, r.bits) == (3, 1)
    q, r = restoring_div(W(-7, 8), W(2, 8))
    assert (q.signed, r.signed) == (-3, -1)


def test_division_preconditions():
    with pytest.raises(DivisionByZero):
        restoring_div(W(3, 4), W(0, 4))
    with pytest.raises(DivisionOverflow):
        restoring_div(W(8, 4), W(15, 4))


def test_width_mismatch_and_fault_outside_chain():
    with pytest.raises(ValueError):
        ripple_add(W(1, 4), W(1, 5))
    with pytest.raises(ValueError):
        ripple_add(W(1, 4), W(1, 4), fault=FaultDescriptor(4, "sum", 0))


def test_overflow_flag_on_signed_extremes():
    assert ripple_add(W(7, 4), W(1, 4))[2] == 1
    assert ripple_add(W(-8, 4), W(-1, 4))[2] == 1
    assert ripple_add(W(-1, 4), W(1, 4))[2] == 0


@given(st.integers(1, 16), st.data())
def test_fault_free_add_sub_neg_are_exact(n, data):
    a = data.draw(st.integers(0, 2 ** n - 1))
    b = data.draw(st.integers(0, 2 ** n - 1))
    s, cout, ovf = ripple_add(W(a, n), W(b, n))
    assert s.bits == (a + b) % 2 ** n
    assert cout == (a + b) >> n
    sa, sb = to_signed(a, n), to_signed(b, n)
    assert ovf == int(not -(2 ** (n - 1)) <= sa + sb < 2 ** (n - 1))
    assert ripple_sub(W(a, n), W(b, n)).bits == (a - b) % 2 ** n
    assert negate(W(a, n)).bits == (-a) % 2 ** n


@given(st.integers(1, 12), st.data())
def test_fault_free_mul_div_are_exact(n, data):
    a = data.draw(st.integers(0, 2 ** n - 1))
    b = data.draw(st.integers(0, 2 ** n - 1))
    assert shiftadd_mul(W(a, n), W(b, n)).bits == (a * b) % 2 ** n
    sa, sb = to_signed(a, n), to_signed(b, n)
    if sb == 0 or (sa == -(2 ** (n - 1)) and sb == -1):
        return
    q, r = restoring_div(W(a, n), W(b, n))
    expect_q = abs(sa) // abs(sb) * (1 if (sa < 0) == (sb < 0) else -1)
    assert q.signed == expect_q
    assert r.signed == sa - expect_q * sb


def test_fault_free_engine_exhaustive_small_widths():
    for n in range(1, 7):
        e = FaultyEngine(n)
        a, b = np.meshgrid(np.arange(2 ** n), np.arange(2 ** n))
        a, b = a.ravel(), b.ravel()
        m = 2 ** n - 1
        assert np.array_equal(e.add(a, b), (a + b) & m)
        assert np.array_equal(e.sub(a, b), (a - b) & m)
        assert np.array_equal(e.neg(a), (-a) & m)
        assert np.array_equal(e.mul(a, b), (a * b) & m)


@pytest.mark.parametrize("model", MODELS)
@pytest.mark.parametrize("n", [1, 2])
def test_chain_units_match_naive_cell_walk(model, n):
    """Every operation, fault and operand pair at n <= 2 against the naive unit."""
    for f in enumerate_faults(n, model=model):
        fast = FaultyEngine(n, f)
        slow = NaiveUnit(n, f)
        for a in range(2 ** n):
            assert fast.neg(a) == slow.neg(a)
            for b in range(2 ** n):
                assert fast.add(a, b) == slow.add(a, b)
                assert fast.sub(a, b) == slow.sub(a, b)
                assert fast.mul(a, b) == slow.mul(a, b)
                if b != 0 and not (a == 2 ** (n - 1) and b == 2 ** n - 1):
                    assert fast.divrem(a, b) == slow.divrem(a, b)


@settings(max_examples=200)
@given(st.integers(1, 8), st.data())
def test_chain_matches_naive_cell_walk_wider(n, data):
    faults = enumerate_faults(n)
    f = faults[data.draw(st.integers(0, len(faults) - 1))]
    a = data.draw(st.integers(0, 2 ** n - 1))
    b = data.draw(st.integers(0, 2 ** n - 1))
    cin = data.draw(st.integers(0, 1))
    assert chain_add(a, b, cin, n, f.cell_index, f.table_code)[:2] == NaiveUnit(n, f).adder(a, b, cin)
    fast, slow = FaultyEngine(n, f), NaiveUnit(n, f)
    assert fast.mul(a, b) == slow.mul(a, b)
    if b != 0 and not (a == 2 ** (n - 1) and b == 2 ** n - 1):
        assert fast.divrem(a, b) == slow.divrem(a, b)


def test_lane_engine_matches_scalar_engines():
    n = 5
    faults = enumerate_faults(n)
    rng = np.random.default_rng(7)
    idx = rng.integers(0, len(faults), 500)
    a = rng.integers(0, 2 ** n, 500)
    b = rng.integers(1, 2 ** n, 500)
    lanes = FaultyEngine.lanes(n, np.array([faults[i].cell_index for i in idx]),
                               np.array([faults[i].table_code for i in idx]))
    got = lanes.mul(a, b)
    for k in range(500):
        assert got[k] == FaultyEngine(n, faults[idx[k]]).mul(int(a[k]), int(b[k]))


def test_single_fault_locality():
    """A minterm fault whose input combination never shows up changes nothing."""
    n = 4
    for f in enumerate_faults(n, model=FaultModel.MINTERM):
        for a in range(2 ** n):
            for b in range(2 ** n):
                trace = []
                c = 0
                for k in range(n):
                    ak, bk = (a >> k) & 1, (b >> k) & 1
                    if k == f.cell_index:
                        trace.append((ak, bk, c))
                    c = (ak + bk + c) >> 1
                if f.minterm not in trace:
                    assert FaultyEngine(n, f).add(a, b) == (a + b) % 2 ** n
