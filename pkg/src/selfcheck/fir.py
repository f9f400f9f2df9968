"""Integer FIR filter in three flavours plus fault campaigns and timing.

* ``fir_plain``: bare engine arithmetic.
* ``fir_checked``: every multiply and add is a ``checked_*`` operation on
  ``CheckedValue`` objects.
* ``fir_embedded``: the same checks written inline with no wrapper type.

All three accept a 1-D sequence of samples or a 2-D ``(runs, samples)``
numpy array, in which case each row is an independent run evaluated
lane-wise.  Samples before the start of the stream are zero.
"""
from __future__ import annotations

import os
import statistics
import time
from dataclasses import dataclass, field
from importlib import resources
from typing import NamedTuple, Optional, Sequence

import numpy as np

from .bitsim import FaultyEngine, enumerate_faults
from .checked import (CheckedValue, CheckPolicy, CheckTechnique, checked_add,
                      checked_mul)
from .engines import ReferenceEngine
from .words import check_width, mask

DEFAULT_WIDTH = 16
DEFAULT_LENGTH = 4096


class InputFileError(ValueError):
    pass


def read_int_file(path) -> list:
    """One decimal integer per line; blank lines and ``#`` comments skipped."""
    try:
        with open(path) as fh:
            lines = fh.readlines()
    except OSError as exc:
        raise InputFileError(f"cannot read {path}: {exc.strerror or exc}") from exc
    values = []
    for lineno, line in enumerate(lines, 1):
        text = line.split("#", 1)[0].strip()
        if not text:
            continue
        try:
            values.append(int(text, 10))
        except ValueError:
            raise InputFileError(f"{path}:{lineno}: not a decimal integer: {text!r}") from None
    return values


def default_taps(name: str = "taps16.txt") -> list:
    with resources.as_file(resources.files("selfcheck") / "data" / name) as p:
        return read_int_file(p)


@dataclass(frozen=True)
class FirConfig:
    taps: tuple = field(default_factory=lambda: tuple(default_taps()))
    width: int = DEFAULT_WIDTH
    input_length: int = DEFAULT_LENGTH
    policy: CheckPolicy = CheckPolicy()
    variant: str = "plain"

    def __post_init__(self):
        check_width(self.width)
        object.__setattr__(self, "taps", tuple(int(t) for t in self.taps))
        if not self.taps:
            raise ValueError("FIR needs at least one tap")
        lo, hi = -(1 << (self.width - 1)), (1 << (self.width - 1)) - 1
        bad = [t for t in self.taps if not lo <= t <= hi]
        if bad:
            raise ValueError(f"taps {bad} not representable in {self.width} bits")
        if self.variant not in ("plain", "checked", "embedded"):
            raise ValueError(f"unknown variant {self.variant!r}")

    @property
    def tap_patterns(self) -> list:
        return [t & mask(self.width) for t in self.taps]


def _stream(samples, width):
    m = mask(width)
    if isinstance(samples, np.ndarray) and samples.ndim == 2:
        return [samples[:, k] & m for k in range(samples.shape[1])]
    return [int(v) & m for v in samples]


def _stack(outputs, like):
    if isinstance(like, np.ndarray) and like.ndim == 2:
        return np.stack(outputs, axis=1)
    return outputs


def fir_plain(cfg: FirConfig, samples, engine=None):
    engine = engine or ReferenceEngine(cfg.width)
    taps = cfg.tap_patterns
    xs = _stream(samples, cfg.width)
    out = []
    for k in range(len(xs)):
        acc = engine.mul(taps[0], xs[k])
        for j in range(1, len(taps)):
            xv = xs[k - j] if k >= j else 0
            acc = engine.add(acc, engine.mul(taps[j], xv))
        out.append(acc)
    return _stack(out, samples)


def fir_checked(cfg: FirConfig, samples, engine=None, checker=None, flags=None):
    """Checked FIR; returns ``(outputs, error_flags)``.

    ``samples`` may hold ``CheckedValue`` items, or ``flags`` may mark input
    samples as already erroneous.
    """
    n = cfg.width
    engine = engine or ReferenceEngine(n)
    policy = cfg.policy
    if not isinstance(samples, np.ndarray) and samples and isinstance(samples[0], CheckedValue):
        xs = list(samples)
    else:
        vals = _stream(samples, n)
        fl = _stream_flags(flags, samples, len(vals))
        xs = [CheckedValue(v, e, n) for v, e in zip(vals, fl)]
    taps = [CheckedValue(t, False, n) for t in cfg.tap_patterns]
    zero = CheckedValue(0, False, n)
    out, err = [], []
    for k in range(len(xs)):
        acc = checked_mul(taps[0], xs[k], policy, engine, checker)
        for j in range(1, len(taps)):
            xv = xs[k - j] if k >= j else zero
            acc = checked_add(acc, checked_mul(taps[j], xv, policy, engine, checker),
                              policy, engine, checker)
        out.append(acc.value)
        err.append(acc.error)
    return _stack(out, samples), _stack_flags(err, samples)


def _stream_flags(flags, samples, length):
    if flags is None:
        return [False] * length
    if isinstance(flags, np.ndarray) and flags.ndim == 2:
        return [flags[:, k].astype(bool) for k in range(flags.shape[1])]
    return [bool(f) for f in flags]


def _stack_flags(err, like):
    if isinstance(like, np.ndarray) and like.ndim == 2:
        return np.stack([np.broadcast_to(e, like.shape[:1]) for e in err], axis=1)
    return [bool(e) for e in err]


def fir_embedded(cfg: FirConfig, samples, engine=None, checker=None, flags=None):
    """Same checks as :func:`fir_checked`, inlined on raw patterns."""
    n = cfg.width
    e = engine or ReferenceEngine(n)
    c = checker or e
    mul_t = cfg.policy.mul
    add_t = cfg.policy.add
    mul1 = mul_t is not CheckTechnique.TECH2
    mul2 = mul_t is not CheckTechnique.TECH1
    add1 = add_t is not CheckTechnique.TECH2
    add2 = add_t is not CheckTechnique.TECH1
    taps = cfg.tap_patterns
    xs = _stream(samples, n)
    xf = _stream_flags(flags, samples, len(xs))
    out, err = [], []
    for k in range(len(xs)):
        bad = False
        acc = 0
        for j in range(len(taps)):
            t = taps[j]
            if k >= j:
                xv = xs[k - j]
                bad = bad | xf[k - j]
            else:
                xv = 0
            p = e.mul(t, xv)
            if mul1:
                bad = bad | (c.add(p, c.mul(c.neg(t), xv)) != 0)
            if mul2:
                bad = bad | (c.add(p, c.mul(t, c.neg(xv))) != 0)
            if j == 0:
                acc = p
                continue
            s = e.add(acc, p)
            if add1:
                bad = bad | (c.sub(s, acc) != p)
            if add2:
                bad = bad | (c.sub(s, p) != acc)
            acc = s
        out.append(acc)
        err.append(bad)
    return _stack(out, samples), _stack_flags(err, samples)


VARIANTS = {"checked": fir_checked, "embedded": fir_embedded}


# --- fault campaign ----------------------------------------------------------

@dataclass
class FirCampaignReport:
    runs: int = 0
    erroneous_outputs: int = 0
    flagged_runs: int = 0
    flagged_erroneous: int = 0

    @property
    def end_to_end_detection(self) -> float:
        if not self.erroneous_outputs:
            return 1.0
        return self.flagged_erroneous / self.erroneous_outputs

    def __iadd__(self, other):
        self.runs += other.runs
        self.erroneous_outputs += other.erroneous_outputs
        self.flagged_runs += other.flagged_runs
        self.flagged_erroneous += other.flagged_erroneous
        return self

    def as_row(self) -> dict:
        return {
            "runs": self.runs,
            "erroneous_outputs": self.erroneous_outputs,
            "flagged_runs": self.flagged_runs,
            "flagged_erroneous": self.flagged_erroneous,
            "end_to_end_detection": f"{self.end_to_end_detection:.6f}",
        }


def random_inputs(count: int, length: int, width: int, seed: int) -> np.ndarray:
    rng = np.random.default_rng(seed)
    return rng.integers(0, 1 << width, size=(count, length), dtype=np.int64)


def _campaign_chunk(cfg, variant, mode, faults, inputs, reference):
    runs = len(faults) * len(inputs)
    cells = np.repeat([f.cell_index for f in faults], len(inputs))
    codes = np.repeat([f.table_code for f in faults], len(inputs))
    x = np.tile(inputs, (len(faults), 1))
    ref = np.tile(reference, (len(faults), 1))
    faulty = FaultyEngine.lanes(cfg.width, cells, codes)
    checker = faulty if mode == "same-unit" else ReferenceEngine(cfg.width)
    out, flags = VARIANTS[variant](cfg, x, faulty, checker)
    wrong = np.any(out != ref, axis=1)
    flagged = np.any(flags, axis=1)
    return FirCampaignReport(runs, int(wrong.sum()), int(flagged.sum()), int((wrong & flagged).sum()))


def fir_fault_campaign(cfg: FirConfig, faults: Sequence, inputs: np.ndarray,
                       variant: str = "checked", mode: str = "same-unit",
                       threads: int = 1, chunk_faults: int = 16) -> FirCampaignReport:
    """Run the filter once per (fault, input row) and tally the outcomes.

    A run is erroneous when its output stream differs anywhere from the
    fault-free filter, and flagged when any output carries the error bit.
    """
    if variant not in VARIANTS:
        raise ValueError("campaigns need the checked or embedded variant")
    if mode not in ("same-unit", "cross-unit"):
        raise ValueError(f"unknown mode {mode!r}")
    faults = list(faults)
    report = FirCampaignReport()
    if not faults or len(inputs) == 0:
        return report
    inputs = np.asarray(inputs, dtype=np.int64) & mask(cfg.width)
    reference = fir_plain(cfg, inputs)
    jobs = [faults[i:i + chunk_faults] for i in range(0, len(faults), chunk_faults)]
    if threads is None or threads <= 0:
        threads = os.cpu_count() or 1
    run = lambda fs: _campaign_chunk(cfg, variant, mode, fs, inputs, reference)  # noqa: E731
    if threads == 1 or len(jobs) == 1:
        parts = [run(fs) for fs in jobs]
    else:
        from concurrent.futures import ThreadPoolExecutor
        with ThreadPoolExecutor(max_workers=threads) as pool:
            parts = list(pool.map(run, jobs))
    for part in parts:
        report += part
    return report


def full_sweep(cfg: FirConfig) -> list:
    """Every single fault of the filter's datapath width."""
    return enumerate_faults(cfg.width)


# --- overhead ----------------------------------------------------------------

class OverheadReport(NamedTuple):
    plain: float
    checked: float
    embedded: float

    @property
    def checked_ratio(self) -> float:
        return self.checked / self.plain

    @property
    def embedded_ratio(self) -> float:
        return self.embedded / self.plain


def measure_overhead(cfg: FirConfig, repetitions: int = 5, seed: int = 0,
                     samples: Optional[list] = None) -> OverheadReport:
    """Median wall-clock of the three variants on the reference engine.

    The variants are timed round-robin inside each repetition so slow drift
    of the machine hits all three alike.
    """
    if repetitions < 1:
        raise ValueError("repetitions must be >= 1")
    if samples is None:
        samples = random_inputs(1, cfg.input_length, cfg.width, seed)[0].tolist()
    engine = ReferenceEngine(cfg.width)
    runs = {
        "plain": lambda: fir_plain(cfg, samples, engine),
        "checked": lambda: fir_checked(cfg, samples, engine),
        "embedded": lambda: fir_embedded(cfg, samples, engine),
    }
    times = {name: [] for name in runs}
    for _ in range(repetitions):
        for name, fn in runs.items():
            t0 = time.perf_counter()
            fn()
            times[name].append(time.perf_counter() - t0)
    return OverheadReport(*(statistics.median(times[k]) for k in OverheadReport._fields))
