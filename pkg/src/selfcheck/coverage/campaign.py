"""Fault-injection campaigns over (fault, op1, op2) situations.

Each situation runs the nominal operation on a faulty chain, runs the
enabled control(s) either on the same faulty chain (``same-unit``, the worst
case) or on a trusted unit (``cross-unit``), and lands in one of four
classes:

==================  ===============  ==============
                    control passes   control fails
==================  ===============  ==============
result correct      correct_silent   detected_silent
result wrong        masked           detected_erroneous
==================  ===============  ==============

Coverage is ``1 - masked / total``.
"""
from __future__ import annotations

import enum
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from typing import NamedTuple, Optional

import numpy as np

from ..bitsim import FaultDescriptor, FaultModel, FaultyEngine, enumerate_faults
from ..bitsim.faults import FAULTS_PER_CELL
from ..checked import CheckTechnique, Operator, run_check
from ..engines import ReferenceEngine
from ..words import check_width, mask, min_signed

DEFAULT_BUDGET = 2 ** 34
MIN_SAMPLES = 10_000
SAMPLE_BLOCK = 1 << 16
CHUNK_LANES = 1 << 18


class BudgetExceeded(RuntimeError):
    pass


class OutcomeClass(str, enum.Enum):
    CORRECT_SILENT = "correct_silent"
    DETECTED_SILENT = "detected_silent"
    DETECTED_ERRONEOUS = "detected_erroneous"
    MASKED = "masked"


class Mode(str, enum.Enum):
    SAME_UNIT = "same-unit"
    CROSS_UNIT = "cross-unit"


def situation_count(width: int) -> int:
    """32 faults per cell x n cells x 2^(2n) operand pairs."""
    if width < 1:
        raise ValueError("width must be >= 1")
    return FAULTS_PER_CELL * width * 4 ** width


def budget_from_env() -> int:
    raw = os.environ.get("SCK_BUDGET")
    if not raw:
        return DEFAULT_BUDGET
    try:
        value = int(float(raw)) if "e" in raw.lower() else int(raw, 0)
    except ValueError:
        raise ValueError(f"SCK_BUDGET must be a positive integer, got {raw!r}") from None
    if value <= 0:
        raise ValueError(f"SCK_BUDGET must be a positive integer, got {raw!r}")
    return value


@dataclass(frozen=True)
class CampaignSpec:
    operator: Operator
    technique: CheckTechnique
    width: int
    mode: Mode = Mode.SAME_UNIT
    sample_count: Optional[int] = None
    seed: Optional[int] = None
    fault_model: FaultModel = FaultModel.HYBRID

    def __post_init__(self):
        object.__setattr__(self, "operator", Operator.parse(self.operator))
        object.__setattr__(self, "technique", CheckTechnique(self.technique))
        object.__setattr__(self, "mode", Mode(self.mode))
        object.__setattr__(self, "fault_model", FaultModel(self.fault_model))
        check_width(self.width)
        if self.operator is Operator.DIV and self.technique is CheckTechnique.BOTH:
            raise ValueError("division has no 'both' technique")
        if self.sample_count is not None:
            if self.sample_count < MIN_SAMPLES:
                raise ValueError(f"sample_count must be >= {MIN_SAMPLES}")
            if self.seed is None:
                raise ValueError("sampled campaigns need a seed")

    @property
    def sampled(self) -> bool:
        return self.sample_count is not None

    def exhaustive(self) -> "CampaignSpec":
        return replace(self, sample_count=None, seed=None)


@dataclass
class CampaignResult:
    spec: CampaignSpec
    total: int
    correct_silent: int
    detected_silent: int
    detected_erroneous: int
    masked: int
    skipped: int = 0
    ci_low: Optional[float] = None
    ci_high: Optional[float] = None
    masked_ids: Optional[np.ndarray] = field(default=None, repr=False, compare=False)

    @property
    def coverage(self) -> float:
        return 1.0 - self.masked / self.total if self.total else 1.0

    @property
    def detection(self) -> float:
        return (self.detected_silent + self.detected_erroneous) / self.total if self.total else 0.0

    @property
    def counts(self) -> dict:
        return {c.value: getattr(self, c.value) for c in OutcomeClass}


class DetectionTally(NamedTuple):
    observable_errors: int
    detections: int
    detected_silent: int
    detected_erroneous: int


def detection_tally(result: CampaignResult) -> DetectionTally:
    return DetectionTally(
        observable_errors=result.detected_erroneous + result.masked,
        detections=result.detected_silent + result.detected_erroneous,
        detected_silent=result.detected_silent,
        detected_erroneous=result.detected_erroneous,
    )


# --- evaluation core --------------------------------------------------------

def _nominal(op: Operator, engine, a, b):
    if op is Operator.ADD:
        return engine.add(a, b), None
    if op is Operator.SUB:
        return engine.sub(a, b), None
    if op is Operator.MUL:
        return engine.mul(a, b), None
    return engine.divrem(a, b)


def valid_pairs(op: Operator, width: int, a, b):
    """Lane mask of operand pairs that satisfy the operator's precondition."""
    if op is not Operator.DIV:
        return np.ones(np.shape(a), dtype=bool)
    return (b != 0) & ~((a == min_signed(width)) & (b == mask(width)))


def _evaluate(spec: CampaignSpec, faulty, a, b):
    """Class masks ``(wrong, ok)`` for lanes of operands on ``faulty``."""
    ref = ReferenceEngine(spec.width)
    ris, _ = _nominal(spec.operator, faulty, a, b)
    expected, _ = _nominal(spec.operator, ref, a, b)
    ctrl = faulty if spec.mode is Mode.SAME_UNIT else ref
    ok = run_check(spec.operator, spec.technique, a, b, ris, None, ctrl)
    return ris != expected, ok


def classify(spec: CampaignSpec, fault: FaultDescriptor, op1: int, op2: int) -> OutcomeClass:
    n = spec.width
    if not valid_pairs(spec.operator, n, np.int64(op1), np.int64(op2)):
        raise ValueError("operand pair violates the division precondition")
    wrong, ok = _evaluate(spec, FaultyEngine(n, fault), np.array([op1]), np.array([op2]))
    return _class_of(bool(wrong[0]), bool(ok[0]))


def _class_of(wrong: bool, ok: bool) -> OutcomeClass:
    if wrong:
        return OutcomeClass.MASKED if ok else OutcomeClass.DETECTED_ERRONEOUS
    return OutcomeClass.CORRECT_SILENT if ok else OutcomeClass.DETECTED_SILENT


def _tally(wrong, ok):
    cs = int(np.count_nonzero(~wrong & ok))
    ds = int(np.count_nonzero(~wrong & ~ok))
    de = int(np.count_nonzero(wrong & ~ok))
    ms = int(np.count_nonzero(wrong & ok))
    return np.array([cs, ds, de, ms], dtype=np.int64)


def _fault_tables(spec: CampaignSpec):
    faults = enumerate_faults(spec.width, model=spec.fault_model)
    cells = np.array([f.cell_index for f in faults], dtype=np.int64)
    codes = np.array([f.table_code for f in faults], dtype=np.int64)
    return cells, codes


def _exhaustive_chunk(spec, cells, codes, lo, hi, collect):
    n = spec.width
    pairs = 1 << (2 * n)
    fidx = np.repeat(np.arange(lo, hi, dtype=np.int64), pairs)
    pid = np.tile(np.arange(pairs, dtype=np.int64), hi - lo)
    a = pid >> n
    b = pid & mask(n)
    valid = valid_pairs(spec.operator, n, a, b)
    skipped = int(np.count_nonzero(~valid))
    if skipped:
        fidx, a, b, pid = fidx[valid], a[valid], b[valid], pid[valid]
    eng = FaultyEngine.lanes(n, cells[fidx], codes[fidx])
    wrong, ok = _evaluate(spec, eng, a, b)
    ids = (fidx * pairs + pid)[wrong & ok] if collect else None
    return _tally(wrong, ok), skipped, ids


def _run_parallel(fn, jobs, threads):
    if threads is None or threads <= 0:
        threads = os.cpu_count() or 1
    if threads == 1 or len(jobs) <= 1:
        return [fn(*j) for j in jobs]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(lambda j: fn(*j), jobs))


def run_exhaustive(spec: CampaignSpec, budget: Optional[int] = None, threads: int = 1,
                   collect_masked: bool = False) -> CampaignResult:
    """Classify every (fault, op1, op2) situation.

    The work is cut into fixed fault chunks independent of ``threads`` and
    summed in chunk order, so any thread count gives the same result.
    """
    spec = spec.exhaustive()
    space = situation_count(spec.width)
    budget = budget_from_env() if budget is None else budget
    if space > budget:
        raise BudgetExceeded(
            f"{space} situations exceed the exhaustive budget of {budget}; "
            "sample instead (--sample N --seed S) or raise SCK_BUDGET")
    cells, codes = _fault_tables(spec)
    per_chunk = max(1, CHUNK_LANES >> (2 * spec.width))
    jobs = [(spec, cells, codes, lo, min(lo + per_chunk, len(cells)), collect_masked)
            for lo in range(0, len(cells), per_chunk)]
    parts = _run_parallel(_exhaustive_chunk, jobs, threads)
    counts = sum(p[0] for p in parts)
    skipped = sum(p[1] for p in parts)
    ids = np.concatenate([p[2] for p in parts]) if collect_masked else None
    return CampaignResult(spec, int(counts.sum()), *map(int, counts), skipped=skipped, masked_ids=ids)


def _sample_block(spec, cells, codes, block, size):
    n = spec.width
    rng = np.random.default_rng([spec.seed, block])
    fidx = rng.integers(0, len(cells), size=size, dtype=np.int64)
    a = rng.integers(0, 1 << n, size=size, dtype=np.int64)
    b = rng.integers(0, 1 << n, size=size, dtype=np.int64)
    valid = valid_pairs(spec.operator, n, a, b)
    skipped = int(np.count_nonzero(~valid))
    if skipped:
        fidx, a, b = fidx[valid], a[valid], b[valid]
    eng = FaultyEngine.lanes(n, cells[fidx], codes[fidx])
    wrong, ok = _evaluate(spec, eng, a, b)
    return _tally(wrong, ok), skipped


def run_sampled(spec: CampaignSpec, threads: int = 1, z: float = 1.959963984540054) -> CampaignResult:
    """Uniform draws over the situation space with a normal-approximation CI.

    Draws come in fixed blocks, each with its own generator seeded by
    ``(seed, block index)``, so results do not depend on ``threads``.
    """
    if not spec.sampled:
        raise ValueError("run_sampled needs sample_count and seed")
    cells, codes = _fault_tables(spec)
    jobs = []
    for block, lo in enumerate(range(0, spec.sample_count, SAMPLE_BLOCK)):
        jobs.append((spec, cells, codes, block, min(SAMPLE_BLOCK, spec.sample_count - lo)))
    parts = _run_parallel(_sample_block, jobs, threads)
    counts = sum(p[0] for p in parts)
    skipped = sum(p[1] for p in parts)
    total = int(counts.sum())
    res = CampaignResult(spec, total, *map(int, counts), skipped=skipped)
    p = res.coverage
    half = z * math.sqrt(p * (1 - p) / total) if total else 0.0
    res.ci_low, res.ci_high = max(0.0, p - half), min(1.0, p + half)
    return res


def run_campaign(spec: CampaignSpec, budget: Optional[int] = None, threads: int = 1,
                 collect_masked: bool = False) -> CampaignResult:
    if spec.sampled:
        return run_sampled(spec, threads=threads)
    return run_exhaustive(spec, budget=budget, threads=threads, collect_masked=collect_masked)
