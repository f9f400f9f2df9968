"""Serialise campaign results as CSV, JSON or an aligned text table."""
from __future__ import annotations

import csv
import io
import json
from typing import Iterable, Optional

from ..checked import CheckTechnique
from .campaign import CampaignResult, situation_count

CSV_FIELDS = (
    "operator", "technique", "mode", "width", "total", "correct_silent",
    "detected_silent", "detected_erroneous", "masked", "skipped",
    "coverage_pct", "detection_pct", "sample_count", "seed", "ci_low", "ci_high",
)

TECH_ORDER = (CheckTechnique.TECH1, CheckTechnique.TECH2, CheckTechnique.BOTH)
TECH_LABELS = {CheckTechnique.TECH1: "Tech1", CheckTechnique.TECH2: "Tech2",
               CheckTechnique.BOTH: "Tech1&2"}

# Published reference figures for same-unit ripple-carry addition:
# width -> (printed situation count, Tech1 %, Tech2 %, Tech1&2 %)
PUBLISHED_ADD = {
    1: (128, 95.31, 96.88, 97.66),
    2: (1024, 96.88, 98.44, 98.83),
    3: (6144, 97.40, 98.96, 99.22),
    4: (7808, 97.66, 99.22, 99.41),
    8: (16 << 20, 98.05, 99.61, 99.71),
    16: (6 << 30, 98.18, 99.74, 99.80),
}
TABLE_WIDTHS = (1, 2, 3, 4, 8)


def _pct(x: Optional[float]) -> str:
    return "" if x is None else f"{100.0 * x:.6f}"


def result_row(r: CampaignResult) -> dict:
    s = r.spec
    return {
        "operator": s.operator.value,
        "technique": s.technique.value,
        "mode": s.mode.value,
        "width": s.width,
        "total": r.total,
        "correct_silent": r.correct_silent,
        "detected_silent": r.detected_silent,
        "detected_erroneous": r.detected_erroneous,
        "masked": r.masked,
        "skipped": r.skipped,
        "coverage_pct": _pct(r.coverage),
        "detection_pct": _pct(r.detection),
        "sample_count": "" if s.sample_count is None else s.sample_count,
        "seed": "" if s.seed is None else s.seed,
        "ci_low": _pct(r.ci_low),
        "ci_high": _pct(r.ci_high),
    }


def to_csv(results: Iterable[CampaignResult]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=CSV_FIELDS, lineterminator="\n")
    writer.writeheader()
    for r in results:
        writer.writerow(result_row(r))
    return buf.getvalue()


def _json_value(key, value):
    if value == "":
        return None
    if key in ("coverage_pct", "detection_pct", "ci_low", "ci_high"):
        return float(value)
    return value


def to_json(results: Iterable[CampaignResult]) -> str:
    rows = [{k: _json_value(k, v) for k, v in result_row(r).items()} for r in results]
    return json.dumps(rows, indent=2) + "\n"


def to_text(results: Iterable[CampaignResult]) -> str:
    """One aligned line per campaign, percentages to two decimals."""
    header = ("op", "tech", "mode", "n", "total", "masked", "coverage", "detection", "95% CI")
    lines = []
    for r in results:
        s = r.spec
        ci = "" if r.ci_low is None else f"[{100 * r.ci_low:.2f}, {100 * r.ci_high:.2f}]"
        lines.append((s.operator.value, s.technique.value, s.mode.value, str(s.width),
                      str(r.total), str(r.masked), f"{100 * r.coverage:.2f}%",
                      f"{100 * r.detection:.2f}%", ci))
    return _align([header] + lines)


def _align(rows) -> str:
    widths = [max(len(row[i]) for row in rows) for i in range(len(rows[0]))]
    out = []
    for row in rows:
        out.append("  ".join(cell.rjust(w) for cell, w in zip(row, widths)).rstrip())
    return "\n".join(out) + "\n"


def count_note(width: int) -> Optional[str]:
    """Explain where a printed situation count disagrees with 32*n*4^n."""
    if width not in PUBLISHED_ADD:
        return None
    printed = PUBLISHED_ADD[width][0]
    ours = situation_count(width)
    if printed == ours:
        return None
    return (f"n={width}: the published table prints {printed} situations, but "
            f"32 * {width} * 4^{width} = {ours}; the count formula is used here")


def table2_text(results: Iterable[CampaignResult]) -> str:
    """Width rows by technique columns, with published values and deltas."""
    grid = {}
    for r in results:
        grid[r.spec.width, r.spec.technique] = r
    widths = sorted({w for w, _ in grid})
    header = ["n", "situations"]
    for t in TECH_ORDER:
        label = TECH_LABELS[t]
        header += [label, f"{label} pub", "delta"]
    rows = [header]
    notes = []
    for w in widths:
        pub = PUBLISHED_ADD.get(w)
        first = next(grid[w, t] for t in TECH_ORDER if (w, t) in grid)
        row = [str(w), str(situation_count(w))]
        for i, t in enumerate(TECH_ORDER):
            r = grid.get((w, t))
            if r is None:
                row += ["", "", ""]
                continue
            cov = 100.0 * r.coverage
            cell = f"{cov:.2f}%"
            if r.ci_low is not None:
                cell += f" +/-{50.0 * (r.ci_high - r.ci_low):.2f}"
            if pub:
                row += [cell, f"{pub[i + 1]:.2f}%", f"{cov - pub[i + 1]:+.2f}"]
            else:
                row += [cell, "", ""]
        rows.append(row)
        note = count_note(w)
        if note:
            notes.append(note)
        if first.spec.sampled:
            notes.append(f"n={w}: sampled, {first.spec.sample_count} draws, seed {first.spec.seed}")
    text = _align(rows)
    if notes:
        text += "\n" + "\n".join(f"note: {n}" for n in notes) + "\n"
    return text


def table2_rows(results: Iterable[CampaignResult]) -> list:
    """CSV/JSON rows for the table with published values and deltas appended."""
    out = []
    for r in results:
        row = result_row(r)
        pub = PUBLISHED_ADD.get(r.spec.width)
        idx = TECH_ORDER.index(r.spec.technique) + 1
        row["published_pct"] = f"{pub[idx]:.2f}" if pub else ""
        row["delta_pp"] = f"{100.0 * r.coverage - pub[idx]:+.6f}" if pub else ""
        row["note"] = count_note(r.spec.width) or ""
        out.append(row)
    return out


def rows_to_csv(rows: list) -> str:
    if not rows:
        return ""
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(rows[0]), lineterminator="\n")
    writer.writeheader()
    writer.writerows(rows)
    return buf.getvalue()
