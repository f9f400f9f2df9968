"""Fault-coverage campaigns and their reports."""
from .campaign import (DEFAULT_BUDGET, BudgetExceeded, CampaignResult,
                       CampaignSpec, DetectionTally, Mode, OutcomeClass,
                       classify, detection_tally, run_campaign, run_exhaustive,
                       run_sampled, situation_count)
from .report import (CSV_FIELDS, PUBLISHED_ADD, count_note, result_row,
                     table2_rows, table2_text, to_csv, to_json, to_text)

__all__ = [
    "DEFAULT_BUDGET", "BudgetExceeded", "CampaignResult", "CampaignSpec",
    "DetectionTally", "Mode", "OutcomeClass", "classify", "detection_tally",
    "run_campaign", "run_exhaustive", "run_sampled", "situation_count",
    "CSV_FIELDS", "PUBLISHED_ADD", "count_note", "result_row", "table2_rows",
    "table2_text", "to_csv", "to_json", "to_text",
]
