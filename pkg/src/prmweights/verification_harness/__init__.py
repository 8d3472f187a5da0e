"""Sweeps, lemma suites, formula/oracle comparison, reports and the CLI."""

from .report import SweepReport, emit_table, TABLE_COLUMNS
from .lemmas import LEMMA_IDS, HypothesisError, run_lemma_suite
from .compare import compare_formula_oracle

__all__ = [
    "SweepReport", "emit_table", "TABLE_COLUMNS",
    "LEMMA_IDS", "HypothesisError", "run_lemma_suite",
    "compare_formula_oracle",
]
