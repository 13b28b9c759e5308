"""Benchmark campaigns, reports and the command line."""

from .campaign import COLUMNS, Campaign, Cell, parse_grid, run
from .report import write_reports

__all__ = ["COLUMNS", "Campaign", "Cell", "parse_grid", "run", "write_reports"]
