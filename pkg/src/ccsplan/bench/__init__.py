from .grid import FixtureSource, RunRecord, SharedBackend, load_records, run_cell, run_grid
from .report import AggregateRow, aggregate, bold_cells, emit_metrics_csv, emit_svg, emit_table, plot_success, svg_text
from .stats import Z_CRITICAL, mean_std, z_test

__all__ = [
    "AggregateRow", "FixtureSource", "RunRecord", "SharedBackend", "Z_CRITICAL", "aggregate", "bold_cells",
    "emit_metrics_csv", "emit_svg", "emit_table", "load_records", "mean_std", "plot_success", "run_cell",
    "run_grid", "svg_text", "z_test",
]
