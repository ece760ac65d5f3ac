"""Tables, figures and top-down SVG drawings from run records."""

from __future__ import annotations

import csv
import io
import warnings
from dataclasses import dataclass
from pathlib import Path
from typing import Sequence

from ..config import DEFAULT, EnvConstants
from ..scene import WorldState
from .grid import RunRecord
from .stats import mean_std, z_test

APPROACH_ORDER = ("llm3", "llm3_nf", "llm3_gaussian", "cap", "cap_gaussian", "proc3s_nf", "proc3s")
APPROACH_LABELS = {
    "llm3": "LLM3", "llm3_nf": "LLM3-NF", "llm3_gaussian": "LLM3-Gaussian", "cap": "CaP",
    "cap_gaussian": "CaP-Gaussian", "proc3s_nf": "PRoC3S-NF", "proc3s": "PRoC3S",
}
METRICS = ("samples_used", "feedback_queries", "wall_total", "wall_csp", "wall_llm")


@dataclass(frozen=True)
class AggregateRow:
    task: str
    approach: str
    n: int
    successes: int
    success_pct: float
    means: dict
    stds: dict


def _ordered(values, order) -> list:
    known = [v for v in order if v in values]
    return known + sorted(v for v in values if v not in order)


def _tasks(records: Sequence[RunRecord]) -> list[str]:
    seen: list[str] = []
    for r in records:
        if r.task not in seen:
            seen.append(r.task)
    return seen


def aggregate(records: Sequence[RunRecord]) -> dict[tuple[str, str], AggregateRow]:
    cells: dict[tuple[str, str], list[RunRecord]] = {}
    for r in records:
        cells.setdefault((r.task, r.approach), []).append(r)
    out = {}
    for key, rs in cells.items():
        wins = sum(1 for r in rs if r.success)
        means, stds = {}, {}
        for m in METRICS:
            means[m], stds[m] = mean_std([float(getattr(r, m)) for r in rs])
        out[key] = AggregateRow(key[0], key[1], len(rs), wins, 100.0 * wins / len(rs), means, stds)
    return out


def bold_cells(rows: dict[tuple[str, str], AggregateRow]) -> set[tuple[str, str]]:
    """Cells not significantly worse than the best approach on their task."""
    bold = set()
    for task in {t for t, _ in rows}:
        cells = [r for (t, _), r in rows.items() if t == task]
        top = max(cells, key=lambda r: (r.successes / r.n, r.approach))
        for r in cells:
            _, significant = z_test(top.successes, top.n, r.successes, r.n)
            if not significant:
                bold.add((task, r.approach))
    return bold


def _check_grid(records: Sequence[RunRecord], rows) -> None:
    tasks = {r.task for r in records}
    approaches = {r.approach for r in records}
    missing = [(t, a) for t in tasks for a in approaches if (t, a) not in rows]
    counts = {row.n for row in rows.values()}
    if missing or len(counts) > 1:
        warnings.warn(f"incomplete grid: {len(missing)} missing cell(s), seeds per cell {sorted(counts)}",
                      stacklevel=3)


def _pct(p: float) -> str:
    return f"{p:.0f}%"


def emit_table(records: Sequence[RunRecord], fmt: str = "markdown") -> str:
    """Success percentages: one column per task, one row per approach.

    Bold marks cells whose success rate is not significantly below the top
    performer on that task.  ``fmt`` is ``markdown`` or ``csv``.
    """
    rows = aggregate(records)
    _check_grid(records, rows)
    bold = bold_cells(rows)
    tasks = _tasks(records)
    approaches = _ordered({a for _, a in rows}, APPROACH_ORDER)
    table = []
    for a in approaches:
        line = [APPROACH_LABELS.get(a, a)]
        for t in tasks:
            row = rows.get((t, a))
            if row is None:
                line.append("")
                continue
            cell = _pct(row.success_pct)
            line.append(f"**{cell}**" if (t, a) in bold else cell)
        table.append(line)
    header = ["approach"] + tasks
    if fmt == "csv":
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(header)
        w.writerows(table)
        return buf.getvalue()
    if fmt != "markdown":
        raise ValueError(f"unknown table format {fmt!r}")
    lines = ["| " + " | ".join(header) + " |", "|" + "---|" * len(header)]
    lines += ["| " + " | ".join(line) + " |" for line in table]
    return "\n".join(lines) + "\n"


def emit_metrics_csv(records: Sequence[RunRecord]) -> str:
    """Long-form per-cell metrics (mean and population std per column)."""
    rows = aggregate(records)
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    header = ["task", "approach", "n", "success_pct"]
    for m in METRICS:
        header += [f"{m}_mean", f"{m}_std"]
    w.writerow(header)
    for t in _tasks(records):
        for a in _ordered({a for tt, a in rows if tt == t}, APPROACH_ORDER):
            row = rows[(t, a)]
            line = [t, a, row.n, f"{row.success_pct:.1f}"]
            for m in METRICS:
                line += [f"{row.means[m]:.4f}", f"{row.stds[m]:.4f}"]
            w.writerow(line)
    return buf.getvalue()


def plot_success(records: Sequence[RunRecord], path: str | Path) -> Path:
    """Grouped bar chart of success rates, written as PNG."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    rows = aggregate(records)
    tasks = _tasks(records)
    approaches = _ordered({a for _, a in rows}, APPROACH_ORDER)
    width = 0.8 / max(1, len(approaches))
    fig, ax = plt.subplots(figsize=(max(6.0, 1.2 * len(tasks)), 3.5))
    for i, a in enumerate(approaches):
        xs = [j + (i - (len(approaches) - 1) / 2) * width for j in range(len(tasks))]
        ys = [rows[(t, a)].success_pct if (t, a) in rows else 0.0 for t in tasks]
        ax.bar(xs, ys, width, label=APPROACH_LABELS.get(a, a))
    ax.set_xticks(range(len(tasks)))
    ax.set_xticklabels(tasks, rotation=30, ha="right")
    ax.set_ylabel("success (%)")
    ax.set_ylim(0, 100)
    ax.legend(fontsize=7, ncol=2)
    fig.tight_layout()
    path = Path(path)
    fig.savefig(path, format="png", metadata={"Software": None})
    plt.close(fig)
    return path


# --------------------------------------------------------------------------
# svg
# --------------------------------------------------------------------------

PX_PER_M = 1000.0

_FILL = {
    "red": "#d62728", "green": "#2ca02c", "blue": "#1f77b4", "yellow": "#e6c700", "purple": "#9467bd",
    "orange": "#ff7f0e", "pink": "#e377c2", "cyan": "#17becf", "gray": "#7f7f7f",
}


def _f(v: float) -> str:
    s = f"{v:.2f}"
    return "0.00" if s == "-0.00" else s


def svg_text(state: WorldState, consts: EnvConstants = DEFAULT) -> str:
    """Top-down view: x to the right, y flipped so the robot side is at the top."""
    (x0, x1), (y0, y1), _ = consts.table_bounds
    w, h = (x1 - x0) * PX_PER_M, (y1 - y0) * PX_PER_M

    def px(x, y):
        return (x - x0) * PX_PER_M, (y1 - y) * PX_PER_M

    out = [
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{_f(w)}" height="{_f(h)}" '
        f'viewBox="0 0 {_f(w)} {_f(h)}">',
        f'<rect x="0.00" y="0.00" width="{_f(w)}" height="{_f(h)}" fill="#f4f1ea" stroke="#444444"/>',
    ]
    objs = sorted(state.objects.values(), key=lambda o: (o.category != "obstacle", o.category != "bowl",
                                                         o.pose.z, o.name))
    for o in objs:
        fill = _FILL.get(o.color, "#999999")
        cx, cy = px(o.pose.x, o.pose.y)
        if o.shape.kind == "box":
            hx, hy = o.shape.half_extents[0] * PX_PER_M, o.shape.half_extents[1] * PX_PER_M
            out.append(f'<rect id="{o.name}" x="{_f(cx - hx)}" y="{_f(cy - hy)}" width="{_f(2 * hx)}" '
                       f'height="{_f(2 * hy)}" fill="{fill}" stroke="#222222"/>')
        elif o.category == "bowl":
            out.append(f'<circle id="{o.name}" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(o.shape.radius * PX_PER_M)}" '
                       f'fill="none" stroke="{fill}" stroke-width="3"/>')
        else:
            out.append(f'<circle id="{o.name}" cx="{_f(cx)}" cy="{_f(cy)}" r="{_f(o.shape.radius * PX_PER_M)}" '
                       f'fill="{fill}" stroke="#222222"/>')
    for a, b in state.drawn_lines:
        ax, ay = px(*a)
        bx, by = px(*b)
        out.append(f'<line x1="{_f(ax)}" y1="{_f(ay)}" x2="{_f(bx)}" y2="{_f(by)}" stroke="#000000" '
                   f'stroke-width="2"/>')
    out.append("</svg>")
    return "\n".join(out) + "\n"


def emit_svg(state: WorldState, path: str | Path, consts: EnvConstants = DEFAULT) -> Path:
    path = Path(path)
    path.write_text(svg_text(state, consts))
    return path
