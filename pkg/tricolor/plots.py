"""
Chart output for sweep reports: SR/AES-vs-p line charts and rank diagrams.
"""

from __future__ import annotations

import logging
from pathlib import Path
from typing import List, Optional, Union

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import pandas as pd  # noqa: E402
import plotly.express as px  # noqa: E402

from tricolor.bench import predicted_region  # noqa: E402
from tricolor.stats import GroupSignificance  # noqa: E402

logger = logging.getLogger(__name__)

MEASURES = ("SR", "AES")


def _curve_frame(table: pd.DataFrame) -> pd.DataFrame:
    frame = table.copy()
    frame["p"] = frame["p"].astype(float)
    frame["series"] = frame["algorithm"].astype(str)
    if "delta" in frame and frame["delta"].nunique() > 1:
        frame["series"] = frame["series"] + " d=" + frame["delta"].astype(str)
    return frame.sort_values(["series", "p"])


def sweep_chart_svg(table: pd.DataFrame, graph_type: str, n: int, measure: str, out: Union[str, Path]) -> Path:
    """One line per algorithm over p, with the predicted transition region shaded."""
    frame = _curve_frame(table)
    fig, ax = plt.subplots(figsize=(7, 4))
    for series, curve in frame.groupby("series"):
        ax.plot(curve["p"], curve[measure], marker="o", markersize=3, label=series)
    lo, hi = predicted_region(n)
    ax.axvspan(lo, hi, color="grey", alpha=0.15, label="predicted transition")
    ax.set_xlabel("edge probability p")
    ax.set_ylabel(measure)
    if measure == "SR":
        ax.set_ylim(-0.02, 1.02)
    ax.set_title(f"{measure} on {graph_type} graphs, n={n}")
    ax.legend(fontsize="small")
    fig.tight_layout()
    out = Path(out)
    fig.savefig(out, format="svg")
    plt.close(fig)
    return out


def sweep_chart_html(table: pd.DataFrame, graph_type: str, n: int, measure: str, out: Union[str, Path]) -> Path:
    frame = _curve_frame(table)
    fig = px.line(frame, x="p", y=measure, color="series",
                  title=f"{measure} on {graph_type} graphs, n={n}",
                  markers=True)
    fig.update_traces(line=dict(width=3))
    fig.update_layout(hovermode="x unified")
    out = Path(out)
    fig.write_html(out, include_plotlyjs="cdn")
    return out


def write_sweep_charts(table: pd.DataFrame, out_dir: Union[str, Path], html: bool = False) -> List[Path]:
    """Charts for every (type, n, measure) present in a report table (REPORT_COLUMNS schema)."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    written: List[Path] = []
    usable = table.dropna(subset=["type", "n", "p"])
    for (graph_type, n), group in usable.groupby(["type", "n"]):
        if group["p"].nunique() < 2:
            logger.debug("skipping chart for %s n=%s: single p value", graph_type, n)
            continue
        for measure in MEASURES:
            stem = f"{measure.lower()}_{graph_type}_{int(n)}"
            written.append(sweep_chart_svg(group, graph_type, int(n), measure, out_dir / f"{stem}.svg"))
            if html:
                written.append(sweep_chart_html(group, graph_type, int(n), measure, out_dir / f"{stem}.html"))
    return written


def rank_diagram_svg(sig: GroupSignificance, out: Union[str, Path], title: Optional[str] = None) -> Path:
    """Average rank of each algorithm with its +-CD/2 interval; non-overlapping bars differ."""
    order = sorted(range(len(sig.algorithms)), key=lambda i: sig.avg_ranks[i])
    fig, ax = plt.subplots(figsize=(6, 0.5 * len(order) + 1.2))
    for row, i in enumerate(order):
        lo, hi = sig.intervals[i]
        ax.hlines(row, lo, hi, linewidth=2)
        ax.plot(sig.avg_ranks[i], row, "o", color="black")
    ax.set_yticks(range(len(order)))
    ax.set_yticklabels([sig.algorithms[i] for i in order])
    ax.invert_yaxis()
    ax.set_xlabel("average rank")
    ax.set_title(title or f"{' '.join(str(v) for v in sig.group)} (CD={sig.cd:.3f}, p={sig.friedman.p_value:.3g})")
    fig.tight_layout()
    out = Path(out)
    fig.savefig(out, format="svg")
    plt.close(fig)
    return out
