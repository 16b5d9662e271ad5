"""Line charts rendered to SVG with matplotlib.

Output is byte-reproducible: the SVG id salt is fixed, the date stamp is
removed and text is kept as text rather than glyph paths.
"""

from __future__ import annotations

import io
from pathlib import Path
from typing import Mapping, Sequence

import matplotlib
from matplotlib.figure import Figure

from .files import atomic_write_text

COLORS = ("#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
          "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf")
FIGSIZE = (6.4, 4.0)

STYLE = {
    "svg.hashsalt": "ncps-dyn",
    "svg.fonttype": "none",
    "font.size": 10,
    "axes.labelsize": 10,
    "legend.fontsize": 8,
    "lines.linewidth": 1.2,
    "axes.prop_cycle": matplotlib.cycler(color=COLORS),
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def line_chart_svg(t: Sequence[float], series: Mapping[str, Sequence[float]], *,
                   xlabel: str = "t", ylabel: str = "", title: str = "",
                   logy: bool = False) -> str:
    with matplotlib.rc_context(STYLE):
        fig = Figure(figsize=FIGSIZE)
        ax = fig.add_subplot()
        for label, y in series.items():
            ax.plot(t, y, label=label)
        if logy:
            ax.set_yscale("log")
        ax.set_xlabel(xlabel)
        ax.set_ylabel(ylabel)
        if title:
            ax.set_title(title)
        if len(series) > 1:
            ax.legend(loc="best")
        fig.tight_layout()
        buf = io.StringIO()
        fig.savefig(buf, format="svg", metadata={"Date": None})
    return buf.getvalue()


def write_line_chart(path: str | Path, t, series, **kwargs) -> Path:
    return atomic_write_text(path, line_chart_svg(t, series, **kwargs))
