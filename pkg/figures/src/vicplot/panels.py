"""Multi-panel time-series rendering from a trace column mapping."""

from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Optional, Sequence, Tuple

import numpy as np
from matplotlib.figure import Figure

from .trace import require_columns

FORMATS = ("png", "pdf")


@dataclass
class PanelSpec:
    """One stacked axis: which columns to draw and how to label them."""

    columns: Tuple[str, ...]
    ylabel: str = ""
    labels: Optional[Tuple[str, ...]] = None
    styles: Tuple[str, ...] = field(default_factory=tuple)

    def __post_init__(self):
        self.columns = tuple(self.columns)
        if self.labels is not None:
            self.labels = tuple(self.labels)
            if len(self.labels) != len(self.columns):
                raise ValueError("labels must match columns one to one")


def _violation_spans(time: np.ndarray, flag: np.ndarray):
    """Contiguous runs of flagged steps as (t_start, t_end) pairs."""
    idx = np.flatnonzero(flag > 0.0)
    if idx.size == 0:
        return []
    breaks = np.flatnonzero(np.diff(idx) > 1)
    starts = np.concatenate([[idx[0]], idx[breaks + 1]])
    ends = np.concatenate([idx[breaks], [idx[-1]]])
    return [(time[a], time[b]) for a, b in zip(starts, ends)]


def render_panels(trace: Dict[str, np.ndarray], panels: Sequence[PanelSpec],
                  shade_violations: bool = True, title: str = "") -> Figure:
    """Stacked time-series panels on a shared time axis.

    Violation steps (per the trace's ``violation_flag`` column, when present)
    are shaded across every panel so injected-energy intervals stand out.
    """
    if not panels:
        raise ValueError("need at least one panel")
    needed = ["time_s"]
    for p in panels:
        needed.extend(p.columns)
    require_columns(trace, needed)

    time = trace["time_s"]
    fig = Figure(figsize=(8.0, 2.2 * len(panels)), constrained_layout=True)
    axes = fig.subplots(len(panels), 1, sharex=True)
    if len(panels) == 1:
        axes = [axes]

    spans = []
    if shade_violations and "violation_flag" in trace:
        spans = _violation_spans(time, trace["violation_flag"])

    for ax, spec in zip(axes, panels):
        for j, name in enumerate(spec.columns):
            label = spec.labels[j] if spec.labels else name
            style = spec.styles[j] if j < len(spec.styles) else "-"
            ax.plot(time, trace[name], style, label=label, linewidth=1.0)
        ax.set_ylabel(spec.ylabel)
        ax.grid(True, alpha=0.3)
        if len(spec.columns) > 1:
            ax.legend(loc="best", fontsize="small")
        for t0, t1 in spans:
            ax.axvspan(t0, t1, color="red", alpha=0.15, linewidth=0)
    axes[-1].set_xlabel("time [s]")
    if title:
        fig.suptitle(title)
    return fig


def save_figure(fig: Figure, out_path, fmt: Optional[str] = None) -> str:
    """Write the figure; the format comes from ``fmt`` or the file suffix."""
    out_path = Path(out_path)
    if fmt is None:
        suffix = out_path.suffix.lstrip(".").lower()
        fmt = suffix if suffix else "png"
    if fmt not in FORMATS:
        raise ValueError(f"unsupported format {fmt!r}; use one of {FORMATS}")
    fig.savefig(out_path, format=fmt, dpi=150)
    return fmt
