"""Write result tables as CSV, JSON or SVG heatmaps."""

from __future__ import annotations

import csv
import io
import json
import math
from pathlib import Path

import numpy as np

from .experiments import CSV_COLUMNS


def _fmt(v) -> str:
    if isinstance(v, bool):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        return format(float(v), ".17g")
    return str(v)


def to_csv(rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for row in rows:
        w.writerow([_fmt(row[c]) for c in CSV_COLUMNS])
    return buf.getvalue()


def read_csv(text: str) -> list[dict]:
    """Parse CSV written by :func:`to_csv` back into typed rows."""
    ints = {"n1", "n2", "n3", "r0", "r", "trials", "rank_flag_failures", "master_seed"}
    strs = {"kind", "noise_mode"}
    rows = []
    for raw in csv.DictReader(io.StringIO(text)):
        rows.append({
            k: (v if k in strs else int(v) if k in ints else float(v))
            for k, v in raw.items()
        })
    return rows


def _json_default(o):
    if isinstance(o, np.generic):
        return o.item()
    raise TypeError(f"not JSON serializable: {type(o).__name__}")


def to_json(rows, metadata: dict | None = None) -> str:
    return json.dumps({"metadata": metadata or {}, "rows": list(rows)}, indent=2,
                      default=_json_default, allow_nan=True) + "\n"


def to_svg(rows, title: str = "median ||X - X0||_F") -> str:
    """One heatmap per (kind, n3, r): eps1 on x, eps2 on y, log10 median abs error as color."""
    import matplotlib

    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    matplotlib.rcParams["svg.hashsalt"] = "sketchlab"
    panels: dict[tuple, list[dict]] = {}
    for row in rows:
        panels.setdefault((row["kind"], row["n3"], row["r"]), []).append(row)
    n = max(len(panels), 1)
    fig, axes = plt.subplots(1, n, figsize=(4.2 * n, 3.6), squeeze=False)
    for ax, ((kind, n3, r), cell) in zip(axes[0], panels.items()):
        e1 = sorted({c["eps1"] for c in cell})
        e2 = sorted({c["eps2"] for c in cell})
        grid = np.full((len(e2), len(e1)), np.nan)
        for c in cell:
            v = c["median_abs_err"]
            grid[e2.index(c["eps2"]), e1.index(c["eps1"])] = math.log10(v) if v > 0 else np.nan
        im = ax.imshow(grid, origin="lower", aspect="auto", cmap="viridis")
        ax.set_xticks(range(len(e1)), [f"{v:.0e}" for v in e1], rotation=45)
        ax.set_yticks(range(len(e2)), [f"{v:.0e}" for v in e2])
        ax.set_xlabel("eps1 = ||Z||_F")
        ax.set_ylabel("eps2 = ||Z~||_F")
        label = f"r = {r}" if kind == "matrix" else f"r = {r}, n3 = {n3}"
        ax.set_title(label)
        fig.colorbar(im, ax=ax, label="log10 " + title)
    if not panels:
        axes[0][0].set_axis_off()
    fig.tight_layout()
    buf = io.StringIO()
    fig.savefig(buf, format="svg", metadata={"Date": None})
    plt.close(fig)
    return buf.getvalue()


def emit_results(rows, fmt: str, path, metadata: dict | None = None) -> None:
    if fmt == "csv":
        text = to_csv(rows)
    elif fmt == "json":
        text = to_json(rows, metadata)
    elif fmt in ("svg", "svg-heatmap"):
        text = to_svg(rows)
    else:
        raise ValueError(f"unknown format {fmt!r}")
    Path(path).write_text(text)
