"""Optional figure rendering for experiment reports.

Figures are written next to the CSVs.  Matplotlib runs on the Agg
backend so rendering works headless.
"""

from __future__ import annotations

from collections import defaultdict
from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402


def _series(header: list[str], rows: list[list], x: str, y: str,
            group_by: list[str]) -> dict[tuple, list[tuple[float, float]]]:
    xi, yi = header.index(x), header.index(y)
    gi = [header.index(g) for g in group_by]
    out: dict[tuple, list[tuple[float, float]]] = defaultdict(list)
    for row in rows:
        key = tuple(str(row[i]) for i in gi)
        out[key].append((float(row[xi]), float(row[yi])))
    return out


def _line_plot(header, rows, x, y, group_by, title, out_path,
               logx=False):
    fig, ax = plt.subplots(figsize=(7, 4.5))
    for key, pts in sorted(_series(header, rows, x, y, group_by).items()):
        pts.sort()
        ax.plot([p[0] for p in pts], [p[1] for p in pts],
                marker="o", label="/".join(key))
    if logx:
        ax.set_xscale("log")
    ax.set_xlabel(x)
    ax.set_ylabel(y)
    ax.set_title(title)
    ax.grid(True, alpha=0.3)
    ax.legend(fontsize=8)
    fig.tight_layout()
    fig.savefig(out_path, dpi=120)
    plt.close(fig)


def render_experiment(name: str, header: list[str], rows: list[list],
                      out_path: str | Path) -> Path:
    """Render the standard figure for a named experiment's rows."""
    out_path = Path(out_path)
    if name == "lifetime_vs_edrx":
        _line_plot(header, rows, "edrx_s", "lifetime_years", ["clock"],
                   "Battery lifetime vs eDRX period", out_path, logx=True)
    elif name == "lifetime_matrix":
        _line_plot(header, rows, "reports_per_day", "lifetime_years",
                   ["technology", "coverage", "data_len_bits"],
                   "Battery lifetime vs reporting rate", out_path, logx=True)
    elif name == "latency_vs_indoor":
        _line_plot(header, rows, "indoor_ratio", "mean_latency_s",
                   ["technology"], "Mean report latency vs indoor ratio",
                   out_path)
    elif name in ("airtime_vs_indoor", "scalability_vs_indoor"):
        ylabel = ("simulated" if "simulated" in header else header[-1])
        _line_plot(header, rows, "indoor_ratio", ylabel,
                   ["technology"], name.replace("_", " "), out_path)
    else:
        raise ValueError(f"no figure defined for experiment {name!r}")
    return out_path
