"""Matplotlib renderings of envelope sketches, bifurcation grids and
discriminant samples.  Figures are written to files with the Agg backend."""

from __future__ import annotations

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

STYLE = {
    "figure.figsize": (5.0, 5.0),
    "font.size": 10,
    "axes.spines.top": False,
    "axes.spines.right": False,
    "savefig.dpi": 150,
    "svg.hashsalt": "germforge",
}

_CLASS_COLORS = ["#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e", "#8c564b",
                 "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"]


def _save(fig, path: str) -> None:
    # no timestamps in the file so reruns are byte-identical
    meta = {"Software": None} if str(path).endswith(".png") else {"Date": None}
    fig.savefig(path, bbox_inches="tight", metadata=meta)
    plt.close(fig)


def plot_envelope(sketch, path: str, title: str | None = None) -> None:
    """Support in grey, other envelope branches in black."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for line, label in zip(sketch.polylines, sketch.labels):
            if label == "support":
                ax.plot(line[:, 0], line[:, 1], color="0.6", lw=1.0, ls="--")
            else:
                ax.plot(line[:, 0], line[:, 1], color="k", lw=1.2)
        ax.axhline(0, color="0.85", lw=0.5, zorder=0)
        ax.axvline(0, color="0.85", lw=0.5, zorder=0)
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        if title:
            ax.set_title(title)
        _save(fig, path)


def plot_grid(grid, path: str, axes=(0, 1)) -> None:
    """Scatter the classified grid points in the plane of two parameters."""
    pts = grid.points
    i, j = axes
    labels = sorted({p.label for p in pts})
    color = {lab: _CLASS_COLORS[k % len(_CLASS_COLORS)] for k, lab in enumerate(labels)}
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        for lab in labels:
            sel = [p for p in pts if p.label == lab]
            xs = [float(p.lam[i]) if len(p.lam) > i else 0.0 for p in sel]
            ys = [float(p.lam[j]) if len(p.lam) > j else 0.0 for p in sel]
            ax.scatter(xs, ys, s=12, color=color[lab], label=lab)
        tang = [p for p in pts if p.selfTangency]
        if tang:
            ax.scatter([float(p.lam[i]) for p in tang], [float(p.lam[j]) for p in tang],
                       s=40, facecolors="none", edgecolors="k", label="self-tangency")
        names = grid.spec.paramNames
        ax.set_xlabel(names[i] if len(names) > i else "")
        ax.set_ylabel(names[j] if len(names) > j else "")
        ax.set_title(f"{grid.spec.forClass.name} bifurcation grid")
        ax.legend(loc="best", fontsize=8, frameon=False)
        _save(fig, path)


def plot_discriminant(samples, path: str) -> None:
    """Sign of the discriminant over a 2-parameter sample (later axes fixed)."""
    with plt.rc_context(STYLE):
        fig, ax = plt.subplots()
        xs = np.array([float(p[0]) for p, _ in samples])
        ys = np.array([float(p[1]) if len(p) > 1 else 0.0 for p, _ in samples])
        v = np.sign(np.array([float(d) for _, d in samples]))
        for s, c, lab in ((-1, "#d62728", "negative"), (0, "k", "zero"), (1, "#1f77b4", "positive")):
            m = v == s
            if m.any():
                ax.scatter(xs[m], ys[m], s=8, color=c, label=lab)
        ax.set_xlabel("l1")
        ax.set_ylabel("l2")
        ax.set_title("resultant(Q, Q') sign")
        ax.legend(loc="best", fontsize=8, frameon=False)
        _save(fig, path)
