"""Static figures for reports; output is byte-stable for identical inputs."""
from __future__ import annotations

from pathlib import Path

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402

from .body import ConvexBody  # noqa: E402

__all__ = ["save_figure", "plot_triangle_trajectory", "plot_bodies"]

_STYLE = {
    "svg.hashsalt": "convexequiv",
    "svg.fonttype": "none",
    "font.size": 9,
    "axes.grid": True,
    "grid.alpha": 0.3,
}


def save_figure(fig, path) -> Path:
    """Write ``fig`` to ``path`` (format from the suffix) without timestamps."""
    path = Path(path)
    fmt = path.suffix.lstrip(".").lower() or "svg"
    meta = {"Date": None} if fmt == "svg" else {"Software": None} if fmt == "png" else {}
    with plt.rc_context(_STYLE):
        fig.savefig(path, format=fmt, metadata=meta)
    plt.close(fig)
    return path


def plot_triangle_trajectory(table, path) -> Path:
    """Centroids of the collapsing triangles against the segment they approach."""
    with plt.rc_context(_STYLE):
        fig, (ax, ax2) = plt.subplots(1, 2, figsize=(8, 3.6))
        cx = np.array([r.cx for r in table.rows])
        cy = np.array([r.cy for r in table.rows])
        ax.plot([0, 0], [0, 1], color="0.3", lw=2, label="limit segment I")
        ax.plot(cx, cy, ".", ms=3, color="C0", label="centroid of T_n")
        ax.plot(*table.midpoint, "s", color="C3", label="midpoint of I")
        ax.plot(*table.limit, "o", mfc="none", color="C0", label="limit of centroids")
        ax.set_xlim(-0.05, 0.4)
        ax.set_ylim(-0.05, 1.05)
        ax.set_aspect("equal")
        ax.set_xlabel("x")
        ax.set_ylabel("y")
        ax.legend(loc="upper right", fontsize=7)
        n = np.array([r.n for r in table.rows])
        ax2.loglog(n, [r.hausdorff_to_segment for r in table.rows], label="d_H(T_n, I)")
        ax2.loglog(n, [r.gap_to_midpoint for r in table.rows], label="|centroid - midpoint|")
        ax2.set_xlabel("n")
        ax2.legend(fontsize=7)
        fig.tight_layout()
    return save_figure(fig, path)


def plot_bodies(bodies: dict[str, ConvexBody], path, points: dict[str, np.ndarray] | None = None) -> Path:
    """Outlines of planar bodies with optional labelled points."""
    with plt.rc_context(_STYLE):
        fig, ax = plt.subplots(figsize=(4.5, 4.5))
        for i, (name, body) in enumerate(bodies.items()):
            if body.dim_ambient != 2:
                raise ValueError("plot_bodies draws planar bodies only")
            loop = body.loop
            closed = np.vstack([loop, loop[:1]])
            ax.plot(closed[:, 0], closed[:, 1], "-", color=f"C{i}", label=name)
        for j, (name, p) in enumerate((points or {}).items()):
            ax.plot(p[0], p[1], "x", color=f"C{(j + len(bodies)) % 10}", label=name)
        ax.set_aspect("equal")
        ax.legend(fontsize=7)
        fig.tight_layout()
    return save_figure(fig, path)
