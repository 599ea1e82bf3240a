"""
SVG snapshots of a filtration at chosen scales (planar clouds only).
"""

from pathlib import Path
from typing import Iterable

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
from matplotlib.collections import LineCollection, PolyCollection  # noqa: E402

import numpy as np  # noqa: E402

from .complexes.base import SimplicialFiltration  # noqa: E402
from .errors import ValidationError  # noqa: E402
from .pointcloud import LabeledPointCloud  # noqa: E402
from .utils import log_debug  # noqa: E402

CLASS_COLORS = ("#d62728", "#1f77b4")
EDGE_COLOR = "#7f7f7f"
TRIANGLE_COLOR = "#bcbd22"


def snapshot_name(theta: float) -> str:
    return f"complex_{theta:.4f}.svg"


def render_snapshot(cloud: LabeledPointCloud, filtration: SimplicialFiltration, theta: float, path: Path) -> Path:
    """
    Draw complex_at(theta): filled triangles, then edges, then points by class.

    Output is byte-stable: the SVG id salt is fixed and no date is embedded.
    """
    if cloud.dim != 2:
        raise ValidationError("cloud", f"rendering needs 2-D points, got dimension {cloud.dim}")

    simplices = filtration.complex_at(theta)
    points = cloud.points
    edges = [points[list(s.vertices)] for s in simplices if s.dim == 1]
    triangles = [points[list(s.vertices)] for s in simplices if s.dim == 2]

    with matplotlib.rc_context({"svg.hashsalt": "lvr-snapshot", "svg.fonttype": "none"}):
        fig, ax = plt.subplots(figsize=(6, 6))
        if triangles:
            ax.add_collection(PolyCollection(triangles, facecolors=TRIANGLE_COLOR, edgecolors="none", alpha=0.35))
        if edges:
            ax.add_collection(LineCollection(edges, colors=EDGE_COLOR, linewidths=0.5))
        for index, label in enumerate(cloud.classes):
            members = cloud.class_indices(label)
            ax.scatter(points[members, 0], points[members, 1], s=6, color=CLASS_COLORS[index % 2],
                       label=f"class {label}", zorder=3)
        if cloud.n:
            ax.legend(loc="upper right", fontsize=8)
        ax.set_title(f"θ = {theta:.4f}")
        ax.set_aspect("equal")
        ax.autoscale_view()
        fig.savefig(path, format="svg", metadata={"Date": None})
        plt.close(fig)

    log_debug(f"Rendered {path.name}: {len(edges)} edges, {len(triangles)} triangles")
    return path


def render_snapshots(
    cloud: LabeledPointCloud,
    filtration: SimplicialFiltration,
    thetas: Iterable[float],
    out_dir: Path,
) -> list[Path]:
    """One SVG per theta, named complex_{theta:.4f}.svg."""
    if cloud.dim != 2:
        raise ValidationError("cloud", f"rendering needs 2-D points, got dimension {cloud.dim}")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    return [render_snapshot(cloud, filtration, float(theta), out_dir / snapshot_name(float(theta)))
            for theta in thetas]


def evenly_spaced(start: float, stop: float, frames: int) -> list[float]:
    """`frames` scales spread over [start, stop], both ends included."""
    if frames < 1:
        raise ValidationError("frames", f"must be >= 1, got {frames}")
    return np.linspace(start, stop, frames).tolist()
