"""
Cross-class neighborhood graphs and local scales.

Both labeled Vietoris-Rips filtrations start here: every edge joins two
points of opposite classes and carries the scale at which it appears,
either the raw distance (plain) or the distance divided by the geometric
mean of the endpoints' local scales (locally scaled).
"""

from dataclasses import dataclass
from typing import Iterator, Optional, TextIO

import numpy as np
from joblib import Parallel, delayed

from .errors import SingleClassError, ValidationError
from .pointcloud import DistanceOracle, LabeledPointCloud
from .utils import format_float, log_debug

MODES = ("plain", "locally-scaled")


@dataclass(frozen=True)
class LocalScales:
    """Per-point distance to the k-th nearest opposite-class point."""

    rho: np.ndarray
    k: int

    def __len__(self) -> int:
        return len(self.rho)


@dataclass(frozen=True)
class CrossClassGraph:
    """
    Symmetrized bipartite neighborhood graph.

    Edges are stored once as (src < dst) and kept sorted by
    (value, src, dst), so two builds of the same input are bit-identical
    whatever the worker count.
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    values: np.ndarray
    mode: str
    cap: int
    scales: Optional[LocalScales] = None

    def __len__(self) -> int:
        return int(len(self.values))

    def edges(self) -> Iterator[tuple[int, int, float]]:
        """Yield (i, j, value) in canonical order."""
        for i, j, value in zip(self.src.tolist(), self.dst.tolist(), self.values.tolist()):
            yield i, j, value

    def at(self, theta: float) -> "CrossClassGraph":
        """The thresholded graph G_theta (edges with value <= theta)."""
        keep = self.values <= theta
        return CrossClassGraph(self.n, self.src[keep], self.dst[keep], self.values[keep],
                               self.mode, self.cap, self.scales)

    def to_csv(self, stream: TextIO):
        """Write "i,j,value" rows in canonical order."""
        stream.write("i,j,value\n")
        for i, j, value in self.edges():
            stream.write(f"{i},{j},{format_float(value)}\n")


def _require_both_classes(cloud: LabeledPointCloud) -> tuple[int, int]:
    if not cloud.has_both_classes:
        found = ", ".join(str(c) for c in cloud.classes) or "none"
        raise SingleClassError(f"both classes must be present (found: {found})")
    first, second = cloud.classes
    return first, second


def local_scales(cloud: LabeledPointCloud, oracle: DistanceOracle, k: int) -> LocalScales:
    """
    Local scale of every point: the k-th smallest distance to the other class.

    Args:
        cloud: Two-class labeled cloud
        oracle: Distances over the cloud
        k: Neighbor rank (>= 1)

    Returns:
        LocalScales aligned with the cloud's ids

    Raises:
        SingleClassError: if a class is empty
        ValidationError: if k exceeds the opposite class size
    """
    if not isinstance(k, (int, np.integer)) or k < 1:
        raise ValidationError("k", f"must be a positive integer, got {k!r}")
    first, second = _require_both_classes(cloud)

    rho = np.zeros(cloud.n, dtype=np.float64)
    for label, other in ((first, second), (second, first)):
        rows = cloud.class_indices(label)
        cols = cloud.class_indices(other)
        if k > len(cols):
            raise ValidationError(
                "k", f"k={k} exceeds the {len(cols)} points of class {other} (opposite of class {label})"
            )
        block = oracle.block(rows, cols)
        rho[rows] = np.partition(block, k - 1, axis=1)[:, k - 1]

    rho.setflags(write=False)
    return LocalScales(rho=rho, k=int(k))


def edge_values(distances: np.ndarray, rho_rows: Optional[np.ndarray], rho_cols: Optional[np.ndarray]) -> np.ndarray:
    """
    Filtration values for a block of cross-class distances.

    Plain mode passes no scales and gets the distances back. In locally
    scaled mode a zero distance stays 0 and a positive distance over a zero
    scale product becomes +inf.
    """
    if rho_rows is None:
        return distances
    denom = np.sqrt(rho_rows[:, None] * rho_cols[None, :])
    with np.errstate(divide="ignore", invalid="ignore"):
        values = distances / denom
    values = np.where(distances == 0.0, 0.0, values)
    values = np.where((distances > 0.0) & (denom == 0.0), np.inf, values)
    return values


def _candidate_mask(values: np.ndarray, cap: int) -> np.ndarray:
    """Per row: the `cap` smallest finite values, ties at the cutoff included."""
    if cap >= values.shape[1]:
        return np.isfinite(values)
    cutoff = np.partition(values, cap - 1, axis=1)[:, cap - 1]
    return (values <= cutoff[:, None]) & np.isfinite(values)


def build_graph(
    cloud: LabeledPointCloud,
    oracle: DistanceOracle,
    mode: str = "plain",
    scales: Optional[LocalScales] = None,
    cap: int = 20,
    threads: int = 1,
) -> CrossClassGraph:
    """
    Build the capped, symmetrized cross-class neighborhood graph.

    Each point nominates its `cap` nearest opposite-class points under the
    mode's edge value; the edge set is the union of all nominations.

    Args:
        cloud: Two-class labeled cloud
        oracle: Distances over the cloud
        mode: "plain" or "locally-scaled"
        scales: Local scales (required for locally-scaled mode)
        cap: Candidate neighbors per point before symmetrization
        threads: Worker cap for the per-point searches

    Returns:
        CrossClassGraph with canonical edge order
    """
    if mode not in MODES:
        raise ValidationError("mode", f"expected one of {', '.join(MODES)}, got {mode!r}")
    if not isinstance(cap, (int, np.integer)) or cap < 1:
        raise ValidationError("cap", f"must be a positive integer, got {cap!r}")
    if mode == "locally-scaled" and scales is None:
        raise ValidationError("scales", "locally-scaled mode needs local scales")
    first, second = _require_both_classes(cloud)

    keys_parts, value_parts = [], []
    for label, other in ((first, second), (second, first)):
        rows = cloud.class_indices(label)
        cols = cloud.class_indices(other)
        distances = oracle.block(rows, cols)
        if mode == "locally-scaled":
            values = edge_values(distances, scales.rho[rows], scales.rho[cols])
        else:
            values = edge_values(distances, None, None)

        chunks = np.array_split(np.arange(len(rows)), max(1, min(threads, len(rows))))
        if threads > 1 and len(chunks) > 1:
            masks = Parallel(n_jobs=threads, prefer="threads")(
                delayed(_candidate_mask)(values[chunk], cap) for chunk in chunks
            )
            mask = np.vstack(masks)
        else:
            mask = _candidate_mask(values, cap)

        r, c = np.nonzero(mask)
        i, j = rows[r], cols[c]
        lo, hi = np.minimum(i, j), np.maximum(i, j)
        keys_parts.append(lo * cloud.n + hi)
        value_parts.append(values[r, c])

    keys = np.concatenate(keys_parts)
    vals = np.concatenate(value_parts)
    # both endpoints may nominate the same edge with the same value
    keys, first_index = np.unique(keys, return_index=True)
    vals = vals[first_index]

    src, dst = keys // cloud.n, keys % cloud.n
    order = np.lexsort((dst, src, vals))
    graph = CrossClassGraph(
        n=cloud.n,
        src=src[order].astype(np.int64),
        dst=dst[order].astype(np.int64),
        values=vals[order].astype(np.float64),
        mode=mode,
        cap=int(cap),
        scales=scales,
    )
    log_debug(f"Built {mode} cross-class graph: {len(graph)} edges (cap {cap})")
    return graph
