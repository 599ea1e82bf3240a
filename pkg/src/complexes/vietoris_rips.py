"""
Labeled Vietoris-Rips filtrations.

The one-skeleton holds every cross-class edge of the neighborhood graph plus
a same-class edge for every length-2 walk through a point of the other class.
Higher simplices are the cliques of that one-skeleton.
"""

from dataclasses import dataclass
from typing import Iterator, Optional

import numpy as np

from ..errors import ValidationError
from ..neighborhood import CrossClassGraph
from ..pointcloud import DistanceOracle, LabeledPointCloud
from ..utils import log_debug
from .base import Simplex, SimplicialFiltration

# candidate 2-hop pairs gathered before each duplicate reduction
HOP_CHUNK = 1 << 21


@dataclass(frozen=True)
class OneSkeleton:
    """
    Edges of a labeled complex, stored once as (src < dst).

    `cross` marks edges copied from the neighborhood graph; the rest are
    2-hop same-class edges. Edges are sorted by (value, src, dst).
    """

    n: int
    src: np.ndarray
    dst: np.ndarray
    values: np.ndarray
    cross: np.ndarray

    def __len__(self) -> int:
        return int(len(self.values))

    def edges(self) -> Iterator[tuple[int, int, float]]:
        for i, j, value in zip(self.src.tolist(), self.dst.tolist(), self.values.tolist()):
            yield i, j, value

    def at(self, theta: float) -> "OneSkeleton":
        keep = self.values <= theta
        return OneSkeleton(self.n, self.src[keep], self.dst[keep], self.values[keep], self.cross[keep])

    def min_incident(self) -> np.ndarray:
        """Smallest incident edge value per vertex (inf when isolated)."""
        lowest = np.full(self.n, np.inf)
        np.minimum.at(lowest, self.src, self.values)
        np.minimum.at(lowest, self.dst, self.values)
        return lowest


def _canonical(n: int, src, dst, values, cross) -> OneSkeleton:
    order = np.lexsort((dst, src, values))
    return OneSkeleton(
        n=n,
        src=np.asarray(src, dtype=np.int64)[order],
        dst=np.asarray(dst, dtype=np.int64)[order],
        values=np.asarray(values, dtype=np.float64)[order],
        cross=np.asarray(cross, dtype=bool)[order],
    )


def _cheapest(keys: np.ndarray, values: np.ndarray, more_keys: list, more_values: list):
    """Merge candidate (pair key, value) batches, keeping the lowest value per key."""
    if more_keys:
        keys = np.concatenate([keys, *more_keys])
        values = np.concatenate([values, *more_values])
    order = np.lexsort((values, keys))
    keys, values = keys[order], values[order]
    first = np.ones(len(keys), dtype=bool)
    first[1:] = keys[1:] != keys[:-1]
    return keys[first], values[first]


def one_skeleton(
    graph: CrossClassGraph,
    cloud: LabeledPointCloud,
    threshold: Optional[float] = None,
) -> OneSkeleton:
    """
    Cross-class edges plus 2-hop same-class edges.

    A same-class pair {i, j} sharing cross-class neighbors w enters at
    min over w of max(value(i, w), value(w, j)).

    Args:
        graph: Cross-class neighborhood graph over `cloud`
        cloud: The labeled cloud the graph was built on
        threshold: Drop every edge whose value exceeds this

    Returns:
        OneSkeleton in canonical edge order
    """
    if graph.n != cloud.n:
        raise ValidationError("graph", f"built on {graph.n} points, cloud has {cloud.n}")
    src, dst, values = graph.src, graph.dst, graph.values
    if len(values) and np.any(cloud.labels[src] == cloud.labels[dst]):
        raise ValidationError("graph", "an edge joins two points of the same class")
    if threshold is not None:
        keep = values <= threshold
        src, dst, values = src[keep], dst[keep], values[keep]

    # incidence lists sorted by (witness, neighbor)
    witness = np.concatenate([src, dst])
    neighbor = np.concatenate([dst, src])
    incident = np.concatenate([values, values])
    order = np.lexsort((neighbor, witness))
    witness, neighbor, incident = witness[order], neighbor[order], incident[order]
    starts = np.searchsorted(witness, np.arange(cloud.n), side="left")
    ends = np.searchsorted(witness, np.arange(cloud.n), side="right")

    hop_keys = np.zeros(0, dtype=np.int64)
    hop = np.zeros(0)
    pending_keys, pending_values, pending = [], [], 0
    for w in np.flatnonzero(ends - starts >= 2):
        nbrs = neighbor[starts[w]:ends[w]]
        vals = incident[starts[w]:ends[w]]
        a, b = np.triu_indices(len(nbrs), k=1)
        pending_keys.append(nbrs[a] * cloud.n + nbrs[b])
        pending_values.append(np.maximum(vals[a], vals[b]))
        pending += len(a)
        if pending >= HOP_CHUNK:
            hop_keys, hop = _cheapest(hop_keys, hop, pending_keys, pending_values)
            pending_keys, pending_values, pending = [], [], 0
    hop_keys, hop = _cheapest(hop_keys, hop, pending_keys, pending_values)
    lo, hi = hop_keys // cloud.n, hop_keys % cloud.n

    skeleton = _canonical(
        cloud.n,
        np.concatenate([src, lo]),
        np.concatenate([dst, hi]),
        np.concatenate([values, hop]),
        np.concatenate([np.ones(len(src), dtype=bool), np.zeros(len(lo), dtype=bool)]),
    )
    log_debug(f"One-skeleton: {len(src)} cross edges, {len(lo)} 2-hop edges")
    return skeleton


def expand(
    skeleton: OneSkeleton,
    max_dim: int = 2,
    threshold: Optional[float] = None,
    grid: Optional[tuple[float, float, int]] = None,
) -> SimplicialFiltration:
    """
    Clique (flag) expansion of a one-skeleton.

    Every vertex enters at 0; a clique enters at the largest value among
    its edges.

    Args:
        skeleton: Edges with values
        max_dim: Largest simplex dimension to generate (>= 1)
        threshold: Skip simplices with value above this
        grid: Scale grid recorded on the filtration

    Returns:
        SimplicialFiltration over all skeleton vertices
    """
    if not isinstance(max_dim, (int, np.integer)) or max_dim < 1:
        raise ValidationError("max_dim", f"must be an integer >= 1, got {max_dim!r}")
    if threshold is not None:
        skeleton = skeleton.at(threshold)
    n = skeleton.n

    simplices: list[Simplex] = [Simplex(0.0, 0, (v,)) for v in range(n)]
    simplices.extend(Simplex(value, 1, (i, j)) for i, j, value in skeleton.edges())

    # higher-neighbor lists: for each v, the neighbors u > v with edge values
    order = np.lexsort((skeleton.dst, skeleton.src))
    src, dst, values = skeleton.src[order], skeleton.dst[order], skeleton.values[order]
    starts = np.searchsorted(src, np.arange(n), side="left")
    ends = np.searchsorted(src, np.arange(n), side="right")
    higher = [dst[starts[v]:ends[v]] for v in range(n)]
    higher_values = [values[starts[v]:ends[v]] for v in range(n)]

    level = [(value, (i, j)) for i, j, value in skeleton.edges()]
    for dim in range(2, max_dim + 1):
        next_level = []
        for value, vertices in level:
            candidates = higher[vertices[-1]]
            for v in vertices[:-1]:
                if not len(candidates):
                    break
                candidates = np.intersect1d(candidates, higher[v], assume_unique=True)
            if not len(candidates):
                continue
            entry = np.full(len(candidates), value)
            for v in vertices:
                at = np.searchsorted(higher[v], candidates)
                entry = np.maximum(entry, higher_values[v][at])
            for u, u_value in zip(candidates.tolist(), entry.tolist()):
                next_level.append((u_value, vertices + (u,)))
        simplices.extend(Simplex(value, dim, vertices) for value, vertices in next_level)
        log_debug(f"Expansion: {len(next_level)} simplices of dimension {dim}")
        level = next_level

    return SimplicialFiltration.from_simplices(n, int(max_dim), simplices, grid)


def class_filtration(
    cloud: LabeledPointCloud,
    oracle: DistanceOracle,
    label: int,
    max_dim: int = 2,
    threshold: Optional[float] = None,
) -> SimplicialFiltration:
    """
    Ordinary Vietoris-Rips filtration on the points of one class.

    Vertex ids of the result index the class sub-cloud in ascending id
    order, i.e. `cloud.class_indices(label)[v]` is the original id.
    """
    members = cloud.class_indices(label)
    if not len(members):
        raise ValidationError("label", f"no points carry class {label}")
    distances = oracle.block(members, members)
    i, j = np.triu_indices(len(members), k=1)
    values = distances[i, j]
    if threshold is not None:
        keep = values <= threshold
        i, j, values = i[keep], j[keep], values[keep]
    skeleton = _canonical(len(members), i, j, values, np.zeros(len(values), dtype=bool))
    return expand(skeleton, max_dim=max_dim)
