"""
Brute-force reference computations used by the property tests.

Everything here is deliberately naive: dense matrices, double loops,
exhaustive subsets.
"""

import itertools
import math
from typing import Iterable, Optional

import numpy as np


def naive_distance(a, b) -> float:
    return math.sqrt(sum((float(x) - float(y)) ** 2 for x, y in zip(a, b)))


def gf2_rank(matrix: np.ndarray) -> int:
    """Rank over Z/2 by Gaussian elimination."""
    m = (np.asarray(matrix, dtype=np.int64) % 2).astype(np.uint8)
    if m.size == 0:
        return 0
    rows, cols = m.shape
    rank = 0
    for col in range(cols):
        hits = np.flatnonzero(m[rank:, col])
        if not len(hits):
            continue
        pivot = rank + hits[0]
        m[[rank, pivot]] = m[[pivot, rank]]
        others = np.flatnonzero(m[:, col])
        others = others[others != rank]
        m[others] ^= m[rank]
        rank += 1
        if rank == rows:
            break
    return rank


def betti_numbers(simplices: Iterable[tuple[int, ...]], max_dim: int = 1) -> list[int]:
    """beta_0..beta_max_dim of a simplicial complex given as vertex tuples."""
    by_dim: dict[int, list[tuple[int, ...]]] = {}
    for simplex in simplices:
        by_dim.setdefault(len(simplex) - 1, []).append(tuple(simplex))

    def boundary_rank(p: int) -> int:
        if p == 0 or not by_dim.get(p) or not by_dim.get(p - 1):
            return 0
        index = {face: row for row, face in enumerate(by_dim[p - 1])}
        matrix = np.zeros((len(by_dim[p - 1]), len(by_dim[p])), dtype=np.uint8)
        for col, simplex in enumerate(by_dim[p]):
            for i in range(len(simplex)):
                matrix[index[simplex[:i] + simplex[i + 1:]], col] = 1
        return gf2_rank(matrix)

    return [len(by_dim.get(p, [])) - boundary_rank(p) - boundary_rank(p + 1) for p in range(max_dim + 1)]


def nontrivial_complex(simplices) -> list[tuple[int, ...]]:
    """Drop vertices that have no incident edge."""
    vertices = [s.vertices if hasattr(s, "vertices") else tuple(s) for s in simplices]
    touched = {v for s in vertices if len(s) > 1 for v in s}
    return [s for s in vertices if len(s) > 1 or s[0] in touched]


def uncapped_edges(cloud, rho: Optional[np.ndarray] = None) -> dict[tuple[int, int], float]:
    """Every finite cross-class edge with its plain or locally scaled value."""
    edges = {}
    for i in range(cloud.n):
        for j in range(i + 1, cloud.n):
            if cloud.labels[i] == cloud.labels[j]:
                continue
            d = naive_distance(cloud.points[i], cloud.points[j])
            if rho is None:
                edges[(i, j)] = d
                continue
            scale = math.sqrt(rho[i] * rho[j])
            if d == 0:
                edges[(i, j)] = 0.0
            elif scale > 0:
                edges[(i, j)] = d / scale
    return edges


def sorted_opposite_distances(cloud, i: int) -> list[float]:
    return sorted(naive_distance(cloud.points[i], cloud.points[j])
                  for j in range(cloud.n) if cloud.labels[j] != cloud.labels[i])


def planar_enclosing_radius(points: np.ndarray) -> float:
    """Smallest enclosing circle by trying every ball through 1, 2 or 3 points."""
    points = np.asarray(points, dtype=np.float64)
    candidates = [(points[0], 0.0)]
    for a, b in itertools.combinations(points, 2):
        center = (a + b) / 2
        candidates.append((center, naive_distance(a, center)))
    for a, b, c in itertools.combinations(points, 3):
        d = 2 * (a[0] * (b[1] - c[1]) + b[0] * (c[1] - a[1]) + c[0] * (a[1] - b[1]))
        if abs(d) < 1e-14:
            continue
        sa, sb, sc = a @ a, b @ b, c @ c
        ux = (sa * (b[1] - c[1]) + sb * (c[1] - a[1]) + sc * (a[1] - b[1])) / d
        uy = (sa * (c[0] - b[0]) + sb * (a[0] - c[0]) + sc * (b[0] - a[0])) / d
        center = np.array([ux, uy])
        candidates.append((center, naive_distance(a, center)))
    best = math.inf
    for center, radius in candidates:
        if all(naive_distance(p, center) <= radius + 1e-9 for p in points):
            best = min(best, radius)
    return best


def exhaustive_cech(sources, references, epsilon: float, gamma: float, max_dim: int) -> list[tuple[int, ...]]:
    """All subsets of gamma-covered sources whose enclosing circle fits in epsilon."""
    covered = [i for i, s in enumerate(sources)
               if any(naive_distance(s, w) <= gamma for w in references)]
    result = []
    for size in range(1, max_dim + 2):
        for subset in itertools.combinations(covered, size):
            if size == 1 or planar_enclosing_radius(np.asarray(sources)[list(subset)]) <= epsilon:
                result.append(subset)
    return sorted(result, key=lambda s: (len(s), s))


def random_cloud(seed: int, n: int = 10, dim: int = 2, min_per_class: int = 3):
    """Uniform points in the unit box, labels shuffled with both classes present."""
    from src.pointcloud import LabeledPointCloud

    rng = np.random.default_rng(seed)
    points = rng.random((n, dim))
    labels = np.zeros(n, dtype=np.int64)
    ones = rng.integers(min_per_class, n - min_per_class + 1)
    labels[rng.permutation(n)[:ones]] = 1
    return LabeledPointCloud(points, labels)
