"""
Labeled Čech oracle for desk-scale inputs.

A simplex on points S is kept when the smallest ball enclosing its vertices
has radius at most epsilon and every vertex lies within gamma of some
reference point in W. Balls are closed, so tangency counts.
"""

from dataclasses import dataclass
from itertools import combinations
from typing import Optional

import numpy as np
from scipy.spatial.distance import cdist

from ..errors import OracleScaleExceeded, SingleClassError, ValidationError
from ..pointcloud import LabeledPointCloud
from ..utils import log_debug

MAX_POINTS = 15
MAX_AMBIENT_DIM = 3
ORIENTATIONS = ("0-on-1", "1-on-0", "symmetric")

_TOLERANCE = 1e-12


def _within(distance: float, bound: float) -> bool:
    return distance <= bound + _TOLERANCE * max(1.0, bound)


@dataclass(frozen=True)
class LabeledCechParams:
    """Ball radius epsilon and reference proximity gamma."""

    epsilon: float
    gamma: float = float("inf")

    def __post_init__(self):
        if not self.epsilon > 0:
            raise ValidationError("epsilon", f"must be > 0, got {self.epsilon}")
        if not self.gamma >= 0:
            raise ValidationError("gamma", f"must be >= 0, got {self.gamma}")


@dataclass(frozen=True)
class EnclosingBall:
    center: Optional[np.ndarray]
    radius: float

    def contains(self, point: np.ndarray) -> bool:
        if self.center is None:
            return False
        return _within(float(np.linalg.norm(point - self.center)), self.radius)


def _ball_from_support(support: list[np.ndarray]) -> EnclosingBall:
    """Smallest ball with every support point on its boundary."""
    if not support:
        return EnclosingBall(None, float("-inf"))
    p0 = support[0]
    if len(support) == 1:
        return EnclosingBall(p0.copy(), 0.0)

    # center = p0 + A^T lam with 2 A A^T lam = |p_i - p0|^2
    a = np.array([p - p0 for p in support[1:]])
    gram = 2.0 * a @ a.T
    rhs = np.einsum("ij,ij->i", a, a)
    try:
        lam = np.linalg.solve(gram, rhs)
    except np.linalg.LinAlgError:
        lam = np.linalg.lstsq(gram, rhs, rcond=None)[0]
    center = p0 + a.T @ lam
    radius = max(float(np.linalg.norm(p - center)) for p in support)
    return EnclosingBall(center, radius)


def _welzl(points: list[np.ndarray], support: list[np.ndarray], dim: int) -> EnclosingBall:
    if not points or len(support) == dim + 1:
        return _ball_from_support(support)
    last = points[-1]
    ball = _welzl(points[:-1], support, dim)
    if ball.contains(last):
        return ball
    return _welzl(points[:-1], support + [last], dim)


def smallest_enclosing_ball(points: np.ndarray) -> EnclosingBall:
    """
    Exact smallest enclosing ball (Welzl's recursion, fixed point order).

    Args:
        points: m x d array, m >= 1

    Returns:
        EnclosingBall with center and radius
    """
    points = np.asarray(points, dtype=np.float64)
    if points.ndim != 2 or points.shape[0] == 0:
        raise ValidationError("points", "need at least one point")
    return _welzl(list(points), [], points.shape[1])


def _cech_on(sources: np.ndarray, references: np.ndarray, params: LabeledCechParams, max_dim: int) -> list[tuple[int, ...]]:
    if len(sources) == 0:
        return []
    if len(references) == 0:
        covered = np.zeros(len(sources), dtype=bool)
    else:
        nearest = cdist(sources, references).min(axis=1)
        covered = np.array([_within(float(d), params.gamma) for d in nearest])

    level = [(int(v),) for v in np.flatnonzero(covered)]
    included = list(level)
    for _ in range(max_dim):
        present = set(level)
        next_level = []
        for simplex in level:
            for u in range(simplex[-1] + 1, len(sources)):
                if not covered[u]:
                    continue
                candidate = simplex + (u,)
                if any(candidate[:i] + candidate[i + 1:] not in present for i in range(len(candidate) - 1)):
                    continue
                ball = smallest_enclosing_ball(sources[list(candidate)])
                if _within(ball.radius, params.epsilon):
                    next_level.append(candidate)
        if not next_level:
            break
        included.extend(next_level)
        level = next_level
    return included


def labeled_cech(
    sources: np.ndarray,
    references: np.ndarray,
    params: LabeledCechParams,
    max_dim: int = 2,
) -> list[tuple[int, ...]]:
    """
    Labeled Čech complex on `sources` aided by `references`.

    Args:
        sources: Points of the class the complex is built on (m x d)
        references: Reference points W (any count, same d)
        params: epsilon and gamma
        max_dim: Largest simplex dimension reported

    Returns:
        Simplices as sorted vertex tuples (indices into `sources`), ordered
        by dimension then lexicographically

    Raises:
        OracleScaleExceeded: more than 15 source points or ambient
            dimension above 3
    """
    sources = np.asarray(sources, dtype=np.float64)
    references = np.asarray(references, dtype=np.float64)
    if sources.ndim != 2:
        raise ValidationError("sources", "expected an m x d array")
    if len(sources) > MAX_POINTS:
        raise OracleScaleExceeded(f"{len(sources)} points exceed the oracle limit of {MAX_POINTS}")
    if len(sources) and sources.shape[1] > MAX_AMBIENT_DIM:
        raise OracleScaleExceeded(f"ambient dimension {sources.shape[1]} exceeds {MAX_AMBIENT_DIM}")
    if max_dim < 0:
        raise ValidationError("max_dim", f"must be >= 0, got {max_dim}")

    if not len(sources):
        return []
    simplices = _cech_on(sources, references.reshape(-1, sources.shape[1]), params, max_dim)
    simplices.sort(key=lambda s: (len(s), s))
    log_debug(f"Labeled Čech: {len(simplices)} simplices on {len(sources)} points")
    return simplices


def labeled_cech_cloud(
    cloud: LabeledPointCloud,
    params: LabeledCechParams,
    orientation: str = "0-on-1",
    max_dim: int = 2,
) -> list[tuple[int, ...]]:
    """
    Labeled Čech complex on a two-class cloud, in global point ids.

    "0-on-1" builds on class 0 with class 1 as the reference set, "1-on-0"
    the reverse, "symmetric" the union of both (their vertex sets are
    disjoint).
    """
    if orientation not in ORIENTATIONS:
        raise ValidationError("orientation", f"expected one of {', '.join(ORIENTATIONS)}, got {orientation!r}")
    if not cloud.has_both_classes:
        raise SingleClassError("the labeled Čech oracle needs both classes")
    first, second = cloud.classes
    runs = {"0-on-1": [(first, second)], "1-on-0": [(second, first)], "symmetric": [(first, second), (second, first)]}

    result: list[tuple[int, ...]] = []
    for source_label, reference_label in runs[orientation]:
        ids = cloud.class_indices(source_label)
        local = labeled_cech(cloud.points[ids], cloud.points[cloud.class_indices(reference_label)], params, max_dim)
        result.extend(tuple(int(ids[v]) for v in simplex) for simplex in local)
    result.sort(key=lambda s: (len(s), s))
    return result


def is_downward_closed(simplices: list[tuple[int, ...]]) -> bool:
    """True when every nonempty face of every simplex is also present."""
    present = set(simplices)
    for simplex in simplices:
        for size in range(1, len(simplex)):
            if any(face not in present for face in combinations(simplex, size)):
                return False
    return True
