"""
Persistent homology over Z/2, persistence diagrams and Betti curves.

The reference engine pairs simplices by column reduction: H0 with a
union-find under the elder rule, higher dimensions by reducing coboundary
columns restricted to the positive rows of the dimension below (negative
simplices never become pivots). The "gudhi" engine feeds the same
filtration to gudhi's SimplexTree.

`flag_persistence` works from a one-skeleton alone: H0 by the same
union-find over the sorted edges, higher dimensions by gudhi after edge
collapse and clique expansion, so no Python object is built per simplex.
"""

from dataclasses import dataclass
from typing import Iterable, Optional, TextIO

import numpy as np
from scipy.sparse import coo_matrix
from scipy.sparse.csgraph import connected_components

from .complexes.base import Simplex, SimplicialFiltration, faces
from .complexes.vietoris_rips import OneSkeleton
from .errors import FiltrationOrderError, ValidationError
from .utils import encode_float, format_float, log_debug, log_warning

CONVENTIONS = ("all", "nontrivial-h0")
ENGINES = ("matrix", "gudhi")

# edge-collapse passes before expansion; stops early once a pass removes nothing
COLLAPSE_ROUNDS = 4


@dataclass(frozen=True)
class PersistencePair:
    """
    A homology class with its birth and death scales.

    `creator` and `destroyer` are the vertex tuples of the simplices that
    created and killed the class (destroyer is None for essential classes).
    """

    dim: int
    birth: float
    death: float
    creator: Optional[tuple[int, ...]] = None
    destroyer: Optional[tuple[int, ...]] = None

    def __post_init__(self):
        if self.death < self.birth:
            raise ValidationError("death", f"{self.death} precedes birth {self.birth}")

    @property
    def lifetime(self) -> float:
        return self.death - self.birth

    @property
    def is_essential(self) -> bool:
        return self.death == float("inf")

    @property
    def is_zero(self) -> bool:
        """Zero persistence (born and killed at the same scale)."""
        return self.birth == self.death

    def key(self) -> tuple[int, float, float]:
        return (self.dim, self.birth, self.death)

    def to_dict(self) -> dict:
        return {
            "dim": self.dim,
            "birth": encode_float(self.birth),
            "death": encode_float(self.death),
            "zero_persistence": self.is_zero,
        }


@dataclass(frozen=True)
class PersistenceDiagram:
    pairs: tuple[PersistencePair, ...]
    convention: str = "nontrivial-h0"

    def __len__(self) -> int:
        return len(self.pairs)

    def of_dim(self, dim: int) -> list[PersistencePair]:
        return [pair for pair in self.pairs if pair.dim == dim]

    def off_diagonal(self) -> list[PersistencePair]:
        return [pair for pair in self.pairs if not pair.is_zero]

    def multiset(self, include_zero: bool = True) -> list[tuple[int, float, float]]:
        """Sorted (dim, birth, death) triples."""
        return sorted(pair.key() for pair in self.pairs if include_zero or not pair.is_zero)

    def to_json(self) -> list[dict]:
        """JSON list of {dim, birth, death} ("inf" for essential classes)."""
        return [pair.to_dict() for pair in self.pairs]


@dataclass(frozen=True)
class ScaleGrid:
    """Inclusive linear grid of `steps` values from start to stop."""

    start: float
    stop: float
    steps: int

    def __post_init__(self):
        if not (np.isfinite(self.start) and np.isfinite(self.stop)):
            raise ValidationError("grid", "start and stop must be finite")
        if self.start > self.stop:
            raise ValidationError("grid", f"start {self.start} exceeds stop {self.stop}")
        if not isinstance(self.steps, (int, np.integer)) or self.steps < 1:
            raise ValidationError("steps", f"must be a positive integer, got {self.steps!r}")

    @classmethod
    def of(cls, spec: tuple[float, float, int]) -> "ScaleGrid":
        start, stop, steps = spec
        return cls(float(start), float(stop), int(steps))

    @property
    def values(self) -> np.ndarray:
        return np.linspace(self.start, self.stop, self.steps)

    def as_tuple(self) -> tuple[float, float, int]:
        return (self.start, self.stop, self.steps)

    def to_dict(self) -> dict:
        return {"start": self.start, "stop": self.stop, "steps": self.steps}


@dataclass(frozen=True)
class BettiCurve:
    """Betti numbers of one dimension at each grid value."""

    dim: int
    grid: ScaleGrid
    counts: np.ndarray

    @property
    def total(self) -> int:
        return int(self.counts.sum())

    def to_csv(self, stream: TextIO):
        stream.write("theta,count\n")
        for theta, count in zip(self.grid.values.tolist(), self.counts.tolist()):
            stream.write(f"{format_float(theta)},{count}\n")


class _UnionFind:
    """Disjoint sets over filtration positions; the oldest position is the root."""

    def __init__(self, members: Iterable[int]):
        self.parent = {m: m for m in members}

    def find(self, x: int) -> int:
        parent = self.parent
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    def union(self, a: int, b: int) -> tuple[int, int]:
        """Merge the sets of roots a and b; returns (survivor, absorbed)."""
        old, young = (a, b) if a < b else (b, a)
        self.parent[young] = old
        return old, young


def nontrivial_filtration(filtration: SimplicialFiltration) -> SimplicialFiltration:
    """
    Re-base vertex values to their first incident edge.

    Vertices with no finite incident edge are dropped, so no singleton
    component ever enters the diagram.
    """
    lowest: dict[int, float] = {}
    for simplex in filtration.simplices:
        if simplex.dim == 1:
            for v in simplex.vertices:
                if v not in lowest:
                    lowest[v] = simplex.value
    rebased = [
        Simplex(lowest[s.vertices[0]], 0, s.vertices) if s.dim == 0 else s
        for s in filtration.simplices
        if s.dim > 0 or s.vertices[0] in lowest
    ]
    return SimplicialFiltration.from_simplices(filtration.n, filtration.max_dim, rebased, filtration.grid)


def _boundary_positions(simplices: tuple[Simplex, ...]) -> dict[int, list[tuple[int, list[int]]]]:
    """Per dimension: (position, facet positions) for every simplex, checking order."""
    position: dict[tuple[int, ...], int] = {}
    by_dim: dict[int, list[tuple[int, list[int]]]] = {}
    for index, simplex in enumerate(simplices):
        rows = []
        if simplex.dim > 0:
            for face in faces(simplex.vertices):
                row = position.get(face)
                if row is None:
                    raise FiltrationOrderError(face, simplex.vertices)
                rows.append(row)
        position[simplex.vertices] = index
        by_dim.setdefault(simplex.dim, []).append((index, rows))
    return by_dim


def _matrix_pairs(filtration: SimplicialFiltration, max_hom_dim: int) -> list[PersistencePair]:
    simplices = filtration.simplices
    by_dim = _boundary_positions(simplices)
    pairs: list[PersistencePair] = []

    # H0 by union-find; edges that merge nothing are the positive 1-simplices
    vertices = [index for index, _ in by_dim.get(0, [])]
    components = _UnionFind(vertices)
    negative: set[int] = set()
    for index, (a, b) in by_dim.get(1, []):
        ra, rb = components.find(a), components.find(b)
        if ra == rb:
            continue
        _, young = components.union(ra, rb)
        negative.add(index)
        pairs.append(PersistencePair(0, simplices[young].value, simplices[index].value,
                                     simplices[young].vertices, simplices[index].vertices))
    for v in vertices:
        if components.find(v) == v:
            pairs.append(PersistencePair(0, simplices[v].value, float("inf"), simplices[v].vertices))

    for dim in range(1, max_hom_dim + 1):
        positive = {index for index, _ in by_dim.get(dim, []) if index not in negative}
        unpaired = set(positive)
        pivots: dict[int, set[int]] = {}
        negative = set()
        for index, rows in by_dim.get(dim + 1, []):
            if not unpaired:
                break
            column = {row for row in rows if row in positive}
            while column:
                low = max(column)
                if low not in pivots:
                    break
                column ^= pivots[low]
            if not column:
                continue
            low = max(column)
            pivots[low] = column
            negative.add(index)
            unpaired.discard(low)
            pairs.append(PersistencePair(dim, simplices[low].value, simplices[index].value,
                                         simplices[low].vertices, simplices[index].vertices))
        for index in sorted(unpaired):
            pairs.append(PersistencePair(dim, simplices[index].value, float("inf"), simplices[index].vertices))
        log_debug(f"H{dim}: {len(positive)} positive simplices, {len(pivots)} paired")

    return pairs


def _gudhi():
    try:
        import gudhi
    except ImportError as exc:
        raise ValidationError("engine", "the gudhi engine needs the gudhi package installed") from exc
    return gudhi


def _gudhi_pairs(filtration: SimplicialFiltration, max_hom_dim: int) -> list[PersistencePair]:
    tree = _gudhi().SimplexTree()
    for simplex in filtration.simplices:
        tree.insert(list(simplex.vertices), filtration=simplex.value)
    tree.persistence(homology_coeff_field=2, min_persistence=-1, persistence_dim_max=True)

    pairs = []
    for creator, destroyer in tree.persistence_pairs():
        dim = len(creator) - 1
        if dim > max_hom_dim:
            continue
        creator = tuple(sorted(creator))
        birth = tree.filtration(list(creator))
        if destroyer:
            destroyer = tuple(sorted(destroyer))
            pairs.append(PersistencePair(dim, birth, tree.filtration(list(destroyer)), creator, destroyer))
        else:
            pairs.append(PersistencePair(dim, birth, float("inf"), creator))
    return pairs


def persistent_homology(
    filtration: SimplicialFiltration,
    max_hom_dim: int = 1,
    convention: str = "nontrivial-h0",
    engine: str = "matrix",
) -> PersistenceDiagram:
    """
    Persistence diagram of a filtration over Z/2.

    Args:
        filtration: Simplices in a valid filtration order
        max_hom_dim: Highest homology dimension reported
        convention: "all" keeps vertex-born H0 classes, "nontrivial-h0"
            re-bases vertices to their first incident edge first
        engine: "matrix" (built-in reduction) or "gudhi"

    Returns:
        PersistenceDiagram, pairs sorted by (dim, birth, death)

    Raises:
        FiltrationOrderError: a face is missing or follows its coface
    """
    if convention not in CONVENTIONS:
        raise ValidationError("convention", f"expected one of {', '.join(CONVENTIONS)}, got {convention!r}")
    if engine not in ENGINES:
        raise ValidationError("engine", f"expected one of {', '.join(ENGINES)}, got {engine!r}")
    if max_hom_dim < 0:
        raise ValidationError("max_hom_dim", f"must be >= 0, got {max_hom_dim}")
    if max_hom_dim + 1 > filtration.max_dim:
        log_warning(f"H{max_hom_dim} death times need simplices up to dimension {max_hom_dim + 1}")
        max_hom_dim = min(max_hom_dim, filtration.max_dim)

    if convention == "nontrivial-h0":
        filtration = nontrivial_filtration(filtration)

    if engine == "gudhi":
        pairs = _gudhi_pairs(filtration, max_hom_dim)
    else:
        pairs = _matrix_pairs(filtration, max_hom_dim)

    pairs.sort(key=lambda p: (p.dim, p.birth, p.death, p.creator or (), p.destroyer or ()))
    return PersistenceDiagram(pairs=tuple(pairs), convention=convention)


def _skeleton_h0_pairs(skeleton: OneSkeleton, convention: str) -> list[PersistencePair]:
    """Elder-rule H0 over the skeleton's canonical edge order."""
    n = skeleton.n
    if n == 0:
        return []
    if convention == "nontrivial-h0":
        birth = skeleton.min_incident()
        present = np.isfinite(birth)
    else:
        birth = np.zeros(n)
        present = np.ones(n, dtype=bool)

    adjacency = coo_matrix((np.ones(len(skeleton)), (skeleton.src, skeleton.dst)), shape=(n, n))
    components, _ = connected_components(adjacency, directed=False)
    merges_left = n - components

    # vertex age: position among the vertices in filtration order
    age = np.empty(n, dtype=np.int64)
    age[np.lexsort((np.arange(n), birth))] = np.arange(n)
    age, births = age.tolist(), birth.tolist()
    parent = list(range(n))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    pairs = []
    for i, j, value in skeleton.edges():
        if not merges_left:
            break
        ri, rj = find(i), find(j)
        if ri == rj:
            continue
        old, young = (ri, rj) if age[ri] < age[rj] else (rj, ri)
        parent[young] = old
        merges_left -= 1
        pairs.append(PersistencePair(0, births[young], value, (young,), (i, j)))
    for v in np.flatnonzero(present).tolist():
        if find(v) == v:
            pairs.append(PersistencePair(0, births[v], float("inf"), (v,)))
    return pairs


def _skeleton_higher_pairs(skeleton: OneSkeleton, max_dim: int, max_hom_dim: int) -> list[PersistencePair]:
    """H1..max_hom_dim of the clique filtration, computed inside gudhi."""
    gudhi = _gudhi()
    tree = gudhi.SimplexTree()
    if len(skeleton):
        tree.insert_batch(np.vstack([skeleton.src, skeleton.dst]), skeleton.values)

    # collapses keep the persistence of the full clique filtration, which the
    # max_dim-skeleton only matches below its top dimension
    if max_hom_dim < max_dim and len(skeleton):
        for _ in range(COLLAPSE_ROUNDS):
            before = tree.num_simplices()
            tree.collapse_edges()
            if tree.num_simplices() == before:
                break
        log_debug(f"Edge collapse: {len(skeleton)} edges -> {tree.num_simplices() - tree.num_vertices()}")

    tree.expansion(max_dim)
    tree.compute_persistence(homology_coeff_field=2, min_persistence=0, persistence_dim_max=True)
    pairs = []
    for dim in range(1, max_hom_dim + 1):
        intervals = np.asarray(tree.persistence_intervals_in_dimension(dim), dtype=np.float64).reshape(-1, 2)
        pairs.extend(PersistencePair(dim, float(b), float(d)) for b, d in intervals.tolist())
    log_debug(f"Flag persistence: {tree.num_simplices()} simplices after expansion")
    return pairs


def flag_persistence(
    skeleton: OneSkeleton,
    max_dim: int = 2,
    max_hom_dim: int = 1,
    convention: str = "nontrivial-h0",
) -> PersistenceDiagram:
    """
    Persistence diagram of the clique filtration of a one-skeleton.

    Gives the same off-diagonal diagram as expanding the skeleton and calling
    `persistent_homology`. H0 pairs (zero-persistence ones included) match
    that path exactly; above H0 only off-diagonal pairs are reported and
    carry no creator or destroyer.

    Args:
        skeleton: Edges with values, in canonical order
        max_dim: Largest clique dimension
        max_hom_dim: Highest homology dimension reported
        convention: "all" or "nontrivial-h0"

    Returns:
        PersistenceDiagram, pairs sorted by (dim, birth, death)
    """
    if convention not in CONVENTIONS:
        raise ValidationError("convention", f"expected one of {', '.join(CONVENTIONS)}, got {convention!r}")
    if max_hom_dim < 0:
        raise ValidationError("max_hom_dim", f"must be >= 0, got {max_hom_dim}")
    if max_hom_dim + 1 > max_dim:
        log_warning(f"H{max_hom_dim} death times need simplices up to dimension {max_hom_dim + 1}")
        max_hom_dim = min(max_hom_dim, max_dim)

    pairs = _skeleton_h0_pairs(skeleton, convention)
    if max_hom_dim >= 1:
        pairs.extend(_skeleton_higher_pairs(skeleton, max_dim, max_hom_dim))
    pairs.sort(key=lambda p: (p.dim, p.birth, p.death, p.creator or (), p.destroyer or ()))
    return PersistenceDiagram(pairs=tuple(pairs), convention=convention)


def betti_curve(diagram: PersistenceDiagram, grid: ScaleGrid, dim: int) -> BettiCurve:
    """
    Number of classes alive at each grid value, counting [birth, death).

    Args:
        diagram: Persistence diagram
        grid: Scale grid
        dim: Homology dimension

    Returns:
        BettiCurve aligned with `grid.values`
    """
    pairs = diagram.of_dim(dim)
    births = np.sort(np.array([p.birth for p in pairs], dtype=np.float64))
    deaths = np.sort(np.array([p.death for p in pairs], dtype=np.float64))
    values = grid.values
    # every pair dead by theta was also born by theta
    counts = np.searchsorted(births, values, side="right") - np.searchsorted(deaths, values, side="right")
    return BettiCurve(dim=dim, grid=grid, counts=counts.astype(np.int64))


def betti_at(diagram: PersistenceDiagram, theta: float, dim: int) -> int:
    """Betti number of dimension `dim` at a single scale."""
    return sum(1 for p in diagram.of_dim(dim) if p.birth <= theta < p.death)


def write_betti_csv(curves: list[BettiCurve], stream: TextIO):
    """Write several curves over one grid as "theta,beta0,beta1,..." rows."""
    if not curves:
        stream.write("theta\n")
        return
    grid = curves[0].grid
    stream.write(",".join(["theta", *(f"beta{c.dim}" for c in curves)]) + "\n")
    for index, theta in enumerate(grid.values.tolist()):
        stream.write(",".join([format_float(theta), *(str(int(c.counts[index])) for c in curves)]) + "\n")
