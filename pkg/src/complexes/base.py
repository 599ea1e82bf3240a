"""
Base types - Simplices and filtrations shared by every complex builder.
"""

from bisect import bisect_right
from dataclasses import dataclass, field
from typing import Iterable, Iterator, NamedTuple, Optional, TextIO

from ..errors import FiltrationOrderError, ValidationError
from ..utils import format_float


class Simplex(NamedTuple):
    """
    A simplex with the scale at which it enters the filtration.

    Field order makes plain tuple comparison the filtration order:
    value, then dimension, then lexicographic vertices.
    """

    value: float
    dim: int
    vertices: tuple[int, ...]


def faces(vertices: tuple[int, ...]) -> list[tuple[int, ...]]:
    """Codimension-one faces, in the order obtained by dropping each vertex."""
    return [vertices[:i] + vertices[i + 1:] for i in range(len(vertices))]


@dataclass(frozen=True)
class SimplicialFiltration:
    """
    Simplices sorted in filtration order.

    Build instances with `from_simplices`, which sorts; the constructor
    trusts its input to be sorted already.
    """

    n: int
    max_dim: int
    simplices: tuple[Simplex, ...]
    grid: Optional[tuple[float, float, int]] = None
    _values: list[float] = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        object.__setattr__(self, "_values", [s.value for s in self.simplices])

    @classmethod
    def from_simplices(
        cls,
        n: int,
        max_dim: int,
        simplices: Iterable[Simplex],
        grid: Optional[tuple[float, float, int]] = None,
    ) -> "SimplicialFiltration":
        """Sort `simplices` canonically and wrap them."""
        if max_dim < 0:
            raise ValidationError("max_dim", f"must be >= 0, got {max_dim}")
        ordered = tuple(sorted(Simplex(float(s[0]), int(s[1]), tuple(s[2])) for s in simplices))
        return cls(n=n, max_dim=max_dim, simplices=ordered, grid=grid)

    def __len__(self) -> int:
        return len(self.simplices)

    def __iter__(self) -> Iterator[Simplex]:
        return iter(self.simplices)

    def complex_at(self, theta: float) -> list[Simplex]:
        """All simplices with value <= theta (a prefix of the filtration)."""
        return list(self.simplices[:bisect_right(self._values, theta)])

    def of_dim(self, dim: int) -> list[Simplex]:
        return [s for s in self.simplices if s.dim == dim]

    def counts(self) -> dict[int, int]:
        """Number of simplices per dimension."""
        counts: dict[int, int] = {}
        for simplex in self.simplices:
            counts[simplex.dim] = counts.get(simplex.dim, 0) + 1
        return counts

    def validate(self):
        """
        Check that the order is a valid filtration.

        Raises:
            FiltrationOrderError: a face is missing, comes later, or has a
                larger value than one of its cofaces
        """
        position: dict[tuple[int, ...], int] = {}
        for index, simplex in enumerate(self.simplices):
            vertices = simplex.vertices
            if len(vertices) != simplex.dim + 1 or any(a >= b for a, b in zip(vertices, vertices[1:])):
                raise ValidationError("simplices", f"vertices {vertices} are not strictly increasing")
            if simplex.dim > 0:
                for face in faces(vertices):
                    if face not in position:
                        raise FiltrationOrderError(face, vertices)
                    if self.simplices[position[face]].value > simplex.value:
                        raise FiltrationOrderError(face, vertices)
            position[vertices] = index

    def to_csv(self, stream: TextIO):
        """Write rows "value,v0,v1,..." in filtration order."""
        for simplex in self.simplices:
            stream.write(",".join([format_float(simplex.value), *map(str, simplex.vertices)]) + "\n")
