"""
Labeled point clouds - the universal input of every pipeline stage.

Includes the distance oracle (Euclidean or precomputed), the synthetic
dataset generators and CSV ingestion. Random draws use NumPy's PCG64 bit
generator so a seed reproduces the same cloud on every platform.
"""

import csv
import io
import json
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import BinaryIO, Optional, TextIO, Union

import numpy as np
from scipy.spatial.distance import cdist

from .errors import ParseError, ValidationError
from .utils import format_float, log_debug

SHAPES = ("two-circles", "twenty-five-circles", "noisy-circle", "counterexample-appendix-c")


@dataclass(frozen=True)
class LabeledPointCloud:
    """
    Points in R^d with at most two class tags.

    Row order is the stable point id. Arrays are made read-only on
    construction so a cloud can be shared freely.
    """

    points: np.ndarray
    labels: np.ndarray

    def __post_init__(self):
        points = np.array(self.points, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64).reshape(-1)
        if points.size == 0 and points.ndim != 2:
            points = np.zeros((0, 0))
        if points.ndim != 2:
            raise ValidationError("points", "expected an n x d array of coordinates")
        if points.shape[0] != labels.shape[0]:
            raise ValidationError("labels", f"{labels.shape[0]} labels for {points.shape[0]} points")
        if points.shape[0] > 0 and points.shape[1] < 1:
            raise ValidationError("points", "dimension must be at least 1")
        if not np.all(np.isfinite(points)):
            raise ValidationError("points", "coordinates must be finite")
        if len(np.unique(labels)) > 2:
            raise ValidationError("labels", "at most two distinct class tags are allowed")

        points.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, "points", points)
        object.__setattr__(self, "labels", labels)

    @property
    def n(self) -> int:
        return int(self.points.shape[0])

    @property
    def dim(self) -> int:
        return int(self.points.shape[1]) if self.points.ndim == 2 else 0

    @property
    def ids(self) -> np.ndarray:
        return np.arange(self.n)

    @property
    def classes(self) -> tuple[int, ...]:
        return tuple(int(c) for c in np.unique(self.labels))

    @property
    def has_both_classes(self) -> bool:
        return len(self.classes) == 2

    def class_indices(self, label: int) -> np.ndarray:
        """Ids of the points carrying `label`, ascending."""
        return np.flatnonzero(self.labels == label)

    def subset(self, indices) -> "LabeledPointCloud":
        """Cloud restricted to `indices` (re-numbered 0..m-1 in the given order)."""
        indices = np.asarray(indices, dtype=np.int64)
        return LabeledPointCloud(self.points[indices], self.labels[indices])

    def permuted(self, permutation) -> "LabeledPointCloud":
        """Row i of the result is row permutation[i] of this cloud."""
        return self.subset(permutation)

    def scaled(self, factor: float) -> "LabeledPointCloud":
        """Every coordinate multiplied by `factor`."""
        return LabeledPointCloud(self.points * factor, self.labels.copy())


class DistanceOracle:
    """
    Pairwise distances over a cloud.

    Either Euclidean over the coordinates or a user-supplied matrix (for
    feature spaces computed elsewhere). The full matrix is computed once and
    cached; it is the single source for every distance the pipeline reads.
    """

    def __init__(self, n: int, matrix: Optional[np.ndarray] = None, points: Optional[np.ndarray] = None):
        self._n = n
        self._matrix = matrix
        self._points = points
        self.precomputed = matrix is not None

    @classmethod
    def euclidean(cls, cloud: LabeledPointCloud) -> "DistanceOracle":
        """Euclidean (L2) distances on the cloud's coordinates."""
        return cls(cloud.n, points=cloud.points)

    @classmethod
    def from_matrix(cls, matrix) -> "DistanceOracle":
        """
        Wrap a precomputed distance matrix.

        Args:
            matrix: n x n symmetric, nonnegative, zero-diagonal array

        Raises:
            ValidationError: if the matrix violates any of those properties
        """
        matrix = np.array(matrix, dtype=np.float64)
        if matrix.ndim != 2 or matrix.shape[0] != matrix.shape[1]:
            raise ValidationError("matrix", "distance matrix must be square")
        if not np.array_equal(matrix, matrix.T):
            raise ValidationError("matrix", "distance matrix must be symmetric")
        if np.any(np.diag(matrix) != 0):
            raise ValidationError("matrix", "distance matrix must have a zero diagonal")
        if np.any(matrix < 0) or np.any(np.isnan(matrix)):
            raise ValidationError("matrix", "distances must be nonnegative")
        matrix.setflags(write=False)
        return cls(matrix.shape[0], matrix=matrix)

    @property
    def n(self) -> int:
        return self._n

    def matrix(self) -> np.ndarray:
        """The full n x n distance matrix (computed lazily)."""
        if self._matrix is None:
            if self._n == 0:
                matrix = np.zeros((0, 0))
            else:
                matrix = cdist(self._points, self._points, metric="euclidean")
                np.fill_diagonal(matrix, 0.0)
                # cdist is not guaranteed bit-symmetric
                matrix = np.minimum(matrix, matrix.T)
            matrix.setflags(write=False)
            self._matrix = matrix
            log_debug(f"Computed {self._n}x{self._n} distance matrix")
        return self._matrix

    def distance(self, i: int, j: int) -> float:
        """
        Distance between points i and j.

        Raises:
            ValidationError: if either index is out of range
        """
        for name, index in (("i", i), ("j", j)):
            if not 0 <= index < self._n:
                raise ValidationError(name, f"index {index} out of range for {self._n} points")
        return float(self.matrix()[i, j])

    def block(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        """Sub-matrix of distances between two index sets."""
        return self.matrix()[np.ix_(rows, cols)]


# ---------------------------------------------------------------------------
# Synthetic data
# ---------------------------------------------------------------------------

DEFAULT_PARAMS: dict[str, dict] = {
    # Small dense pair next to a large sparse pair, opposite orientations.
    "two-circles": {
        "pairs": [
            {"center": [0.0, 0.0], "disk_radius": 0.3, "annulus_inner": 0.38, "annulus_outer": 0.65,
             "n_disk": 90, "n_annulus": 140, "disk_label": 0},
            {"center": [8.0, 0.0], "disk_radius": 1.8, "annulus_inner": 2.6, "annulus_outer": 3.4,
             "n_disk": 80, "n_annulus": 110, "disk_label": 1},
        ],
    },
    # Scaled copies of one disk/annulus pattern; the boundary circle of a copy
    # with radius R sits midway between disk_ratio*R and inner_ratio*R.
    "twenty-five-circles": {
        "group_radii": [1.0, 2.0, 3.0, 4.0, 5.0],
        "per_group": 5,
        "disk_ratio": 0.6,
        "inner_ratio": 1.4,
        "outer_ratio": 1.8,
        "n_disk": 60,
        "n_annulus": 90,
        "spacing": 24.0,
        "disk_label": 0,
    },
    "noisy-circle": {
        "center": [0.0, 0.0],
        "radius": 1.0,
        "noise": 0.1,
        "n": 300,
        "inside_label": 0,
    },
    # Class 0: one disk. Class 1: two annuli, only one of them around the disk.
    "counterexample-appendix-c": {
        "disk_center": [0.0, 0.0],
        "disk_radius": 0.6,
        "n_disk": 80,
        "annulus_inner": 1.0,
        "annulus_outer": 1.5,
        "n_annulus": 160,
        "second_annulus_center": [4.5, 0.0],
        "disk_label": 0,
    },
}


@dataclass(frozen=True)
class _Region:
    kind: str  # "disk" or "annulus"
    center: tuple[float, float]
    inner: float
    outer: float
    n: int
    label: int


@dataclass(frozen=True)
class SyntheticSpec:
    """
    A reproducible synthetic dataset description.

    `params` holds the shape-specific geometry; anything omitted falls back
    to DEFAULT_PARAMS for the shape.
    """

    shape: str
    seed: int = 0
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.shape not in SHAPES:
            raise ValidationError("shape", f"unknown shape {self.shape!r}; expected one of {', '.join(SHAPES)}")
        if not isinstance(self.seed, int) or self.seed < 0:
            raise ValidationError("seed", "seed must be a nonnegative integer")
        merged = json.loads(json.dumps(DEFAULT_PARAMS[self.shape]))
        merged.update(self.params or {})
        object.__setattr__(self, "params", merged)
        self._validate()

    @classmethod
    def from_dict(cls, data: dict) -> "SyntheticSpec":
        if "shape" not in data:
            raise ValidationError("shape", "missing")
        return cls(shape=data["shape"], seed=int(data.get("seed", 0)), params=dict(data.get("params", {})))

    @classmethod
    def from_json(cls, path: Union[str, Path]) -> "SyntheticSpec":
        with open(path, "r", encoding="utf-8") as f:
            return cls.from_dict(json.load(f))

    def to_dict(self) -> dict:
        return {"shape": self.shape, "seed": self.seed, "params": self.params}

    def ground_truth(self) -> tuple[int, int]:
        """(β0, β1) of the decision boundary this spec draws."""
        if self.shape == "two-circles":
            count = len(self.params["pairs"])
            return count, count
        if self.shape == "twenty-five-circles":
            count = len(self.params["group_radii"]) * int(self.params["per_group"])
            return count, count
        return 1, 1

    def regions(self) -> list[_Region]:
        """Sampling regions in emission order (not used by noisy-circle)."""
        p = self.params
        if self.shape == "two-circles":
            regions = []
            for pair in p["pairs"]:
                center = tuple(pair["center"])
                disk_label = int(pair["disk_label"])
                regions.append(_Region("disk", center, 0.0, pair["disk_radius"], int(pair["n_disk"]), disk_label))
                regions.append(_Region("annulus", center, pair["annulus_inner"], pair["annulus_outer"],
                                       int(pair["n_annulus"]), 1 - disk_label))
            return regions

        if self.shape == "twenty-five-circles":
            regions = []
            disk_label = int(p["disk_label"])
            for row, radius in enumerate(p["group_radii"]):
                for col in range(int(p["per_group"])):
                    center = (col * p["spacing"], row * p["spacing"])
                    regions.append(_Region("disk", center, 0.0, p["disk_ratio"] * radius, int(p["n_disk"]), disk_label))
                    regions.append(_Region("annulus", center, p["inner_ratio"] * radius, p["outer_ratio"] * radius,
                                           int(p["n_annulus"]), 1 - disk_label))
            return regions

        if self.shape == "counterexample-appendix-c":
            disk_label = int(p["disk_label"])
            first = tuple(p["disk_center"])
            second = tuple(p["second_annulus_center"])
            return [
                _Region("disk", first, 0.0, p["disk_radius"], int(p["n_disk"]), disk_label),
                _Region("annulus", first, p["annulus_inner"], p["annulus_outer"], int(p["n_annulus"]), 1 - disk_label),
                _Region("annulus", second, p["annulus_inner"], p["annulus_outer"], int(p["n_annulus"]), 1 - disk_label),
            ]

        return []

    def region_ids(self) -> np.ndarray:
        """Region index of every generated point, aligned with generate()."""
        if self.shape == "noisy-circle":
            return np.zeros(int(self.params["n"]), dtype=np.int64)
        sizes = [region.n for region in self.regions()]
        return np.repeat(np.arange(len(sizes)), sizes)

    def _validate(self):
        p = self.params

        def positive(name: str, value):
            if not isinstance(value, (int, float)) or not value > 0:
                raise ValidationError(name, f"must be > 0, got {value!r}")

        def count(name: str, value):
            if not isinstance(value, int) or value < 0:
                raise ValidationError(name, f"must be a nonnegative integer, got {value!r}")

        def label(name: str, value):
            if value not in (0, 1):
                raise ValidationError(name, f"must be 0 or 1, got {value!r}")

        if self.shape == "two-circles":
            if not p.get("pairs"):
                raise ValidationError("pairs", "at least one disk/annulus pair is required")
            for index, pair in enumerate(p["pairs"]):
                prefix = f"pairs[{index}]"
                for key in ("disk_radius", "annulus_inner", "annulus_outer"):
                    positive(f"{prefix}.{key}", pair.get(key))
                count(f"{prefix}.n_disk", pair.get("n_disk"))
                count(f"{prefix}.n_annulus", pair.get("n_annulus"))
                label(f"{prefix}.disk_label", pair.get("disk_label"))
                if not pair["disk_radius"] < pair["annulus_inner"] < pair["annulus_outer"]:
                    raise ValidationError(f"{prefix}.annulus_inner",
                                          "need disk_radius < annulus_inner < annulus_outer")
                if len(pair.get("center", [])) != 2:
                    raise ValidationError(f"{prefix}.center", "must be an (x, y) pair")

        elif self.shape == "twenty-five-circles":
            if not p.get("group_radii"):
                raise ValidationError("group_radii", "must be a nonempty list")
            for index, radius in enumerate(p["group_radii"]):
                positive(f"group_radii[{index}]", radius)
            for key in ("disk_ratio", "inner_ratio", "outer_ratio", "spacing"):
                positive(key, p.get(key))
            for key in ("per_group", "n_disk", "n_annulus"):
                count(key, p.get(key))
            label("disk_label", p.get("disk_label"))
            if not p["disk_ratio"] < p["inner_ratio"] < p["outer_ratio"]:
                raise ValidationError("inner_ratio", "need disk_ratio < inner_ratio < outer_ratio")

        elif self.shape == "noisy-circle":
            positive("radius", p.get("radius"))
            if not isinstance(p.get("noise"), (int, float)) or p["noise"] < 0:
                raise ValidationError("noise", "must be >= 0")
            count("n", p.get("n"))
            label("inside_label", p.get("inside_label"))

        else:
            for key in ("disk_radius", "annulus_inner", "annulus_outer"):
                positive(key, p.get(key))
            count("n_disk", p.get("n_disk"))
            count("n_annulus", p.get("n_annulus"))
            label("disk_label", p.get("disk_label"))
            if not p["disk_radius"] < p["annulus_inner"] < p["annulus_outer"]:
                raise ValidationError("annulus_inner", "need disk_radius < annulus_inner < annulus_outer")


def _sample_region(rng: np.random.Generator, region: _Region) -> np.ndarray:
    """Area-uniform samples in a disk or annulus."""
    u = rng.random(region.n)
    angle = 2.0 * math.pi * rng.random(region.n)
    radius = np.sqrt(u * (region.outer ** 2 - region.inner ** 2) + region.inner ** 2)
    x = region.center[0] + radius * np.cos(angle)
    y = region.center[1] + radius * np.sin(angle)
    return np.column_stack([x, y])


def generate(spec: SyntheticSpec) -> LabeledPointCloud:
    """
    Draw the labeled cloud a synthetic spec describes.

    Args:
        spec: Validated shape description (seed included)

    Returns:
        The cloud; identical for identical specs
    """
    rng = np.random.Generator(np.random.PCG64(spec.seed))

    if spec.shape == "noisy-circle":
        p = spec.params
        n = int(p["n"])
        angle = 2.0 * math.pi * rng.random(n)
        radius = p["radius"] + p["noise"] * rng.standard_normal(n)
        radius = np.abs(radius)
        points = np.column_stack([
            p["center"][0] + radius * np.cos(angle),
            p["center"][1] + radius * np.sin(angle),
        ])
        inside = int(p["inside_label"])
        labels = np.where(radius < p["radius"], inside, 1 - inside)
        return LabeledPointCloud(points, labels)

    chunks, labels = [], []
    for region in spec.regions():
        chunks.append(_sample_region(rng, region))
        labels.append(np.full(region.n, region.label, dtype=np.int64))

    if not chunks:
        return LabeledPointCloud(np.zeros((0, 2)), np.zeros(0, dtype=np.int64))
    return LabeledPointCloud(np.vstack(chunks), np.concatenate(labels))


# ---------------------------------------------------------------------------
# CSV ingestion
# ---------------------------------------------------------------------------

def _is_number(text: str) -> bool:
    try:
        float(text)
        return True
    except ValueError:
        return False


def load_cloud(
    source: Union[BinaryIO, TextIO, str, Path],
    fmt: str = "csv",
    header: Optional[bool] = None,
) -> LabeledPointCloud:
    """
    Parse a labeled cloud: d coordinate columns followed by an integer label.

    Args:
        source: Path or (binary or text) stream
        fmt: Only "csv" is supported
        header: True/False forces header handling; None detects a
            non-numeric first row

    Returns:
        The cloud, rows in file order

    Raises:
        ParseError: ragged rows, bad numbers, more than two labels
    """
    if fmt != "csv":
        raise ValidationError("format", f"unsupported format {fmt!r}")

    if isinstance(source, (str, Path)):
        with open(source, "rb") as f:
            return load_cloud(f, fmt=fmt, header=header)

    raw = source.read()
    text = raw.decode("utf-8-sig") if isinstance(raw, bytes) else raw

    rows: list[list[float]] = []
    labels: list[int] = []
    first_line_of_label: dict[int, int] = {}
    width: Optional[int] = None
    first_row = True

    reader = csv.reader(io.StringIO(text))
    for line_number, row in enumerate(reader, start=1):
        row = [cell.strip() for cell in row]
        if not row or all(cell == "" for cell in row):
            continue

        if first_row:
            first_row = False
            is_header = header if header is not None else not _is_number(row[0])
            if is_header:
                width = len(row)
                continue

        if width is None:
            width = len(row)
        if len(row) != width:
            raise ParseError(line_number, f"expected {width} columns, found {len(row)}")
        if width < 2:
            raise ParseError(line_number, "need at least one coordinate column and a label column")

        try:
            coords = [float(cell) for cell in row[:-1]]
        except ValueError:
            raise ParseError(line_number, f"non-numeric coordinate in {row[:-1]}") from None
        if not all(math.isfinite(c) for c in coords):
            raise ParseError(line_number, "coordinates must be finite")

        try:
            label = int(row[-1])
        except ValueError:
            try:
                as_float = float(row[-1])
            except ValueError:
                raise ParseError(line_number, f"label {row[-1]!r} is not an integer") from None
            if not as_float.is_integer():
                raise ParseError(line_number, f"label {row[-1]!r} is not an integer")
            label = int(as_float)

        if label not in first_line_of_label:
            if len(first_line_of_label) == 2:
                raise ParseError(line_number, f"third distinct label {label}; at most two classes are allowed")
            first_line_of_label[label] = line_number

        rows.append(coords)
        labels.append(label)

    if not rows:
        dim = (width - 1) if width and width > 1 else 0
        return LabeledPointCloud(np.zeros((0, dim)), np.zeros(0, dtype=np.int64))

    return LabeledPointCloud(np.array(rows, dtype=np.float64), np.array(labels, dtype=np.int64))


def save_cloud(cloud: LabeledPointCloud, destination: Union[str, Path, TextIO], header: bool = True):
    """
    Write a cloud as CSV with round-trip-safe floats.

    Args:
        cloud: The cloud to write
        destination: Path or text stream
        header: Emit an "x0,...,label" header row
    """
    if isinstance(destination, (str, Path)):
        Path(destination).parent.mkdir(parents=True, exist_ok=True)
        with open(destination, "w", encoding="utf-8", newline="") as f:
            save_cloud(cloud, f, header=header)
        return

    writer = csv.writer(destination, lineterminator="\n")
    if header:
        writer.writerow([f"x{i}" for i in range(cloud.dim)] + ["label"])
    for point, label in zip(cloud.points, cloud.labels):
        writer.writerow([format_float(c) for c in point] + [int(label)])


def load_distance_matrix(source: Union[str, Path]) -> DistanceOracle:
    """
    Read a precomputed n x n distance matrix (CSV, no header).

    Raises:
        ParseError: ragged rows or non-numeric cells
        ValidationError: the matrix is not a valid distance matrix
    """
    rows: list[list[float]] = []
    with open(source, newline="", encoding="utf-8") as f:
        for line_number, row in enumerate(csv.reader(f), start=1):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            if rows and len(row) != len(rows[0]):
                raise ParseError(line_number, f"expected {len(rows[0])} columns, found {len(row)}")
            try:
                rows.append([float(cell) for cell in row])
            except ValueError:
                raise ParseError(line_number, "non-numeric distance") from None
    if not rows:
        return DistanceOracle.from_matrix(np.zeros((0, 0)))
    return DistanceOracle.from_matrix(np.array(rows, dtype=np.float64))
