"""
Topological complexity measures and the sampling-theory calculators.

A dataset's complexity is the sum of its Betti counts over a scale grid
(nontrivial-H0 convention throughout): one total for H0, one for H1, and
their sum. Published tables can be loaded in place of a computation.
"""

import csv
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Optional, Union

from .errors import ParseError, ValidationError
from .persistence import ScaleGrid, betti_curve
from .pipeline import PipelineSettings, run_pipeline
from .pointcloud import DistanceOracle, LabeledPointCloud
from .stage_tracker import StageTracker
from .utils import log_debug

MEASURES = ("combined", "h0", "h1")
TABLE_DOMAINS = ("mnist", "fashion-mnist", "cifar10")
TABLE_KINDS = ("data", "model")


@dataclass(frozen=True)
class ComplexityRecord:
    """Total Betti counts of one dataset over a scale grid."""

    h0_total: int
    h1_total: int
    mode: str
    grid: Optional[ScaleGrid] = None
    k: Optional[int] = None
    cap: Optional[int] = None
    source: str = "computed"

    def __post_init__(self):
        if self.h0_total < 0 or self.h1_total < 0:
            raise ValidationError("totals", "complexity totals must be nonnegative")

    @property
    def combined(self) -> int:
        return self.h0_total + self.h1_total

    def score(self, measure: str) -> int:
        if measure == "combined":
            return self.combined
        if measure == "h0":
            return self.h0_total
        if measure == "h1":
            return self.h1_total
        raise ValidationError("measure", f"expected one of {', '.join(MEASURES)}, got {measure!r}")

    def to_dict(self) -> dict:
        return {
            "h0_total": self.h0_total,
            "h1_total": self.h1_total,
            "combined": self.combined,
            "mode": self.mode,
            "grid": self.grid.to_dict() if self.grid else None,
            "k": self.k,
            "cap": self.cap,
            "source": self.source,
        }


def complexity(
    cloud: LabeledPointCloud,
    mode: str = "plain",
    grid: Optional[ScaleGrid] = None,
    k: int = 5,
    cap: int = 20,
    max_dim: int = 2,
    engine: str = "gudhi",
    oracle: Optional[DistanceOracle] = None,
    threads: int = 1,
    tracker: Optional[StageTracker] = None,
) -> ComplexityRecord:
    """
    Run the full pipeline and sum Betti counts over the grid.

    Args:
        cloud: Two-class labeled cloud
        mode: "plain" or "locally-scaled"
        grid: Scale grid (defaults: 0..10 x 100 plain, 0.5..1.5 x 100 scaled)
        k: Neighbor rank for local scales
        cap: Candidate neighbors per point
        max_dim: Largest simplex dimension
        engine: Persistence engine ("gudhi" expands inside gudhi, "matrix" is the reference)
        oracle: Distances (Euclidean on the cloud when omitted)
        threads: Worker cap
        tracker: Optional stage timing

    Returns:
        ComplexityRecord
    """
    if grid is None:
        grid = ScaleGrid(0.0, 10.0, 100) if mode == "plain" else ScaleGrid(0.5, 1.5, 100)
    settings = PipelineSettings(mode=mode, k=k, cap=cap, max_dim=max_dim, max_hom_dim=1,
                                convention="nontrivial-h0", engine=engine)
    result = run_pipeline(cloud, settings, grid, oracle=oracle, threads=threads, tracker=tracker)
    h0 = betti_curve(result.diagram, grid, 0).total
    h1 = betti_curve(result.diagram, grid, 1).total
    log_debug(f"Complexity ({mode}): H0 {h0}, H1 {h1}")
    return ComplexityRecord(h0_total=h0, h1_total=h1, mode=mode, grid=grid,
                            k=k if mode == "locally-scaled" else None, cap=cap)


# ---------------------------------------------------------------------------
# Published complexity tables
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class TableRow:
    class_a: str
    class_b: str
    h0_total: Optional[int]
    h1_total: Optional[int]

    @property
    def model_id(self) -> str:
        return f"{self.class_a}v{self.class_b}"

    def score(self, measure: str) -> Optional[int]:
        """None when a needed cell is blank."""
        if measure == "h0":
            return self.h0_total
        if measure == "h1":
            return self.h1_total
        if measure == "combined":
            if self.h0_total is None or self.h1_total is None:
                return None
            return self.h0_total + self.h1_total
        raise ValidationError("measure", f"expected one of {', '.join(MEASURES)}, got {measure!r}")


@dataclass(frozen=True)
class ComplexityTable:
    """One class-pair complexity table (CSV: class_a, class_b, h0_total, h1_total)."""

    name: str
    rows: tuple[TableRow, ...]
    _by_id: dict = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        by_id = {}
        for row in self.rows:
            if row.model_id in by_id:
                raise ValidationError("model_id", f"duplicate entry {row.model_id} in table {self.name}")
            by_id[row.model_id] = row
        object.__setattr__(self, "_by_id", by_id)

    @classmethod
    def load(cls, path: Union[str, Path], name: Optional[str] = None) -> "ComplexityTable":
        path = Path(path)
        with open(path, newline="", encoding="utf-8") as handle:
            reader = csv.DictReader(handle)
            missing = {"class_a", "class_b", "h0_total", "h1_total"} - set(reader.fieldnames or [])
            if missing:
                raise ParseError(1, f"missing columns: {', '.join(sorted(missing))}")
            rows = []
            for line, record in enumerate(reader, start=2):
                rows.append(TableRow(
                    class_a=record["class_a"].strip(),
                    class_b=record["class_b"].strip(),
                    h0_total=_optional_count(record["h0_total"], line),
                    h1_total=_optional_count(record["h1_total"], line),
                ))
        return cls(name=name or path.stem, rows=tuple(rows))

    @classmethod
    def shipped(cls, domain: str, kind: str = "data", tables_dir: Optional[Path] = None) -> "ComplexityTable":
        """One of the tables in fixtures/complexity_tables."""
        if domain not in TABLE_DOMAINS:
            raise ValidationError("domain", f"expected one of {', '.join(TABLE_DOMAINS)}, got {domain!r}")
        if kind not in TABLE_KINDS:
            raise ValidationError("kind", f"expected one of {', '.join(TABLE_KINDS)}, got {kind!r}")
        if tables_dir is None:
            tables_dir = Path(__file__).resolve().parent.parent / "fixtures" / "complexity_tables"
        return cls.load(tables_dir / f"{domain.replace('-', '_')}_{kind}.csv", name=f"{domain}-{kind}")

    def __len__(self) -> int:
        return len(self.rows)

    def model_ids(self) -> list[str]:
        return [row.model_id for row in self.rows]

    def row(self, model_id: str) -> TableRow:
        try:
            return self._by_id[model_id]
        except KeyError:
            raise ValidationError("model_id", f"{model_id} is not in table {self.name}") from None

    def record(self, model_id: str) -> ComplexityRecord:
        """Table-passthrough: the row as a ComplexityRecord."""
        row = self.row(model_id)
        if row.h0_total is None or row.h1_total is None:
            raise ValidationError("model_id", f"{model_id} has a blank cell in table {self.name}")
        return ComplexityRecord(h0_total=row.h0_total, h1_total=row.h1_total,
                                mode="locally-scaled", source=f"table:{self.name}")


def _optional_count(text: str, line: int) -> Optional[int]:
    text = (text or "").strip()
    if not text:
        return None
    try:
        value = int(text)
    except ValueError:
        raise ParseError(line, f"expected an integer count, got {text!r}") from None
    if value < 0:
        raise ParseError(line, f"counts must be nonnegative, got {value}")
    return value


# ---------------------------------------------------------------------------
# Sampling theory
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class SampleBoundInputs:
    """
    Inputs of the two-component sample-size bound.

    q is the mixing probability of the first component, alpha_x/alpha_y
    lower-bound the mass each component puts on a covering set, l_a/l_b
    count the covering sets, delta is the failure probability.
    """

    q: float
    alpha_x: float
    alpha_y: float
    l_a: int
    l_b: int
    delta: float

    def __post_init__(self):
        if not 0 < self.q < 1:
            raise ValidationError("q", f"must lie in (0, 1), got {self.q}")
        for name in ("alpha_x", "alpha_y"):
            value = getattr(self, name)
            if not 0 < value <= 1:
                raise ValidationError(name, f"must lie in (0, 1], got {value}")
        for name in ("l_a", "l_b"):
            value = getattr(self, name)
            if value < 1:
                raise ValidationError(name, f"must be >= 1, got {value}")
        if not 0 < self.delta <= 1:
            raise ValidationError("delta", f"must lie in (0, 1], got {self.delta}")

    @classmethod
    def from_covering(cls, q: float, k_r: float, k_s: float, n_r: int, n_s: int, delta: float) -> "SampleBoundInputs":
        """
        Manifold form: covering numbers of the r/2- and s/2-covers and the
        per-component mass lower bounds of their balls.
        """
        return cls(q=q, alpha_x=k_r, alpha_y=k_s, l_a=n_r, l_b=n_s, delta=delta)

    def swapped(self) -> "SampleBoundInputs":
        """The same bound with the two components exchanged."""
        return SampleBoundInputs(1 - self.q, self.alpha_y, self.alpha_x, self.l_b, self.l_a, self.delta)


def sample_bound_value(inputs: SampleBoundInputs) -> float:
    """Real-valued bound before rounding up."""
    log_delta = math.log(1.0 / inputs.delta)
    first = (math.log(2 * inputs.l_a) + log_delta) / (inputs.alpha_x * inputs.q)
    second = (math.log(2 * inputs.l_b) + log_delta) / (inputs.alpha_y * (1 - inputs.q))
    return max(first, second)


def sample_bound(inputs: SampleBoundInputs) -> int:
    """Smallest integer sample count satisfying the bound (natural logs)."""
    return math.ceil(sample_bound_value(inputs))


@dataclass(frozen=True)
class ManifoldConditionInputs:
    tau: float
    r: float
    s: float

    def __post_init__(self):
        for name in ("tau", "r", "s"):
            value = getattr(self, name)
            if not value > 0:
                raise ValidationError(name, f"must be > 0, got {value}")


@dataclass(frozen=True)
class ManifoldConditionReport:
    r_ok: bool
    r_limit: float
    gamma: float
    printed_epsilon_window: Optional[tuple[float, float]]
    window_real: bool
    window_flag: str = "degenerate as printed"

    def to_dict(self) -> dict:
        return {
            "r_ok": self.r_ok,
            "r_limit": self.r_limit,
            "gamma": self.gamma,
            "printed_epsilon_window": list(self.printed_epsilon_window) if self.printed_epsilon_window else None,
            "window_real": self.window_real,
            "window_flag": self.window_flag,
        }


R_FACTOR = math.sqrt(9) - math.sqrt(8)


def manifold_conditions(inputs: ManifoldConditionInputs) -> ManifoldConditionReport:
    """
    Check r < (sqrt(9) - sqrt(8)) tau and report the epsilon window as printed.

    The printed window has the same expression at both ends, so it is always
    flagged "degenerate as printed". When r^2 + tau^2 - 6 tau r < 0 the
    expression is not real: window_real is false and no window is given.
    """
    tau, r = inputs.tau, inputs.r
    limit = R_FACTOR * tau
    discriminant = r * r + tau * tau - 6 * tau * r
    if discriminant < 0:
        window = None
    else:
        end = ((r + tau) + math.sqrt(discriminant)) / 2
        window = (end, end)
    return ManifoldConditionReport(r_ok=r < limit, r_limit=limit, gamma=r + inputs.s,
                                   printed_epsilon_window=window, window_real=window is not None)
