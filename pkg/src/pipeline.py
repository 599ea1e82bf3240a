"""
End-to-end pipeline: cloud -> graph -> one-skeleton -> diagram.

Each stage is timed through an optional StageTracker, the way a run is
summarised on the console. The diagram always covers the whole filtration;
the simplex-by-simplex filtration is only built when an engine or a caller
needs it.
"""

from dataclasses import dataclass
from functools import cached_property
from typing import Optional

import numpy as np

from .complexes.base import SimplicialFiltration
from .complexes.vietoris_rips import OneSkeleton, expand, one_skeleton
from .errors import SingleClassError, ValidationError
from .neighborhood import MODES, CrossClassGraph, LocalScales, build_graph, local_scales
from .persistence import (
    CONVENTIONS,
    ENGINES,
    BettiCurve,
    PersistenceDiagram,
    ScaleGrid,
    betti_curve,
    flag_persistence,
    persistent_homology,
)
from .pointcloud import DistanceOracle, LabeledPointCloud
from .stage_tracker import StageTracker


@dataclass(frozen=True)
class PipelineSettings:
    """Everything that changes a pipeline result (the worker count does not)."""

    mode: str = "plain"
    k: int = 5
    cap: int = 20
    max_dim: int = 2
    max_hom_dim: int = 1
    convention: str = "nontrivial-h0"
    engine: str = "gudhi"

    def __post_init__(self):
        if self.mode not in MODES:
            raise ValidationError("mode", f"expected one of {', '.join(MODES)}, got {self.mode!r}")
        for name in ("k", "cap", "max_dim"):
            value = getattr(self, name)
            if not isinstance(value, (int, np.integer)) or value < 1:
                raise ValidationError(name, f"must be a positive integer, got {value!r}")
        if self.max_hom_dim < 0:
            raise ValidationError("max_hom_dim", f"must be >= 0, got {self.max_hom_dim}")
        if self.convention not in CONVENTIONS:
            raise ValidationError("convention", f"expected one of {', '.join(CONVENTIONS)}, got {self.convention!r}")
        if self.engine not in ENGINES:
            raise ValidationError("engine", f"expected one of {', '.join(ENGINES)}, got {self.engine!r}")

    def to_dict(self) -> dict:
        return {
            "mode": self.mode,
            "k": self.k,
            "cap": self.cap,
            "max_dim": self.max_dim,
            "max_hom_dim": self.max_hom_dim,
            "convention": self.convention,
            "engine": self.engine,
        }


@dataclass(frozen=True)
class PipelineResult:
    settings: PipelineSettings
    grid: ScaleGrid
    scales: Optional[LocalScales]
    graph: Optional[CrossClassGraph]
    skeleton: Optional[OneSkeleton]
    diagram: PersistenceDiagram
    expanded: Optional[SimplicialFiltration] = None

    def curves(self) -> list[BettiCurve]:
        """Betti curves for dimensions 0..max_hom_dim on the run's grid."""
        return [betti_curve(self.diagram, self.grid, dim) for dim in range(self.settings.max_hom_dim + 1)]

    @cached_property
    def filtration(self) -> SimplicialFiltration:
        """The full filtration (expanded on first access when the engine skipped it)."""
        if self.expanded is not None:
            return self.expanded
        return self.filtration_up_to(None)

    def filtration_up_to(self, threshold: Optional[float]) -> SimplicialFiltration:
        """Filtration restricted to simplices with value <= threshold."""
        if self.skeleton is None:
            return SimplicialFiltration.from_simplices(0, self.settings.max_dim, [], self.grid.as_tuple())
        return expand(self.skeleton, self.settings.max_dim, threshold=threshold, grid=self.grid.as_tuple())


def run_pipeline(
    cloud: LabeledPointCloud,
    settings: PipelineSettings,
    grid: ScaleGrid,
    oracle: Optional[DistanceOracle] = None,
    threads: int = 1,
    tracker: Optional[StageTracker] = None,
) -> PipelineResult:
    """
    Build the labeled Vietoris-Rips filtration of a cloud and its diagram.

    With the "gudhi" engine clique expansion and reduction run inside gudhi
    on the one-skeleton; the "matrix" engine expands in Python and reduces
    with the reference column reduction. An empty cloud yields an empty
    diagram.
    """
    tracker = tracker or StageTracker()
    if cloud.n == 0:
        return PipelineResult(settings, grid, None, None, None, PersistenceDiagram((), settings.convention))
    if not cloud.has_both_classes:
        raise SingleClassError(f"both classes are needed to build a decision-boundary complex (found class {cloud.classes[0]} only)")

    oracle = oracle or DistanceOracle.euclidean(cloud)

    scales = None
    if settings.mode == "locally-scaled":
        with tracker.stage("local scales", unit="points") as stage:
            scales = local_scales(cloud, oracle, settings.k)
            stage.items = len(scales)

    with tracker.stage("neighborhood graph", unit="edges") as stage:
        graph = build_graph(cloud, oracle, settings.mode, scales, settings.cap, threads)
        stage.items = len(graph)

    with tracker.stage("one-skeleton", unit="edges") as stage:
        skeleton = one_skeleton(graph, cloud)
        stage.items = len(skeleton)

    if settings.engine == "gudhi":
        with tracker.stage("persistence", unit="pairs") as stage:
            diagram = flag_persistence(skeleton, settings.max_dim, settings.max_hom_dim, settings.convention)
            stage.items = len(diagram)
        return PipelineResult(settings, grid, scales, graph, skeleton, diagram)

    with tracker.stage("clique expansion", unit="simplices") as stage:
        filtration = expand(skeleton, settings.max_dim, grid=grid.as_tuple())
        stage.items = len(filtration)

    with tracker.stage("persistence", unit="pairs") as stage:
        diagram = persistent_homology(filtration, settings.max_hom_dim, settings.convention, settings.engine)
        stage.items = len(diagram)

    return PipelineResult(settings, grid, scales, graph, skeleton, diagram, filtration)
