"""
Labeled Vietoris-Rips - persistent homology of decision boundaries.
Builds filtered complexes from the cross-class structure of a two-class
point cloud and turns their persistence into complexity scores.
"""

from .complexity import ComplexityRecord, ComplexityTable, complexity, manifold_conditions, sample_bound
from .neighborhood import CrossClassGraph, build_graph, local_scales
from .persistence import BettiCurve, PersistenceDiagram, ScaleGrid, betti_curve, persistent_homology
from .pipeline import PipelineSettings, run_pipeline
from .pointcloud import DistanceOracle, LabeledPointCloud, SyntheticSpec, generate, load_cloud
from .selection import ModelCatalog, accuracy_gap, rank_models

__version__ = "1.0.0"
__all__ = [
    "BettiCurve",
    "ComplexityRecord",
    "ComplexityTable",
    "CrossClassGraph",
    "DistanceOracle",
    "LabeledPointCloud",
    "ModelCatalog",
    "PersistenceDiagram",
    "PipelineSettings",
    "ScaleGrid",
    "SyntheticSpec",
    "accuracy_gap",
    "betti_curve",
    "build_graph",
    "complexity",
    "generate",
    "load_cloud",
    "local_scales",
    "manifold_conditions",
    "persistent_homology",
    "rank_models",
    "run_pipeline",
    "sample_bound",
]
