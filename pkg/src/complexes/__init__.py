"""
Complexes Package - Simplicial complexes built on labeled point clouds.

This package provides the constructions the pipeline evaluates:
- Simplex / SimplicialFiltration: shared types (base.py)
- one_skeleton / expand: labeled Vietoris-Rips filtrations
- class_filtration: ordinary Vietoris-Rips on a single class
- labeled_cech: the desk-scale labeled Čech oracle

All constructions emit simplices in canonical (value, dim, vertices) order,
so their output does not depend on worker count or input ordering.
"""

from .base import Simplex, SimplicialFiltration, faces
from .vietoris_rips import OneSkeleton, one_skeleton, expand, class_filtration
from .cech import (
    ORIENTATIONS,
    EnclosingBall,
    LabeledCechParams,
    is_downward_closed,
    labeled_cech,
    labeled_cech_cloud,
    smallest_enclosing_ball,
)

__all__ = [
    "Simplex",
    "SimplicialFiltration",
    "OneSkeleton",
    "LabeledCechParams",
    "EnclosingBall",
    "ORIENTATIONS",
    "faces",
    "one_skeleton",
    "expand",
    "class_filtration",
    "smallest_enclosing_ball",
    "labeled_cech",
    "labeled_cech_cloud",
    "is_downward_closed",
]
