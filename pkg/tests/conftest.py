"""Shared fixtures: tiny hand-checkable clouds."""

import math

import numpy as np
import pytest

from src.pointcloud import LabeledPointCloud


@pytest.fixture
def single_pair():
    """Two opposite-label points at distance 1."""
    return LabeledPointCloud(np.array([[0.0, 0.0], [1.0, 0.0]]), np.array([0, 1]))


@pytest.fixture
def unit_square():
    """Unit square with alternating labels around the boundary."""
    points = np.array([[0.0, 0.0], [1.0, 0.0], [1.0, 1.0], [0.0, 1.0]])
    return LabeledPointCloud(points, np.array([0, 1, 0, 1]))


@pytest.fixture
def octagon():
    """Regular octagon of circumradius 1 with alternating labels."""
    angles = 2 * math.pi * np.arange(8) / 8
    points = np.column_stack([np.cos(angles), np.sin(angles)])
    return LabeledPointCloud(points, np.arange(8) % 2)


@pytest.fixture
def small_two_circles():
    """One dense disk/annulus pair, small enough for the fast suite."""
    from src.pointcloud import SyntheticSpec, generate

    spec = SyntheticSpec("two-circles", seed=1, params={"pairs": [
        {"center": [0.0, 0.0], "disk_radius": 0.5, "annulus_inner": 0.8, "annulus_outer": 1.2,
         "n_disk": 25, "n_annulus": 40, "disk_label": 0},
    ]})
    return generate(spec)
