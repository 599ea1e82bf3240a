import io

import numpy as np
import pytest

from oracles import random_cloud, sorted_opposite_distances, uncapped_edges
from src.errors import SingleClassError, ValidationError
from src.neighborhood import build_graph, edge_values, local_scales
from src.pointcloud import DistanceOracle, LabeledPointCloud


def _edge_dict(graph):
    return {(i, j): value for i, j, value in graph.edges()}


class TestLocalScales:
    def test_two_points(self):
        cloud = LabeledPointCloud(np.array([[0.0, 0.0], [3.0, 0.0]]), np.array([0, 1]))
        scales = local_scales(cloud, DistanceOracle.euclidean(cloud), k=1)
        np.testing.assert_allclose(scales.rho, [3.0, 3.0])

    @pytest.mark.parametrize("seed", range(5))
    def test_kth_order_statistic(self, seed):
        cloud = random_cloud(seed, n=12, min_per_class=4)
        scales = local_scales(cloud, DistanceOracle.euclidean(cloud), k=3)
        for i in range(cloud.n):
            assert scales.rho[i] == pytest.approx(sorted_opposite_distances(cloud, i)[2], rel=1e-12)

    def test_k_exceeding_class_names_class(self, unit_square):
        with pytest.raises(ValidationError) as info:
            local_scales(unit_square, DistanceOracle.euclidean(unit_square), k=3)
        assert "k=3" in str(info.value)
        assert "class" in str(info.value)

    def test_single_class(self):
        cloud = LabeledPointCloud(np.zeros((3, 2)), np.array([0, 0, 0]))
        with pytest.raises(SingleClassError):
            local_scales(cloud, DistanceOracle.euclidean(cloud), k=1)

    def test_duplicates_give_zero_scale(self):
        cloud = LabeledPointCloud(np.array([[0.0, 0.0], [0.0, 0.0]]), np.array([0, 1]))
        scales = local_scales(cloud, DistanceOracle.euclidean(cloud), k=1)
        assert scales.rho.tolist() == [0.0, 0.0]


class TestEdgeValues:
    def test_plain_passthrough(self):
        distances = np.array([[1.0, 2.0]])
        np.testing.assert_array_equal(edge_values(distances, None, None), distances)

    def test_zero_scale_handling(self):
        distances = np.array([[0.0, 2.0, 2.0]])
        values = edge_values(distances, np.array([0.0]), np.array([1.0, 1.0, 4.0]))
        assert values[0, 0] == 0.0
        assert values[0, 1] == np.inf
        assert values[0, 2] == np.inf


class TestBuildGraph:
    def test_plain_single_edge(self):
        cloud = LabeledPointCloud(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([0, 1]))
        graph = build_graph(cloud, DistanceOracle.euclidean(cloud))
        assert list(graph.edges()) == [(0, 1, 2.0)]

    def test_locally_scaled_natural_unit(self):
        cloud = LabeledPointCloud(np.array([[0.0, 0.0], [2.0, 0.0]]), np.array([0, 1]))
        oracle = DistanceOracle.euclidean(cloud)
        scales = local_scales(cloud, oracle, k=1)
        graph = build_graph(cloud, oracle, "locally-scaled", scales)
        assert list(graph.edges()) == [(0, 1, 1.0)]

    def test_locally_scaled_needs_scales(self, single_pair):
        with pytest.raises(ValidationError, match="scales"):
            build_graph(single_pair, DistanceOracle.euclidean(single_pair), "locally-scaled")

    @pytest.mark.parametrize("cap", [0, -1])
    def test_cap_must_be_positive(self, single_pair, cap):
        with pytest.raises(ValidationError, match="cap"):
            build_graph(single_pair, DistanceOracle.euclidean(single_pair), cap=cap)

    def test_unknown_mode(self, single_pair):
        with pytest.raises(ValidationError, match="mode"):
            build_graph(single_pair, DistanceOracle.euclidean(single_pair), mode="scaled")

    def test_single_class(self):
        cloud = LabeledPointCloud(np.zeros((2, 2)), np.array([1, 1]))
        with pytest.raises(SingleClassError):
            build_graph(cloud, DistanceOracle.euclidean(cloud))

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("mode", ["plain", "locally-scaled"])
    def test_large_cap_equals_uncapped(self, seed, mode):
        cloud = random_cloud(seed, n=30, min_per_class=5)
        oracle = DistanceOracle.euclidean(cloud)
        scales = local_scales(cloud, oracle, k=2) if mode == "locally-scaled" else None
        graph = build_graph(cloud, oracle, mode, scales, cap=cloud.n)
        expected = uncapped_edges(cloud, scales.rho if scales else None)
        got = _edge_dict(graph)
        assert got.keys() == expected.keys()
        for key, value in expected.items():
            assert got[key] == pytest.approx(value, rel=1e-12)

    @pytest.mark.parametrize("seed", range(4))
    def test_capped_graph_properties(self, seed):
        cloud = random_cloud(seed, n=30, min_per_class=5)
        graph = build_graph(cloud, DistanceOracle.euclidean(cloud), cap=3)
        assert np.all(cloud.labels[graph.src] != cloud.labels[graph.dst])
        assert np.all(graph.src < graph.dst)
        assert len(set(zip(graph.src.tolist(), graph.dst.tolist()))) == len(graph)
        # every point nominated at least its 3 nearest opposite points
        edges = _edge_dict(graph)
        for i in range(cloud.n):
            nearest = sorted_opposite_distances(cloud, i)[2]
            incident = [v for (a, b), v in edges.items() if i in (a, b) and v <= nearest + 1e-12]
            assert len(incident) >= 3

    def test_canonical_order(self):
        cloud = random_cloud(8, n=20)
        graph = build_graph(cloud, DistanceOracle.euclidean(cloud), cap=4)
        keys = list(zip(graph.values.tolist(), graph.src.tolist(), graph.dst.tolist()))
        assert keys == sorted(keys)

    def test_ties_at_cap_are_kept(self):
        # point 0 has three opposite points at distance 1
        points = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [-1.0, 0.0]])
        cloud = LabeledPointCloud(points, np.array([0, 1, 1, 1]))
        graph = build_graph(cloud, DistanceOracle.euclidean(cloud), cap=1)
        assert len(graph) == 3

    def test_monotone_inclusion(self):
        cloud = random_cloud(2, n=20)
        graph = build_graph(cloud, DistanceOracle.euclidean(cloud), cap=5)
        small = set(_edge_dict(graph.at(0.3)))
        large = set(_edge_dict(graph.at(0.6)))
        assert small <= large

    def test_plain_scale_equivariance(self):
        cloud = random_cloud(4, n=20)
        base = build_graph(cloud, DistanceOracle.euclidean(cloud), cap=cloud.n)
        scaled_cloud = cloud.scaled(3.0)
        scaled = build_graph(scaled_cloud, DistanceOracle.euclidean(scaled_cloud), cap=cloud.n)
        base_edges, scaled_edges = _edge_dict(base), _edge_dict(scaled)
        assert base_edges.keys() == scaled_edges.keys()
        for key, value in base_edges.items():
            assert scaled_edges[key] == pytest.approx(3.0 * value, rel=1e-12)

    @pytest.mark.parametrize("factor", [0.5, 3.0])
    def test_locally_scaled_invariance(self, factor):
        cloud = random_cloud(5, n=20, min_per_class=5)
        scaled_cloud = cloud.scaled(factor)
        graphs = []
        for c in (cloud, scaled_cloud):
            oracle = DistanceOracle.euclidean(c)
            graphs.append(_edge_dict(build_graph(c, oracle, "locally-scaled", local_scales(c, oracle, 3), cap=c.n)))
        assert graphs[0].keys() == graphs[1].keys()
        for key, value in graphs[0].items():
            assert graphs[1][key] == pytest.approx(value, rel=1e-12)

    def test_thread_count_does_not_change_result(self):
        cloud = random_cloud(6, n=40, min_per_class=10)
        oracle = DistanceOracle.euclidean(cloud)
        one = build_graph(cloud, oracle, cap=5, threads=1)
        four = build_graph(cloud, oracle, cap=5, threads=4)
        np.testing.assert_array_equal(one.src, four.src)
        np.testing.assert_array_equal(one.dst, four.dst)
        np.testing.assert_array_equal(one.values, four.values)

    def test_csv_export(self, single_pair):
        graph = build_graph(single_pair, DistanceOracle.euclidean(single_pair))
        stream = io.StringIO()
        graph.to_csv(stream)
        assert stream.getvalue() == "i,j,value\n0,1,1.0\n"
