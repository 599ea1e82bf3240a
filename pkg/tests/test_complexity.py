import itertools
import math
from decimal import Decimal, getcontext

import numpy as np
import pytest

from oracles import betti_numbers, nontrivial_complex, random_cloud, sorted_opposite_distances, uncapped_edges
from src.complexity import (
    ComplexityRecord,
    ComplexityTable,
    ManifoldConditionInputs,
    R_FACTOR,
    SampleBoundInputs,
    complexity,
    manifold_conditions,
    sample_bound,
    sample_bound_value,
)
from src.errors import ParseError, ValidationError
from src.persistence import ScaleGrid


def _complex_at(cloud, edges: dict, theta: float) -> list[tuple[int, ...]]:
    """Vertices, cross edges, witnessed same-class edges and triangles alive at theta."""
    alive = {pair for pair, value in edges.items() if value <= theta}
    linked = set(alive)
    for i, j in itertools.combinations(range(cloud.n), 2):
        if cloud.labels[i] != cloud.labels[j]:
            continue
        if any(tuple(sorted((i, w))) in alive and tuple(sorted((j, w))) in alive for w in range(cloud.n)):
            linked.add((i, j))
    triangles = [t for t in itertools.combinations(range(cloud.n), 3)
                 if all(pair in linked for pair in itertools.combinations(t, 2))]
    return [(v,) for v in range(cloud.n)] + sorted(linked) + triangles


def _brute_force_totals(cloud, mode: str, grid: ScaleGrid, k: int) -> tuple[int, int]:
    rho = None
    if mode == "locally-scaled":
        rho = np.array([sorted_opposite_distances(cloud, i)[k - 1] for i in range(cloud.n)])
    edges = uncapped_edges(cloud, rho)
    h0 = h1 = 0
    for theta in grid.values.tolist():
        betti = betti_numbers(nontrivial_complex(_complex_at(cloud, edges, theta)), max_dim=1)
        h0 += betti[0]
        h1 += betti[1]
    return h0, h1


class TestComplexity:
    def test_single_pair(self, single_pair):
        record = complexity(single_pair, grid=ScaleGrid(0.5, 1.5, 3))
        assert (record.h0_total, record.h1_total, record.combined) == (2, 0, 2)
        assert record.source == "computed"

    def test_empty_cloud_is_zero(self):
        from src.pointcloud import LabeledPointCloud

        record = complexity(LabeledPointCloud(np.zeros((0, 2)), np.zeros(0, dtype=int)))
        assert record.combined == 0

    @pytest.mark.parametrize("seed", range(4))
    @pytest.mark.parametrize("mode, grid", [("plain", ScaleGrid(0.0, 1.2, 25)),
                                            ("locally-scaled", ScaleGrid(0.5, 1.5, 25))])
    @pytest.mark.parametrize("engine", ["matrix", "gudhi"])
    def test_totals_match_brute_force(self, seed, mode, grid, engine):
        if engine == "gudhi":
            pytest.importorskip("gudhi")
        cloud = random_cloud(seed, n=9)
        record = complexity(cloud, mode=mode, grid=grid, k=2, engine=engine)
        assert (record.h0_total, record.h1_total) == _brute_force_totals(cloud, mode, grid, k=2)

    @pytest.mark.parametrize("factor", [0.5, 3.0])
    def test_locally_scaled_is_scale_invariant(self, factor):
        cloud = random_cloud(4, n=20)
        base = complexity(cloud, mode="locally-scaled", k=3)
        scaled = complexity(cloud.scaled(factor), mode="locally-scaled", k=3)
        assert (base.h0_total, base.h1_total) == (scaled.h0_total, scaled.h1_total)

    @pytest.mark.parametrize("mode", ["plain", "locally-scaled"])
    def test_permutation_invariant(self, mode):
        cloud = random_cloud(8, n=18)
        permutation = np.random.default_rng(0).permutation(cloud.n)
        grid = ScaleGrid(0.0, 1.5, 40)
        assert (complexity(cloud, mode=mode, grid=grid, k=3).to_dict()
                == complexity(cloud.permuted(permutation), mode=mode, grid=grid, k=3).to_dict())

    def test_default_grids(self, single_pair):
        assert complexity(single_pair).grid == ScaleGrid(0.0, 10.0, 100)
        assert complexity(single_pair, mode="locally-scaled", k=1).grid == ScaleGrid(0.5, 1.5, 100)

    def test_record_rejects_negative(self):
        with pytest.raises(ValidationError):
            ComplexityRecord(h0_total=-1, h1_total=0, mode="plain")

    def test_unknown_measure(self):
        with pytest.raises(ValidationError, match="measure"):
            ComplexityRecord(1, 1, "plain").score("h2")


class TestTables:
    def test_mnist_worked_row(self):
        record = ComplexityTable.shipped("mnist").record("0v4")
        assert (record.h0_total, record.h1_total, record.combined) == (388, 91, 479)
        assert record.source == "table:mnist-data"

    @pytest.mark.parametrize("domain", ["mnist", "fashion-mnist", "cifar10"])
    def test_shipped_tables_have_45_pairs(self, domain):
        assert len(ComplexityTable.shipped(domain, "data")) == 45
        assert len(ComplexityTable.shipped(domain, "model")) == 45

    def test_known_cells(self):
        mnist = ComplexityTable.shipped("mnist")
        assert mnist.row("0v5").score("combined") == 1058
        assert mnist.row("0v9").score("combined") == 525
        assert ComplexityTable.shipped("cifar10").row("catvdog").score("combined") == 2042

    def test_blank_cell(self):
        table = ComplexityTable.shipped("fashion-mnist")
        row = table.row("trouservsneaker")
        assert row.score("h0") == 79
        assert row.score("h1") is None
        assert row.score("combined") is None
        with pytest.raises(ValidationError, match="blank"):
            table.record("trouservsneaker")

    def test_unknown_model(self):
        with pytest.raises(ValidationError, match="9v9"):
            ComplexityTable.shipped("mnist").row("9v9")

    def test_unknown_domain(self):
        with pytest.raises(ValidationError, match="domain"):
            ComplexityTable.shipped("svhn")

    def test_bad_count_names_line(self, tmp_path):
        path = tmp_path / "table.csv"
        path.write_text("class_a,class_b,h0_total,h1_total\n0,1,5,3\n0,2,x,1\n")
        with pytest.raises(ParseError, match="line 3"):
            ComplexityTable.load(path)

    def test_missing_columns(self, tmp_path):
        path = tmp_path / "table.csv"
        path.write_text("class_a,class_b,h0_total\n0,1,5\n")
        with pytest.raises(ParseError, match="h1_total"):
            ComplexityTable.load(path)

    def test_duplicate_pair(self, tmp_path):
        path = tmp_path / "table.csv"
        path.write_text("class_a,class_b,h0_total,h1_total\n0,1,5,3\n0,1,6,2\n")
        with pytest.raises(ValidationError, match="duplicate"):
            ComplexityTable.load(path)


def _decimal_bound(q, alpha_x, alpha_y, l_a, l_b, delta) -> int:
    getcontext().prec = 50
    q, alpha_x, alpha_y, delta = (Decimal(str(v)) for v in (q, alpha_x, alpha_y, delta))
    log_delta = (1 / delta).ln()
    first = ((Decimal(2 * l_a)).ln() + log_delta) / (alpha_x * q)
    second = ((Decimal(2 * l_b)).ln() + log_delta) / (alpha_y * (1 - q))
    return int(max(first, second).to_integral_value(rounding="ROUND_CEILING"))


class TestSampleBound:
    def test_worked_example(self):
        inputs = SampleBoundInputs(q=0.5, alpha_x=0.1, alpha_y=0.1, l_a=100, l_b=100, delta=0.05)
        assert sample_bound(inputs) == 166
        assert sample_bound(inputs) == _decimal_bound(0.5, 0.1, 0.1, 100, 100, 0.05)

    def test_certain_event(self):
        inputs = SampleBoundInputs(q=0.5, alpha_x=0.1, alpha_y=0.1, l_a=100, l_b=100, delta=1.0)
        assert sample_bound(inputs) == math.ceil(math.log(200) / 0.05)

    def test_covering_form(self):
        inputs = SampleBoundInputs.from_covering(q=0.5, k_r=0.1, k_s=0.1, n_r=100, n_s=100, delta=0.05)
        assert sample_bound(inputs) == 166

    def test_random_against_decimal(self):
        rng = np.random.default_rng(5)
        for _ in range(100):
            q = float(rng.uniform(0.05, 0.95))
            alpha_x, alpha_y = (float(v) for v in rng.uniform(0.01, 1.0, 2))
            l_a, l_b = (int(v) for v in rng.integers(1, 1000, 2))
            delta = float(rng.uniform(0.001, 1.0))
            inputs = SampleBoundInputs(q, alpha_x, alpha_y, l_a, l_b, delta)
            value = sample_bound_value(inputs)
            expected = _decimal_bound(q, alpha_x, alpha_y, l_a, l_b, delta)
            # skip draws that land within rounding distance of an integer
            if abs(value - round(value)) > 1e-9:
                assert sample_bound(inputs) == expected

    def test_swapping_components(self):
        inputs = SampleBoundInputs(q=0.3, alpha_x=0.2, alpha_y=0.05, l_a=40, l_b=700, delta=0.01)
        assert sample_bound(inputs) == sample_bound(inputs.swapped())

    def test_monotone(self):
        base = dict(q=0.4, alpha_x=0.2, alpha_y=0.3, l_a=50, l_b=80, delta=0.05)
        value = sample_bound_value(SampleBoundInputs(**base))
        assert sample_bound_value(SampleBoundInputs(**{**base, "delta": 0.01})) >= value
        assert sample_bound_value(SampleBoundInputs(**{**base, "l_a": 500, "l_b": 800})) >= value
        assert sample_bound_value(SampleBoundInputs(**{**base, "alpha_x": 0.4, "alpha_y": 0.6})) <= value

    def test_monotone_over_random_pairs(self):
        rng = np.random.default_rng(11)
        for _ in range(1000):
            q = float(rng.uniform(0.05, 0.95))
            alpha_x, alpha_y = (float(v) for v in rng.uniform(0.01, 0.5, 2))
            l_a, l_b = (int(v) for v in rng.integers(1, 500, 2))
            delta = float(rng.uniform(0.01, 1.0))
            base = SampleBoundInputs(q, alpha_x, alpha_y, l_a, l_b, delta)
            harder = SampleBoundInputs(q, alpha_x, alpha_y, l_a + int(rng.integers(0, 100)),
                                       l_b + int(rng.integers(0, 100)), delta * float(rng.uniform(0.1, 1.0)))
            easier = SampleBoundInputs(q, min(1.0, alpha_x * 2), min(1.0, alpha_y * 2), l_a, l_b, delta)
            assert sample_bound(harder) >= sample_bound(base) >= sample_bound(easier)

    @pytest.mark.parametrize("field, value", [("q", 0.0), ("q", 1.0), ("alpha_x", 0.0), ("alpha_y", 1.5),
                                              ("l_a", 0), ("delta", 0.0), ("delta", 1.2)])
    def test_validation(self, field, value):
        base = dict(q=0.5, alpha_x=0.1, alpha_y=0.1, l_a=100, l_b=100, delta=0.05)
        with pytest.raises(ValidationError, match=field):
            SampleBoundInputs(**{**base, field: value})


class TestManifoldConditions:
    def test_small_radius_passes(self):
        report = manifold_conditions(ManifoldConditionInputs(tau=1.0, r=0.1, s=0.05))
        assert report.r_ok
        assert report.r_limit == pytest.approx(3 - math.sqrt(8))
        assert report.gamma == pytest.approx(0.15)
        assert report.window_flag == "degenerate as printed"
        low, high = report.printed_epsilon_window
        assert low == high

    def test_radius_at_reach_fails(self):
        report = manifold_conditions(ManifoldConditionInputs(tau=1.0, r=1.0, s=1.0))
        assert not report.r_ok
        assert report.window_flag == "degenerate as printed"
        assert report.window_real is False
        assert report.printed_epsilon_window is None
        assert report.to_dict()["printed_epsilon_window"] is None

    def test_limit_is_strict(self):
        assert not manifold_conditions(ManifoldConditionInputs(tau=1.0, r=R_FACTOR, s=0.1)).r_ok

    def test_rejects_nonpositive(self):
        with pytest.raises(ValidationError, match="tau"):
            ManifoldConditionInputs(tau=0.0, r=0.1, s=0.1)
