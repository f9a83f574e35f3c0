import math

import numpy as np
import pytest

from metric_graphs.constructions import (
    IntrinsicLabel,
    build_cs,
    build_mc,
    build_sigma,
    classify_intrinsic,
    relations_report,
    threshold_graph,
)
from metric_graphs.fixtures import load_fixture
from metric_graphs.graphs import has_cycle, is_connected, is_tree
from metric_graphs.metrics import Norm, ToleranceConfig, from_matrix, from_points
from metric_graphs.spaces import unstable_family, unstable_threshold

SQRT2 = math.sqrt(2.0)
STAR = ((0, 1), (0, 2), (0, 3))
K4 = ((0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3))


class TestFourPoint:
    def test_cs(self, four_point):
        trace = build_cs(four_point)
        assert trace.final_graph.edges == ((0, 1), (1, 2), (2, 3))
        assert trace.final_graph.distances == (1.0, 2.0, 3.0)
        assert trace.step_count == 1
        assert dict(trace.steps[0].nu) == {0: 1.0, 1: 1.0, 2: 2.0, 3: 3.0}
        assert trace.max_nearest_neighbour == 3.0
        assert trace.final_partition.count == 1

    def test_mc(self, four_point):
        mc, cut = build_mc(four_point)
        assert mc.edges == ((0, 1), (0, 2), (1, 2), (2, 3))
        assert cut.value == 3.0
        assert cut.index == 3

    def test_sigma(self, four_point):
        assert build_sigma(four_point).edges == ((0, 1), (0, 3), (1, 2), (2, 3))

    def test_relations(self, four_point):
        report = relations_report(four_point)
        rel = report.relations
        assert rel.cs_subset_sigma and rel.cs_subset_mc
        assert rel.cs_equals_sigma_cap_mc
        assert not rel.sigma_equals_cs
        assert not rel.mc_equals_cs
        assert not rel.all_equal
        assert rel.cs_distorts_metric
        assert not rel.sigma_is_tree
        assert report.intrinsic.label is IntrinsicLabel.INTRINSIC_II


class TestTShape:
    def test_cs_equals_mc(self, t_shape):
        cs = build_cs(t_shape).final_graph
        mc, cut = build_mc(t_shape)
        assert cs.edges == mc.edges == ((0, 1), (1, 2), (1, 3))
        assert cut.value == 1.0

    def test_sigma(self, t_shape):
        sigma = build_sigma(t_shape)
        assert sigma.edges == ((0, 1), (0, 3), (1, 2), (1, 3), (2, 3))
        np.testing.assert_allclose(sigma.distances, [1.0, SQRT2, 1.0, 1.0, SQRT2], atol=1e-9)
        assert classify_intrinsic(t_shape).label is IntrinsicLabel.INTRINSIC_II


class TestRightAngle:
    def test_l1_is_intrinsic_one(self):
        M = load_fixture("right_angle", norm=Norm.L1)
        klass = classify_intrinsic(M)
        assert klass.label is IntrinsicLabel.INTRINSIC_I
        assert klass.common_length == 1.0
        assert klass.describe() == "intrinsic-I (r=1)"
        report = relations_report(M)
        assert report.relations.all_equal
        assert report.sigma.edges == ((0, 1), (1, 2))

    @pytest.mark.parametrize("norm", [Norm.L2, Norm.LINF])
    def test_other_norms_are_extrinsic(self, norm):
        M = load_fixture("right_angle", norm=norm)
        assert build_sigma(M).edge_count == 3
        assert classify_intrinsic(M).describe() == "extrinsic"


class TestTies:
    def test_unit_square_cs_is_a_cycle(self, unit_square):
        cs = build_cs(unit_square).final_graph
        assert cs.edges == ((0, 1), (0, 3), (1, 2), (2, 3))
        assert has_cycle(cs)
        assert is_connected(cs)

    def test_grid_relations_hold(self, grid_3x3):
        report = relations_report(grid_3x3)
        assert report.cs.edge_count == 12
        assert report.relations.cs_subset_sigma and report.relations.cs_subset_mc

    def test_two_points(self):
        M = from_matrix([[0, 2.5], [2.5, 0]])
        report = relations_report(M)
        assert report.cs.edges == report.mc.edges == report.sigma.edges == ((0, 1),)
        assert report.intrinsic.label is IntrinsicLabel.EXTRINSIC
        assert report.cut_value.value == 2.5


class TestUnstableFamily:
    def test_threshold(self):
        assert unstable_threshold(3) == pytest.approx(-1.0 / 3.0)

    @pytest.mark.parametrize("x", [0.0, -0.05])
    def test_star_above_threshold(self, x):
        cs = build_cs(from_points(unstable_family(3, x))).final_graph
        assert cs.edges == STAR
        assert is_tree(cs)

    def test_complete_at_threshold(self):
        cs = build_cs(from_points(unstable_family(3, unstable_threshold(3)))).final_graph
        assert cs.edges == K4

    @pytest.mark.parametrize("eq_tol", [1e-4, 1e-9])
    def test_complete_just_below_threshold(self, eq_tol):
        cloud = unstable_family(3, unstable_threshold(3) - 1e-6)
        trace = build_cs(from_points(cloud, ToleranceConfig(eq_tol=eq_tol)))
        assert trace.final_graph.edges == K4
        assert trace.step_count == 1


class TestThresholdGraph:
    def test_threshold_graph(self, four_point):
        assert threshold_graph(four_point, 2.0).edges == ((0, 1), (1, 2))
        assert threshold_graph(four_point, 0.5).edge_count == 0
        assert threshold_graph(four_point, 5.0).edge_count == 6


class TestToleranceWindow:
    # a..f; de=1.0 ab=1.05 cf=1.08 ac=1.12, every other pair at 2.0
    TABLE = [
        [0.0, 1.05, 1.12, 2.0, 2.0, 2.0],
        [1.05, 0.0, 2.0, 2.0, 2.0, 2.0],
        [1.12, 2.0, 0.0, 2.0, 2.0, 1.08],
        [2.0, 2.0, 2.0, 0.0, 1.0, 2.0],
        [2.0, 2.0, 2.0, 1.0, 0.0, 2.0],
        [2.0, 2.0, 1.08, 2.0, 2.0, 0.0],
    ]

    def test_cs_takes_every_edge_within_tolerance_of_nearest(self):
        M = from_matrix(self.TABLE, labels=list("abcdef"), tolerance=ToleranceConfig(eq_tol=0.1))
        trace = build_cs(M)
        first = trace.steps[0]
        assert dict(first.nu) == {0: 1.05, 1: 1.05, 2: 1.08, 3: 1.0, 4: 1.0, 5: 1.08}
        assert first.new_edges == ((0, 1), (0, 2), (2, 5), (3, 4))
        assert trace.step_count == 2
        # every crossing pair of {a, b, c, f} x {d, e} sits at 2.0
        assert len(trace.steps[1].new_edges) == 8
        assert trace.final_graph.edge_count == 12

    def test_strict_tolerance_keeps_only_the_nearest(self):
        first = build_cs(from_matrix(self.TABLE)).steps[0]
        assert first.new_edges == ((0, 1), (2, 5), (3, 4))

    def test_cs_stays_inside_mc(self):
        M = from_matrix(self.TABLE, tolerance=ToleranceConfig(eq_tol=0.1))
        mc, cut = build_mc(M)
        assert cut.value == 2.0
        assert mc.edge_count == 15
        assert build_cs(M).final_graph.edge_set() <= mc.edge_set()
