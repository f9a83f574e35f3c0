"""Ensemble checks over many random and deliberately tied clouds."""
from collections import Counter

import numpy as np
import pytest

from metric_graphs.constructions import IntrinsicLabel, build_cs, build_mc, build_sigma, classify_intrinsic, relations_report
from metric_graphs.graphs import (
    UnionFind,
    WeightedGraph,
    complete_graph,
    is_connected,
    is_subgraph,
    is_tree,
    isomorphic_under,
    metric_distortion,
    path_metric,
    reproduces_metric,
    without_edge,
)
from metric_graphs.metrics import (
    Norm,
    PointCloud,
    distance_set,
    from_points,
    is_distance_separated,
    mesh_delta,
)
from metric_graphs.spaces import (
    Grid,
    UniformCube,
    apply_motion,
    bottleneck_bruteforce,
    bottleneck_distance,
    jitter,
    perturb_to_ds,
    random_rigid_motion,
    sample_cloud,
    unstable_family,
    unstable_threshold,
)

pytestmark = pytest.mark.slow


def random_clouds(count, seed, max_m=25):
    """
    Mixed-norm uniform clouds; L1 and Linf clouds have many exact geodesic triples.
    L2 clouds stay out of the plane, where near-geodesic triples inside the
    tolerance window are too common for an exact comparison.
    """
    rng = np.random.default_rng(seed)
    norms = [Norm.L1, Norm.L2, Norm.LINF]
    for k in range(count):
        m = int(rng.integers(3, max_m + 1))
        norm = norms[k % 3]
        dim = int(rng.choice([1, 3])) if norm is Norm.L2 else int(rng.integers(1, 4))
        yield PointCloud(rng.uniform(size=(m, dim)), norm=norm)


def grid_clouds(count, seed):
    rng = np.random.default_rng(seed)
    for k in range(count):
        dim = 2 + k % 2
        side = int(rng.integers(2, 5))
        m = int(rng.integers(4, side ** dim + 1))
        yield sample_cloud(Grid(dim, side), m, seed=k, norm=[Norm.L1, Norm.L2, Norm.LINF][k % 3])


def test_cs_is_a_tree_for_separated_clouds():
    trees = seed = 0
    while trees < 1000:
        M = from_points(sample_cloud(UniformCube(3, 1.0), 30, seed))
        seed += 1
        if not is_distance_separated(M):
            continue
        assert is_tree(build_cs(M).final_graph), seed - 1
        trees += 1
    assert seed < 1100


def test_sigma_reproduces_metric_and_is_minimal():
    rng = np.random.default_rng(6)
    for cloud in random_clouds(200, seed=6):
        M = from_points(cloud)
        sigma = build_sigma(M)
        assert metric_distortion(sigma, M) <= 1e-9 * M.diameter
        picks = rng.choice(sigma.edge_count, size=min(5, sigma.edge_count), replace=False)
        for k in picks:
            x, y = sigma.edges[k]
            reduced = without_edge(sigma, (x, y))
            if is_connected(reduced):
                assert path_metric(reduced).d(x, y) > M.d(x, y)


def test_cs_is_contained_in_sigma_and_mc():
    clouds = list(random_clouds(200, seed=6)) + list(grid_clouds(50, seed=7))
    for cloud in clouds:
        M = from_points(cloud)
        report = relations_report(M)
        assert is_subgraph(report.cs, report.sigma)
        assert is_subgraph(report.cs, report.mc)
        assert report.cut_value.value >= report.trace.max_nearest_neighbour


def test_bottleneck_matches_bruteforce():
    rng = np.random.default_rng(8)
    for _ in range(100):
        m = int(rng.integers(4, 9))
        dim = int(rng.integers(1, 4))
        A = PointCloud(rng.uniform(size=(m, dim)))
        B = PointCloud(rng.uniform(size=(m, dim)))
        assert bottleneck_distance(A, B)[0] == bottleneck_bruteforce(A, B)


def test_bottleneck_is_symmetric_and_satisfies_triangle_inequality():
    rng = np.random.default_rng(9)
    for _ in range(100):
        m = int(rng.integers(2, 12))
        A, B, C = (PointCloud(rng.uniform(size=(m, 2))) for _ in range(3))
        ab = bottleneck_distance(A, B)[0]
        assert abs(ab - bottleneck_distance(B, A)[0]) <= 1e-12
        assert bottleneck_distance(A, C)[0] <= ab + bottleneck_distance(B, C)[0] + 1e-12


def test_small_moves_keep_clouds_separated():
    rng = np.random.default_rng(10)
    checked = 0
    while checked < 200:
        cloud = PointCloud(rng.uniform(size=(10, 2)))
        M = from_points(cloud)
        delta = mesh_delta(distance_set(M))
        if delta < 1e-6:
            continue
        moved = cloud.replace_points(cloud.points + jitter(cloud, delta / 20.0, rng))
        assert is_distance_separated(from_points(moved))
        checked += 1


def test_perturbation_separates_tied_clouds():
    tied = list(grid_clouds(90, seed=11))
    tied += [unstable_family(n, unstable_threshold(n)) for n in range(2, 12)]
    for k, cloud in enumerate(tied):
        M = from_points(cloud)
        assert not is_distance_separated(M), k
        epsilon = mesh_delta(distance_set(M)) / 20.0
        report = perturb_to_ds(cloud, epsilon, seed=k)
        assert report.attempts <= 64
        assert report.displacement < epsilon / 2.0
        out = from_points(report.output)
        assert is_distance_separated(out)
        assert is_tree(build_cs(out).final_graph)


def test_cs_and_mc_are_isometry_invariant():
    clouds = list(random_clouds(150, seed=12, max_m=15)) + list(grid_clouds(50, seed=13))
    for k, cloud in enumerate(clouds):
        motion = random_rigid_motion(cloud.dimension, seed=1000 + k, m=cloud.size, norm=cloud.norm)
        M = from_points(cloud)
        N = from_points(apply_motion(motion, cloud))
        f = motion.relabeling
        assert isomorphic_under(build_cs(M).final_graph, build_cs(N).final_graph, f), k
        assert isomorphic_under(build_mc(M)[0], build_mc(N)[0], f), k


def full_grids():
    """Whole lattices under L1 and Linf; every pair at distance n >= 2 has a lattice point between."""
    for norm in (Norm.L1, Norm.LINF):
        for dim in (1, 2, 3):
            for side in (2, 3, 4):
                if side ** dim >= 3:
                    yield sample_cloud(Grid(dim, side), side ** dim, seed=0, norm=norm)


def test_cs_trace_batches():
    clouds = list(random_clouds(150, seed=14)) + list(grid_clouds(50, seed=15))
    for k, cloud in enumerate(clouds):
        M = from_points(cloud)
        trace = build_cs(M)
        separated = is_distance_separated(M)
        seen = set()
        for step in trace.steps:
            comp = step.partition.representative
            batch = set(step.new_edges)
            assert not batch & seen, k
            seen |= batch
            between = Counter()
            for x, y in step.new_edges:
                assert comp[x] != comp[y], k
                gap = M.d(x, y) - max(step.nu[comp[x]], step.nu[comp[y]])
                assert 0.0 <= gap <= M.tol, k
                between[frozenset((comp[x], comp[y]))] += 1
            if separated:
                assert max(between.values()) == 1, k
        assert seen == trace.final_graph.edge_set(), k
        counts = [step.partition.count for step in trace.steps] + [trace.final_partition.count]
        for before, after in zip(counts, counts[1:]):
            assert after <= before // 2, k


def incremental_cut(M):
    """Insert pairs shortest first until one component remains; the last joining distance."""
    iu, ju = np.triu_indices(M.size, 1)
    order = np.argsort(M.dist[iu, ju], kind="stable")
    uf = UnionFind(M.size)
    joined = 1
    for idx in order:
        x, y = int(iu[idx]), int(ju[idx])
        if uf.union(x, y):
            joined += 1
            if joined == M.size:
                return M.d(x, y)


def test_mc_matches_incremental_union():
    clouds = list(random_clouds(150, seed=16)) + list(grid_clouds(50, seed=17))
    for k, cloud in enumerate(clouds):
        M = from_points(cloud)
        mc, cut = build_mc(M)
        r = incremental_cut(M)
        assert cut.value == r, k
        expected = {(i, j) for i in range(M.size) for j in range(i + 1, M.size) if M.d(i, j) <= r + M.tol}
        assert mc.edge_set() == expected, k
        assert is_connected(mc)


def test_intrinsic_one_collapses_all_graphs():
    seen = 0
    for cloud in list(full_grids()) + list(grid_clouds(60, seed=18)):
        M = from_points(cloud)
        if classify_intrinsic(M).label is not IntrinsicLabel.INTRINSIC_I:
            continue
        report = relations_report(M)
        assert report.cs.same_edges(report.mc)
        assert report.cs.same_edges(report.sigma)
        seen += 1
    assert seen >= 14


def test_intrinsic_two_with_tree_sigma_equals_cs():
    rng = np.random.default_rng(19)
    lines = [PointCloud(rng.uniform(size=(int(rng.integers(3, 21)), 1))) for _ in range(60)]
    seen = 0
    for cloud in lines + list(random_clouds(150, seed=20)):
        M = from_points(cloud)
        sigma = build_sigma(M)
        if classify_intrinsic(M, sigma).label is not IntrinsicLabel.INTRINSIC_II or not is_tree(sigma):
            continue
        assert build_cs(M).final_graph.same_edges(sigma)
        seen += 1
    assert seen >= 60


def test_graphs_between_sigma_and_complete_reproduce_metric():
    rng = np.random.default_rng(21)
    for cloud in random_clouds(100, seed=22, max_m=15):
        M = from_points(cloud)
        sigma = build_sigma(M)
        others = sorted(complete_graph(M).edge_set() - sigma.edge_set())
        extra = [others[i] for i in np.flatnonzero(rng.uniform(size=len(others)) < 0.5)]
        H = WeightedGraph.from_space(M, list(sigma.edges) + extra)
        assert reproduces_metric(sigma, M)
        assert reproduces_metric(H, M)
