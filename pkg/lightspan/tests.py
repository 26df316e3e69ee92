"""Test suite for lightspan."""

from unittest import TestCase

import json
import os
import shutil
import tempfile
from io import StringIO
from math import ceil, log, pi, sqrt

import networkx as nx
import numpy as np

from lightspan import generators
from lightspan.cli import build, main
from lightspan.decomp import (
    ADAPTIVE, BallCarving, CapExceeded, Partition, RandomShift, StrongGraph,
    cap_ratio_mc, check_bounded, check_strongly_bounded, covering_count,
    covering_partitions, empirical_cluster_probability, estimate_delta,
    is_covering, partition_pool, sample_partition, sample_partitions,
    scheme_params, singletons,
)
from lightspan.evaluate import (
    assemble_report, evaluate, lightness, lightness_split, logged_delta, nu,
    sparsity, spanner_distances, verify_stretch,
)
from lightspan.exporter import (
    BENCH_HEADER, build_log_from_list, nets_to_json, partition_to_json,
    partitions_to_json, report_from_json, report_to_csv, report_to_json,
)
from lightspan.functions import derive_rng, derive_seed, within
from lightspan.io import (
    dump_edges, dump_instance, load_instance, load_spanner_edges,
)
from lightspan.lsh import (
    LshFamily, PStableLsh, amplification_length, empirical_collision_rate,
    lsh_amplify, lsh_to_partition, pstable_hash_family, stable_sample,
)
from lightspan.metric import (
    MetricSpace, PointSet, WeightedGraph, aspect_ratio, distance, mst,
    normalize,
)
from lightspan.nets import (
    build_hierarchy, build_net, check_net_size_bound, net_level,
)
from lightspan.spanner import (
    Spanner, _center, build_graph_spanner, build_spanner,
    build_spanner_subset_decomposable, effective_stretch, eps_for_stretch,
    graph_partition_edges, scale_ladder,
)

_testcase = TestCase('setUp')
_testcase.maxDiff = 9999
assertEqual = _testcase.assertEqual
assertAlmostEqual = _testcase.assertAlmostEqual
assertRaises = _testcase.assertRaises
assertRaisesRegex = _testcase.assertRaisesRegex
assertTrue = _testcase.assertTrue
assertFalse = _testcase.assertFalse
assertLessEqual = _testcase.assertLessEqual
assertGreater = _testcase.assertGreater

def gaussian_space(seed, n, d, p=2.0):
    rng = np.random.default_rng(seed)
    return normalize(MetricSpace(PointSet(rng.standard_normal((n, d)), p)))

def line_space(*xs):
    """Unnormalized points on a line, handy for exact distances."""
    return MetricSpace(PointSet([[x] for x in xs]))

def networkx_graph(space):
    graph = nx.Graph()
    graph.add_nodes_from(range(space.n))
    for u, v, w in space.backing.edges:
        graph.add_edge(u, v, weight=w * space.scale_factor)
    return graph

class OneCluster(object):
    """A scheme that always returns a single cluster."""

    t = 1.0

    def params(self, n):
        return scheme_params(1.0, 1.0)

    def sample(self, space, domain, delta, rng):
        return Partition(domain, np.zeros(len(domain), dtype='int64'))

class Singletons(object):
    """A scheme that never clusters two points together."""

    t = 1.0

    def params(self, n):
        return scheme_params(1.0, ADAPTIVE)

    def sample(self, space, domain, delta, rng):
        return singletons(domain)

# ------------------------------------------------------------------------
#                            Seeds and tolerances
#

def test_derived_seeds_fit_in_64_bits():
    for seed in 0, 7, 2**64 - 1:
        for label in 'gen', 'build', 'verify':
            value = derive_seed(seed, label)
            assertTrue(0 <= value < 2**64)

def test_derived_streams_are_reproducible():
    a = derive_rng(11, 'build').random(5)
    b = derive_rng(11, 'build').random(5)
    assertEqual(a.tolist(), b.tolist())

def test_within_tolerance():
    assertTrue(within(10.0 * (1 + 5e-10), 10.0))
    assertFalse(within(10.0 * (1 + 5e-9), 10.0))

# ------------------------------------------------------------------------
#                               Metric core
#

def test_point_set_validation():
    assertRaises(ValueError, PointSet, [[0.0, 0.0], [0.0, 0.0]])
    assertRaises(ValueError, PointSet, [[0.0, np.nan]])
    assertRaises(ValueError, PointSet, [[0.0], [1.0]], p=3)
    assertRaises(ValueError, PointSet, [[0.0], [1.0]], p=0.5)
    assertRaises(ValueError, PointSet, np.zeros((0, 2)))

def test_point_set_is_read_only():
    points = PointSet([[0.0, 1.0], [2.0, 3.0]])
    assertRaises(ValueError, points.points.__setitem__, (0, 0), 5.0)

def test_graph_validation():
    assertRaises(ValueError, WeightedGraph, 3, [(0, 1, 1.0)])
    assertRaises(ValueError, WeightedGraph, 2, [(0, 0, 1.0), (0, 1, 1.0)])
    assertRaises(ValueError, WeightedGraph, 2, [(0, 1, 0.0)])
    assertRaises(ValueError, WeightedGraph, 2, [(0, 1, -1.0)])
    assertRaises(ValueError, WeightedGraph, 2, [(0, 1, 1.0), (1, 0, 2.0)])
    assertRaises(ValueError, WeightedGraph, 2, [(0, 2, 1.0)])
    assertEqual(WeightedGraph(1, []).n, 1)

def test_distance_examples():
    space = MetricSpace(PointSet([[0.0, 0.0], [3.0, 4.0]]))
    assertEqual(distance(space, 0, 1), 5.0)
    assertEqual(distance(space, 1, 1), 0.0)
    assertRaises(IndexError, distance, space, 0, 2)
    manhattan = MetricSpace(PointSet([[0.0, 0.0], [3.0, 4.0]], p=1))
    assertAlmostEqual(distance(manhattan, 0, 1), 7.0)

def test_graph_distances_are_shortest_paths():
    graph = WeightedGraph(3, [(0, 1, 1.0), (1, 2, 2.0), (0, 2, 5.0)])
    space = MetricSpace(graph)
    assertEqual(space.distance(0, 2), 3.0)
    assertEqual(space.min_distance(), 1.0)

def test_normalize_makes_minimum_distance_one():
    for seed in range(5):
        space = gaussian_space(seed, 30, 3)
        assertAlmostEqual(space.min_distance(), 1.0, places=12)
    graph = normalize(MetricSpace(WeightedGraph(3, [(0, 1, 4.0),
                                                    (1, 2, 8.0)])))
    assertEqual(graph.scale_factor, 0.25)
    assertEqual(graph.distance(0, 2), 3.0)

def test_normalize_single_point():
    space = normalize(MetricSpace(PointSet([[4.0, 5.0]])))
    assertEqual(space.scale_factor, 1.0)

def test_mst_single_point():
    summary = mst(MetricSpace(PointSet([[1.0]])))
    assertEqual(summary.tree_edges, ())
    assertEqual(summary.weight_L, 0.0)

def test_prim_matches_networkx_kruskal():
    for seed in range(20):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(2, 40))
        p = [1.0, 1.5, 2.0][seed % 3]
        space = MetricSpace(PointSet(rng.random((n, 3)), p))
        matrix = space.matrix()
        complete = nx.Graph()
        for i in range(n):
            for j in range(i + 1, n):
                complete.add_edge(i, j, weight=matrix[i, j])
        tree = nx.minimum_spanning_tree(complete, algorithm='kruskal')
        summary = mst(space)
        assertEqual(len(summary.tree_edges), n - 1)
        assertAlmostEqual(summary.weight_L, tree.size(weight='weight'),
                          delta=1e-9 * summary.weight_L)

def test_graph_mst_matches_networkx():
    for seed in range(5):
        graph = generators.geometric_graph(40, 0.3,
                                           np.random.default_rng(seed))
        space = MetricSpace(graph)
        tree = nx.minimum_spanning_tree(networkx_graph(space))
        assertAlmostEqual(mst(space).weight_L, tree.size(weight='weight'),
                          places=9)

def test_mst_prefers_lexicographically_smaller_edges():
    space = MetricSpace(PointSet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                                  [1.0, 1.0]]))
    assertEqual(mst(space).tree_edges,
                ((0, 1, 1.0), (0, 2, 1.0), (1, 3, 1.0)))

def test_aspect_ratio():
    graph = WeightedGraph(3, [(0, 1, 2.0), (1, 2, 6.0)])
    assertEqual(aspect_ratio(graph), 3.0)
    assertEqual(aspect_ratio(normalize(MetricSpace(graph))), 3.0)
    assertRaises(ValueError, aspect_ratio, WeightedGraph(1, []))

def metric_corpus():
    """Point sets under several norms and connected geometric graphs."""
    corpus = []
    for seed, p in enumerate([1.0, 1.5, 2.0, 2.0]):
        corpus.append(gaussian_space(seed, 20, 3, p))
        rng = np.random.default_rng(seed)
        corpus.append(normalize(MetricSpace(generators.geometric_graph(
            25, 0.35, rng))))
    return corpus

def test_distance_is_symmetric_with_zero_only_on_the_diagonal():
    for space in metric_corpus():
        matrix = space.matrix()
        assertTrue((np.diag(matrix) == 0.0).all())
        off_diagonal = ~np.eye(space.n, dtype=bool)
        assertTrue((matrix[off_diagonal] > 0.0).all())
        assertTrue((np.abs(matrix - matrix.T) <= 1e-12 * matrix).all())
        for x, y in (0, 1), (4, 11), (space.n - 1, 2):
            assertEqual(space.distance(x, x), 0.0)
            assertAlmostEqual(space.distance(x, y), space.distance(y, x),
                              delta=1e-12 * space.distance(x, y))

def test_distance_obeys_the_triangle_inequality():
    for space in metric_corpus():
        matrix = space.matrix()
        detour = (matrix[:, :, None] + matrix[None, :, :]).min(axis=1)
        assertTrue((matrix <= detour * (1.0 + 1e-9)).all())

# ------------------------------------------------------------------------
#                               File formats
#

def test_points_file_round_trip():
    points = PointSet(np.random.default_rng(3).standard_normal((5, 3)), 1.5)
    out = StringIO()
    dump_instance(out, points)
    loaded = load_instance(StringIO(out.getvalue()))
    assertEqual(loaded.p, 1.5)
    assertEqual(loaded.points.tolist(), points.points.tolist())

def test_graph_file_with_comments():
    text = '# a triangle\ngraph 3\n\n0 1 1.5\n1 2 2\n# done\n0 2 3.0\n'
    graph = load_instance(StringIO(text))
    assertEqual(graph.n, 3)
    assertEqual(graph.edges, ((0, 1, 1.5), (1, 2, 2.0), (0, 2, 3.0)))

def test_format_errors_show_the_line():
    with assertRaisesRegex(ValueError, 'Line 3 does not'):
        load_instance(StringIO('p 2 d 2\n0 0\n1\n'))
    with assertRaisesRegex(ValueError, 'Line 2 does not'):
        load_instance(StringIO('p 2 d 1\nnan\n'))
    with assertRaisesRegex(ValueError, 'Instance header'):
        load_instance(StringIO('points 4\n'))
    with assertRaisesRegex(ValueError, 'Line 2 does not'):
        load_instance(StringIO('graph 2\n0 1\n'))
    assertRaises(ValueError, load_instance, StringIO(''))

def test_spanner_edges_file():
    out = StringIO()
    dump_edges(out, [(0, 1, 1.0), (1, 2, 0.1)])
    assertEqual(out.getvalue(), '0 1 1.0\n1 2 0.1\n')
    assertEqual(load_spanner_edges(StringIO(out.getvalue())),
                [(0, 1, 1.0), (1, 2, 0.1)])

# ------------------------------------------------------------------------
#                                  Nets
#

def test_nets_pack_and_cover():
    for seed in range(30):
        rng = np.random.default_rng(seed)
        space = gaussian_space(seed, int(rng.integers(5, 50)), 2)
        r = float(rng.uniform(1.0, 4.0))
        net = build_net(space, r)
        members = list(net.members)
        inner = space.matrix(members)
        np.fill_diagonal(inner, np.inf)
        assertTrue((inner > r).all())
        assertTrue((space.cross(members, np.arange(space.n)) <= r)
                   .any(axis=0).all())
        assertTrue(check_net_size_bound(net, mst(space).weight_L))

def test_nets_pack_cover_and_stay_small_on_every_metric():
    for k, space in enumerate(metric_corpus()):
        L = mst(space).weight_L
        for r in 1.0, 2.5, L / 3.0:
            net = build_net(space, r)
            members = list(net.members)
            inner = space.matrix(members)
            np.fill_diagonal(inner, np.inf)
            assertTrue((inner > r).all())
            assertTrue((space.cross(members, np.arange(space.n)) <= r)
                       .any(axis=0).all())
            assertLessEqual(len(members), 2.0 * L / r)
            assertTrue(check_net_size_bound(net, L))

def test_hierarchy_nests():
    for seed in range(10):
        space = gaussian_space(seed, 40, 3)
        hierarchy = build_hierarchy(space, [0.5, 1.0, 2.0, 4.0, 8.0])
        assertEqual(hierarchy.levels[0].members, tuple(range(40)))
        for finer, coarser in zip(hierarchy.levels, hierarchy.levels[1:]):
            assertTrue(set(coarser.members) <= set(finer.members))
        for x in range(40):
            level = net_level(hierarchy, x)
            assertTrue(x in hierarchy.levels[level].members)
            if level + 1 < len(hierarchy):
                assertFalse(x in hierarchy.levels[level + 1].members)

def test_net_seeds_must_pack():
    space = line_space(0.0, 1.0, 5.0)
    assertRaises(ValueError, build_net, space, 2.0, [0, 1])
    assertEqual(build_net(space, 2.0, [1]).members, (1, 2))
    assertRaises(ValueError, build_net, space, 2.0, [0], domain=[1, 2])

def test_net_arguments():
    space = line_space(0.0, 1.0)
    assertRaises(ValueError, build_net, space, 0.0)
    assertRaises(ValueError, build_hierarchy, space, [2.0, 1.0])
    assertRaises(ValueError, build_hierarchy, space, [])

# ------------------------------------------------------------------------
#                               Partitions
#

def test_partition_canonical_labels():
    partition = Partition([5, 3, 9], [7, 7, 2])
    assertEqual(partition.domain.tolist(), [3, 5, 9])
    assertEqual(partition.labels.tolist(), [0, 0, 1])
    assertEqual([c.tolist() for c in partition.clusters], [[3, 5], [9]])
    assertEqual(partition.cluster_of(9), 1)
    assertEqual(partition, Partition([3, 5, 9], [4, 4, 0]))
    assertRaises(ValueError, partition.cluster_of, 4)
    assertRaises(ValueError, Partition, [0, 1], [0])

def test_partition_json():
    partition = Partition([0, 1, 2], [1, 0, 1])
    assertEqual(json.loads(partition_to_json(partition)),
                {'domain': [0, 1, 2], 'clusters': [0, 1, 0]})

def test_all_singletons_are_bounded():
    space = gaussian_space(0, 10, 2)
    assertTrue(check_bounded(singletons(range(10)), space, 0.0))

def test_weak_and_strong_boundedness_differ():
    space = MetricSpace(generators.path_graph(3))
    partition = Partition([0, 1, 2], [0, 1, 0])
    assertTrue(check_bounded(partition, space, 2.0))
    assertFalse(check_bounded(partition, space, 1.5))
    assertFalse(check_strongly_bounded(partition, space, 100.0))
    assertTrue(check_strongly_bounded(Partition([0, 1, 2], [0, 0, 0]),
                                      space, 2.0))

def _max_cluster_distance(partition, space):
    worst = 0.0
    for members in partition.clusters:
        for i in members:
            for j in members:
                worst = max(worst, space.distance(i, j))
    return worst

def test_every_scheme_is_bounded():
    rng = np.random.default_rng(5)
    space = gaussian_space(1, 40, 3)
    schemes = [BallCarving(2), BallCarving(3), RandomShift(2),
               RandomShift(4), PStableLsh(3, 3, rng)]
    domain = np.arange(space.n)
    for scheme in schemes:
        for delta in 1.0, 2.5:
            for j in range(10):
                partition = sample_partition(scheme, space, domain, delta,
                                             rng)
                bound = scheme.t * delta
                assertTrue(check_bounded(partition, space, bound))
                assertTrue(within(_max_cluster_distance(partition, space),
                                  bound))

def test_single_point_domain():
    rng = np.random.default_rng(0)
    space = gaussian_space(0, 5, 2)
    for scheme in BallCarving(2), RandomShift(2), PStableLsh(2, 2, rng):
        partition = sample_partition(scheme, space, [3], 1.0, rng)
        assertEqual(len(partition), 1)
        assertEqual(partition.domain.tolist(), [3])

def test_far_pair_is_never_together():
    rng = np.random.default_rng(1)
    space = line_space(0.0, 10.0)
    for scheme in BallCarving(2), RandomShift(2), PStableLsh(2, 1, rng):
        for j in range(20):
            assertEqual(len(sample_partition(scheme, space, [0, 1], 1.0,
                                             rng)), 2)

def test_sample_partition_arguments():
    space = line_space(0.0, 1.0)
    rng = np.random.default_rng(0)
    assertRaises(ValueError, sample_partition, RandomShift(2), space, [0, 1],
                 0.0, rng)
    assertRaises(ValueError, sample_partition, RandomShift(2), space, [],
                 1.0, rng)
    assertRaises(ValueError, RandomShift, 1.5)
    assertRaises(ValueError, BallCarving, 1)

def test_same_seed_same_partition():
    space = gaussian_space(2, 30, 2)
    for scheme in BallCarving(3), RandomShift(3):
        a = sample_partition(scheme, space, range(30), 2.0,
                             np.random.default_rng(9))
        b = sample_partition(scheme, space, range(30), 2.0,
                             np.random.default_rng(9))
        assertEqual(a, b)

def test_ball_carving_needs_euclidean_points():
    rng = np.random.default_rng(0)
    manhattan = MetricSpace(PointSet([[0.0], [1.0]], p=1))
    assertRaises(ValueError, sample_partition, BallCarving(2), manhattan,
                 [0, 1], 1.0, rng)
    graph = MetricSpace(generators.path_graph(3))
    assertRaises(ValueError, sample_partition, BallCarving(2), graph,
                 [0, 1, 2], 1.0, rng)

# ------------------------------------------------------------------------
#                      Strong graph decompositions
#

def test_strong_decomposition_is_connected_and_bounded():
    for seed in range(3):
        rng = np.random.default_rng(seed)
        space = normalize(MetricSpace(generators.geometric_graph(60, 0.25,
                                                                 rng)))
        graph = networkx_graph(space)
        for delta in 1.0, 5.0, 20.0:
            for j in range(10):
                partition = sample_partition(StrongGraph(2), space,
                                             range(60), delta, rng)
                assertTrue(check_strongly_bounded(partition, space,
                                                  2 * delta))
                assertTrue(check_bounded(partition, space, 2 * delta))
                for members in partition.clusters:
                    assertTrue(nx.is_connected(graph.subgraph(
                        members.tolist())))

def test_strong_decomposition_single_vertex():
    space = MetricSpace(WeightedGraph(1, []))
    partition = sample_partition(StrongGraph(2), space, [0], 1.0,
                                 np.random.default_rng(0))
    assertEqual(len(partition), 1)

def test_strong_decomposition_needs_every_vertex():
    space = MetricSpace(generators.path_graph(3))
    assertRaises(ValueError, sample_partition, StrongGraph(2), space, [0, 1],
                 1.0, np.random.default_rng(0))
    points = line_space(0.0, 1.0)
    assertRaises(ValueError, sample_partition, StrongGraph(2), points,
                 [0, 1], 1.0, np.random.default_rng(0))

# ------------------------------------------------------------------------
#                             Covering batches
#

def test_covering_count_examples():
    assertEqual(covering_count(100, 0.5), 19)
    assertEqual(covering_count(100, 100 ** -0.5), 93)
    assertEqual(covering_count(50, 1.0), 8)

def test_covering_batches_cover():
    for seed in range(10):
        space = gaussian_space(seed, 30, 2)
        rng = np.random.default_rng(seed)
        for delta in 1.5, 3.0:
            batch = covering_partitions(RandomShift(3), space, range(30),
                                        delta, rng, delta_used=0.5)
            assertEqual(batch.phi, covering_count(30, 0.5))
            assertEqual(len(batch.partitions),
                        batch.phi * (batch.resample_rounds + 1))
            assertEqual(batch.sampled, len(batch.partitions))
            for i in range(30):
                for j in range(i + 1, 30):
                    if space.distance(i, j) <= delta:
                        assertTrue(any(p.cluster_of(i) == p.cluster_of(j)
                                       for p in batch.partitions))
            assertTrue(is_covering(batch, space, np.arange(30), delta))

def test_covering_with_no_close_pairs():
    space = line_space(0.0, 10.0)
    batch = covering_partitions(RandomShift(2), space, [0, 1], 1.0,
                                np.random.default_rng(0), delta_used=1.0)
    assertEqual(batch.phi, 2)
    assertEqual(batch.resample_rounds, 0)

def test_covering_with_one_cluster_scheme():
    space = line_space(0.0, 1.0, 2.0)
    batch = covering_partitions(OneCluster(), space, [0, 1, 2], 2.0,
                                np.random.default_rng(0))
    assertEqual(batch.delta_used, 1.0)
    assertEqual(batch.phi, int(ceil(2 * log(3))))
    assertEqual(batch.resample_rounds, 0)

def test_covering_gives_up_at_the_round_cap():
    space = line_space(0.0, 1.0, 2.0)
    with assertRaisesRegex(CapExceeded, r'2 of 2 close pairs \(100.0%\)'):
        covering_partitions(Singletons(), space, [0, 1, 2], 1.0,
                            np.random.default_rng(0), delta_used=1.0,
                            round_cap=2)

def test_covering_needs_two_points():
    space = line_space(0.0, 1.0)
    assertRaises(ValueError, covering_partitions, RandomShift(2), space, [0],
                 1.0, np.random.default_rng(0))

def test_pooled_sampling_matches_serial_sampling():
    space = gaussian_space(14, 40, 3)
    domain = np.arange(40)
    keys = [(0, j) for j in range(9)]
    for scheme in RandomShift(2), BallCarving(3):
        serial = sample_partitions(scheme, space, domain, 2.0, 77, keys)
        with partition_pool(2) as pool:
            pooled = sample_partitions(scheme, space, domain, 2.0, 77, keys,
                                       pool)
        assertEqual(pooled, serial)
    with partition_pool(1) as pool:
        assertEqual(pool, None)
    with assertRaises(ValueError):
        with partition_pool(0):
            pass

def test_pilot_estimates():
    space = line_space(0.0, 1.0, 2.0)
    rng = np.random.default_rng(0)
    assertEqual(estimate_delta(Singletons(), line_space(0.0, 10.0), [0, 1],
                               1.0, rng), 1.0)
    assertEqual(estimate_delta(Singletons(), space, [0, 1, 2], 1.0, rng),
                1.0 / 3)
    assertEqual(estimate_delta(OneCluster(), space, [0, 1, 2], 1.0, rng),
                1.0)

def test_empirical_cluster_probability():
    rng = np.random.default_rng(4)
    space = line_space(0.0, 0.5, 10.0)
    estimate, stderr = empirical_cluster_probability(OneCluster(), space,
                                                     (0, 1), 1.0, 30, rng)
    assertEqual((estimate, stderr), (1.0, 0.0))
    estimate, stderr = empirical_cluster_probability(RandomShift(2), space,
                                                     (0, 2), 1.0, 50, rng)
    assertEqual(estimate, 0.0)
    assertRaises(ValueError, empirical_cluster_probability, OneCluster(),
                 space, (0, 1), 1.0, 29, rng)

def test_random_shift_keeps_a_tight_pair_together():
    space = line_space(0.0, 0.1)
    estimate, stderr = empirical_cluster_probability(
        RandomShift(8), space, (0, 1), 1.0, 500, np.random.default_rng(2))
    assertGreater(estimate, 0.0)

def test_random_shift_at_t_two_joins_a_pair_at_full_scale():
    # Either endpoint goes first; the pair is together exactly when that
    # center takes the full radius.
    space = line_space(0.0, 1.0)
    estimate, stderr = empirical_cluster_probability(
        RandomShift(2), space, (0, 1), 1.0, 2000, np.random.default_rng(6))
    assertLessEqual(abs(estimate - 0.5), 5 * stderr)

# ------------------------------------------------------------------------
#                              Ball carving
#

def test_cap_ratio_edge_cases():
    rng = np.random.default_rng(0)
    assertEqual(cap_ratio_mc(3, 0.0, 1.0, 1000, rng), 1.0)
    assertEqual(cap_ratio_mc(3, 2.0, 1.0, 1000, rng), 0.0)
    assertEqual(cap_ratio_mc(3, 2.5, 1.0, 1000, rng), 0.0)
    assertRaises(ValueError, cap_ratio_mc, 3, 1.0, 1.0, 999, rng)
    assertRaises(ValueError, cap_ratio_mc, 3, -1.0, 1.0, 1000, rng)

def test_cap_ratio_matches_circle_lens():
    exact = (2 * pi / 3 - sqrt(3) / 2) / pi
    estimate = cap_ratio_mc(2, 1.0, 1.0, 10**5, np.random.default_rng(8))
    sigma = sqrt(exact * (1 - exact) / 10**5)
    assertAlmostEqual(exact, 0.3910, places=4)
    assertLessEqual(abs(estimate - exact), 4 * sigma)

def test_ball_carving_meets_its_cap_bound():
    rng = np.random.default_rng(12)
    space = MetricSpace(PointSet([[0.0, 0.0, 0.0, 0.0],
                                  [1.0, 0.0, 0.0, 0.0]]))
    reference = cap_ratio_mc(4, 1.0, 2.0, 10**5, rng) / 2.0
    estimate, stderr = empirical_cluster_probability(
        BallCarving(4), space, (0, 1), 1.0, 2000, rng)
    assertTrue(estimate >= reference - 3 * stderr)

# ------------------------------------------------------------------------
#                       Locality-sensitive hashing
#

def coin_base(q):
    """A base hash under which any two points collide with probability q."""
    def base(rng, count):
        heads = rng.random(count) < q
        def codes(points):
            return np.array([np.zeros(count, dtype='int64'),
                             np.where(heads, 0, 1)])
        return codes
    return base

def constant_base(rng, count):
    """A base hash that puts every point in the same bucket."""
    return lambda points: np.zeros((len(points), count), dtype='int64')

def test_amplification_examples():
    assertEqual(amplification_length(0.5, 16), 8)
    assertEqual(amplification_length(0.25, 16), 4)
    family = lsh_amplify(LshFamily('coin', 1, 2, 0.5, 0.25, 1,
                                   coin_base(0.5)), 16)
    assertEqual(family.k, 4)
    assertEqual(family.far_bound, 16 ** -2.0)
    assertEqual(family.near_bound, 0.5 ** 4)

def test_amplification_is_minimal():
    for p2 in np.linspace(0.02, 0.98, 10).tolist():
        for n in 2, 3, 10, 100, 1000:
            k = amplification_length(p2, n)
            assertTrue(p2 ** k <= n ** -2.0)
            assertTrue(k == 1 or p2 ** (k - 1) > n ** -2.0)

def test_amplification_arguments():
    assertRaises(ValueError, amplification_length, 1.0, 16)
    assertRaises(ValueError, amplification_length, 0.5, 1)
    assertEqual(amplification_length(0.0, 16), 1)

def test_family_probabilities():
    family = LshFamily('coin', 1, 2, 0.8, 0.4, 1, coin_base(0.8))
    assertAlmostEqual(family.rho, log(1 / 0.8) / log(1 / 0.4), places=12)
    same = lsh_amplify(LshFamily('coin', 1, 2, 0.3, 0.3, 1, coin_base(0.3)),
                       10)
    assertEqual(same.near_bound, same.far_bound)
    assertRaises(ValueError, LshFamily, 'bad', 1, 2, 0.3, 0.4, 1, None)
    assertRaises(ValueError, LshFamily, 'bad', 1, 2, 0.5, 0.4, 0, None)

def test_concatenation_multiplies_collision_probability():
    rng = np.random.default_rng(21)
    for q in 0.3, 0.5, 0.9:
        family = lsh_amplify(LshFamily('coin', 1, 2, q, q, 1, coin_base(q)),
                             4)
        expected = q ** family.k
        rate = empirical_collision_rate(family, [0.0], [0.0], 10**4, rng)
        sigma = sqrt(expected * (1 - expected) / 10**4)
        assertLessEqual(abs(rate - expected), 4 * sigma)

def test_pstable_identical_points_always_collide():
    rng = np.random.default_rng(0)
    family = pstable_hash_family(2, 2.0, 1, rng)
    assertEqual(empirical_collision_rate(family, [0.3], [0.3], 500, rng), 1.0)
    assertGreater(family.p1, 0.9 * family.p2)

def test_pstable_far_points_rarely_collide():
    rng = np.random.default_rng(1)
    family = pstable_hash_family(2, 1.0, 1, rng)
    assertTrue(empirical_collision_rate(family, [0.0], [1000.0], 10**4, rng)
               < 0.05)

def test_pstable_collisions_fall_with_distance():
    rng = np.random.default_rng(2)
    family = pstable_hash_family(2, 2.0, 2, rng)
    rates = [empirical_collision_rate(family, [0.0, 0.0], [u, 0.0], 10**4,
                                      rng)
             for u in (0.5, 1.0, 2.0, 4.0, 8.0)]
    for nearer, farther in zip(rates, rates[1:]):
        sigma = sqrt((nearer * (1 - nearer) + farther * (1 - farther))
                     / 10**4)
        assertLessEqual(farther, nearer + 2 * sigma)

def test_pstable_calibration_keeps_p1_above_p2():
    for p in 1.0, 1.3, 1.5, 2.0:
        rng = np.random.default_rng(int(p * 10))
        family = pstable_hash_family(p, 3.0, 4, rng, t=3.0)
        assertTrue(family.p1 >= family.p2)
        assertEqual(family.cr, 3.0)
        assertTrue(np.isfinite(stable_sample(rng, p, 100)).all())

def test_pstable_arguments():
    rng = np.random.default_rng(0)
    assertRaises(ValueError, pstable_hash_family, 2.5, 1.0, 2, rng)
    assertRaises(ValueError, pstable_hash_family, 0.5, 1.0, 2, rng)
    assertRaises(ValueError, pstable_hash_family, 2, 0.0, 2, rng)

def test_lsh_partition_evicts_far_bucket_mates():
    constant = LshFamily('constant', 1, 2, 1.0, 1.0, 1, constant_base)
    rng = np.random.default_rng(0)
    space = line_space(0.0, 1.0, 10.0)
    partition = lsh_to_partition(constant, space, [0, 1, 2], 1.0, 2.0, rng)
    assertEqual(len(partition), 3)
    partition = lsh_to_partition(constant, space, [0, 1], 1.0, 2.0, rng)
    assertEqual(len(partition), 1)

def test_lsh_scheme_needs_matching_points():
    rng = np.random.default_rng(0)
    scheme = PStableLsh(2, 1, rng)
    assertRaises(ValueError, sample_partition, scheme,
                 MetricSpace(generators.path_graph(3)), [0, 1, 2], 1.0, rng)
    assertRaises(ValueError, sample_partition, scheme,
                 MetricSpace(PointSet([[0.0], [1.0]], p=1)), [0, 1], 1.0, rng)
    assertTrue(0.0 < scheme.params(100).delta_hint <= 1.0)

# ------------------------------------------------------------------------
#                                 Spanners
#

def test_scale_ladder():
    ladder = scale_ladder(0.1, 1.21)
    assertEqual(ladder.top_index, 2)
    assertEqual(len(ladder.scales), 3)
    for a, b in zip(ladder.scales, [1.0, 1.1, 1.21]):
        assertAlmostEqual(a, b, places=12)
    assertEqual(scale_ladder(0.1, 1.0).scales, (1.0,))
    ladder = scale_ladder(0.05, 300.0)
    assertTrue(ladder.scales[-1] >= 300.0 > ladder.scales[-2])
    for a, b in zip(ladder.scales, ladder.scales[1:]):
        assertAlmostEqual(b / a, 1.05, places=12)
    assertRaises(ValueError, scale_ladder, 0.125, 2.0)
    assertRaises(ValueError, scale_ladder, 0.0, 2.0)
    assertRaises(ValueError, scale_ladder, 0.1, 0.5)

def test_effective_stretch():
    assertAlmostEqual(effective_stretch(0.1, 3), 7.2 / (1 / 1.1 - 0.2))
    assertAlmostEqual(effective_stretch(0.1, 3), 10.154, places=3)
    assertAlmostEqual(effective_stretch(0.1, 1), 3.385, places=3)
    assertAlmostEqual(effective_stretch(1e-12, 3), 6.0, places=9)
    assertTrue(effective_stretch(0.01, 2) > 4.0)
    assertRaises(ValueError, effective_stretch, 0.2, 3)

def test_eps_for_stretch():
    eps = eps_for_stretch(3, 0.5)
    assertTrue(0.0 < eps < 0.125)
    assertLessEqual(effective_stretch(eps, 3), 7.5)
    assertGreater(effective_stretch(eps + 1e-9, 3), 7.5)
    assertRaises(ValueError, eps_for_stretch, 3, 0.0)

def test_center_prefers_high_net_level_then_small_index():
    top_levels = np.array([0, 0, 3, 1, 0, 3, 0, 3])
    assertEqual(_center(np.array([1, 3, 4]), top_levels), 3)
    assertEqual(_center(np.array([2, 5, 7]), top_levels), 2)
    assertEqual(_center(np.array([0, 5, 6, 7]), top_levels), 5)

def test_single_point_spanner():
    space = normalize(MetricSpace(PointSet([[1.0, 2.0]])))
    spanner = build_spanner(space, RandomShift(2), 2, 0.1,
                            np.random.default_rng(0))
    assertEqual(spanner.edges, ())

def test_two_point_spanner():
    space = normalize(MetricSpace(PointSet([[0.0], [4.0]])))
    for scheme in RandomShift(2), BallCarving(2):
        spanner = build_spanner(space, scheme, 2, 0.1,
                                np.random.default_rng(0))
        assertEqual(spanner.edges, ((0, 1, 1.0),))
        assertEqual(verify_stretch(space, spanner, 1.0).max_stretch, 1.0)
        assertEqual(spanner.unscaled(space).edges, ((0, 1, 4.0),))

def check_spanner(space, spanner, t, eps):
    """Assert the properties every point-mode spanner must have."""
    seen = set()
    for u, v, w in spanner.edges:
        assertTrue(u < v)
        assertFalse((u, v) in seen)
        seen.add((u, v))
        assertAlmostEqual(w, space.distance(u, v),
                          delta=1e-9 * space.distance(u, v))
    for record in spanner.build_log:
        assertLessEqual(record.edges_added, record.n_i * record.partitions)
    assertEqual(sum(r.edges_added for r in spanner.build_log),
                len(spanner.edges))
    result = verify_stretch(space, spanner, effective_stretch(eps, t))
    assertTrue(result.passed)
    assertTrue(result.max_stretch >= 1.0 - 1e-12)

def test_spanner_stretch_for_each_scheme():
    rng = np.random.default_rng(30)
    space = gaussian_space(4, 32, 3)
    lp_space = gaussian_space(5, 24, 3, p=1.5)
    cases = [
        (space, BallCarving(2), 2),
        (space, BallCarving(3), 3),
        (space, RandomShift(3), 3),
        (space, PStableLsh(3, 3, rng), 3),
        (lp_space, PStableLsh(2, 3, rng, p=1.5), 2),
        (lp_space, RandomShift(3), 3),
    ]
    for instance, scheme, t in cases:
        spanner = build_spanner(instance, scheme, t, 0.1, rng)
        check_spanner(instance, spanner, t, 0.1)

def test_ball_carving_spanner_on_a_cube():
    rng = np.random.default_rng(7)
    space = normalize(MetricSpace(PointSet(rng.random((64, 4)))))
    spanner = build_spanner(space, BallCarving(3), 3, 0.1, rng)
    check_spanner(space, spanner, 3, 0.1)

def test_spanner_is_deterministic():
    space = gaussian_space(6, 25, 2)
    a = build_spanner(space, RandomShift(3), 3, 0.1, derive_rng(3, 'build'))
    b = build_spanner(space, RandomShift(3), 3, 0.1, derive_rng(3, 'build'))
    assertEqual(a.edges, b.edges)
    assertEqual(a.build_log, b.build_log)

def test_spanner_arguments():
    space = gaussian_space(0, 10, 2)
    rng = np.random.default_rng(0)
    assertRaises(ValueError, build_spanner, space, RandomShift(2), 3, 0.1,
                 rng)
    assertRaises(ValueError, build_spanner, space, RandomShift(2), 2, 0.2,
                 rng)
    assertRaises(ValueError, build_spanner_subset_decomposable, space,
                 lambda n: RandomShift(2), 2, 0.1, 1.0, rng)

def test_subset_decomposable_partition_counts():
    rng = np.random.default_rng(8)
    space = gaussian_space(8, 30, 2)
    spanner = build_spanner_subset_decomposable(
        space, lambda n_i: RandomShift(2), 2, 0.1, 0.5, rng)
    for record in spanner.build_log:
        if record.n_i >= 2:
            assertEqual(record.phi_i,
                        covering_count(record.n_i, record.n_i ** -0.5))
            assertLessEqual(abs(record.phi_i - 2 * sqrt(record.n_i)
                                * log(record.n_i)), 1.0)
    check_spanner(space, spanner, 2, 0.1)

def test_lightness_split_adds_up():
    space = gaussian_space(9, 20, 2)
    spanner = build_spanner(space, RandomShift(3), 3, 0.1,
                            np.random.default_rng(1))
    L = mst(space).weight_L
    heavy, light = lightness_split(spanner, L)
    assertAlmostEqual(heavy + light, spanner.weight, places=9)

def test_random_shift_spanner_at_t_two():
    for seed in 7, 8:
        space = gaussian_space(seed, 64, 4)
        spanner = build_spanner(space, RandomShift(2), 2, 0.1,
                                derive_rng(seed, 'build'))
        check_spanner(space, spanner, 2, 0.1)

def test_build_log_records_the_delta_each_scale_used():
    space = gaussian_space(15, 30, 2)
    spanner = build_spanner_subset_decomposable(
        space, lambda n_i: RandomShift(3), 3, 0.1, 0.5,
        np.random.default_rng(15))
    sampled = [r for r in spanner.build_log if r.n_i >= 2]
    assertTrue(sampled)
    for record in spanner.build_log:
        if record.n_i >= 2:
            assertEqual(record.delta_used, record.n_i ** -0.5)
            assertEqual(record.partitions,
                        record.phi_i * (record.resample_rounds + 1))
        else:
            assertEqual(record.delta_used, None)
    assertEqual(logged_delta(spanner.build_log),
                min(r.delta_used for r in sampled))

def test_spanner_is_the_same_with_worker_processes():
    space = gaussian_space(6, 25, 2)
    serial = build_spanner(space, RandomShift(3), 3, 0.1,
                           derive_rng(3, 'build'))
    pooled = build_spanner(space, RandomShift(3), 3, 0.1,
                           derive_rng(3, 'build'), workers=2)
    assertEqual(pooled.edges, serial.edges)
    assertEqual(pooled.build_log, serial.build_log)
    graph = normalize(MetricSpace(generators.grid(4)))
    serial = build_graph_spanner(graph, StrongGraph(2), 2, 0.1,
                                 np.random.default_rng(4))
    pooled = build_graph_spanner(graph, StrongGraph(2), 2, 0.1,
                                 np.random.default_rng(4), workers=2)
    assertEqual(pooled.edges, serial.edges)

def test_spanner_keeps_its_nets_and_partitions():
    space = gaussian_space(16, 20, 2)
    spanner = build_spanner(space, RandomShift(3), 3, 0.1,
                            np.random.default_rng(16), keep_partitions=True)
    levels = spanner.hierarchy.levels
    assertEqual(len(levels), len(spanner.build_log))
    assertEqual(levels[0].members, tuple(range(20)))
    kept = dict(spanner.scale_partitions)
    for record in spanner.build_log:
        if record.n_i >= 2:
            assertEqual(len(kept[record.i]), record.partitions)
            for partition in kept[record.i]:
                assertEqual(partition.domain.tolist(),
                            list(levels[record.i].members))
        else:
            assertFalse(record.i in kept)
    plain = build_spanner(space, RandomShift(3), 3, 0.1,
                          np.random.default_rng(16))
    assertEqual(plain.scale_partitions, ())
    assertEqual(plain.edges, spanner.edges)

def test_larger_t_gives_fewer_and_lighter_edges():
    space = gaussian_space(21, 32, 16)
    tree = mst(space)
    medians = []
    for t in 2, 3, 5, 8:
        edges = []
        weights = []
        for seed in 1, 2, 3, 4, 5:
            spanner = build(space, 'random-shift', t, 0.1, seed)
            assertTrue(verify_stretch(space, spanner,
                                      effective_stretch(0.1, t)).passed)
            edges.append(len(spanner.edges))
            weights.append(lightness(spanner, tree))
        medians.append((np.median(edges), np.median(weights)))
    for (edges, weight), (fewer, lighter) in zip(medians, medians[1:]):
        assertLessEqual(fewer, edges)
        assertTrue(within(lighter, weight))

# ------------------------------------------------------------------------
#                              Graph spanners
#

def test_path_graph_spanner_is_the_path():
    space = normalize(MetricSpace(generators.path_graph(6)))
    spanner = build_graph_spanner(space, StrongGraph(2), 2, 0.1,
                                  np.random.default_rng(0))
    assertEqual(sorted(spanner.edges),
                [(v, v + 1, 1.0) for v in range(5)])
    assertEqual(verify_stretch(space, spanner, 1.0).max_stretch, 1.0)

def test_graph_spanner_uses_graph_edges():
    for seed in range(2):
        rng = np.random.default_rng(seed)
        graph = generators.geometric_graph(40, 0.3, rng)
        space = normalize(MetricSpace(graph))
        spanner = build_graph_spanner(space, StrongGraph(3), 3, 0.1, rng)
        weights = graph.weight_of()
        for u, v, w in spanner.unscaled(space).edges:
            assertEqual(weights[u, v], w)
        for record in spanner.build_log:
            assertLessEqual(record.edges_added,
                            (space.n - 1) * record.partitions)
        assertTrue(verify_stretch(space, spanner,
                                  effective_stretch(0.1, 3)).passed)

def test_graph_partition_edges_form_forests():
    rng = np.random.default_rng(3)
    space = normalize(MetricSpace(generators.geometric_graph(50, 0.3, rng)))
    hierarchy = build_hierarchy(space, [2.0])
    members = hierarchy.levels[0].members
    weights = space.backing.weight_of()
    for delta in 2.0, 8.0:
        for j in range(10):
            partition = sample_partition(StrongGraph(2), space, range(50),
                                         delta, rng)
            forest = nx.Graph()
            for u, v, w in graph_partition_edges(space, partition, members,
                                                 hierarchy.top_levels):
                assertTrue((u, v) in weights)
                forest.add_edge(u, v)
            if forest.number_of_edges():
                assertTrue(nx.is_forest(forest))

def test_graph_spanner_needs_a_graph():
    space = gaussian_space(0, 5, 2)
    assertRaises(ValueError, build_graph_spanner, space, StrongGraph(2), 2,
                 0.1, np.random.default_rng(0))

# ------------------------------------------------------------------------
#                               Evaluation
#

def test_stretch_of_a_path_mst_is_one():
    space = line_space(0.0, 1.0, 3.0, 6.0)
    spanner = Spanner(4, mst(space).tree_edges)
    result = verify_stretch(space, spanner, 1.0)
    assertEqual(result.max_stretch, 1.0)
    assertTrue(result.passed)

def test_stretch_of_the_complete_graph_is_one():
    space = gaussian_space(3, 15, 2)
    matrix = space.matrix()
    edges = [(i, j, matrix[i, j]) for i in range(15)
             for j in range(i + 1, 15)]
    assertEqual(verify_stretch(space, Spanner(15, edges), 1.0).max_stretch,
                1.0)

def test_star_on_a_unit_square():
    space = MetricSpace(PointSet([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0],
                                  [1.0, 1.0]]))
    edges = [(0, v, space.distance(0, v)) for v in (1, 2, 3)]
    result = verify_stretch(space, Spanner(4, edges), 3.0)
    graph = nx.Graph()
    graph.add_weighted_edges_from(edges)
    lengths = dict(nx.all_pairs_dijkstra_path_length(graph))
    oracle = max(lengths[i][j] / space.distance(i, j)
                 for i in range(4) for j in range(i + 1, 4))
    assertAlmostEqual(result.max_stretch, oracle, places=12)
    assertAlmostEqual(result.max_stretch, 1 + sqrt(2), places=12)
    assertEqual(result.worst_pair, (1, 3))
    assertFalse(verify_stretch(space, Spanner(4, edges), 2.0).passed)

def test_disconnected_spanner_fails():
    space = line_space(0.0, 1.0, 2.0)
    result = verify_stretch(space, Spanner(3, [(0, 1, 1.0)]), 100.0)
    assertEqual(result.max_stretch, float('inf'))
    assertEqual(result.worst_pair, (0, 2))
    assertFalse(result.passed)

def test_stretch_arguments():
    space = line_space(0.0, 1.0)
    assertRaises(ValueError, verify_stretch, space, Spanner(3, ()), 1.0)
    assertRaises(ValueError, verify_stretch, line_space(0.0), Spanner(1, ()),
                 1.0)

def test_spanner_never_undercuts_the_metric():
    space = gaussian_space(10, 25, 3)
    spanner = build_spanner(space, BallCarving(2), 2, 0.1,
                            np.random.default_rng(10))
    spanned = spanner_distances(spanner)
    assertTrue((spanned >= space.matrix() - 1e-9).all())

def test_lightness_and_sparsity():
    space = gaussian_space(11, 20, 2)
    tree = mst(space)
    as_spanner = Spanner(20, tree.tree_edges)
    assertEqual(lightness(as_spanner, tree), 1.0)
    assertEqual(sparsity(as_spanner), 19)
    assertEqual(sparsity(Spanner(20, ())), 0)
    w = space.distance(0, 1)
    shortcut = Spanner(20, tree.tree_edges + ((0, 1, w),))
    assertAlmostEqual(lightness(shortcut, tree), 1 + w / tree.weight_L,
                      places=12)
    single = line_space(0.0)
    assertEqual(lightness(Spanner(1, ()), mst(single)), 1.0)

def test_lightness_matches_independent_sum():
    space = gaussian_space(12, 20, 2)
    spanner = build_spanner(space, RandomShift(3), 3, 0.1,
                            np.random.default_rng(12))
    total = 0.0
    for u, v, w in spanner.edges:
        total += w
    expected = total / mst(space).weight_L
    assertAlmostEqual(lightness(spanner, mst(space)), expected,
                      delta=1e-12 * expected)

def test_nu():
    assertEqual(nu(0.5, 3), 8.0)
    assertEqual(nu(1.0, 5), 1.0)

def test_report_fields_and_round_trip():
    space = gaussian_space(13, 16, 2)
    spanner = build_spanner(space, RandomShift(3), 3, 0.1,
                            np.random.default_rng(13))
    report = evaluate(space, spanner, 3, 0.1, delta=0.5)
    assertEqual(report.alpha, effective_stretch(0.1, 3))
    assertTrue(report.passed)
    assertLessEqual(report.max_stretch_measured, report.alpha)
    assertTrue(report.lightness >= 1.0)
    assertEqual(report.nu, 8.0)
    assertEqual(report.edge_count, len(spanner.edges))
    assertEqual(report_from_json(report_to_json(report)), report)
    rows = report_to_csv(report).splitlines()
    assertEqual(len(rows), 2)
    assertEqual(rows[0].split(',')[0], 'n')
    assertEqual(len(rows[0].split(',')), len(rows[1].split(',')))

def test_report_without_numeric_delta():
    space = line_space(0.0, 1.0)
    spanner = Spanner(2, [(0, 1, 1.0)])
    stretch = verify_stretch(space, spanner, 2.0)
    report = assemble_report(space, spanner, 2, 0.1, stretch, mst(space),
                             ADAPTIVE)
    assertEqual(report.nu, None)
    assertEqual(report_from_json(report_to_json(report)), report)

def test_report_takes_nu_from_the_build_log():
    space = gaussian_space(17, 24, 2)
    spanner = build_spanner_subset_decomposable(
        space, lambda n_i: RandomShift(3), 3, 0.1, 0.5,
        np.random.default_rng(17))
    report = evaluate(space, spanner, 3, 0.1)
    assertEqual(report.nu, nu(logged_delta(spanner.build_log), 3))
    assertGreater(report.nu, 1.0)
    assertEqual(evaluate(space, spanner, 3, 0.1, delta=0.5).nu, 8.0)
    assertEqual(logged_delta(()), None)

def test_repeated_and_reversed_edges_count_once():
    space = line_space(0.0, 1.0, 3.0)
    spanner = Spanner(3, [(0, 1, 1.0), (1, 0, 1.0), (1, 2, 2.0)])
    assertEqual(spanner.edges, ((0, 1, 1.0), (1, 2, 2.0)))
    assertEqual(verify_stretch(space, spanner, 1.0).max_stretch, 1.0)
    assertEqual(sparsity(spanner), 2)
    assertEqual(lightness(spanner, mst(space)), 1.0)
    assertEqual(Spanner(3, [(2, 1, 2.0)]).edges, ((1, 2, 2.0),))

def test_conflicting_or_looping_edges_are_rejected():
    assertRaises(ValueError, Spanner, 3, [(0, 1, 1.0), (1, 0, 1.5)])
    assertRaises(ValueError, Spanner, 3, [(0, 1, 1.0), (0, 1, 1.5)])
    assertRaises(ValueError, Spanner, 3, [(2, 2, 1.0)])
    assertRaises(ValueError, Spanner, 3, [(0, 1, 1.0)], ())

def test_nets_json():
    space = line_space(0.0, 1.0, 5.0)
    hierarchy = build_hierarchy(space, [0.5, 2.0])
    levels = json.loads(nets_to_json(hierarchy))
    assertEqual(levels, [{'radius': 0.5, 'members': [0, 1, 2]},
                         {'radius': 2.0, 'members': [0, 2]}])

def test_partitions_json():
    first = Partition([0, 1, 2], [1, 0, 1])
    second = Partition([0, 2], [0, 0])
    scales = json.loads(partitions_to_json([(0, (first,)), (3, (second,))]))
    assertEqual(scales, [
        {'i': 0, 'partitions': [{'domain': [0, 1, 2],
                                 'clusters': [0, 1, 0]}]},
        {'i': 3, 'partitions': [{'domain': [0, 2], 'clusters': [0, 0]}]},
    ])

def test_malformed_build_log():
    assertRaises(ValueError, build_log_from_list, [{'i': 0}])

# ------------------------------------------------------------------------
#                               Generators
#

def test_generators():
    grid = generators.grid(5)
    assertEqual((grid.n, len(grid.edges)), (25, 40))
    assertEqual(generators.grid(1).n, 1)
    points = generators.gaussian(10, 3, 1.5, np.random.default_rng(0))
    assertEqual((points.n, points.d, points.p), (10, 3, 1.5))
    again = generators.gaussian(10, 3, 1.5, np.random.default_rng(0))
    assertEqual(points.points.tolist(), again.points.tolist())
    cube = generators.hypercube(10, 2, 2, np.random.default_rng(0))
    assertTrue(((cube.points >= 0) & (cube.points < 1)).all())
    graph = generators.geometric_graph(50, 0.05, np.random.default_rng(1))
    assertEqual(graph.n, 50)
    assertTrue(len(graph.edges) >= 49)

# ------------------------------------------------------------------------
#                              Command line
#

class _Workspace(object):
    def __enter__(self):
        self.path = tempfile.mkdtemp()
        return self

    def __exit__(self, *args):
        shutil.rmtree(self.path)

    def file(self, name, text=None):
        path = os.path.join(self.path, name)
        if text is not None:
            with open(path, 'w') as f:
                f.write(text)
        return path

    def read(self, name):
        with open(self.file(name)) as f:
            return f.read()

def test_cli_gen_is_deterministic():
    with _Workspace() as w:
        for name in 'a.txt', 'b.txt':
            assertEqual(main(['gen', 'gaussian', '64', '4', '2', '--seed',
                              '7', '--out', w.file(name)]), 0)
        text = w.read('a.txt')
        assertEqual(text, w.read('b.txt'))
        lines = text.splitlines()
        assertEqual(lines[0], 'p 2.0 d 4')
        assertEqual(len(lines), 65)
        assertEqual(main(['gen', 'grid', '5', '--out', w.file('g.txt')]), 0)
        lines = w.read('g.txt').splitlines()
        assertEqual((lines[0], len(lines)), ('graph 25', 41))

def test_cli_gen_rejects_bad_sizes():
    with _Workspace() as w:
        out = w.file('x.txt')
        assertEqual(main(['gen', 'gaussian', '4', '2', '--out', out]), 2)
        assertEqual(main(['gen', 'grid', '3', '4', '--out', out]), 2)
        assertEqual(main(['gen', 'sphere', '4', '--out', out]), 2)

def test_cli_build_and_eval():
    with _Workspace() as w:
        points = w.file('points.txt')
        main(['gen', 'gaussian', '24', '2', '2', '--seed', '3', '--out',
              points])
        for name in 'h1.txt', 'h2.txt':
            assertEqual(main(['build', points, '--scheme', 'random-shift',
                              '--t', '3', '--seed', '5', '--out',
                              w.file(name)]), 0)
        assertEqual(w.read('h1.txt'), w.read('h2.txt'))
        assertEqual(w.read('h1.txt.log.json'), w.read('h2.txt.log.json'))
        log_rows = json.loads(w.read('h1.txt.log.json'))
        assertEqual(sorted(log_rows[0]), sorted([
            'i', 'delta_i', 'n_i', 'phi_i', 'partitions', 'delta_used',
            'edges_added', 'weight_added', 'resample_rounds']))
        levels = json.loads(w.read('h1.txt.nets.json'))
        assertEqual(len(levels), len(log_rows))
        assertEqual(levels[0]['members'], list(range(24)))
        report = w.file('report.json')
        assertEqual(main(['eval', points, w.file('h1.txt'), '--t', '3',
                          '--out', report]), 0)
        fields = json.loads(w.read('report.json'))
        assertTrue(fields['passed'])
        assertEqual(fields['edge_count'],
                    len(w.read('h1.txt').splitlines()))
        used = [row['delta_used'] for row in log_rows
                if row['delta_used'] is not None]
        assertEqual(fields['nu'], min(used) ** -3.0)

def test_cli_two_point_build():
    with _Workspace() as w:
        points = w.file('two.txt', 'p 2 d 1\n0\n4\n')
        assertEqual(main(['build', points, '--out', w.file('h.txt')]), 0)
        assertEqual(w.read('h.txt'), '0 1 4.0\n')

def test_cli_graph_build_stays_in_the_graph():
    with _Workspace() as w:
        grid = w.file('grid.txt')
        main(['gen', 'grid', '4', '--out', grid])
        assertEqual(main(['build', grid, '--scheme', 'strong-graph', '--t',
                          '2', '--out', w.file('h.txt')]), 0)
        with open(grid) as f:
            weights = load_instance(f).weight_of()
        with open(w.file('h.txt')) as f:
            for u, v, weight in load_spanner_edges(f):
                assertEqual(weights[min(u, v), max(u, v)], weight)
        assertEqual(main(['eval', grid, w.file('h.txt'), '--t', '2',
                          '--out', w.file('r.json')]), 0)

def test_cli_eval_exit_codes():
    with _Workspace() as w:
        points = w.file('line.txt', 'p 2 d 1\n0\n1\n3\n')
        mst_file = w.file('mst.txt', '0 1 1.0\n1 2 2.0\n')
        assertEqual(main(['eval', points, mst_file, '--out',
                          w.file('r.json')]), 0)
        assertEqual(json.loads(w.read('r.json'))['lightness'], 1.0)
        assertEqual(main(['eval', points, mst_file, '--format', 'csv',
                          '--out', w.file('r.csv')]), 0)
        assertEqual(len(w.read('r.csv').splitlines()), 2)
        partial = w.file('partial.txt', '0 1 1.0\n')
        assertEqual(main(['eval', points, partial, '--out',
                          w.file('r2.json')]), 3)
        bad = w.file('bad.txt', '0 7 1.0\n')
        assertEqual(main(['eval', points, bad, '--out', w.file('r3.json')]),
                    2)

def test_cli_eval_counts_a_repeated_edge_once():
    with _Workspace() as w:
        points = w.file('line.txt', 'p 2 d 1\n0\n1\n3\n')
        doubled = w.file('doubled.txt', '0 1 1.0\n1 0 1.0\n1 2 2.0\n')
        assertEqual(main(['eval', points, doubled, '--t', '2', '--out',
                          w.file('r.json')]), 0)
        fields = json.loads(w.read('r.json'))
        assertEqual(fields['edge_count'], 2)
        assertEqual(fields['max_stretch_measured'], 1.0)
        assertEqual(fields['lightness'], 1.0)
        clash = w.file('clash.txt', '0 1 1.0\n1 0 1.5\n1 2 2.0\n')
        assertEqual(main(['eval', points, clash, '--out',
                          w.file('r2.json')]), 2)

def test_cli_default_build_on_gaussian_points():
    with _Workspace() as w:
        points = w.file('points.txt')
        main(['gen', 'gaussian', '64', '4', '2', '--seed', '7', '--out',
              points])
        assertEqual(main(['build', points, '--out', w.file('h.txt')]), 0)
        assertEqual(main(['eval', points, w.file('h.txt'), '--out',
                          w.file('r.json')]), 0)
        assertTrue(json.loads(w.read('r.json'))['passed'])

def test_cli_build_with_workers_and_partitions():
    with _Workspace() as w:
        points = w.file('points.txt')
        main(['gen', 'gaussian', '20', '2', '2', '--seed', '4', '--out',
              points])
        assertEqual(main(['build', points, '--t', '3', '--out',
                          w.file('serial.txt')]), 0)
        assertEqual(main(['build', points, '--t', '3', '--workers', '2',
                          '--partitions', '--out', w.file('pooled.txt')]), 0)
        assertEqual(w.read('serial.txt'), w.read('pooled.txt'))
        log_rows = json.loads(w.read('pooled.txt.log.json'))
        scales = json.loads(w.read('pooled.txt.partitions.json'))
        assertEqual([s['i'] for s in scales],
                    [row['i'] for row in log_rows if row['n_i'] >= 2])
        for row, scale in zip([r for r in log_rows if r['n_i'] >= 2],
                              scales):
            assertEqual(len(scale['partitions']), row['partitions'])
        assertFalse(os.path.exists(w.file('serial.txt.partitions.json')))
        assertEqual(main(['build', points, '--workers', '0', '--out',
                          w.file('x.txt')]), 2)

def test_cli_invalid_input():
    with _Workspace() as w:
        grid = w.file('grid.txt')
        main(['gen', 'grid', '3', '--out', grid])
        out = w.file('h.txt')
        assertEqual(main(['build', w.file('missing.txt'), '--out', out]), 2)
        assertEqual(main(['build', grid, '--scheme', 'ball-carving', '--out',
                          out]), 2)
        assertEqual(main(['build', grid, '--scheme', 'lsh-pstable', '--out',
                          out]), 2)
        assertEqual(main(['build', grid, '--eps', '0.5', '--out', out]), 2)
        assertEqual(main(['build', grid, '--seed', '-1', '--out', out]), 2)
        assertEqual(main(['build', grid]), 2)
        points = w.file('p.txt', 'p 1 d 1\n0\n1\n')
        assertEqual(main(['build', points, '--scheme', 'strong-graph',
                          '--out', out]), 2)

def test_cli_probe():
    with _Workspace() as w:
        points = w.file('p.txt', 'p 2 d 1\n0\n1\n100\n')
        out = w.file('probe.json')
        assertEqual(main(['probe', points, '--pair', '0', '2', '--trials',
                          '40', '--out', out]), 0)
        assertEqual(json.loads(w.read('probe.json'))[0]['estimate'], 0.0)
        assertEqual(main(['probe', points, '--scheme', 'ball-carving',
                          '--trials', '40', '--out', out]), 0)
        results = json.loads(w.read('probe.json'))
        assertEqual(results[0]['pair'], [0, 1])
        assertTrue('reference' in results[0])
        single = w.file('one.txt', 'p 2 d 1\n5\n')
        assertEqual(main(['probe', single, '--trials', '30', '--out', out]),
                    0)
        assertEqual(json.loads(w.read('probe.json'))[0]['estimate'], 1.0)

def test_cli_bench():
    with _Workspace() as w:
        points = w.file('p.txt')
        main(['gen', 'hypercube', '16', '2', '2', '--seed', '1', '--out',
              points])
        out = w.file('bench.csv')
        assertEqual(main(['bench', points, '--scheme', 'ball-carving', '--t',
                          '2,3', '--seed', '1,2', '--out', out]), 0)
        lines = w.read('bench.csv').splitlines()
        assertEqual(lines[0], ','.join(BENCH_HEADER))
        assertEqual(lines[0], 't,seed,edges,lightness,max_stretch,alpha,'
                    'millis')
        assertEqual(len(lines), 5)
        assertEqual([line.split(',')[:2] for line in lines[1:]],
                    [['2.0', '1'], ['2.0', '2'], ['3.0', '1'], ['3.0', '2']])

def load_tests(loader, tests, ignore):
    """Run our main documentation as a test, plus all test functions."""

    from lightspan.wulfgar import add_doctests, add_test_functions
    add_test_functions(loader, tests, __name__)
    add_doctests(tests, [
        'lightspan',
        'lightspan.decomp',
        'lightspan.evaluate',
        'lightspan.functions',
        'lightspan.generators',
        'lightspan.lsh',
        'lightspan.metric',
        'lightspan.spanner',
    ])
    return tests
