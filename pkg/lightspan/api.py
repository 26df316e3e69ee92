"""Public API, gathered in one place."""

__all__ = (
    'EXIT_CODES', 'PointSet', 'WeightedGraph', 'MetricSpace', 'distance',
    'normalize', 'mst', 'aspect_ratio', 'build_net', 'build_hierarchy',
    'net_level', 'BallCarving', 'RandomShift', 'StrongGraph', 'PStableLsh',
    'Partition', 'sample_partition', 'covering_partitions', 'partition_pool',
    'check_bounded', 'check_strongly_bounded', 'empirical_cluster_probability',
    'lsh_amplify', 'pstable_hash_family', 'lsh_to_partition',
    'effective_stretch', 'eps_for_stretch', 'scale_ladder', 'build_spanner',
    'build_spanner_subset_decomposable', 'build_graph_spanner',
    'verify_stretch', 'lightness', 'sparsity', 'evaluate',
)

EXIT_CODES = {
    0: 'success',
    2: 'invalid input',
    3: 'verification failure',
    4: 'internal cap exceeded',
}

from .metric import (
    PointSet, WeightedGraph, MetricSpace, distance, normalize, mst,
    aspect_ratio,
)
from .nets import build_net, build_hierarchy, net_level
from .decomp import (
    BallCarving, RandomShift, StrongGraph, Partition, sample_partition,
    covering_partitions, partition_pool, check_bounded, check_strongly_bounded,
    empirical_cluster_probability,
)
from .lsh import PStableLsh, lsh_amplify, pstable_hash_family, lsh_to_partition
from .spanner import (
    effective_stretch, eps_for_stretch, scale_ladder, build_spanner,
    build_spanner_subset_decomposable, build_graph_spanner,
)
from .evaluate import verify_stretch, lightness, sparsity, evaluate
