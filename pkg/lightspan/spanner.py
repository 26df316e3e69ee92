"""Build light spanners from covering batches of stochastic decompositions.

The construction walks the scales ``Delta_i = (1 + eps)**i`` upward.  At
each scale it takes the net ``N_i`` of radius ``eps * Delta_i``, samples
a covering batch of partitions of ``N_i`` at ``Delta = (1 + 2 eps) *
Delta_i``, and joins every cluster to one center by a star of edges.
Every pair of net points within ``Delta`` of each other then shares a
cluster in some partition, and an induction over the scales bounds the
stretch of every pair by `effective_stretch()`.

Graph inputs keep the spanner inside the graph: partitions cover every
vertex, clusters are connected in their induced subgraphs, and each
cluster contributes a shortest-path tree from its center to the net
points it holds, instead of a star.

"""
import logging
from collections import namedtuple
from math import ceil, fsum, log

import numpy as np
from scipy.sparse.csgraph import dijkstra

from lightspan.decomp import (CapExceeded, DecompositionError,
                             covering_partitions, partition_pool)
from lightspan.functions import child_rng, spawn_base, within
from lightspan.metric import MetricSpace, aspect_ratio, mst
from lightspan.nets import build_hierarchy

logger = logging.getLogger(__name__)

ScaleLadder = namedtuple('ScaleLadder', 'eps top_index scales')

ScaleRecord = namedtuple('ScaleRecord', 'i delta_i n_i phi_i partitions'
                         ' delta_used edges_added weight_added'
                         ' resample_rounds')

def _check_eps(eps):
    if not 0.0 < eps < 0.125:
        raise ValueError('eps must lie strictly between 0 and 1/8,'
                         ' got %r' % eps)

def scale_ladder(eps, L):
    """Return the scales ``(1 + eps)**i`` for ``i = 0 .. top_index``.

    ``top_index`` is the smallest index whose scale reaches ``L``.

    >>> scale_ladder(0.1, 1.21).top_index
    2
    >>> scale_ladder(0.1, 1.0).scales
    (1.0,)

    """
    eps = float(eps)
    _check_eps(eps)
    if not L >= 1.0:
        raise ValueError('the top of the scale ladder must be at least 1,'
                         ' got %r' % L)
    base = 1.0 + eps
    top = max(0, int(ceil(log(L) / log(base))))
    while base ** top < L:
        top += 1
    while top > 0 and base ** (top - 1) >= L:
        top -= 1
    return ScaleLadder(eps, top, tuple(base ** i for i in range(top + 1)))

def effective_stretch(eps, t):
    """Return the stretch bound the construction guarantees for ``eps, t``.

    >>> round(effective_stretch(0.1, 3), 3)
    10.154
    >>> round(effective_stretch(0.1, 1), 3)
    3.385

    """
    _check_eps(eps)
    return 2.0 * (1.0 + 2.0 * eps) * t / (1.0 / (1.0 + eps) - 2.0 * eps)

def eps_for_stretch(t, target_eps):
    """Return the largest raw eps whose stretch bound is ``t * (2 + target_eps)``.

    Found by bisection on the bound, which grows with eps.  The result
    always lies below 1/8, and a build with it guarantees stretch at
    most ``t * (2 + target_eps)``.

    """
    if not target_eps > 0:
        raise ValueError('target eps must be positive, got %r' % target_eps)
    goal = t * (2.0 + target_eps)
    lo = 0.0
    hi = 0.125
    for _ in range(100):
        mid = (lo + hi) / 2.0
        if effective_stretch(mid, t) <= goal:
            lo = mid
        else:
            hi = mid
    return lo

class Spanner(object):
    """An immutable spanner and the record of how it was built.

    ``edges`` are ``(u, v, w)`` triples with ``u < v`` in the order they
    were first added; ``edge_scales`` gives, for each edge, the scale
    ``Delta_i`` at which it was added.  ``build_log`` holds one
    `ScaleRecord` per scale.  A build also leaves its `HierarchicalNet`
    in ``hierarchy`` and, when asked to keep them, its covering batches
    in ``scale_partitions`` as ``(i, partitions)`` pairs.

    Edges given as ``(v, u)`` are stored as ``(u, v)``, and an edge
    listed twice is kept once; listing it twice with different weights
    raises `ValueError`.

    """
    __slots__ = ('n', 'edges', 'edge_scales', 'build_log', 'mode',
                 'hierarchy', 'scale_partitions')

    def __init__(self, n, edges, edge_scales=None, build_log=(),
                 mode='point', hierarchy=None, scale_partitions=()):
        self.n = int(n)
        edges = list(edges)
        if edge_scales is None:
            edge_scales = (0.0,) * len(edges)
        if len(edge_scales) != len(edges):
            raise ValueError('a spanner needs one scale per edge')
        weight_of = {}
        kept = []
        scales = []
        for (u, v, w), scale in zip(edges, edge_scales):
            u, v, w = int(u), int(v), float(w)
            if u == v:
                raise ValueError('spanner edge (%d, %d) is a self-loop'
                                 % (u, v))
            key = (u, v) if u < v else (v, u)
            if key in weight_of:
                first = weight_of[key]
                if not (within(w, first) and within(first, w)):
                    raise ValueError('the spanner lists edge (%d, %d) twice,'
                                     ' with weights %r and %r'
                                     % (key[0], key[1], first, w))
                continue
            weight_of[key] = w
            kept.append((key[0], key[1], w))
            scales.append(float(scale))
        self.edges = tuple(kept)
        self.edge_scales = tuple(scales)
        self.build_log = tuple(build_log)
        self.mode = mode
        self.hierarchy = hierarchy
        self.scale_partitions = tuple(scale_partitions)

    @property
    def weight(self):
        return fsum(w for u, v, w in self.edges)

    def unscaled(self, space):
        """Return this spanner with weights in the units of the raw input."""
        if space.is_graph:
            weights = space.backing.weight_of()
            edges = [(u, v, weights[u, v]) for u, v, w in self.edges]
        else:
            raw = MetricSpace(space.backing)
            edges = [(u, v, raw.distance(u, v)) for u, v, w in self.edges]
        return Spanner(self.n, edges, self.edge_scales, self.build_log,
                       self.mode, self.hierarchy, self.scale_partitions)

    def __repr__(self):
        return '<Spanner n=%d edges=%d mode=%s>' % (self.n, len(self.edges),
                                                     self.mode)

class _EdgeSet(object):
    # Keeps the first copy of every edge.
    __slots__ = ('edges', 'scales', 'seen')

    def __init__(self):
        self.edges = []
        self.scales = []
        self.seen = set()

    def add(self, u, v, w, scale):
        key = (u, v) if u < v else (v, u)
        if key in self.seen:
            return 0.0
        self.seen.add(key)
        self.edges.append((key[0], key[1], w))
        self.scales.append(scale)
        return w

def _center(cluster, top_levels):
    # Highest net level wins; clusters are sorted, so argmax breaks ties
    # toward the smallest index.
    return int(cluster[np.argmax(top_levels[cluster])])

def build_spanner(space, scheme, t, eps, rng, workers=1,
                  keep_partitions=False):
    """Build a spanner of a normalized metric from ``scheme``'s partitions.

    Every pair ends up with stretch at most ``effective_stretch(eps, t)``.
    ``workers`` processes share the sampling; the spanner does not
    depend on how many there are.

    """
    return _build(space, lambda n_i: scheme, t, eps, rng, None, workers,
                  keep_partitions)

def build_spanner_subset_decomposable(space, scheme_factory, t, eps, beta,
                                      rng, workers=1, keep_partitions=False):
    """Build a spanner whose scale ``i`` uses delta ``n_i ** -beta``.

    ``scheme_factory(n_i)`` returns the scheme to sample net ``N_i`` with,
    so each scale draws ``ceil(2 * n_i**beta * ln n_i)`` partitions.

    """
    if not 0.0 < beta < 1.0:
        raise ValueError('beta must lie strictly between 0 and 1,'
                         ' got %r' % beta)
    return _build(space, scheme_factory, t, eps, rng, beta, workers,
                  keep_partitions)

def _empty_record(i, delta_i, n_i):
    return ScaleRecord(i, delta_i, n_i, 0, 0, None, 0, 0.0, 0)

def _build(space, scheme_for, t, eps, rng, beta, workers, keep_partitions):
    _check_eps(eps)
    n = space.n
    if n == 1:
        return Spanner(1, ())
    ladder = scale_ladder(eps, max(mst(space).weight_L, 1.0))
    hierarchy = build_hierarchy(space, [eps * d for d in ladder.scales])
    top_levels = hierarchy.top_levels
    base = spawn_base(rng)
    chosen = _EdgeSet()
    log_rows = []
    kept = []

    with partition_pool(workers) as pool:
        for i, delta_i in enumerate(ladder.scales):
            members = np.array(hierarchy.levels[i].members, dtype='int64')
            n_i = len(members)
            if n_i < 2:
                log_rows.append(_empty_record(i, delta_i, n_i))
                continue
            scheme = scheme_for(n_i)
            if scheme.t != float(t):
                raise ValueError('the scheme was built for t=%r but the'
                                 ' spanner asks for t=%r' % (scheme.t, t))
            delta_used = None if beta is None else n_i ** -beta
            batch = _covering(scheme, space, members,
                              (1.0 + 2.0 * eps) * delta_i, child_rng(base, i),
                              i, delta_i, None, delta_used, pool)
            added = 0
            weight = []
            for partition in batch.partitions:
                for cluster in partition.clusters:
                    if len(cluster) < 2:
                        continue
                    center = _center(cluster, top_levels)
                    reach = space.distances_from(center, cluster)
                    for x, w in zip(cluster.tolist(), reach.tolist()):
                        if x != center:
                            w = chosen.add(x, center, w, delta_i)
                            if w:
                                added += 1
                                weight.append(w)
            log_rows.append(_record(i, delta_i, n_i, batch, added, weight))
            if keep_partitions:
                kept.append((i, batch.partitions))

    return Spanner(n, chosen.edges, chosen.scales, log_rows, 'point',
                   hierarchy, kept)

def build_graph_spanner(space, strong_scheme, t, eps, rng, workers=1,
                        keep_partitions=False):
    """Build a spanner of a normalized graph metric out of its own edges.

    Scales run up to the graph's aspect ratio.  Each scale samples strong
    partitions of every vertex, checking coverage on net points only,
    and adds a shortest-path forest per partition.

    """
    if not space.is_graph:
        raise ValueError('graph spanners need a graph metric')
    _check_eps(eps)
    if strong_scheme.t != float(t):
        raise ValueError('the scheme was built for t=%r but the spanner asks'
                         ' for t=%r' % (strong_scheme.t, t))
    n = space.n
    if n == 1:
        return Spanner(1, (), mode='graph')
    ladder = scale_ladder(eps, aspect_ratio(space.backing))
    hierarchy = build_hierarchy(space, [eps * d for d in ladder.scales])
    top_levels = hierarchy.top_levels
    vertices = np.arange(n)
    base = spawn_base(rng)
    chosen = _EdgeSet()
    log_rows = []
    kept = []

    with partition_pool(workers) as pool:
        for i, delta_i in enumerate(ladder.scales):
            members = np.array(hierarchy.levels[i].members, dtype='int64')
            n_i = len(members)
            if n_i < 2:
                log_rows.append(_empty_record(i, delta_i, n_i))
                continue
            batch = _covering(strong_scheme, space, vertices,
                              (1.0 + 2.0 * eps) * delta_i, child_rng(base, i),
                              i, delta_i, members, None, pool)
            added = 0
            weight = []
            for partition in batch.partitions:
                for u, v, w in graph_partition_edges(space, partition,
                                                     members, top_levels):
                    w = chosen.add(u, v, w, delta_i)
                    if w:
                        added += 1
                        weight.append(w)
            log_rows.append(_record(i, delta_i, n_i, batch, added, weight))
            if keep_partitions:
                kept.append((i, batch.partitions))

    return Spanner(n, chosen.edges, chosen.scales, log_rows, 'graph',
                   hierarchy, kept)

def _covering(scheme, space, domain, delta, rng, i, delta_i, cover,
              delta_used, pool):
    try:
        return covering_partitions(scheme, space, domain, delta, rng,
                                   cover=cover, delta_used=delta_used,
                                   pool=pool)
    except CapExceeded as e:
        raise CapExceeded('at scale %d (Delta_i = %r): %s' % (i, delta_i, e))

def _record(i, delta_i, n_i, batch, added, weight):
    record = ScaleRecord(i, delta_i, n_i, batch.phi, batch.sampled,
                         batch.delta_used, added, fsum(weight),
                         batch.resample_rounds)
    logger.debug('scale %d Delta_i=%.6g n_i=%d phi_i=%d partitions=%d'
                 ' delta=%.4g edges_added=%d', i, delta_i, n_i, batch.phi,
                 batch.sampled, batch.delta_used, added)
    return record

def graph_partition_edges(space, partition, net_points, top_levels):
    """Return the forest one strong partition contributes to a graph spanner.

    In each cluster a shortest-path tree of the induced subgraph joins
    the center to every net point of the cluster; the union of those
    tree paths is returned as sorted ``(u, v, w)`` graph edges.

    """
    is_net = np.zeros(space.n, dtype=bool)
    is_net[np.asarray(net_points, dtype='int64')] = True
    graph = space.csgraph
    scale = space.scale_factor
    weights = space.backing.weight_of()
    edges = set()
    for cluster in partition.clusters:
        targets = np.flatnonzero(is_net[cluster])
        if len(cluster) < 2 or not len(targets):
            continue
        source = int(np.argmax(top_levels[cluster]))
        induced = graph[cluster][:, cluster]
        reach, parent = dijkstra(induced, directed=False, indices=source,
                                 return_predecessors=True)
        for target in targets.tolist():
            if not np.isfinite(reach[target]):
                raise DecompositionError(
                    'net point %d is cut off from its cluster center %d'
                    ' inside the cluster' % (cluster[target], cluster[source]))
            v = target
            while v != source:
                u = int(parent[v])
                a = int(cluster[u])
                b = int(cluster[v])
                key = (a, b) if a < b else (b, a)
                if key in edges:
                    break
                edges.add(key)
                v = u
    return [(u, v, weights[u, v] * scale) for u, v in sorted(edges)]
