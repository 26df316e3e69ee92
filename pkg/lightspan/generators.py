"""Synthetic instances: random point clouds, grids, and geometric graphs."""

import numpy as np
from scipy.spatial.distance import pdist, squareform

from lightspan.metric import MetricSpace, PointSet, WeightedGraph, mst

def gaussian(n, d, p, rng):
    """Return ``n`` standard Gaussian points in ``d`` dimensions under ell-p."""
    _check_size(n, d)
    return PointSet(rng.standard_normal((n, d)), p)

def hypercube(n, d, p, rng):
    """Return ``n`` points uniform in the unit cube ``[0, 1]**d`` under ell-p."""
    _check_size(n, d)
    return PointSet(rng.random((n, d)), p)

def _check_size(n, d):
    if n < 1 or d < 1:
        raise ValueError('need n >= 1 points in d >= 1 dimensions,'
                         ' got n=%r d=%r' % (n, d))

def grid(k):
    """Return the ``k`` by ``k`` grid graph with unit-weight edges.

    >>> len(grid(5).edges)
    40

    """
    if k < 1:
        raise ValueError('grid side must be positive, got %r' % k)
    edges = []
    for row in range(k):
        for col in range(k):
            v = row * k + col
            if col + 1 < k:
                edges.append((v, v + 1, 1.0))
            if row + 1 < k:
                edges.append((v, v + k, 1.0))
    return WeightedGraph(k * k, edges)

def path_graph(n, weight=1.0):
    """Return the path ``0 - 1 - ... - n-1`` with equal edge weights."""
    return WeightedGraph(n, [(v, v + 1, weight) for v in range(n - 1)])

def geometric_graph(n, radius, rng):
    """Return a connected random geometric graph on the unit square.

    Points are uniform in the square; every pair closer than ``radius``
    is joined with its Euclidean length as weight, and the edges of the
    Euclidean minimum spanning tree are added so the graph is connected.

    """
    if n < 1:
        raise ValueError('need at least one vertex, got %r' % n)
    if not radius > 0:
        raise ValueError('connection radius must be positive, got %r'
                         % radius)
    points = PointSet(rng.random((n, 2)))
    if n == 1:
        return WeightedGraph(1, [])
    lengths = squareform(pdist(points.points))
    rows, cols = np.nonzero(np.triu(lengths <= radius, k=1))
    chosen = dict(((int(u), int(v)), float(lengths[u, v]))
                  for u, v in zip(rows, cols))
    for u, v, w in mst(MetricSpace(points)).tree_edges:
        chosen[u, v] = float(lengths[u, v])
    return WeightedGraph(n, [(u, v, w) for (u, v), w in sorted(chosen.items())])
