"""Finite metric spaces: ell-p point sets and weighted-graph metrics.

Every other module asks a `MetricSpace` for distances and never looks
at the backing data directly, except the decompositions that need
coordinates (ball carving, LSH) or graph edges (strong decompositions).

"""
import logging
from collections import namedtuple
from math import fsum, isfinite

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import connected_components, dijkstra
from scipy.spatial.distance import cdist, pdist

logger = logging.getLogger(__name__)

APSP_CACHE_LIMIT = 4096

MstSummary = namedtuple('MstSummary', 'tree_edges weight_L')

class PointSet(object):
    """A finite set of points in ell-p, with 1 <= p <= 2."""

    __slots__ = ('points', 'p')

    def __init__(self, points, p=2.0):
        points = np.array(points, dtype='float64')
        if points.ndim == 1:
            points = points.reshape(-1, 1)
        if points.ndim != 2 or points.shape[0] < 1 or points.shape[1] < 1:
            raise ValueError('a point set needs an n-by-d array of'
                             ' coordinates with n >= 1 and d >= 1,'
                             ' got shape %r' % (points.shape,))
        if not np.isfinite(points).all():
            raise ValueError('point coordinates must be finite numbers')
        p = float(p)
        if not 1.0 <= p <= 2.0:
            raise ValueError('the norm exponent p must lie in [1, 2],'
                             ' got %r' % p)
        unique = np.unique(points, axis=0)
        if len(unique) != len(points):
            raise ValueError('the point set contains %d duplicate point(s);'
                             ' every pairwise distance must be positive'
                             % (len(points) - len(unique)))
        points.flags.writeable = False
        self.points = points
        self.p = p

    @property
    def n(self):
        return self.points.shape[0]

    @property
    def d(self):
        return self.points.shape[1]

    def __repr__(self):
        return '<PointSet n=%d d=%d p=%r>' % (self.n, self.d, self.p)

class WeightedGraph(object):
    """A connected undirected graph with positive edge weights."""

    __slots__ = ('n', 'edges')

    def __init__(self, n, edges):
        n = int(n)
        if n < 1:
            raise ValueError('a graph needs at least one vertex')
        seen = set()
        clean = []
        for u, v, w in edges:
            u = int(u)
            v = int(v)
            w = float(w)
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError('edge (%d, %d) names a vertex outside'
                                 ' 0..%d' % (u, v, n - 1))
            if u == v:
                raise ValueError('self-loop at vertex %d' % u)
            if not (isfinite(w) and w > 0.0):
                raise ValueError('edge (%d, %d) has weight %r; weights'
                                 ' must be positive and finite' % (u, v, w))
            key = (u, v) if u < v else (v, u)
            if key in seen:
                raise ValueError('duplicate edge between %d and %d' % key)
            seen.add(key)
            clean.append((u, v, w))
        self.n = n
        self.edges = tuple(clean)
        if n > 1:
            count, labels = connected_components(self.csgraph(),
                                                 directed=False)
            if count != 1:
                raise ValueError('the graph must be connected, but it has'
                                 ' %d components' % count)

    def csgraph(self, scale=1.0):
        """Return a symmetric CSR adjacency matrix with weights times scale."""
        if not self.edges:
            return csr_matrix((self.n, self.n))
        u, v, w = (np.array(column) for column in zip(*self.edges))
        w = w * scale
        rows = np.concatenate([u, v])
        cols = np.concatenate([v, u])
        data = np.concatenate([w, w])
        return csr_matrix((data, (rows, cols)), shape=(self.n, self.n))

    def weight_of(self):
        """Return a dict mapping each sorted vertex pair to its weight."""
        return dict((((u, v) if u < v else (v, u)), w)
                    for u, v, w in self.edges)

    def __repr__(self):
        return '<WeightedGraph n=%d edges=%d>' % (self.n, len(self.edges))

class MetricSpace(object):
    """Distance oracle over a `PointSet` or a `WeightedGraph`.

    All distances are multiplied by ``scale_factor``, which `normalize()`
    chooses so that the minimum pairwise distance becomes 1.  Graph
    metrics with at most ``APSP_CACHE_LIMIT`` vertices keep a full table
    of shortest-path distances, built once here; larger graphs run
    Dijkstra on demand.

    """
    __slots__ = ('backing', 'scale_factor', '_table', '_csgraph')

    def __init__(self, backing, scale_factor=1.0):
        if not isinstance(backing, (PointSet, WeightedGraph)):
            raise ValueError('a metric space is backed by a PointSet or'
                             ' a WeightedGraph, not %r' % (backing,))
        scale_factor = float(scale_factor)
        if not (isfinite(scale_factor) and scale_factor > 0.0):
            raise ValueError('scale factor must be positive and finite')
        self.backing = backing
        self.scale_factor = scale_factor
        self._table = None
        self._csgraph = None
        if isinstance(backing, WeightedGraph):
            self._csgraph = backing.csgraph(scale_factor)
            if backing.n <= APSP_CACHE_LIMIT:
                table = dijkstra(self._csgraph, directed=False)
                table.flags.writeable = False
                self._table = table

    @property
    def n(self):
        return self.backing.n

    @property
    def is_graph(self):
        return isinstance(self.backing, WeightedGraph)

    @property
    def csgraph(self):
        """Scaled CSR adjacency of a graph-backed space."""
        if self._csgraph is None:
            raise ValueError('a point-set metric has no graph edges')
        return self._csgraph

    def coordinates(self, indices=None):
        """Return point coordinates, scaled so their distances match."""
        if self.is_graph:
            raise ValueError('a graph metric has no coordinates')
        points = self.backing.points
        if indices is not None:
            points = points[np.asarray(indices, dtype='int64')]
        return points * self.scale_factor

    def _check(self, i):
        if not 0 <= i < self.n:
            raise IndexError('point index %d is out of range 0..%d'
                             % (i, self.n - 1))

    def distance(self, i, j):
        """Return the distance between points ``i`` and ``j``."""
        i = int(i)
        j = int(j)
        self._check(i)
        self._check(j)
        if i == j:
            return 0.0
        return float(self.cross([i], [j])[0, 0])

    def cross(self, rows, cols):
        """Return the matrix of distances from ``rows`` to ``cols``."""
        rows = np.asarray(rows, dtype='int64')
        cols = np.asarray(cols, dtype='int64')
        if self.is_graph:
            if self._table is not None:
                return self._table[np.ix_(rows, cols)]
            return dijkstra(self._csgraph, directed=False,
                            indices=rows)[:, cols]
        points = self.backing.points
        matrix = cdist(points[rows], points[cols], 'minkowski',
                       p=self.backing.p)
        return matrix * self.scale_factor

    def matrix(self, indices=None):
        """Return the pairwise distance matrix among ``indices``."""
        if indices is None:
            indices = np.arange(self.n)
        return self.cross(indices, indices)

    def distances_from(self, i, indices=None):
        """Return the distances from point ``i`` to ``indices`` (or all)."""
        if indices is None:
            indices = np.arange(self.n)
        return self.cross([i], indices)[0]

    def min_distance(self):
        """Return the smallest distance between two distinct points."""
        if self.n < 2:
            raise ValueError('a single point has no pairwise distances')
        if self.is_graph:
            # With positive weights the nearest pair is a lightest edge.
            return min(w for u, v, w in self.backing.edges) * self.scale_factor
        points = self.backing.points
        return float(pdist(points, 'minkowski', p=self.backing.p).min()
                     * self.scale_factor)

    def __repr__(self):
        return '<MetricSpace %r scale_factor=%r>' % (self.backing,
                                                      self.scale_factor)

def distance(space, i, j):
    """Return the distance between points ``i`` and ``j`` of ``space``.

    >>> space = MetricSpace(PointSet([[0.0, 0.0], [3.0, 4.0]]))
    >>> distance(space, 0, 1)
    5.0

    """
    return space.distance(i, j)

def normalize(space):
    """Return a copy of ``space`` scaled to minimum pairwise distance 1.

    >>> space = normalize(MetricSpace(PointSet([0.0, 2.0, 10.0], p=2)))
    >>> space.scale_factor
    0.5

    """
    if space.n < 2:
        return MetricSpace(space.backing, 1.0)
    raw = space.min_distance() / space.scale_factor
    if not raw > 0.0:
        raise ValueError('the metric has a zero distance between distinct'
                         ' points and cannot be normalized')
    return MetricSpace(space.backing, 1.0 / raw)

def mst(space):
    """Return the minimum spanning tree of ``space`` as an `MstSummary`.

    Point sets use dense Prim over the complete metric graph; graphs use
    Kruskal over their own edges.  Among equal weights the edge whose
    sorted pair ``(i, j)`` is lexicographically smallest wins.

    """
    n = space.n
    if n == 1:
        return MstSummary((), 0.0)
    if space.is_graph:
        edges = _kruskal(n, space.backing.edges, space.scale_factor)
    else:
        edges = _dense_prim(space)
    return MstSummary(tuple(edges), fsum(w for i, j, w in edges))

def _dense_prim(space):
    n = space.n
    index = np.arange(n)
    in_tree = np.zeros(n, dtype=bool)
    key = np.full(n, np.inf)
    parent = np.full(n, -1, dtype='int64')
    in_tree[0] = True
    key[:] = space.distances_from(0)
    parent[:] = 0
    edges = []
    for step in range(n - 1):
        lo = np.minimum(parent, index)
        hi = np.maximum(parent, index)
        candidates = np.flatnonzero(~in_tree)
        best = key[candidates].min()
        tied = candidates[key[candidates] == best]
        order = np.lexsort((hi[tied], lo[tied]))
        v = int(tied[order[0]])
        u = int(parent[v])
        edges.append((min(u, v), max(u, v), float(key[v])))
        in_tree[v] = True

        row = space.distances_from(v)
        new_lo = np.minimum(v, index)
        new_hi = np.maximum(v, index)
        smaller_pair = (new_lo < lo) | ((new_lo == lo) & (new_hi < hi))
        better = (row < key) | ((row == key) & smaller_pair)
        better &= ~in_tree
        key[better] = row[better]
        parent[better] = v
    return edges

def _kruskal(n, graph_edges, scale):
    roots = list(range(n))

    def find(x):
        while roots[x] != x:
            roots[x] = roots[roots[x]]
            x = roots[x]
        return x

    ordered = sorted((w, min(u, v), max(u, v)) for u, v, w in graph_edges)
    edges = []
    for w, u, v in ordered:
        ru, rv = find(u), find(v)
        if ru != rv:
            roots[ru] = rv
            edges.append((u, v, w * scale))
            if len(edges) == n - 1:
                break
    return edges

def aspect_ratio(graph):
    """Return the largest edge weight divided by the smallest.

    >>> aspect_ratio(WeightedGraph(3, [(0, 1, 1.0), (1, 2, 8.0)]))
    8.0

    """
    if isinstance(graph, MetricSpace):
        graph = graph.backing
    if not isinstance(graph, WeightedGraph) or not graph.edges:
        raise ValueError('aspect ratio needs a graph with at least one edge')
    weights = [w for u, v, w in graph.edges]
    return max(weights) / min(weights)
