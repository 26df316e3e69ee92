"""Partitions, stochastic decomposition schemes, and covering batches.

A scheme with parameters ``(t, delta)`` samples, for a scale ``Delta``,
partitions whose clusters have diameter at most ``t * Delta`` and which
put any two points within ``Delta`` of each other in the same cluster
with probability at least ``delta``.  Schemes here are immutable
descriptors; each ``sample()`` call draws all of its randomness from the
generator it is handed.

The spanner never relies on a scheme's ``delta`` being right: a covering
batch samples ``ceil(2 ln n / delta)`` partitions, then verifies by
exhaustive scan that every close pair was clustered together at least
once, and samples more rounds until that is true.

Partition ``j`` of a batch draws from its own child stream, so a round
can be spread over worker processes with `partition_pool()` and still
come out identical to a serial run.

"""
import heapq
import logging
from collections import namedtuple
from concurrent.futures import ProcessPoolExecutor
from contextlib import contextmanager
from math import ceil, log

import numpy as np
from scipy.sparse.csgraph import dijkstra
from scipy.spatial.distance import cdist

from lightspan.functions import binomial_stderr, child_rng, spawn_base, within

logger = logging.getLogger(__name__)

ADAPTIVE = 'adaptive'
ROUND_CAP = 16
PILOT_PARTITIONS = 50
PILOT_PAIRS = 500
CARVING_DRAW_CAP = 10**6
CARVING_BATCH = 32
FULL_RADIUS_CHANCE = 0.5
SHIFT_DIVISOR = 4.0

class CapExceeded(RuntimeError):
    """An engineering cap on resampling or on random draws was reached."""

class DecompositionError(RuntimeError):
    """A scheme produced a partition that breaks its own contract."""

SchemeParams = namedtuple('SchemeParams', 't delta_hint')

# ``phi`` is the per-round count; ``sampled`` is what was actually drawn,
# ``phi * (resample_rounds + 1)``.
CoveringBatch = namedtuple('CoveringBatch',
                           'partitions delta_used phi sampled resample_rounds')

def scheme_params(t, delta_hint=ADAPTIVE):
    """Return validated `SchemeParams`."""
    t = float(t)
    if not t >= 1.0:
        raise ValueError('the diameter blowup t must be at least 1,'
                         ' got %r' % t)
    if delta_hint != ADAPTIVE:
        delta_hint = float(delta_hint)
        if not 0.0 < delta_hint <= 1.0:
            raise ValueError('delta must lie in (0, 1], got %r' % delta_hint)
    return SchemeParams(t, delta_hint)

def as_domain(domain):
    domain = np.unique(np.asarray(domain, dtype='int64'))
    if not domain.size:
        raise ValueError('cannot partition an empty domain')
    return domain

class Partition(object):
    """A clustering of ``domain`` given as one label per domain point.

    Labels are renumbered in order of first appearance along the sorted
    domain, so two partitions with the same clusters compare equal
    through `labels` no matter how a scheme numbered them.

    """
    __slots__ = ('domain', 'labels', 'clusters')

    def __init__(self, domain, labels):
        domain = np.asarray(domain, dtype='int64')
        labels = np.asarray(labels, dtype='int64')
        if domain.shape != labels.shape:
            raise ValueError('a partition needs one label per domain point')
        order = np.argsort(domain, kind='stable')
        domain = domain[order]
        labels = labels[order]
        if (labels < 0).any():
            raise ValueError('every domain point must belong to a cluster')
        unique, first, canonical = np.unique(labels, return_index=True,
                                             return_inverse=True)
        renumber = np.empty(len(unique), dtype='int64')
        renumber[np.argsort(first, kind='stable')] = np.arange(len(unique))
        labels = renumber[canonical.reshape(-1)]
        grouping = np.argsort(labels, kind='stable')
        bounds = np.flatnonzero(np.diff(labels[grouping])) + 1
        domain.flags.writeable = False
        labels.flags.writeable = False
        self.domain = domain
        self.labels = labels
        self.clusters = tuple(domain[group]
                              for group in np.split(grouping, bounds))

    def __len__(self):
        return len(self.clusters)

    def labels_of(self, indices):
        """Return the cluster labels of the points ``indices``."""
        indices = np.asarray(indices, dtype='int64')
        position = np.searchsorted(self.domain, indices)
        if (position >= len(self.domain)).any() or (
                self.domain[np.minimum(position, len(self.domain) - 1)]
                != indices).any():
            raise ValueError('some points are outside the partition domain')
        return self.labels[position]

    def cluster_of(self, x):
        """Return the cluster id of point ``x``."""
        return int(self.labels_of([x])[0])

    def __eq__(self, other):
        return (isinstance(other, Partition)
                and np.array_equal(self.domain, other.domain)
                and np.array_equal(self.labels, other.labels))

    def __ne__(self, other):
        return not self == other

    def __repr__(self):
        return '<Partition of %d points into %d clusters>' % (
            len(self.domain), len(self.clusters))

def singletons(domain):
    """Return the partition of ``domain`` into singleton clusters."""
    domain = as_domain(domain)
    return Partition(domain, np.arange(len(domain)))

# ------------------------------------------------------------------------
#                               Schemes
#

class BallCarving(object):
    """Ball carving for Euclidean point sets; its delta is measured."""

    __slots__ = ('t',)
    name = 'ball-carving'

    def __init__(self, t):
        if not t >= 2:
            raise ValueError('ball carving needs t >= 2, got %r' % t)
        self.t = float(t)

    def params(self, n):
        return scheme_params(self.t)

    def sample(self, space, domain, delta, rng):
        return ball_carving(space, domain, delta, self.t, rng)

class RandomShift(object):
    """Shifted-ball clustering around random centers, for any metric."""

    __slots__ = ('t',)
    name = 'random-shift'

    def __init__(self, t):
        if not t >= 2:
            raise ValueError('random-shift clustering needs t >= 2,'
                             ' got %r' % t)
        self.t = float(t)

    def params(self, n):
        return scheme_params(self.t)

    def sample(self, space, domain, delta, rng):
        return random_shift_net_partition(space, domain, delta, self.t, rng)

class StrongGraph(object):
    """Exponential-shift clustering with connected, strongly bounded clusters."""

    __slots__ = ('t',)
    name = 'strong-graph'

    def __init__(self, t):
        if not t >= 2:
            raise ValueError('strong graph decompositions need t >= 2,'
                             ' got %r' % t)
        self.t = float(t)

    def params(self, n):
        return scheme_params(self.t)

    def sample(self, space, domain, delta, rng):
        domain = as_domain(domain)
        if len(domain) != space.n:
            raise ValueError('a strong graph decomposition partitions every'
                             ' vertex of the graph')
        return strong_graph_decomposition(space, delta, self.t, rng)

def sample_partition(scheme, space, domain, delta, rng):
    """Sample one partition of ``domain`` at scale ``delta`` from ``scheme``."""
    if not delta > 0:
        raise ValueError('the scale Delta must be positive, got %r' % delta)
    return scheme.sample(space, as_domain(domain), float(delta), rng)

# ------------------------------------------------------------------------
#                            Covering batches
#

def covering_count(n, delta):
    """Return ``ceil(2 ln n / delta)``, the partitions per covering round.

    >>> covering_count(100, 0.5)
    19

    """
    return int(ceil(2.0 * log(n) / delta))

def close_pairs(space, points, delta):
    """Return index arrays ``(I, J)``, ``I < J``, of pairs within ``delta``.

    The entries index into ``points``, not into the space.

    """
    matrix = space.matrix(points)
    return np.nonzero(np.triu(matrix <= delta, k=1))

SamplingPool = namedtuple('SamplingPool', 'executor workers')

@contextmanager
def partition_pool(workers=1):
    """Yield a `SamplingPool` of ``workers`` processes, or None for one.

    Pass the result as ``pool`` to the sampling routines; it stays open
    for the whole ``with`` block, so one pool serves a whole build.

    """
    workers = int(workers or 1)
    if workers < 1:
        raise ValueError('workers must be at least 1, got %r' % workers)
    if workers == 1:
        yield None
        return
    with ProcessPoolExecutor(max_workers=workers) as executor:
        yield SamplingPool(executor, workers)

def _sample_job(job):
    scheme, space, domain, delta, base, indices = job
    return scheme.sample(space, domain, delta, child_rng(base, *indices))

def sample_partitions(scheme, space, domain, delta, base, keys, pool=None):
    """Return one partition per key, partition ``k`` drawn from ``(base, k)``.

    With a ``pool`` from `partition_pool()` the partitions are sampled in
    worker processes; the result is the same list either way.

    """
    jobs = [(scheme, space, domain, delta, base, tuple(key)) for key in keys]
    if pool is None or len(jobs) < 2:
        return [_sample_job(job) for job in jobs]
    chunk = max(1, len(jobs) // (4 * pool.workers))
    return list(pool.executor.map(_sample_job, jobs, chunksize=chunk))

def estimate_delta(scheme, space, domain, delta, rng, cover=None,
                   partitions=PILOT_PARTITIONS, max_pairs=PILOT_PAIRS,
                   pool=None):
    """Estimate a scheme's co-clustering probability with a pilot run.

    Samples ``partitions`` partitions, measures how often each of up to
    ``max_pairs`` random pairs of ``cover`` within ``delta`` is clustered
    together, and returns the 10th-percentile frequency floored at 1/n.
    With no close pairs there is nothing to cover and the result is 1.

    """
    domain = as_domain(domain)
    cover = domain if cover is None else as_domain(cover)
    I, J = close_pairs(space, cover, delta)
    if not len(I):
        return 1.0
    if len(I) > max_pairs:
        chosen = np.sort(rng.choice(len(I), max_pairs, replace=False))
        I = I[chosen]
        J = J[chosen]
    counts = np.zeros(len(I))
    base = spawn_base(rng)
    for partition in sample_partitions(scheme, space, domain, delta, base,
                                       [(j,) for j in range(partitions)],
                                       pool):
        labels = partition.labels_of(cover)
        counts += labels[I] == labels[J]
    estimate = float(np.percentile(counts / partitions, 10))
    estimate = min(1.0, max(estimate, 1.0 / len(cover)))
    logger.debug('pilot delta estimate %.4g from %d pairs at scale %.6g',
                 estimate, len(I), delta)
    return estimate

def covering_partitions(scheme, space, domain, delta, rng, cover=None,
                        delta_used=None, round_cap=ROUND_CAP, pool=None):
    """Return a `CoveringBatch` of partitions of ``domain`` at scale ``delta``.

    Every pair of ``cover`` points (by default, the domain) within
    ``delta`` of each other is clustered together by at least one of the
    returned partitions; this is checked, not assumed.  Each round
    samples ``phi = ceil(2 ln n / delta_used)`` partitions, ``n`` being
    the size of ``cover``; up to ``round_cap`` extra rounds are sampled
    before giving up with `CapExceeded`.  ``delta_used`` defaults to the
    scheme's own delta, or to a pilot estimate for adaptive schemes.

    Partition ``j`` of round ``k`` draws from the child stream
    ``(base, k, j)``, where ``base`` is drawn once from ``rng``.  The
    batch's ``phi`` is the per-round count and ``sampled`` the total.

    """
    domain = as_domain(domain)
    cover = domain if cover is None else as_domain(cover)
    n = len(cover)
    if n < 2:
        raise ValueError('a covering batch needs at least two points')
    if delta_used is None:
        hint = scheme.params(len(domain)).delta_hint
        if hint == ADAPTIVE:
            hint = estimate_delta(scheme, space, domain, delta, rng, cover,
                                  pool=pool)
        delta_used = hint
    delta_used = float(delta_used)
    if not 0.0 < delta_used <= 1.0:
        raise ValueError('delta must lie in (0, 1], got %r' % delta_used)
    phi = covering_count(n, delta_used)

    I, J = close_pairs(space, cover, delta)
    covered = np.zeros(len(I), dtype=bool)
    base = spawn_base(rng)
    partitions = []
    rounds = 0
    while True:
        drawn = sample_partitions(scheme, space, domain, delta, base,
                                  [(rounds, j) for j in range(phi)], pool)
        for partition in drawn:
            labels = partition.labels_of(cover)
            covered |= labels[I] == labels[J]
        partitions.extend(drawn)
        if covered.all():
            break
        if rounds >= round_cap:
            raise CapExceeded(
                'after %d rounds of %d partitions, %d of %d close pairs'
                ' (%.1f%%) were never clustered together; the scheme'
                ' delta %.4g is far too optimistic'
                % (rounds + 1, phi, int((~covered).sum()), len(I),
                   100.0 * (~covered).mean(), delta_used))
        rounds += 1
        logger.info('covering round %d at scale %.6g: %d of %d close pairs'
                    ' still uncovered', rounds, delta,
                    int((~covered).sum()), len(I))
    return CoveringBatch(tuple(partitions), delta_used, phi, len(partitions),
                         rounds)

def is_covering(batch, space, points, delta):
    """Whether every pair of ``points`` within ``delta`` is co-clustered."""
    I, J = close_pairs(space, points, delta)
    covered = np.zeros(len(I), dtype=bool)
    for partition in batch.partitions:
        labels = partition.labels_of(points)
        covered |= labels[I] == labels[J]
    return bool(covered.all())

# ------------------------------------------------------------------------
#                       Boundedness and measurement
#

def check_bounded(partition, space, bound):
    """Whether every cluster has (weak) diameter at most ``bound``."""
    for members in partition.clusters:
        if len(members) > 1:
            if not within(space.matrix(members).max(), bound):
                return False
    return True

def check_strongly_bounded(partition, space, bound):
    """Whether every cluster has strong diameter at most ``bound``.

    The strong diameter is measured inside the induced subgraph of the
    cluster; a disconnected cluster has infinite strong diameter.

    """
    graph = space.csgraph
    for members in partition.clusters:
        if len(members) > 1:
            induced = graph[members][:, members]
            table = dijkstra(induced, directed=False)
            if not np.isfinite(table).all():
                return False
            if not within(table.max(), bound):
                return False
    return True

def empirical_cluster_probability(scheme, space, pair, delta, trials, rng,
                                  domain=None):
    """Return ``(estimate, stderr)`` for how often ``pair`` is co-clustered.

    The partitions are of ``domain``, by default the whole space.

    """
    if trials < 30:
        raise ValueError('at least 30 trials are needed, got %r' % trials)
    x, y = (int(v) for v in pair)
    if domain is None:
        domain = np.arange(space.n)
    domain = as_domain(domain)
    together = 0
    base = spawn_base(rng)
    for j in range(trials):
        partition = sample_partition(scheme, space, domain, delta,
                                     child_rng(base, j))
        labels = partition.labels_of([x, y])
        together += labels[0] == labels[1]
    estimate = together / float(trials)
    return estimate, binomial_stderr(estimate, trials)

# ------------------------------------------------------------------------
#                             Ball carving
#

def uniform_in_ball(rng, d, radius, count):
    """Return ``count`` points drawn uniformly from the d-ball at the origin."""
    directions = rng.standard_normal((count, d))
    directions /= np.linalg.norm(directions, axis=1)[:, None]
    lengths = radius * rng.random(count) ** (1.0 / d)
    return directions * lengths[:, None]

def ball_carving(space, domain, r, t, rng):
    """Partition Euclidean points by carving balls of radius ``t * r / 2``.

    Centers are uniform in the bounding box of the domain inflated by
    ``t * r`` on every side, and each new ball claims every still
    unclaimed point inside it.  A center that claims nothing changes
    nothing, so the loop draws only centers that claim something:
    uniform over the union of the balls around unclaimed points (pick
    one such point uniformly, a point uniformly in its ball, and accept
    with probability one over the number of balls covering it).  This
    gives the same distribution over partitions.

    Candidates are drawn ``CARVING_BATCH`` at a time with anchors taken
    from the points unclaimed when the batch starts.  A candidate whose
    anchor was claimed earlier in the batch is rejected, which leaves
    the accepted anchors uniform over the points still unclaimed.

    """
    if space.is_graph or space.backing.p != 2.0:
        raise ValueError('ball carving needs a Euclidean (p = 2) point set,'
                         ' not %r' % (space.backing,))
    if not t >= 2:
        raise ValueError('ball carving needs t >= 2, got %r' % t)
    domain = as_domain(domain)
    points = space.coordinates(domain)
    d = points.shape[1]
    radius = t * r / 2.0
    labels = np.full(len(domain), -1, dtype='int64')
    unclaimed = np.ones(len(domain), dtype=bool)
    left = len(domain)
    batch = np.arange(CARVING_BATCH)
    cluster = 0
    draws = 0
    while left:
        open_points = np.flatnonzero(unclaimed)
        anchors = open_points[rng.integers(open_points.size,
                                           size=CARVING_BATCH)]
        centers = points[anchors] + uniform_in_ball(rng, d, radius,
                                                    CARVING_BATCH)
        holds = cdist(centers, points) <= radius
        holds[batch, anchors] = True
        coins = rng.random(CARVING_BATCH)
        for k in range(CARVING_BATCH):
            draws += 1
            if draws > CARVING_DRAW_CAP:
                raise CapExceeded('ball carving drew %d centers without'
                                  ' claiming every point' % CARVING_DRAW_CAP)
            if not unclaimed[anchors[k]]:
                continue
            inside = holds[k] & unclaimed
            count = int(inside.sum())
            if coins[k] * count >= 1.0:
                continue
            labels[inside] = cluster
            cluster += 1
            unclaimed &= ~inside
            left -= count
            if not left:
                break
    return Partition(domain, labels)

def cap_ratio_mc(d, u, r, samples, rng):
    """Estimate the fraction of a radius-``r`` ball within ``r`` of a point.

    The point lies at distance ``u`` from the ball's center, so the
    result estimates the volume of the intersection of two radius-``r``
    balls at center distance ``u``, divided by the volume of one ball.

    """
    if samples < 1000:
        raise ValueError('use at least 1000 samples, got %r' % samples)
    if u < 0 or r <= 0:
        raise ValueError('need u >= 0 and r > 0')
    if u == 0:
        return 1.0
    if u >= 2 * r:
        return 0.0
    inside = 0
    remaining = samples
    while remaining:
        count = min(remaining, 100000)
        points = uniform_in_ball(rng, d, r, count)
        points[:, 0] -= u
        inside += int((np.sqrt((points * points).sum(axis=1)) <= r).sum())
        remaining -= count
    return inside / float(samples)

# ------------------------------------------------------------------------
#                       Random shifts and strong clusters
#

def random_shift_net_partition(space, domain, delta, t, rng):
    """Partition any metric by shifted balls around randomly ordered centers.

    Every domain point is a candidate center.  With probability
    ``FULL_RADIUS_CHANCE`` a center takes the full radius ``t*delta/2``;
    otherwise its radius is uniform in ``[t*delta/4, t*delta/2]``.
    Taking the centers in random order, every point joins the first
    center whose ball holds it.  A point lies in its own ball, so every
    point is assigned, and no cluster reaches past ``t*delta/2`` from its
    center.

    Two points ``x, y`` within ``t*delta/2`` of each other share a
    cluster whenever one of them comes first among the centers within
    ``t*delta/2`` of either and takes the full radius, so they are
    together with probability at least one over the number of such
    centers, even at ``t = 2``.

    """
    if not t >= 2:
        raise ValueError('random-shift clustering needs t >= 2, got %r' % t)
    domain = as_domain(domain)
    if len(domain) == 1:
        return Partition(domain, [0])
    reach = t * delta
    m = len(domain)
    radii = rng.uniform(reach / 4.0, reach / 2.0, size=m)
    radii[rng.random(m) < FULL_RADIUS_CHANCE] = reach / 2.0
    order = rng.permutation(m)
    inside = space.cross(domain, domain[order]) <= radii[order]
    return Partition(domain, inside.argmax(axis=1))

def strong_graph_decomposition(space, delta, t, rng):
    """Cluster a graph by exponentially shifted, truncated Dijkstra growth.

    Every vertex v draws a shift from an exponential distribution with
    mean ``t*delta / SHIFT_DIVISOR`` and starts growing at time ``-shift``;
    all vertices grow at once along graph edges, and each vertex joins
    whichever center reaches it first.  Growth stops ``t*delta/2`` from
    each center.  Every vertex starts its own growth, so every vertex is
    assigned, and each cluster holds a shortest-path tree of its center
    inside the cluster: clusters are connected with strong diameter at
    most ``t*delta``.

    """
    if not space.is_graph:
        raise ValueError('strong decompositions need a graph metric')
    n = space.n
    if n == 1:
        return Partition([0], [0])
    radius = t * delta / 2.0
    shifts = rng.exponential(t * delta / SHIFT_DIVISOR, size=n).tolist()
    graph = space.csgraph
    indptr = graph.indptr.tolist()
    neighbors = graph.indices.tolist()
    weights = graph.data.tolist()

    heap = [(-shifts[v], v, v, 0.0) for v in range(n)]
    heapq.heapify(heap)
    center_of = [-1] * n
    while heap:
        key, center, u, reached = heapq.heappop(heap)
        if center_of[u] >= 0:
            continue
        center_of[u] = center
        for k in range(indptr[u], indptr[u + 1]):
            v = neighbors[k]
            if center_of[v] >= 0:
                continue
            farther = reached + weights[k]
            if farther <= radius:
                heapq.heappush(heap, (farther - shifts[center], center,
                                      v, farther))
    return Partition(np.arange(n), center_of)
