"""Locality-sensitive hashing, and partitions built from hash buckets.

A family is (r, cr, p1, p2)-sensitive when points within ``r`` collide
with probability at least ``p1`` and points farther than ``cr`` collide
with probability at most ``p2``.  Concatenating ``k`` independent hashes
raises both probabilities to the k-th power; `lsh_amplify()` picks the
smallest ``k`` that drives the far bound down to ``n**-2``.

Families here work in units of the scale: `LshFamily.draw()` divides
coordinates by the scale before hashing, so one family calibrated at
``r = 1`` serves every scale of a spanner build.

"""
from math import ceil, log, pi

import numpy as np

from lightspan.decomp import ADAPTIVE, Partition, as_domain, scheme_params

class LshFamily(object):
    """A hash family, its collision model, and its amplification length.

    ``p1`` and ``p2`` are the collision probabilities of one base hash;
    the amplified family hashes with ``k`` of them at once, giving the
    bounds `near_bound` and `far_bound`.  ``base`` is a callable
    ``base(rng, count)`` that returns a function mapping an ``(m, d)``
    array of coordinates to an ``(m, count)`` array of integer codes.

    """
    __slots__ = ('description', 'r', 'cr', 'p1', 'p2', 'k', 'base')

    def __init__(self, description, r, cr, p1, p2, k, base):
        p1 = float(p1)
        p2 = float(p2)
        if not 0.0 <= p2 <= p1 <= 1.0:
            raise ValueError('collision probabilities must satisfy'
                             ' 0 <= p2 <= p1 <= 1, got p1=%r p2=%r'
                             % (p1, p2))
        if int(k) < 1:
            raise ValueError('amplification length k must be positive')
        self.description = description
        self.r = float(r)
        self.cr = float(cr)
        self.p1 = p1
        self.p2 = p2
        self.k = int(k)
        self.base = base

    @property
    def rho(self):
        """The exponent ``log(1/p1) / log(1/p2)``."""
        if self.p1 >= 1.0 or self.p2 <= 0.0:
            return 0.0
        if self.p2 >= 1.0:
            return float('inf')
        return log(1.0 / self.p1) / log(1.0 / self.p2)

    @property
    def near_bound(self):
        return self.p1 ** self.k

    @property
    def far_bound(self):
        return self.p2 ** self.k

    def draw(self, rng, scale=1.0):
        """Draw one amplified hash for points measured at ``scale``."""
        codes = self.base(rng, self.k)

        def hash_points(points):
            return codes(np.asarray(points, dtype='float64') / scale)

        return hash_points

    def __repr__(self):
        return ('<LshFamily %s r=%r cr=%r p1=%.4g p2=%.4g k=%d>'
                % (self.description, self.r, self.cr, self.p1, self.p2,
                   self.k))

def amplification_length(p2, n):
    """Return the smallest ``k`` with ``p2**k <= n**-2``.

    >>> amplification_length(0.5, 16)
    8
    >>> amplification_length(0.25, 16)
    4

    """
    if not 0.0 <= p2 < 1.0:
        raise ValueError('amplification needs p2 < 1, got %r' % p2)
    if n < 2:
        raise ValueError('amplification needs n >= 2, got %r' % n)
    if p2 == 0.0:
        return 1
    target = float(n) ** -2.0
    k = max(1, int(ceil(log(float(n) ** 2.0) / log(1.0 / p2))))
    while p2 ** k > target:
        k += 1
    while k > 1 and p2 ** (k - 1) <= target:
        k -= 1
    return k

def lsh_amplify(base, n):
    """Return ``base`` amplified for a domain of ``n`` points."""
    k = amplification_length(base.p2, n)
    return LshFamily(base.description, base.r, base.cr, base.p1, base.p2,
                     k, base.base)

# ------------------------------------------------------------------------
#                           p-stable projections
#

def stable_sample(rng, p, size):
    """Draw symmetric ``p``-stable variates (Gaussian at 2, Cauchy at 1)."""
    if p == 2.0:
        return rng.standard_normal(size)
    if p == 1.0:
        return rng.standard_cauchy(size)
    theta = rng.uniform(-pi / 2.0, pi / 2.0, size)
    w = rng.exponential(1.0, size)
    return (np.sin(p * theta) / np.cos(theta) ** (1.0 / p)
            * (np.cos((1.0 - p) * theta) / w) ** ((1.0 - p) / p))

class _ProjectionHash(object):
    __slots__ = ('p', 'width', 'd')

    def __init__(self, p, width, d):
        self.p = p
        self.width = width
        self.d = d

    def __call__(self, rng, count):
        a = stable_sample(rng, self.p, (self.d, count))
        b = rng.uniform(0.0, self.width, count)
        width = self.width

        def codes(points):
            return np.floor((points.dot(a) + b) / width).astype('int64')

        return codes

def pstable_hash_family(p, width_w, d, rng, r=1.0, t=2.0, samples=10**4):
    """Return the projection family ``h(x) = floor((a.x + b) / w)``.

    Coordinates of ``a`` are i.i.d. ``p``-stable and ``b`` is uniform in
    ``[0, w)``.  The collision probabilities at distances ``r`` and
    ``t * r`` are measured by Monte Carlo: a pair at distance ``u``
    projects to a gap distributed as ``u * S`` for a standard p-stable
    ``S``, and it collides when ``0 <= S*u + b < w``.  Both distances
    are tested against the same draws of ``S`` and ``b``, which keeps
    ``p1 >= p2`` in every calibration.

    """
    p = float(p)
    if not 1.0 <= p <= 2.0:
        raise ValueError('p-stable hashing supports 1 <= p <= 2, got %r' % p)
    if not width_w > 0:
        raise ValueError('hash width must be positive, got %r' % width_w)
    if int(d) < 1:
        raise ValueError('dimension must be positive, got %r' % d)
    width_w = float(width_w)
    s = stable_sample(rng, p, samples)
    b = rng.uniform(0.0, width_w, samples)

    def rate(u):
        shifted = s * u + b
        return float(((shifted >= 0.0) & (shifted < width_w)).mean())

    description = 'pstable(p=%g, w=%g, d=%d)' % (p, width_w, d)
    return LshFamily(description, r, t * r, rate(r), rate(t * r), 1,
                     _ProjectionHash(p, width_w, int(d)))

def empirical_collision_rate(family, x, y, draws, rng, scale=1.0):
    """Return how often ``x`` and ``y`` share every code of a fresh hash."""
    points = np.array([x, y], dtype='float64')
    if points.ndim == 1:
        points = points.reshape(2, 1)
    together = 0
    for j in range(draws):
        codes = family.draw(rng, scale)(points)
        together += bool((codes[0] == codes[1]).all())
    return together / float(draws)

def lsh_to_partition(family, space, domain, delta, t, rng):
    """Partition ``domain`` by hash bucket, then evict far bucket-mates.

    Every point sharing its bucket with some point farther than
    ``t * delta`` becomes a singleton.  Evictions are decided against
    the original buckets and applied all at once.

    """
    domain = as_domain(domain)
    codes = family.draw(rng, delta)(space.coordinates(domain))
    buckets = np.unique(codes, axis=0, return_inverse=True)[1].reshape(-1)
    labels = buckets.copy()
    evicted = np.zeros(len(domain), dtype=bool)
    order = np.argsort(buckets, kind='stable')
    bounds = np.flatnonzero(np.diff(buckets[order])) + 1
    for members in np.split(order, bounds):
        if len(members) > 1:
            far = space.matrix(domain[members]) > t * delta
            evicted[members[far.any(axis=1)]] = True
    count = int(evicted.sum())
    labels[evicted] = buckets.max() + 1 + np.arange(count)
    return Partition(domain, labels)

class PStableLsh(object):
    """Decomposition by amplified p-stable hashing, for ell-p point sets.

    The base family is calibrated once at ``r = 1`` with far distance
    ``t`` and width ``width_factor`` (default ``t``), all in units of the
    scale.  For a domain of ``n`` points it is amplified for ``n``; a
    close pair then collides with probability at least ``near_bound``
    and is evicted with probability at most ``1/n``, and half the near
    bound is taken as the scheme's delta.

    """
    __slots__ = ('t', 'p', 'width_factor', 'base_family')
    name = 'lsh-pstable'

    def __init__(self, t, d, rng, p=2.0, width_factor=None, samples=10**4):
        if not t > 1:
            raise ValueError('LSH decompositions need t > 1, got %r' % t)
        self.t = float(t)
        self.p = float(p)
        self.width_factor = self.t if width_factor is None else float(
            width_factor)
        self.base_family = pstable_hash_family(self.p, self.width_factor, d,
                                               rng, 1.0, self.t, samples)

    def family_for(self, n):
        return lsh_amplify(self.base_family, max(int(n), 2))

    def params(self, n):
        near = self.family_for(n).near_bound
        if not near > 0.0:
            return scheme_params(self.t, ADAPTIVE)
        return scheme_params(self.t, min(1.0, near / 2.0))

    def sample(self, space, domain, delta, rng):
        if space.is_graph or space.backing.p != self.p:
            raise ValueError('this LSH scheme hashes ell-%g point sets, not'
                             ' %r' % (self.p, space.backing))
        domain = as_domain(domain)
        family = self.family_for(len(domain))
        return lsh_to_partition(family, space, domain, delta, self.t, rng)
