"""Greedy r-nets and nested hierarchical nets.

An r-net N of a point set packs (distinct members lie more than r
apart) and covers (every point lies within r of some member).  Nets
are built greedily in ascending point-index order, which makes them
deterministic.  A hierarchy is built coarsest level first, each finer
level seeded with the members of the level above, so the levels nest.

"""
from collections import namedtuple

import numpy as np

Net = namedtuple('Net', 'radius_r members')

class HierarchicalNet(object):
    """Nested nets, ``levels[0]`` finest, with radii ascending."""

    __slots__ = ('levels', '_top')

    def __init__(self, levels, n):
        self.levels = tuple(levels)
        top = np.full(n, -1, dtype='int64')
        for i, level in enumerate(self.levels):
            top[np.asarray(level.members, dtype='int64')] = i
        top.flags.writeable = False
        self._top = top

    @property
    def top_levels(self):
        """Array giving, for every point, the last level that holds it."""
        return self._top

    def __len__(self):
        return len(self.levels)

def build_net(space, r, seed_subset=None, domain=None):
    """Return a greedy ``r``-net of ``space`` (or of the subset ``domain``).

    Members of ``seed_subset`` are taken first and must already be more
    than ``r`` apart; then every remaining point, in ascending index
    order, joins if it lies more than ``r`` from all current members.

    """
    r = float(r)
    if not r > 0.0:
        raise ValueError('net radius must be positive, got %r' % r)
    if domain is None:
        domain = np.arange(space.n)
    else:
        domain = np.unique(np.asarray(domain, dtype='int64'))
    members = []
    covered = np.zeros(len(domain), dtype=bool)

    if seed_subset is not None and len(seed_subset):
        seeds = sorted(set(int(y) for y in seed_subset))
        if not np.isin(seeds, domain).all():
            raise ValueError('net seeds must be points of the domain')
        seed_matrix = space.matrix(seeds)
        np.fill_diagonal(seed_matrix, np.inf)
        if (seed_matrix <= r).any():
            i, j = np.argwhere(seed_matrix <= r)[0]
            raise ValueError('net seeds %d and %d lie %r apart, which'
                             ' violates packing at radius %r'
                             % (seeds[i], seeds[j], seed_matrix[i, j], r))
        members.extend(seeds)
        covered |= (space.cross(seeds, domain) <= r).any(axis=0)

    for position in range(len(domain)):
        if covered[position]:
            continue
        x = int(domain[position])
        members.append(x)
        covered |= space.distances_from(x, domain) <= r

    return Net(r, tuple(sorted(members)))

def build_hierarchy(space, radii):
    """Return the `HierarchicalNet` with one greedy net per radius.

    ``radii`` must be strictly ascending.  The coarsest net is built
    first and seeds the next finer one, so ``levels[i + 1]`` is always
    a subset of ``levels[i]``.

    """
    radii = [float(r) for r in radii]
    if not radii:
        raise ValueError('a hierarchy needs at least one radius')
    for smaller, larger in zip(radii, radii[1:]):
        if not smaller < larger:
            raise ValueError('hierarchy radii must be strictly ascending,'
                             ' but %r is followed by %r' % (smaller, larger))
    levels = []
    seeds = None
    for r in reversed(radii):
        net = build_net(space, r, seeds)
        levels.append(net)
        seeds = net.members
    levels.reverse()
    return HierarchicalNet(levels, space.n)

def net_level(hierarchy, x):
    """Return the highest level holding point ``x``, or -1 if none does."""
    return int(hierarchy.top_levels[x])

def check_net_size_bound(net, L):
    """Whether ``net`` obeys the size bound ``|N| <= 2L/r``."""
    return len(net.members) <= 2.0 * L / net.radius_r
