"""Exact measurement of spanner stretch, lightness, and sparsity."""

import logging
from collections import namedtuple
from math import fsum
from time import perf_counter

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import dijkstra

from lightspan.decomp import ADAPTIVE
from lightspan.functions import within
from lightspan.metric import mst
from lightspan.spanner import effective_stretch

logger = logging.getLogger(__name__)

VERIFY_LIMIT = 4096
SAMPLED_PAIRS = 10**4

StretchResult = namedtuple('StretchResult', 'max_stretch worst_pair passed')

EvalReport = namedtuple('EvalReport', 'n t eps alpha max_stretch_measured'
                        ' argmax_pair passed lightness edge_count build_log'
                        ' nu wall_times')

def spanner_graph(spanner):
    """Return the spanner as a symmetric CSR adjacency matrix."""
    n = spanner.n
    if not spanner.edges:
        return csr_matrix((n, n))
    u, v, w = (np.array(column) for column in zip(*spanner.edges))
    return csr_matrix((np.concatenate([w, w]),
                       (np.concatenate([u, v]), np.concatenate([v, u]))),
                      shape=(n, n))

def spanner_distances(spanner, sources=None):
    """Return shortest-path distances in the spanner from ``sources``."""
    return dijkstra(spanner_graph(spanner), directed=False, indices=sources)

def verify_stretch(space, spanner, bound, rng=None):
    """Measure the worst ratio of spanner distance to metric distance.

    Up to ``VERIFY_LIMIT`` points every pair is measured exactly.  Above
    it, ``SAMPLED_PAIRS`` random pairs are measured, drawn from ``rng``.
    A pair the spanner leaves disconnected has infinite stretch.  The
    check passes when the worst stretch is within ``bound`` up to a
    relative slack of 1e-9.

    """
    n = space.n
    if n < 2:
        raise ValueError('stretch needs at least two points')
    if spanner.n != n:
        raise ValueError('the spanner has %d points but the metric has %d'
                         % (spanner.n, n))
    if n <= VERIFY_LIMIT:
        rows, cols = np.triu_indices(n, 1)
        spanned = spanner_distances(spanner)[rows, cols]
        direct = space.matrix()[rows, cols]
    else:
        if rng is None:
            rng = np.random.default_rng(0)
        side = int(np.sqrt(SAMPLED_PAIRS))
        sources = rng.choice(n, side, replace=False)
        targets = rng.integers(0, n, size=(side, side))
        spanned_rows = spanner_distances(spanner, sources)
        direct_rows = space.cross(sources, np.arange(n))
        rows = np.repeat(sources, side)
        cols = targets.reshape(-1)
        picks = np.repeat(np.arange(side), side)
        keep = rows != cols
        rows, cols, picks = rows[keep], cols[keep], picks[keep]
        spanned = spanned_rows[picks, cols]
        direct = direct_rows[picks, cols]
        logger.info('verifying stretch on %d sampled pairs of %d points',
                    len(rows), n)
    ratios = spanned / direct
    worst = int(np.argmax(ratios))
    max_stretch = float(ratios[worst])
    pair = (int(rows[worst]), int(cols[worst]))
    passed = bool(np.isfinite(max_stretch) and within(max_stretch, bound))
    return StretchResult(max_stretch, pair, passed)

def lightness(spanner, mst_summary):
    """Return the spanner weight divided by the minimum spanning tree weight.

    A single point has an empty tree, and its lightness is defined as 1.

    """
    if mst_summary.weight_L == 0.0:
        return 1.0
    return spanner.weight / mst_summary.weight_L

def sparsity(spanner):
    """Return the number of spanner edges."""
    return len(spanner.edges)

def nu(delta, t):
    """Return ``1 / delta**t``.

    >>> nu(0.5, 3)
    8.0

    """
    return float(delta) ** -float(t)

def lightness_split(spanner, L):
    """Split the spanner weight at the scale ``L / n``.

    Returns ``(heavy, light)``: the weight of edges added at scales of
    at least ``L / n``, then the weight of the edges added below it.

    """
    threshold = L / float(spanner.n)
    heavy = fsum(w for (u, v, w), scale in zip(spanner.edges,
                                               spanner.edge_scales)
                 if scale >= threshold)
    light = fsum(w for (u, v, w), scale in zip(spanner.edges,
                                               spanner.edge_scales)
                 if scale < threshold)
    return heavy, light

def logged_delta(build_log):
    """Return the smallest delta any scale of ``build_log`` sampled with.

    Scales with fewer than two net points sample nothing and are skipped;
    a log with no sampled scale gives None.

    """
    used = [row.delta_used for row in build_log
            if row.delta_used is not None]
    return min(used) if used else None

def assemble_report(space, spanner, t, eps, stretch, mst_summary, delta=None,
                    wall_times=None):
    """Pack the measurements of one build into an `EvalReport`.

    ``nu`` comes from ``delta`` when a number is given, and otherwise
    from the deltas recorded in the spanner's build log.

    """
    if delta is None or delta == ADAPTIVE:
        delta = logged_delta(spanner.build_log)
    nu_value = None if delta is None else nu(delta, t)
    return EvalReport(
        n=space.n,
        t=float(t),
        eps=float(eps),
        alpha=effective_stretch(eps, t),
        max_stretch_measured=stretch.max_stretch,
        argmax_pair=stretch.worst_pair,
        passed=stretch.passed,
        lightness=lightness(spanner, mst_summary),
        edge_count=sparsity(spanner),
        build_log=tuple(spanner.build_log),
        nu=nu_value,
        wall_times=dict(wall_times or {}),
    )

def evaluate(space, spanner, t, eps, delta=None, rng=None, wall_times=None):
    """Verify ``spanner`` against its stretch bound and return a report."""
    wall_times = dict(wall_times or {})
    start = perf_counter()
    if space.n < 2:
        stretch = StretchResult(1.0, (0, 0), True)
    else:
        stretch = verify_stretch(space, spanner, effective_stretch(eps, t),
                                 rng)
    wall_times['verify'] = perf_counter() - start
    start = perf_counter()
    tree = mst(space)
    wall_times['mst'] = perf_counter() - start
    return assemble_report(space, spanner, t, eps, stretch, tree, delta,
                           wall_times)
