# -*- coding: utf-8 -*-
"""Build light, sparse spanners of finite metrics from random decompositions.

A *t-spanner* of a finite metric space is a weighted graph over its
points in which every shortest path is at most ``t`` times longer than
the true distance.  This package builds spanners that are both *sparse*
(few edges) and *light* (total weight a small multiple of the minimum
spanning tree) for two kinds of input:

* Point sets under an ell-p norm, with ``1 <= p <= 2``.

* Connected graphs with positive edge weights, where the spanner is
  required to be a subgraph of the input.

The construction samples random partitions of the points at a ladder of
geometrically growing scales, and joins each cluster of each partition
to a single center.  How the partitions are drawn is up to a
*decomposition scheme*: ball carving for Euclidean points, hashing with
p-stable projections for any ell-p, randomly shifted balls around
randomly ordered centers for any metric at all, and exponentially
shifted clustering that keeps clusters connected inside a graph.

Nothing here takes randomness on faith.  Each scale checks, pair by
pair, that its partitions really did put every close pair of points
together at least once, and samples more partitions if not; so the
stretch bound below holds for every build, not just for most of them.
An evaluation module then measures the stretch exactly over all pairs.

Usage
-----

Metrics are normalized so that the smallest distance between two points
is 1, and the construction works in those units:

>>> from lightspan.api import PointSet, MetricSpace, normalize, mst
>>> square = PointSet([[0, 0], [2, 0], [0, 2], [2, 2]])
>>> space = normalize(MetricSpace(square))
>>> space.distance(0, 1)
1.0
>>> mst(space).weight_L
3.0

A build needs a scheme, the diameter blowup ``t`` of the scheme's
clusters, the scale step ``eps`` (between 0 and 1/8), and a NumPy random
generator.  Every pair of points is then guaranteed a stretch of at most
`effective_stretch()`:

>>> import numpy as np
>>> from lightspan.api import RandomShift, build_spanner, effective_stretch
>>> round(effective_stretch(0.1, 3), 3)
10.154
>>> rng = np.random.default_rng(7)
>>> space = normalize(MetricSpace(PointSet(rng.random((20, 2)))))
>>> spanner = build_spanner(space, RandomShift(3), 3, 0.1, rng)

The bound can be checked directly, which runs Dijkstra over the spanner
from every point:

>>> from lightspan.api import verify_stretch
>>> result = verify_stretch(space, spanner, effective_stretch(0.1, 3))
>>> result.passed
True

To aim for a stretch of ``t * (2 + eps)`` instead, ask
`lightspan.spanner.eps_for_stretch()` for the raw ``eps`` to build with.

Choosing a scheme
-----------------

==========================  ========================  ===========================
Scheme                      Input                     Notes
==========================  ========================  ===========================
``BallCarving(t)``          Euclidean point sets      ``t >= 2``
``PStableLsh(t, d, rng)``   ell-p point sets          calibrated once per build
``RandomShift(t)``          any metric                ``t >= 2``
``StrongGraph(t)``          graphs                    use `build_graph_spanner()`
==========================  ========================  ===========================

Only ``PStableLsh`` knows in advance how likely a close pair is to share
a cluster.  The other schemes measure it with a short pilot run at each
scale, then let the pair-by-pair check make up for any misjudgment.

When a scheme keeps close pairs of any subset ``Y`` together with
probability ``|Y| ** -beta``, build with
`build_spanner_subset_decomposable()`, which draws fewer partitions at
the coarser scales where the nets are small.

Sampling can be spread over worker processes by passing ``workers=4``
to any build function; the spanner comes out the same as a serial
build with the same generator.

Graphs
------

Graph inputs are normalized by their lightest edge, and their spanners
use only graph edges:

>>> from lightspan.api import WeightedGraph, StrongGraph, build_graph_spanner
>>> path = WeightedGraph(4, [(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)])
>>> space = normalize(MetricSpace(path))
>>> spanner = build_graph_spanner(space, StrongGraph(2), 2, 0.1, rng)
>>> sorted(spanner.edges)
[(0, 1, 1.0), (1, 2, 1.0), (2, 3, 1.0)]

Command line
------------

The ``lightspan`` script generates instances, builds and checks
spanners, probes how often a scheme keeps close pairs together, and
sweeps ``t`` across seeds into a CSV file::

    lightspan gen gaussian 64 4 2 --seed 7 --out points.txt
    lightspan build points.txt --scheme ball-carving --t 3 --out h.txt
    lightspan eval points.txt h.txt --t 3
    lightspan bench points.txt --scheme ball-carving --t 2,3,5,8

A build writes the edge list to ``OUT`` and, beside it, its scale-by-scale
log to ``OUT.log.json`` and its nets to ``OUT.nets.json``; with
``--partitions`` it also writes every sampled partition to
``OUT.partitions.json``.  ``eval`` reads the log back when it finds one
and reports ``nu`` from the deltas the build used.  ``--workers N``
spreads the sampling of ``build`` and ``bench`` over N processes.

It exits with 0 on success, 2 on invalid input, 3 when a spanner fails
its stretch bound, and 4 when sampling gives up after too many rounds.
Add ``-v`` or ``-vv`` to watch the build scale by scale.

Changelog
---------

| 2026-10-18 - 0.1 - Initial release.

"""
__version__ = '0.1'
