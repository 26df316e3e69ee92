"""Command-line front end: ``lightspan gen|build|eval|probe|bench``.

Every command is a deterministic function of its inputs and ``--seed``.
The master seed is fanned out into named sub-streams with
`lightspan.functions.derive_rng()`, one per purpose (``gen``,
``calibrate``, ``build``, ``verify``, ``probe``).

"""
import argparse
import json
import logging
import os
import sys
from collections import namedtuple
from time import perf_counter

import numpy as np

from lightspan import generators
from lightspan.api import EXIT_CODES
from lightspan.decomp import (
    BallCarving, CapExceeded, DecompositionError, RandomShift, StrongGraph,
    cap_ratio_mc, close_pairs, empirical_cluster_probability,
)
from lightspan.evaluate import evaluate
from lightspan.exporter import (
    bench_rows_to_csv, build_log_from_list, build_log_to_json, nets_to_json,
    partitions_to_json, report_to_csv, report_to_json,
)
from lightspan.functions import derive_rng
from lightspan.io import dump_edges, dump_instance, load_instance, load_spanner_edges
from lightspan.lsh import PStableLsh
from lightspan.metric import MetricSpace, normalize
from lightspan.spanner import (
    Spanner, build_graph_spanner, build_spanner,
    build_spanner_subset_decomposable,
)

logger = logging.getLogger(__name__)

SCHEMES = ('ball-carving', 'lsh-pstable', 'random-shift', 'strong-graph')

RunConfig = namedtuple('RunConfig', 'command input scheme t eps beta seed'
                       ' trials workers out format')

class VerificationFailed(Exception):
    """A spanner did not meet its stretch bound."""

def _seed(text):
    value = int(text)
    if not 0 <= value < 2**64:
        raise argparse.ArgumentTypeError('seeds are 64-bit unsigned integers')
    return value

def _float_list(text):
    return [float(item) for item in text.split(',') if item]

def _seed_list(text):
    return [_seed(item) for item in text.split(',') if item]

def _workers(text):
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError('--workers needs at least 1')
    return value

def build_parser():
    parser = argparse.ArgumentParser(
        prog='lightspan',
        description='Build and verify light spanners of finite metrics.',
    )
    parser.add_argument('-v', '--verbose', action='count', default=0,
                        help='log progress (repeat for debug detail)')
    commands = parser.add_subparsers(dest='command')
    commands.required = True

    gen = commands.add_parser('gen', help='write a synthetic instance')
    gen.add_argument('kind', choices=('gaussian', 'hypercube', 'grid',
                                      'geometric-graph'))
    gen.add_argument('sizes', nargs='+', help='gaussian|hypercube: n d p;'
                     ' grid: k; geometric-graph: n radius')
    gen.add_argument('--seed', type=_seed, default=0)
    gen.add_argument('--out')

    build = commands.add_parser('build', help='build a spanner')
    build.add_argument('input')
    _add_scheme_flags(build)
    build.add_argument('--beta', type=float)
    build.add_argument('--workers', type=_workers, default=1,
                       help='processes that sample partitions')
    build.add_argument('--partitions', action='store_true',
                       help='also write every sampled partition to'
                       ' OUT.partitions.json')
    build.add_argument('--out', required=True)

    evaluate_ = commands.add_parser('eval', help='verify a spanner file')
    evaluate_.add_argument('input')
    evaluate_.add_argument('spanner')
    evaluate_.add_argument('--t', type=float, default=2.0)
    evaluate_.add_argument('--eps', type=float, default=0.1)
    evaluate_.add_argument('--seed', type=_seed, default=0)
    evaluate_.add_argument('--format', choices=('json', 'csv'),
                           default='json')
    evaluate_.add_argument('--out')

    probe = commands.add_parser('probe', help='measure how often close'
                                ' pairs share a cluster')
    probe.add_argument('input')
    _add_scheme_flags(probe)
    probe.add_argument('--scale', type=float, default=1.0,
                       help='the scale Delta, in units of the minimum'
                       ' distance')
    probe.add_argument('--pair', type=int, nargs=2)
    probe.add_argument('--pairs', type=int, default=20,
                       help='close pairs to sample when --pair is absent')
    probe.add_argument('--trials', type=int, default=200)
    probe.add_argument('--out')

    bench = commands.add_parser('bench', help='sweep t and seeds, write CSV')
    bench.add_argument('input')
    bench.add_argument('--scheme', choices=SCHEMES, default='random-shift')
    bench.add_argument('--t', type=_float_list, default=[2.0, 3.0, 5.0, 8.0])
    bench.add_argument('--eps', type=float, default=0.1)
    bench.add_argument('--seed', type=_seed_list, default=[1, 2, 3, 4, 5])
    bench.add_argument('--workers', type=_workers, default=1)
    bench.add_argument('--out')
    return parser

def _add_scheme_flags(parser):
    parser.add_argument('--scheme', choices=SCHEMES, default='random-shift')
    parser.add_argument('--t', type=float, default=2.0)
    parser.add_argument('--eps', type=float, default=0.1)
    parser.add_argument('--seed', type=_seed, default=0)

def run_config(args):
    """Return the `RunConfig` that describes parsed arguments."""
    return RunConfig(
        command=args.command,
        input=getattr(args, 'input', None),
        scheme=getattr(args, 'scheme', None),
        t=getattr(args, 't', None),
        eps=getattr(args, 'eps', None),
        beta=getattr(args, 'beta', None),
        seed=args.seed,
        trials=getattr(args, 'trials', None),
        workers=getattr(args, 'workers', None),
        out=getattr(args, 'out', None),
        format=getattr(args, 'format', None),
    )

def make_scheme(name, t, space, seed):
    """Return the decomposition scheme ``name`` for ``space``."""
    if name == 'strong-graph':
        if not space.is_graph:
            raise ValueError('the strong-graph scheme needs a graph input')
        return StrongGraph(t)
    if name == 'random-shift':
        return RandomShift(t)
    if space.is_graph:
        raise ValueError('the %s scheme needs a point-set input' % name)
    if name == 'ball-carving':
        if space.backing.p != 2.0:
            raise ValueError('ball carving needs a Euclidean (p = 2) input')
        return BallCarving(t)
    if name == 'lsh-pstable':
        return PStableLsh(t, space.backing.d, derive_rng(seed, 'calibrate'),
                          p=space.backing.p)
    raise ValueError('unknown scheme %r' % name)

def build(space, scheme_name, t, eps, seed, beta=None, workers=1,
          keep_partitions=False):
    """Build a spanner of the normalized ``space`` as the CLI does."""
    scheme = make_scheme(scheme_name, t, space, seed)
    rng = derive_rng(seed, 'build')
    options = dict(workers=workers, keep_partitions=keep_partitions)
    if space.is_graph and scheme_name == 'strong-graph':
        return build_graph_spanner(space, scheme, t, eps, rng, **options)
    if beta is not None:
        return build_spanner_subset_decomposable(
            space, lambda n_i: scheme, t, eps, beta, rng, **options)
    return build_spanner(space, scheme, t, eps, rng, **options)

def _load_space(path):
    with open(path) as f:
        return normalize(MetricSpace(load_instance(f)))

def _write(path, text):
    if path is None or path == '-':
        sys.stdout.write(text)
    else:
        with open(path, 'w') as f:
            f.write(text)

def cmd_gen(args):
    rng = derive_rng(args.seed, 'gen')
    sizes = args.sizes
    try:
        if args.kind in ('gaussian', 'hypercube'):
            n, d, p = int(sizes[0]), int(sizes[1]), float(sizes[2])
            extra = sizes[3:]
            make = getattr(generators, args.kind)
            backing = make(n, d, p, rng)
        elif args.kind == 'grid':
            extra = sizes[1:]
            backing = generators.grid(int(sizes[0]))
        else:
            extra = sizes[2:]
            backing = generators.geometric_graph(int(sizes[0]),
                                                 float(sizes[1]), rng)
    except IndexError:
        raise ValueError('too few sizes for %s' % args.kind)
    if extra:
        raise ValueError('too many sizes for %s' % args.kind)
    if args.out is None or args.out == '-':
        dump_instance(sys.stdout, backing)
    else:
        with open(args.out, 'w') as f:
            dump_instance(f, backing)

def cmd_build(args):
    space = _load_space(args.input)
    spanner = build(space, args.scheme, args.t, args.eps, args.seed,
                    args.beta, args.workers, args.partitions)
    logger.info('built %d edges on %d points', len(spanner.edges), space.n)
    with open(args.out, 'w') as f:
        dump_edges(f, spanner.unscaled(space).edges)
    with open(args.out + '.log.json', 'w') as f:
        f.write(build_log_to_json(spanner.build_log))
        f.write('\n')
    with open(args.out + '.nets.json', 'w') as f:
        if spanner.hierarchy is None:
            f.write('[]\n')
        else:
            f.write(nets_to_json(spanner.hierarchy) + '\n')
    if args.partitions:
        with open(args.out + '.partitions.json', 'w') as f:
            f.write(partitions_to_json(spanner.scale_partitions) + '\n')

def _load_build_log(spanner_path):
    path = spanner_path + '.log.json'
    if not os.path.exists(path):
        return ()
    with open(path) as f:
        return build_log_from_list(json.load(f))

def cmd_eval(args):
    space = _load_space(args.input)
    with open(args.spanner) as f:
        edges = load_spanner_edges(f)
    for u, v, w in edges:
        if not (0 <= u < space.n and 0 <= v < space.n) or u == v:
            raise ValueError('spanner edge (%d, %d) does not join two'
                             ' distinct points of the instance' % (u, v))
    scale = space.scale_factor
    spanner = Spanner(space.n, [(u, v, w * scale) for u, v, w in edges],
                      build_log=_load_build_log(args.spanner))
    report = evaluate(space, spanner, args.t, args.eps,
                      rng=derive_rng(args.seed, 'verify'))
    if args.format == 'csv':
        _write(args.out, report_to_csv(report))
    else:
        _write(args.out, report_to_json(report) + '\n')
    if not report.passed:
        raise VerificationFailed('max stretch %r exceeds the bound %r on pair'
                                 ' %r' % (report.max_stretch_measured,
                                          report.alpha, report.argmax_pair))

def cmd_probe(args):
    space = _load_space(args.input)
    scheme = make_scheme(args.scheme, args.t, space, args.seed)
    rng = derive_rng(args.seed, 'probe')
    delta = args.scale
    if args.pair is not None:
        pairs = [tuple(args.pair)]
    elif space.n == 1:
        pairs = [(0, 0)]
    else:
        rows, cols = close_pairs(space, np.arange(space.n), delta)
        if len(rows) > args.pairs:
            chosen = np.sort(rng.choice(len(rows), args.pairs, replace=False))
            rows, cols = rows[chosen], cols[chosen]
        pairs = list(zip(rows.tolist(), cols.tolist()))
    results = []
    for x, y in pairs:
        estimate, stderr = empirical_cluster_probability(
            scheme, space, (x, y), delta, args.trials, rng)
        result = {'pair': [x, y], 'distance': space.distance(x, y),
                  'estimate': estimate, 'stderr': stderr}
        if args.scheme == 'ball-carving':
            result['reference'] = cap_ratio_mc(
                space.backing.d, result['distance'], scheme.t * delta / 2.0,
                10**5, rng) / 2.0
        results.append(result)
    _write(args.out, json.dumps(results, indent=1) + '\n')

def cmd_bench(args):
    space = _load_space(args.input)
    rows = []
    for t in args.t:
        for seed in args.seed:
            start = perf_counter()
            spanner = build(space, args.scheme, t, args.eps, seed,
                            workers=args.workers)
            millis = (perf_counter() - start) * 1e3
            report = evaluate(space, spanner, t, args.eps,
                              rng=derive_rng(seed, 'verify'))
            rows.append((t, seed, report.edge_count, report.lightness,
                         report.max_stretch_measured, report.alpha,
                         round(millis, 3)))
            logger.info('t=%g seed=%d edges=%d nu=%s', t, seed,
                        report.edge_count, report.nu)
    _write(args.out, bench_rows_to_csv(rows))

_commands = {
    'gen': cmd_gen,
    'build': cmd_build,
    'eval': cmd_eval,
    'probe': cmd_probe,
    'bench': cmd_bench,
}

def main(argv=None):
    """Run the command line and return its exit code."""
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return 0 if e.code == 0 else 2
    level = [logging.WARNING, logging.INFO, logging.DEBUG][min(args.verbose,
                                                               2)]
    logging.basicConfig(level=level, stream=sys.stderr,
                        format='%(levelname)s %(name)s: %(message)s')
    logger.debug('%r', run_config(args))
    try:
        _commands[args.command](args)
    except (ValueError, OSError) as e:
        code, error = 2, e
    except VerificationFailed as e:
        code, error = 3, e
    except (CapExceeded, DecompositionError) as e:
        code, error = 4, e
    else:
        return 0
    sys.stderr.write('lightspan: %s: %s\n' % (EXIT_CODES[code], error))
    return code
