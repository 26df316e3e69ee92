"""Read and write the plain-text instance and spanner file formats.

A point-set file starts with a header ``p <exponent> d <dim>`` and then
lists one point per line as whitespace-separated decimal coordinates.
A graph file starts with ``graph <n>`` and then lists one edge per line
as ``u v w`` with 0-based vertex indices.  A spanner file is a bare edge
list in that same ``u v w`` layout.  Blank lines and lines starting
with ``#`` are ignored everywhere.

"""
from math import isfinite

from lightspan.metric import PointSet, WeightedGraph

POINTS_HEADER = 'p <exponent> d <dim>'
GRAPH_HEADER = 'graph <n>'
EDGE_LINE = '<u> <v> <w>'

error_message = """{0} format error

Each line of this file format has a fixed layout.  Line {1} does not
match.  Here is the layout it should have, followed by the line you
provided:

{2}
{3}"""

def _format_error(kind, lineno, layout, line):
    return ValueError(error_message.format(kind, lineno, layout, line))

def _content_lines(file):
    for lineno, line in enumerate(file, start=1):
        line = line.strip()
        if line and not line.startswith('#'):
            yield lineno, line

def _finite(text):
    value = float(text)
    if not isfinite(value):
        raise ValueError('not finite: %r' % text)
    return value

def load_instance(file):
    """Return the `PointSet` or `WeightedGraph` stored in ``file``.

    Raises `ValueError` if the header or any line does not match its
    layout, if a number is NaN or infinite, or if the data break the
    invariants of the point set or graph.

    """
    lines = _content_lines(file)
    try:
        lineno, header = next(lines)
    except StopIteration:
        raise ValueError('the instance file is empty')
    fields = header.split()
    if fields[0] == 'p':
        return _load_points(fields, lineno, header, lines)
    if fields[0] == 'graph':
        return _load_graph(fields, lineno, header, lines)
    raise _format_error('Instance header', lineno,
                        POINTS_HEADER + '   or   ' + GRAPH_HEADER, header)

def _load_points(fields, lineno, header, lines):
    try:
        if len(fields) != 4 or fields[2] != 'd':
            raise ValueError()
        p = _finite(fields[1])
        d = int(fields[3])
        if d < 1:
            raise ValueError()
    except ValueError:
        raise _format_error('Point-set header', lineno, POINTS_HEADER, header)

    layout = ' '.join(['<x>'] * d)
    points = []
    for lineno, line in lines:
        try:
            row = [_finite(field) for field in line.split()]
            if len(row) != d:
                raise ValueError()
        except ValueError:
            raise _format_error('Point-set', lineno, layout, line)
        points.append(row)
    if not points:
        raise ValueError('the point-set file lists no points')
    return PointSet(points, p)

def _load_graph(fields, lineno, header, lines):
    try:
        if len(fields) != 2:
            raise ValueError()
        n = int(fields[1])
    except ValueError:
        raise _format_error('Graph header', lineno, GRAPH_HEADER, header)
    return WeightedGraph(n, _edge_lines('Graph', lines))

def _edge_lines(kind, lines):
    edges = []
    for lineno, line in lines:
        fields = line.split()
        try:
            if len(fields) != 3:
                raise ValueError()
            edges.append((int(fields[0]), int(fields[1]), _finite(fields[2])))
        except ValueError:
            raise _format_error(kind, lineno, EDGE_LINE, line)
    return edges

def load_spanner_edges(file):
    """Return the ``(u, v, w)`` edge list stored in a spanner file."""
    return _edge_lines('Spanner', _content_lines(file))

def dump_instance(file, backing):
    """Write a `PointSet` or `WeightedGraph` to ``file``."""
    if isinstance(backing, PointSet):
        file.write('p %r d %d\n' % (backing.p, backing.d))
        for row in backing.points.tolist():
            file.write(' '.join(repr(x) for x in row))
            file.write('\n')
    elif isinstance(backing, WeightedGraph):
        file.write('graph %d\n' % backing.n)
        dump_edges(file, backing.edges)
    else:
        raise ValueError('cannot write %r as an instance' % (backing,))

def dump_edges(file, edges):
    """Write ``(u, v, w)`` edges to ``file``, one ``u v w`` line each."""
    for u, v, w in edges:
        file.write('%d %d %r\n' % (u, v, float(w)))
