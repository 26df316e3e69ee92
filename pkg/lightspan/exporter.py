"""Export reports, build logs, nets, and partitions as JSON or CSV.

Every JSON document written here can be read back into the same value:
`report_from_json()` rebuilds an `EvalReport` field for field.

"""
import csv
import io
import json

from lightspan.evaluate import EvalReport
from lightspan.spanner import ScaleRecord

BENCH_HEADER = ('t', 'seed', 'edges', 'lightness', 'max_stretch', 'alpha',
                'millis')

_csv_fields = ('n', 't', 'eps', 'alpha', 'max_stretch_measured', 'argmax_u',
               'argmax_v', 'passed', 'lightness', 'edge_count', 'nu')

def build_log_to_list(build_log):
    """Return the build log as a list of plain dictionaries."""
    return [record._asdict() for record in build_log]

def build_log_to_json(build_log):
    return json.dumps(build_log_to_list(build_log), indent=1)

def build_log_from_list(rows):
    """Rebuild a build log, raising `ValueError` on rows of the wrong shape."""
    try:
        return tuple(ScaleRecord(**row) for row in rows)
    except TypeError as e:
        raise ValueError('malformed build log: %s' % e)

def report_to_json(report):
    """Serialize an `EvalReport` as a single JSON object."""
    fields = report._asdict()
    fields['argmax_pair'] = list(report.argmax_pair)
    fields['build_log'] = build_log_to_list(report.build_log)
    return json.dumps(fields, indent=1)

def report_from_json(text):
    """Rebuild the `EvalReport` that `report_to_json()` serialized."""
    fields = json.loads(text)
    fields['argmax_pair'] = tuple(fields['argmax_pair'])
    fields['build_log'] = build_log_from_list(fields['build_log'])
    return EvalReport(**fields)

def _number(value):
    if value is None:
        return ''
    if isinstance(value, bool):
        return 'true' if value else 'false'
    if isinstance(value, float):
        return repr(value)
    return str(value)

def report_to_csv(report):
    """Return a header line and one row of flat report fields."""
    fields = report._asdict()
    fields['argmax_u'], fields['argmax_v'] = report.argmax_pair
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(_csv_fields)
    writer.writerow([_number(fields[name]) for name in _csv_fields])
    return out.getvalue()

def bench_rows_to_csv(rows):
    """Return the bench CSV: `BENCH_HEADER` then one line per row tuple."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator='\n')
    writer.writerow(BENCH_HEADER)
    for row in rows:
        writer.writerow([_number(value) for value in row])
    return out.getvalue()

def nets_to_json(hierarchy):
    """Return the levels of a hierarchical net as JSON, finest first."""
    return json.dumps([{'radius': level.radius_r,
                        'members': list(level.members)}
                       for level in hierarchy.levels])

def _partition_dict(partition):
    return {'domain': partition.domain.tolist(),
            'clusters': partition.labels.tolist()}

def partition_to_json(partition):
    """Return a partition as JSON: its domain and one cluster id per point."""
    return json.dumps(_partition_dict(partition))

def partitions_to_json(scale_partitions):
    """Return the covering batch of every scale as JSON.

    ``scale_partitions`` holds ``(i, partitions)`` pairs, as a build
    keeps them in `Spanner.scale_partitions`.

    """
    return json.dumps([{'i': i,
                        'partitions': [_partition_dict(p) for p in batch]}
                       for i, batch in scale_partitions])
