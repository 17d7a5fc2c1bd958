#!/usr/bin/env python
"""
Text, JSON and CSV rendering of command results.

Text uses 6 significant digits.  JSON and CSV carry the shortest
round-trip representation of every float and start with the package
version; infinite values are written as the strings "inf" / "-inf".
"""
import io
import csv
import json
import math

from tabulate import tabulate

from ..errors import OutputError

FORMATS = ('text', 'json', 'csv')


def _version():
    from .. import __version__
    return __version__


def _plain(val):
    "JSON / CSV value: floats by repr, non-finite floats as strings"
    if isinstance(val, float):
        if math.isnan(val):
            return 'nan'
        if math.isinf(val):
            return 'inf' if val > 0 else '-inf'
    return val


def _text_cell(val):
    "text value: floats with 6 significant digits"
    if val is None:
        return '-'
    if isinstance(val, float):
        return f'{val:.6g}'
    return str(val)


def _csv_cell(val):
    val = _plain(val)
    if val is None:
        return ''
    if isinstance(val, float):
        return repr(val)
    return val


class Report:
    """a command result: a title, scalar fields and an optional table"""
    def __init__(self, title, fields=None, columns=None, rows=None):
        self.title = title
        self.fields = dict(fields or {})
        self.columns = list(columns or [])
        self.rows = [list(r) for r in (rows or [])]

    def as_dict(self):
        out = {'version': _version(), 'command': self.title}
        out.update({k: _plain(v) for k, v in self.fields.items()})
        if self.columns:
            out['rows'] = [{c: _plain(v) for c, v in zip(self.columns, row)}
                           for row in self.rows]
        return out

    def to_json(self):
        return json.dumps(self.as_dict(), indent=2)

    def to_csv(self):
        buff = io.StringIO()
        writer = csv.writer(buff, lineterminator='\n')
        writer.writerow([f'# vrshuffle {_version()}'])
        if self.columns:
            writer.writerow(self.columns)
            for row in self.rows:
                writer.writerow([_csv_cell(v) for v in row])
        else:
            writer.writerow(list(self.fields.keys()))
            writer.writerow([_csv_cell(v) for v in self.fields.values()])
        return buff.getvalue()

    def to_text(self):
        lines = []
        if self.fields:
            lines.append(tabulate([[k, _text_cell(v)] for k, v in self.fields.items()],
                                  tablefmt='plain', disable_numparse=True))
        if self.columns:
            if lines:
                lines.append('')
            rows = [[_text_cell(v) for v in row] for row in self.rows]
            lines.append(tabulate(rows, self.columns, tablefmt='simple',
                                  disable_numparse=True))
        return '\n'.join(lines)

    def render(self, fmt):
        if fmt == 'json':
            return self.to_json()
        if fmt == 'csv':
            return self.to_csv()
        return self.to_text()


def write_report(report, fmt, out=None):
    """render report; print it, or write it to the file out"""
    text = report.render(fmt)
    if out is None:
        print(text)
        return
    try:
        with open(out, 'w') as fh:
            fh.write(text)
            if not text.endswith('\n'):
                fh.write('\n')
    except OSError as exc:
        raise OutputError(f"cannot write '{out}': {exc.strerror}")
