"""CSV files with a ``#``-prefixed metadata header.

Layout::

    # key: <json value>
    # ...
    col1,col2,...
    v1,v2,...

Floats are written with 17 significant digits (exact round trip) and
negative zero is normalised, so identical computations give identical bytes.
"""

import csv
import io
import json

import numpy as np


def _fmt(v):
    if isinstance(v, (bool, np.bool_)):
        return str(int(v))
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    if isinstance(v, (float, np.floating)):
        v = float(v) + 0.0
        return f"{v:.17g}"
    return str(v)


def format_csv(header, columns, rows):
    buf = io.StringIO()
    for key, value in header.items():
        buf.write(f"# {key}: {json.dumps(value, sort_keys=True)}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for row in rows:
        if len(row) != len(columns):
            raise ValueError(f"row has {len(row)} fields, expected {len(columns)}")
        w.writerow([_fmt(v) for v in row])
    return buf.getvalue()


def write_csv(path, header, columns, rows):
    text = format_csv(header, columns, rows)
    if path in (None, "-"):
        return text
    with open(path, "w", newline="") as fh:
        fh.write(text)
    return text


def _parse(v):
    try:
        return int(v)
    except ValueError:
        pass
    try:
        return float(v)
    except ValueError:
        return v


def parse_csv(text):
    """Return ``(header, columns, rows)``; numeric fields are converted."""
    header, body = {}, []
    for line in text.splitlines():
        if line.startswith("#"):
            key, _, value = line[1:].strip().partition(":")
            header[key.strip()] = json.loads(value)
        elif line:
            body.append(line)
    reader = csv.reader(body)
    columns = next(reader)
    rows = [[_parse(v) for v in row] for row in reader]
    return header, columns, rows


def read_csv(path):
    with open(path, newline="") as fh:
        return parse_csv(fh.read())


def body(text):
    """The non-header part of a CSV text."""
    return "\n".join(line for line in text.splitlines() if not line.startswith("#"))
