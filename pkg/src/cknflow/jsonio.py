"""Deterministic JSON/CSV emission.

Floats are always rendered with %.17g so identical inputs produce
byte-identical output across runs (json.dumps would use repr, which is
deterministic too, but we pin the format explicitly).
"""

import numpy as np


def fmt_float(x):
    if x != x:
        return "NaN"
    if x == float("inf"):
        return "Infinity"
    if x == float("-inf"):
        return "-Infinity"
    return "%.17g" % x


def dumps(obj, indent=None, _level=0):
    pad = "" if indent is None else "\n" + " " * (indent * (_level + 1))
    endpad = "" if indent is None else "\n" + " " * (indent * _level)
    sep = "," if indent is None else ","
    if obj is None:
        return "null"
    if obj is True:
        return "true"
    if obj is False:
        return "false"
    if isinstance(obj, str):
        out = obj.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n")
        return '"%s"' % out
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return fmt_float(float(obj))
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, (list, tuple)):
        items = [dumps(v, indent, _level + 1) for v in obj]
        if not items:
            return "[]"
        return "[" + pad + (sep + pad).join(items) + endpad + "]"
    colon = ":" if indent is None else ": "
    if isinstance(obj, dict):
        items = [
            dumps(str(k), indent, _level + 1) + colon + dumps(v, indent, _level + 1)
            for k, v in obj.items()
        ]
        if not items:
            return "{}"
        return "{" + pad + (sep + pad).join(items) + endpad + "}"
    raise TypeError(f"cannot serialize {type(obj)!r}")


def write_csv(path, header, rows):
    """Comma separated, '.' decimal, LF endings, floats at 17 significant digits."""
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    with open(path, "w", newline="") as fh:
        fh.write("\n".join(lines) + "\n")


def csv_string(header, rows):
    lines = [",".join(header)]
    for row in rows:
        lines.append(",".join(fmt_float(v) if isinstance(v, float) else str(v) for v in row))
    return "\n".join(lines) + "\n"
