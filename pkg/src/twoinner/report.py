"""Report documents: deterministic JSON and fixed-width tables."""

from __future__ import annotations

import json
import math

import numpy as np

from .reverse import BoundReport


def _num(x: float) -> str:
    if not math.isfinite(x):
        return "null"
    if x == int(x) and abs(x) < 1e15:
        return f"{x:.1f}"
    return format(x, ".17g")


def dumps(obj, indent: int = 2, _level: int = 0) -> str:
    """JSON text with every float written to 17 significant digits.

    Complex numbers become ``[re, im]`` pairs and non-finite floats
    ``null``; dict key order is preserved so equal inputs give equal bytes.
    """
    pad = " " * (indent * (_level + 1))
    end = " " * (indent * _level)
    if isinstance(obj, (bool, np.bool_)):
        return "true" if obj else "false"
    if obj is None:
        return "null"
    if isinstance(obj, (int, np.integer)):
        return str(int(obj))
    if isinstance(obj, (float, np.floating)):
        return _num(float(obj))
    if isinstance(obj, (complex, np.complexfloating)):
        return dumps([obj.real, obj.imag], indent, _level)
    if isinstance(obj, str):
        return json.dumps(obj)
    if isinstance(obj, np.ndarray):
        obj = obj.tolist()
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{pad}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + "\n" + end + "}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(isinstance(v, (int, float, bool, np.number)) or v is None for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [pad + dumps(v, indent, _level + 1) for v in obj]
        return "[\n" + ",\n".join(items) + "\n" + end + "]"
    raise TypeError(f"cannot serialize {type(obj).__name__}")


def bound_entry(rep: BoundReport, tol) -> dict:
    entry = {
        "id": rep.inequality_id,
        "lhs": rep.lhs,
        "rhs": rep.rhs,
        "slack": rep.slack,
        "hypothesis_ok": rep.hypothesis_ok,
        "residual": rep.residual,
        "constant": rep.constant_used,
        "chain": list(rep.chain),
        "tight": bool(rep.tight(tol)) if math.isfinite(rep.slack) else False,
        "passed": rep.ok,
    }
    for k, v in rep.extras.items():
        entry[k] = v
    return entry


def _cell(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "yes" if v else "no"
    if isinstance(v, (float, np.floating)):
        return "nan" if not math.isfinite(v) else f"{v:.6g}"
    if isinstance(v, (int, np.integer)):
        return str(v)
    if v is None:
        return "-"
    return str(v)


def table(rows: list[dict], columns: list[str]) -> str:
    """Fixed-width text table over ``columns`` of each row dict."""
    cells = [[_cell(r.get(c)) for c in columns] for r in rows]
    widths = [max([len(c)] + [len(row[i]) for row in cells]) for i, c in enumerate(columns)]
    line = "  ".join(c.ljust(w) for c, w in zip(columns, widths))
    out = [line, "  ".join("-" * w for w in widths)]
    out += ["  ".join(v.ljust(w) for v, w in zip(row, widths)) for row in cells]
    return "\n".join(out)
