"""Deterministic JSON and CSV emission for CLI reports.

Reports must be byte-identical across runs with the same seed, so floats are
formatted to a fixed 17 significant digits, keys are emitted sorted, and the
one volatile value (timestamp plus wall time) is confined to a single
``"timestamp"`` key so consumers can drop that line when diffing.
"""

from __future__ import annotations

import json
import math
from datetime import datetime, timezone

VOLATILE_KEY = "timestamp"


def format_float(x: float) -> str:
    if math.isnan(x):
        return '"nan"'
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return f"{x:.17g}"


def dumps(value, indent: int = 0) -> str:
    """JSON text with sorted keys and fixed float formatting."""
    pad = "  " * indent
    inner = "  " * (indent + 1)
    if isinstance(value, dict):
        if not value:
            return "{}"
        keys = sorted(str(k) for k in value)
        original = {str(k): v for k, v in value.items()}
        items = [f'{inner}{json.dumps(k)}: {dumps(original[k], indent + 1)}' for k in keys]
        return "{\n" + ",\n".join(items) + "\n" + pad + "}"
    if isinstance(value, (list, tuple)):
        if not value:
            return "[]"
        items = [f"{inner}{dumps(v, indent + 1)}" for v in value]
        return "[\n" + ",\n".join(items) + "\n" + pad + "]"
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return format_float(value)
    if isinstance(value, int):
        return str(value)
    if value is None:
        return "null"
    return json.dumps(str(value))


def timestamp_line() -> str:
    return datetime.now(timezone.utc).strftime("%Y-%m-%dT%H:%M:%S.%fZ")


def render_report(payload: dict, wall_seconds: float) -> str:
    """Full report text; the volatile key carries both timestamp and wall time."""
    body = dict(payload)
    body[VOLATILE_KEY] = f"{timestamp_line()} wall_s={wall_seconds:.3f}"
    return dumps(body) + "\n"


def strip_volatile(text: str) -> str:
    """Report text with the volatile line removed, for byte comparison."""
    lines = [ln for ln in text.splitlines() if f'"{VOLATILE_KEY}"' not in ln]
    return "\n".join(lines) + "\n"


def render_csv(header: list[str], rows) -> str:
    """RFC-4180 CSV with fixed float formatting, no locale dependence."""

    def cell(x):
        if isinstance(x, float):
            return f"{x:.17g}"
        s = str(x)
        if any(ch in s for ch in ',"\n'):
            s = '"' + s.replace('"', '""') + '"'
        return s

    out = [",".join(header)]
    for row in rows:
        out.append(",".join(cell(x) for x in row))
    return "\r\n".join(out) + "\r\n"
