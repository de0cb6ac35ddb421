"""Deterministic CSV / JSON table output."""
from __future__ import annotations

import json
import math
import sys

import numpy as np


def fmt(x) -> str:
    """12 significant digits; inf/nan written as literals."""
    if isinstance(x, str):
        return x.replace(",", ";").replace("\n", " ")
    if isinstance(x, (bool, np.bool_)):
        return "true" if x else "false"
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    if x == 0:
        return "0"  # no signed zeros
    return format(x, ".12g")


def to_csv(columns, rows, config_json: str | None = None) -> str:
    lines = []
    if config_json is not None:
        lines.append(f"# config: {config_json}")
    lines.append("# columns: " + ",".join(columns))
    for row in rows:
        lines.append(",".join(fmt(v) for v in row))
    return "\n".join(lines) + "\n"


def _jval(x):
    if isinstance(x, str):
        return x
    x = float(x)
    if not math.isfinite(x):
        return fmt(x)
    return float(fmt(x))


def to_json(columns, rows, config: dict | None = None) -> str:
    doc = {"config": config, "rows": [{c: _jval(v) for c, v in zip(columns, row)} for row in rows]}
    return json.dumps(doc, indent=1, sort_keys=False) + "\n"


def read_csv(text: str):
    """Inverse of :func:`to_csv`: (config_json, columns, rows of strings)."""
    config = None
    columns = None
    rows = []
    for line in text.splitlines():
        if line.startswith("# config: "):
            config = line[len("# config: "):]
        elif line.startswith("# columns: "):
            columns = line[len("# columns: "):].split(",")
        elif line and not line.startswith("#"):
            rows.append(line.split(","))
    return config, columns, rows


def write(path: str | None, text: str) -> None:
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    with open(path, "w", encoding="utf-8", newline="\n") as fh:
        fh.write(text)
