"""Deterministic artifact writers with provenance headers.

Every file begins with comment lines recording the tool version, the
constants set, and the fully resolved configuration as canonical JSON, so
a file's header is sufficient to reproduce it. Floats are rendered with
repr (shortest round-trip form) and writes are atomic (temp file plus
rename). No timestamps anywhere: identical runs produce identical bytes.
"""

from __future__ import annotations

import json
import os
from pathlib import Path

import numpy as np

from .core import CONSTANTS

__version__ = "0.1.0"

__all__ = [
    "__version__",
    "canonical_json",
    "format_value",
    "write_csv",
    "write_json",
    "read_header",
]


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":"), allow_nan=True)


def format_value(v) -> str:
    if isinstance(v, (np.floating, np.integer)):
        v = v.item()
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def _header_lines(config: dict | None) -> list[str]:
    lines = [
        f"# levqsim {__version__}",
        f"# constants: {CONSTANTS.label}",
    ]
    if config is not None:
        lines.append(f"# config: {canonical_json(config)}")
    return lines


def _atomic_write(path: Path, text: str):
    path.parent.mkdir(parents=True, exist_ok=True)
    tmp = path.with_name(path.name + ".tmp")
    tmp.write_text(text)
    os.replace(tmp, path)


def write_csv(path, columns, rows, config: dict | None = None) -> Path:
    """Write a provenance-headed CSV; rows are iterables matching columns."""
    path = Path(path)
    lines = _header_lines(config)
    lines.append(",".join(columns))
    for row in rows:
        lines.append(",".join(format_value(v) for v in row))
    _atomic_write(path, "\n".join(lines) + "\n")
    return path


def write_json(path, payload, config: dict | None = None) -> Path:
    """Write a JSON artifact with the same provenance fields embedded."""
    path = Path(path)
    doc = {
        "tool": f"levqsim {__version__}",
        "constants": CONSTANTS.label,
    }
    if config is not None:
        doc["config"] = config
    doc["data"] = payload
    _atomic_write(path, json.dumps(doc, sort_keys=True, indent=2) + "\n")
    return path


def read_header(path) -> dict:
    """Parse the provenance header of a CSV artifact back into a dict."""
    out = {}
    with open(path) as fh:
        for line in fh:
            if not line.startswith("#"):
                break
            body = line[1:].strip()
            if body.startswith("levqsim"):
                out["version"] = body.split(" ", 1)[1]
            elif body.startswith("constants:"):
                out["constants"] = body.split(":", 1)[1].strip()
            elif body.startswith("config:"):
                out["config"] = json.loads(body.split(":", 1)[1])
    return out
