"""Result serialization: CSV tables and JSON envelopes.

Every output embeds the canonicalized config snapshot so a result file
alone suffices to rerun the experiment.  CSV files carry the snapshot
in a single leading comment line (``# config-json: {...}``) followed by
one header line; floats are written with 17 significant digits so they
round-trip exactly.  JSON envelopes carry the same snapshot plus the
artifact version and wall time.
"""

from __future__ import annotations

import json
import math

import numpy as np

__all__ = [
    "ARTIFACT_VERSION",
    "format_float",
    "canonical_json",
    "write_csv",
    "read_csv",
    "write_envelope",
    "read_envelope",
]

ARTIFACT_VERSION = "1"


def format_float(x) -> str:
    """IEEE-754 round-trip decimal form (17 significant digits)."""
    x = float(x)
    if math.isnan(x):
        return "nan"
    if math.isinf(x):
        return "inf" if x > 0 else "-inf"
    return format(x, ".17g")


def canonical_json(obj) -> str:
    """Sorted-keys, minimal-separator JSON (canonical config echo)."""
    return json.dumps(obj, sort_keys=True, separators=(",", ":"))


def _cell(value) -> str:
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    if isinstance(value, (float, np.floating)):
        return format_float(value)
    text = str(value)
    if "," in text or '"' in text or "\n" in text:
        text = '"' + text.replace('"', '""') + '"'
    return text


def write_csv(path, header, rows, config=None):
    """Write a CSV table with an embedded config snapshot comment."""
    with open(path, "w", encoding="utf-8") as fh:
        if config is not None:
            fh.write(f"# config-json: {canonical_json(config)}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_cell(v) for v in row) + "\n")


def read_csv(path):
    """Read a CSV written by :func:`write_csv`.

    Returns (config or None, header, rows) with cells kept as strings.
    """
    config = None
    with open(path, encoding="utf-8") as fh:
        first = fh.readline().rstrip("\n")
        if first.startswith("# config-json: "):
            config = json.loads(first[len("# config-json: "):])
            header = fh.readline().rstrip("\n").split(",")
        else:
            header = first.split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    return config, header, rows


def write_envelope(path, config, payload, wall_time_s):
    """Write the JSON result envelope."""
    envelope = {
        "artifact_version": ARTIFACT_VERSION,
        "config": config,
        "wall_time_s": wall_time_s,
        "results": payload,
    }
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(envelope, fh, sort_keys=True, indent=1)
        fh.write("\n")


def read_envelope(path) -> dict:
    with open(path, encoding="utf-8") as fh:
        return json.load(fh)
