"""Tabular output: CSV with a commented header block, JSON manifest.

Data files are deterministic for a fixed (config, seed); the run
timestamp lives only in the manifest so reruns diff clean on the data.
"""

import hashlib
import json
import time
from pathlib import Path

import numpy as np


def config_hash(config: dict) -> str:
    blob = json.dumps(config, sort_keys=True, default=str).encode()
    return hashlib.sha256(blob).hexdigest()[:16]


def _fmt(x) -> str:
    if isinstance(x, (float, np.floating)):
        if np.isnan(x):
            return "nan"
        return f"{x:.12g}"
    return str(x)


def write_csv(path, columns: dict, header: dict = None):
    """Comma-separated columns with '# key: value' header lines."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    names = list(columns)
    arrays = [np.asarray(columns[k]).reshape(-1) for k in names]
    length = len(arrays[0])
    if any(len(a) != length for a in arrays):
        raise ValueError("columns differ in length")
    with open(path, "w") as f:
        for key, val in (header or {}).items():
            f.write(f"# {key}: {_fmt(val)}\n")
        f.write(",".join(names) + "\n")
        for i in range(length):
            f.write(",".join(_fmt(a[i]) for a in arrays) + "\n")
    return path


def write_sweep(path, result, header: dict = None):
    """A SweepResult as one row per grid point."""
    names, rows = result.rows()
    columns = {name: rows[:, k] for k, name in enumerate(names)}
    meta = {"sweep": result.name}
    meta.update(result.metadata)
    meta.update(header or {})
    return write_csv(path, columns, meta)


def write_manifest(path, payload: dict):
    """JSON manifest; carries the only timestamp of a run."""
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    body = dict(payload)
    body["timestamp"] = time.strftime("%Y-%m-%dT%H:%M:%S")
    with open(path, "w") as f:
        json.dump(body, f, indent=2, sort_keys=True, default=str)
        f.write("\n")
    return path
