"""Plain-text sample formats.  Reals are written with 17 significant digits.

Blank lines and lines starting with ``#`` are skipped by every reader.
Errors name the offending file and line.
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from . import shapes
from .errors import InvalidInput
from .wasserstein import DiscreteMeasure

REAL = "%.17g"


def _rows(path):
    path = Path(path)
    try:
        text = path.read_text()
    except OSError as exc:
        raise InvalidInput(f"{path}: cannot read ({exc.strerror})") from exc
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith("#"):
            continue
        try:
            yield lineno, [float(tok) for tok in line.split(",")]
        except ValueError as exc:
            raise InvalidInput(f"{path}:{lineno}: not a comma-separated list of reals") from exc


def _table(path, width=None):
    rows = []
    for lineno, vals in _rows(path):
        if width is not None and len(vals) != width:
            raise InvalidInput(f"{path}:{lineno}: expected {width} columns, got {len(vals)}")
        if rows and len(vals) != len(rows[0][1]):
            raise InvalidInput(f"{path}:{lineno}: row length differs from line {rows[0][0]}")
        rows.append((lineno, vals))
    if not rows:
        raise InvalidInput(f"{path}: no data rows")
    return rows


def read_circle_csv(path) -> np.ndarray:
    """One angle per line."""
    return np.array([vals[0] for _, vals in _table(path, width=1)])


def write_circle_csv(path, angles) -> None:
    np.savetxt(path, np.atleast_1d(np.asarray(angles, dtype=float)), fmt=REAL)


def read_sphere_csv(path) -> np.ndarray:
    """One unit vector per line."""
    rows = _table(path)
    for lineno, vals in rows:
        if abs(np.linalg.norm(vals) - 1.0) > 1e-12:
            raise InvalidInput(f"{path}:{lineno}: vector does not have unit norm")
    return np.array([vals for _, vals in rows])


def write_sphere_csv(path, points) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(points, dtype=float)), fmt=REAL, delimiter=",")


def read_landmark_csv(path, m: int = 2, preprocess: bool = True) -> np.ndarray:
    """Configurations, one per line, as pre-shapes ``(n, m, k-1)``.

    With ``preprocess`` a row holds ``m * k`` raw coordinates, landmark by
    landmark; they are centred and scaled.  Without it a row holds
    ``vec`` of a pre-shape, ``m * (k-1)`` entries.
    """
    rows = _table(path)
    width = len(rows[0][1])
    if width % m:
        raise InvalidInput(f"{path}:{rows[0][0]}: {width} columns is not a multiple of m={m}")
    data = np.array([vals for _, vals in rows])
    if preprocess:
        raw = data.reshape(len(rows), width // m, m).transpose(0, 2, 1)
        return shapes.preshape(raw)
    configs = shapes.unvec_rows(data, m)
    for (lineno, _), cfg in zip(rows, configs):
        if abs(np.linalg.norm(cfg) - 1.0) > 1e-12:
            raise InvalidInput(f"{path}:{lineno}: pre-shape does not have unit norm")
    return configs


def write_landmark_csv(path, configs) -> None:
    """Write pre-shapes as ``vec`` rows (read back with ``preprocess=False``)."""
    np.savetxt(path, shapes.vec_rows(np.asarray(configs, dtype=float)), fmt=REAL, delimiter=",")


def read_measures_json(path) -> tuple[list[DiscreteMeasure], np.ndarray | None]:
    """``{"measures": [{support, weights}, ...], "weights": [...]}`` or a bare list."""
    path = Path(path)
    try:
        data = json.loads(path.read_text())
    except OSError as exc:
        raise InvalidInput(f"{path}: cannot read ({exc.strerror})") from exc
    except json.JSONDecodeError as exc:
        raise InvalidInput(f"{path}:{exc.lineno}: {exc.msg}") from exc
    if isinstance(data, list):
        data = {"measures": data}
    if not isinstance(data, dict) or "measures" not in data:
        raise InvalidInput(f"{path}:1: expected a list of measures or an object with 'measures'")
    measures = []
    for i, item in enumerate(data["measures"]):
        try:
            measures.append(DiscreteMeasure.from_dict(item))
        except InvalidInput as exc:
            raise InvalidInput(f"{path}: measure {i}: {exc}") from exc
    weights = data.get("weights")
    return measures, None if weights is None else np.asarray(weights, dtype=float)


def write_measures_json(path, measures, weights=None) -> None:
    payload = {"measures": [mu.to_dict() for mu in measures]}
    if weights is not None:
        payload["weights"] = [float(w) for w in weights]
    Path(path).write_text(json.dumps(payload, indent=2))

