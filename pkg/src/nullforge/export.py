"""Plain-text exporters: CSV polylines, Wavefront OBJ meshes and JSON dumps.

All numbers are written with 17 significant digits so doubles survive the
round trip, and output depends only on the input (byte-identical re-runs).
"""
from __future__ import annotations

import json
from pathlib import Path

import numpy as np

from .errors import ConfigError
from .pseudo_euclid import PEVector

FLOAT_FMT = "%.17g"


def _fmt(x) -> str:
    # + 0.0 folds -0.0 into 0.0
    return FLOAT_FMT % (float(x) + 0.0)


def _as_array(samples) -> np.ndarray:
    if isinstance(samples, np.ndarray):
        return samples.astype(float)
    return np.array([np.asarray(s, dtype=float) for s in samples], dtype=float)


def _write(path, text: str) -> Path:
    path = Path(path)
    with open(path, "w", encoding="ascii", newline="\n") as fh:
        fh.write(text)
    return path


def render_polyline_csv(xi, samples) -> str:
    """CSV text with header ``xi,c1,...`` and one row per sample.

    Raises:
        ValueError: fewer than two samples, mismatched lengths or mixed dimensions.
    """
    if isinstance(samples, (list, tuple)) and samples and isinstance(samples[0], PEVector):
        if len({len(s.coords) for s in samples}) != 1:
            raise ValueError("samples have mixed dimensions")
    pts = _as_array(samples)
    xi = np.asarray(xi, dtype=float).ravel()
    if pts.ndim != 2 or len(pts) < 2:
        raise ValueError("need at least 2 samples of uniform dimension, got shape %s" % (pts.shape,))
    if len(xi) != len(pts):
        raise ValueError("%d parameter values for %d samples" % (len(xi), len(pts)))
    dim = pts.shape[1]
    lines = ["xi," + ",".join("c%d" % (i + 1) for i in range(dim))]
    lines += [",".join([_fmt(t)] + [_fmt(c) for c in row]) for t, row in zip(xi, pts)]
    return "\n".join(lines) + "\n"


def export_polyline_csv(xi, samples, path) -> Path:
    return _write(path, render_polyline_csv(xi, samples))


def project(points: np.ndarray, drop) -> np.ndarray:
    """Drop coordinate ``drop`` (1-based) from 4D points; 3D points pass through."""
    dim = points.shape[-1]
    if dim == 3:
        if drop is not None:
            raise ConfigError("--project-drop only applies to 4D samples")
        return points
    if dim != 4:
        raise ConfigError("cannot export %dD points as a mesh" % dim)
    if drop is None:
        raise ConfigError("4D surface needs an explicit projection (drop one of coordinates 1-4)")
    drop = int(drop)
    if drop not in (1, 2, 3, 4):
        raise ConfigError("projection drop index must be 1, 2, 3 or 4, got %d" % drop)
    return np.delete(points, drop - 1, axis=-1)


def render_surface_obj(samples, project_drop=None) -> str:
    """OBJ text: vertices in row-major order, two triangles per grid cell.

    Faces are wound (i, j) -> (i+1, j) -> (i+1, j+1) and
    (i, j) -> (i+1, j+1) -> (i, j+1) with 1-based vertex indices.
    """
    pts = np.asarray(samples, dtype=float)
    if pts.ndim != 3 or pts.shape[0] < 2 or pts.shape[1] < 2:
        raise ValueError("need a grid of at least 2x2 points, got shape %s" % (pts.shape,))
    pts = project(pts, project_drop)
    n1, n2 = pts.shape[:2]
    out = ["# nullforge surface %dx%d" % (n1, n2)]
    out += ["v %s %s %s" % tuple(_fmt(c) for c in p) for p in pts.reshape(-1, 3)]
    for i in range(n1 - 1):
        for j in range(n2 - 1):
            a = i * n2 + j + 1
            b, c, d = a + n2, a + n2 + 1, a + 1
            out.append("f %d %d %d" % (a, b, c))
            out.append("f %d %d %d" % (a, c, d))
    return "\n".join(out) + "\n"


def export_surface_obj(samples, path, project_drop=None) -> Path:
    return _write(path, render_surface_obj(samples, project_drop))


def render_json(payload: dict) -> str:
    """Deterministic JSON; numpy arrays become nested lists."""
    def default(o):
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, np.generic):
            return o.item()
        if isinstance(o, PEVector):
            return list(o.coords)
        raise TypeError("not JSON serialisable: %r" % type(o))

    return json.dumps(payload, default=default, sort_keys=True, indent=1, allow_nan=False) + "\n"


def export_json(payload: dict, path) -> Path:
    return _write(path, render_json(payload))
