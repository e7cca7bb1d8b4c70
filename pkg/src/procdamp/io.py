"""CSV / JSON readers and writers. All writes go through a temp file and rename."""
from __future__ import annotations

import csv
import io
import json
import math
import os
import tempfile
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .core import SinusoidFit, Trace
from .engagement import EngagementLoop
from .errors import ParseError
from .forces import ForceSeries, LinearFit
from .surface import SurfaceProfile


def fmt(v) -> str:
    v = float(v)
    if v == 0:
        return "0"  # no "-0"
    return format(v, ".12g")


def atomic_write_text(path, text: str) -> Path:
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=path.parent, prefix=f".{path.name}.", suffix=".tmp")
    try:
        with os.fdopen(fd, "w", newline="") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise
    return path


def write_csv(path, header: Sequence[str], columns: Sequence[Sequence]) -> Path:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for row in zip(*columns):
        w.writerow([c if isinstance(c, str) else fmt(c) for c in row])
    return atomic_write_text(path, buf.getvalue())


def read_csv(path, required: Sequence[str] | None = None) -> dict[str, np.ndarray]:
    """
    Read a numeric CSV with a header row into column arrays.

    Raises ParseError (with the offending line number) on a missing or
    non-matching header, ragged rows, or non-numeric fields.
    """
    with open(path, newline="") as fh:
        rows = list(csv.reader(fh))
    if not rows or not rows[0]:
        raise ParseError("empty file, expected a header row", 1)
    header = [h.strip() for h in rows[0]]
    try:
        [float(h) for h in header]
    except ValueError:
        pass
    else:
        raise ParseError(f"missing header row (got numeric fields {header})", 1)
    if required is not None:
        missing = [r for r in required if r not in header]
        if missing:
            raise ParseError(f"header lacks column(s) {missing}; expected {list(required)}", 1)
    data = []
    for lineno, row in enumerate(rows[1:], start=2):
        if not row or all(not f.strip() for f in row):
            continue
        if len(row) != len(header):
            raise ParseError(f"expected {len(header)} fields, got {len(row)}", lineno)
        try:
            data.append([float(f) for f in row])
        except ValueError as exc:
            raise ParseError(str(exc), lineno) from None
    arr = np.array(data, dtype=float).reshape(-1, len(header))
    return {h: arr[:, i] for i, h in enumerate(header)}


# --- domain files ------------------------------------------------------------

def write_surface_csv(path, surface: SurfaceProfile) -> Path:
    return write_csv(path, ("x", "y"), (surface.x, surface.heights))


def read_surface_csv(path) -> SurfaceProfile:
    cols = read_csv(path, ("x", "y"))
    x = cols["x"]
    if x.size < 2:
        raise ParseError("surface needs at least 2 rows")
    dx = (x[-1] - x[0]) / (x.size - 1)
    if not np.allclose(np.diff(x), dx, rtol=1e-6, atol=1e-9):
        raise ParseError("surface x grid is not uniform")
    return SurfaceProfile(float(x[0]), float(dx), cols["y"])


def write_loop_csv(path, loop: EngagementLoop) -> Path:
    return write_csv(path, ("x", "tool_y", "contact"), (loop.x, loop.tool_y, loop.contact))


def read_loop_csv(path) -> dict[str, np.ndarray]:
    return read_csv(path, ("x", "tool_y", "contact"))


def read_force_csv(path) -> ForceSeries:
    cols = read_csv(path, ("x", "fx", "fy"))
    return ForceSeries(cols["x"], cols["fx"], cols["fy"])


def write_force_csv(path, forces: ForceSeries) -> Path:
    return write_csv(path, ("x", "fx", "fy"), (forces.x, forces.fx, forces.fy))


def write_trace_csv(path, trace: Trace, value_name: str | None = None) -> Path:
    return write_csv(path, ("x", value_name or trace.name or "value"), (trace.x, trace.values))


# --- fit records --------------------------------------------------------------

def fit_record(fit) -> dict:
    if isinstance(fit, SinusoidFit):
        return {"kind": "sinusoid", "wavelength": fit.wavelength, "intercept": fit.a0,
                "rms_error": fit.rms_residual, "coefficients": [fit.a0, fit.a1, fit.a2]}
    if isinstance(fit, LinearFit):
        return {"kind": "linear", "slope": fit.slope, "intercept": fit.intercept,
                "rms_error": fit.rms_error, "coefficients": [fit.intercept, fit.slope]}
    raise TypeError(f"not a fit: {fit!r}")


def fit_from_record(rec: Mapping):
    kind = rec.get("kind")
    if kind == "sinusoid":
        a0, a1, a2 = rec["coefficients"]
        return SinusoidFit(rec["wavelength"], a0, a1, a2, rec["rms_error"])
    if kind == "linear":
        return LinearFit(rec["slope"], rec["intercept"], rec["rms_error"])
    raise ParseError(f"unknown fit kind {kind!r}")


def _finite(obj):
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    if isinstance(obj, dict):
        return {k: _finite(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [_finite(v) for v in obj]
    return obj


def dumps(obj) -> str:
    return json.dumps(_finite(obj), indent=2, sort_keys=True) + "\n"


def write_json(path, obj) -> Path:
    return atomic_write_text(path, dumps(obj))


def read_fit_json(path):
    with open(path) as fh:
        try:
            rec = json.load(fh)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno) from None
    return fit_from_record(rec)
