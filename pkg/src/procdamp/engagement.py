"""
Relief-face / workpiece contact length and contact-vs-height loops.

Contact is measured as arc length along the relief face lying at or below
the surface that existed before the current tool position, i.e. the
envelope of all strictly earlier footprints.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Kinematics, ToolGeometry
from .errors import DegenerateLoopError, DomainError
from .surface import (DEFAULT_POINTS_PER_WAVELENGTH, SurfaceProfile, check_grid,
                      relief_offsets, tool_tip_path)


@dataclass(frozen=True)
class EngagementLoop:
    """Contact length sampled along the cut, ordered by x (time)."""

    x: np.ndarray
    tool_y: np.ndarray
    contact: np.ndarray
    wavelength: float
    tool: ToolGeometry

    def __post_init__(self):
        arrs = [np.array(a, dtype=float) for a in (self.x, self.tool_y, self.contact)]
        if not (arrs[0].ndim == 1 and arrs[0].shape == arrs[1].shape == arrs[2].shape):
            raise DomainError("loop arrays must be 1-D and of equal length")
        if np.any(np.diff(arrs[0]) <= 0):
            raise DomainError("loop samples must be ordered by x")
        c = arrs[2]
        if np.any(c < 0) or np.any(c > self.tool.relief_length * (1 + 1e-12)):
            raise DomainError("contact outside [0, relief_length]")
        for name, a in zip(("x", "tool_y", "contact"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    @property
    def max_contact(self) -> float:
        return float(self.contact.max())

    def cycles(self, min_points: int = 3):
        """Split into consecutive one-wavelength windows starting at x[0].

        Yields index arrays; trailing windows with fewer than ``min_points``
        samples are skipped.
        """
        idx = np.floor((self.x - self.x[0]) / self.wavelength + 1e-9).astype(int)
        for c in np.unique(idx):
            sel = np.flatnonzero(idx == c)
            if sel.size >= min_points:
                yield sel


def _submerged_run(xs: np.ndarray, d: np.ndarray) -> float:
    """Total x-length where the piecewise-linear ``d`` is >= 0."""
    w = np.diff(xs)
    a, b = d[:-1], d[1:]
    full = (a >= 0) & (b >= 0)
    down = (a >= 0) & (b < 0)
    up = (a < 0) & (b >= 0)
    run = w[full].sum()
    if down.any():
        run += (w[down] * a[down] / (a[down] - b[down])).sum()
    if up.any():
        run += (w[up] * b[up] / (b[up] - a[up])).sum()
    return float(run)


def contact_length(tool: ToolGeometry, surface: SurfaceProfile, tip) -> float:
    """
    Arc length of the relief face at or below ``surface``.

    ``surface`` must describe the workpiece before this tool position cuts
    it. The result is clamped to [0, relief_length].
    """
    tx, ty = float(tip[0]), float(tip[1])
    run = tool.relief_run
    tol = 1e-9 * surface.dx
    if tx - run < surface.x0 - tol or tx > surface.x_end + tol:
        raise DomainError(f"tip x={tx!r} leaves no room for the relief face inside the surface")
    xe = tx - run
    nodes = surface.x
    inner = nodes[(nodes > xe) & (nodes < tx)]
    xs = np.concatenate(([xe], inner, [tx]))
    s = np.interp(xs, nodes, surface.heights)
    r = ty + (tx - xs) * math.tan(tool.relief_angle)
    c = _submerged_run(xs, s - r) / math.cos(tool.relief_angle)
    return min(max(c, 0.0), tool.relief_length)


def engagement_loop(tool: ToolGeometry, kin: Kinematics, cycles: int = 3,
                    dx: float | None = None, keep_transient: bool = False) -> EngagementLoop:
    """
    Sweep the tool over ``cycles`` wavelengths of fresh workpiece, recording
    contact length at every grid step.

    The surface is updated incrementally; the contact at step k is measured
    against the surface left by steps 0..k-1. The first cycle is dropped
    unless ``keep_transient`` is set.
    """
    if cycles < 2:
        raise DomainError("need at least 2 cycles (the first is discarded)")
    wl = kin.wavelength
    if dx is None:
        dx = wl / DEFAULT_POINTS_PER_WAVELENGTH
    extent = cycles * wl
    check_grid(wl, extent, dx)
    n = int(round(extent / dx)) + 1
    x = dx * np.arange(n)
    tip = tool_tip_path(kin, x)

    t = math.tan(tool.relief_angle)
    cos_g = math.cos(tool.relief_angle)
    run = tool.relief_run
    m = relief_offsets(tool, dx)
    frac = (run - m * dx) / dx  # relief end sits this far past node k-m
    rel = dx * t * np.arange(m, -1, -1)  # relief rise above tip at nodes k-m..k

    h = np.zeros(n)
    contact = np.empty(n)
    for k in range(n):
        lo = k - m
        if lo >= 0:
            r = tip[k] + rel
            s = h[lo:k + 1].copy()
            xs = x[lo:k + 1]
        else:
            r = tip[k] + rel[-lo:]
            s = h[:k + 1].copy()
            xs = x[:k + 1]
        s[-1] = min(s[-1], tip[k])
        d = s - r
        if lo >= 1 and frac > 1e-12:
            se = h[lo] + (h[lo - 1] - h[lo]) * frac
            de = se - (tip[k] + run * t)
            d = np.concatenate(([de], d))
            xs = np.concatenate(([x[k] - run], xs))
        if d.size >= 2 and d.max() >= 0:
            c = _submerged_run(xs, d) / cos_g
        else:
            c = 0.0
        contact[k] = min(c, tool.relief_length)
        seg = h[max(lo, 0):k + 1]
        np.minimum(seg, r, out=seg)

    keep = slice(None) if keep_transient else x >= wl - 1e-9 * dx
    return EngagementLoop(x[keep], tip[keep], contact[keep], wl, tool)


def loop_orientation(loop: EngagementLoop) -> np.ndarray:
    """
    Shoelace signed area of the (tool_y, contact) polygon, one per cycle.

    Positive means counterclockwise with increasing x.
    """
    areas = []
    for sel in loop.cycles():
        p = np.column_stack((loop.tool_y[sel], loop.contact[sel]))
        if np.unique(p, axis=0).shape[0] < 3 or np.linalg.matrix_rank(p - p.mean(axis=0), tol=1e-12) < 2:
            raise DegenerateLoopError("loop cycle has fewer than 3 non-collinear points")
        u, v = p[:, 0], p[:, 1]
        areas.append(0.5 * float(np.dot(u, np.roll(v, -1)) - np.dot(np.roll(u, -1), v)))
    if not areas:
        raise DegenerateLoopError("loop has no cycle with at least 3 points")
    return np.array(areas)


def downstroke_onset(loop: EngagementLoop, threshold: float = 0.0) -> np.ndarray:
    """
    Tool height at which contact first exceeds ``threshold`` after the crest
    of each cycle's tip path. NaN for a cycle with no contact.
    """
    out = []
    for sel in loop.cycles():
        y, c = loop.tool_y[sel], loop.contact[sel]
        crest = int(np.argmax(y))
        hit = np.flatnonzero(c[crest:] > threshold)
        out.append(y[crest + hit[0]] if hit.size else np.nan)
    return np.array(out)


def predicted_onset_height(tool: ToolGeometry, kin: Kinematics) -> float | None:
    """
    Tip height where the descending path first gets steeper than the relief
    face, assuming the tip never leaves the material. None if it never does.
    """
    a = kin.amplitude
    if a == 0:
        return None
    c = -math.tan(tool.relief_angle) * kin.wavelength / (2 * math.pi * a)
    if c <= -1:
        return None
    return -kin.nominal_feed + a * math.sqrt(1.0 - c * c)
