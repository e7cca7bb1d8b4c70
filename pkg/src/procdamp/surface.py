"""
Machined surface left behind a vertically vibrating tool.

The tool is a point tip plus a straight relief face trailing behind it.
Material removal is the lower envelope of every footprint the tool occupies
while it advances along x, clamped to the undisturbed surface at y = 0.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Kinematics, ToolGeometry
from .errors import ConfigurationError, DomainError

DEFAULT_POINTS_PER_WAVELENGTH = 1000
MIN_POINTS_PER_WAVELENGTH = 200


@dataclass(frozen=True)
class SurfaceProfile:
    """Single-valued height field y(x) on a uniform grid x0 + i*dx."""

    x0: float
    dx: float
    heights: np.ndarray

    def __post_init__(self):
        h = np.array(self.heights, dtype=float)
        if not self.dx > 0:
            raise DomainError(f"dx must be positive, got {self.dx!r}")
        if h.ndim != 1 or h.size < 2:
            raise DomainError("heights must be a 1-D array with at least 2 samples")
        if not np.all(np.isfinite(h)):
            raise DomainError("heights must be finite")
        h.setflags(write=False)
        object.__setattr__(self, "heights", h)

    @property
    def x(self) -> np.ndarray:
        return self.x0 + self.dx * np.arange(self.heights.size)

    @property
    def x_end(self) -> float:
        return self.x0 + self.dx * (self.heights.size - 1)

    def height_at(self, x):
        """Linear interpolation of the height field; no extrapolation."""
        x = np.asarray(x, dtype=float)
        if np.any(x < self.x0 - 1e-9 * self.dx) or np.any(x > self.x_end + 1e-9 * self.dx):
            raise DomainError("x outside the surface extent")
        return np.interp(x, self.x, self.heights)

    @classmethod
    def flat(cls, x0: float, x1: float, dx: float, height: float = 0.0) -> "SurfaceProfile":
        n = int(round((x1 - x0) / dx)) + 1
        return cls(x0, dx, np.full(n, float(height)))


@dataclass(frozen=True)
class ToolFootprint:
    """Tip, relief-face end point and rake-face end point, all (x, y) in mils."""

    tip: tuple[float, float]
    relief_end: tuple[float, float]
    rake_end: tuple[float, float]

    def lower_boundary(self, x):
        """Height of the relief face at ``x``; NaN outside its span."""
        x = np.asarray(x, dtype=float)
        tx, ty = self.tip
        ex, ey = self.relief_end
        slope = (ey - ty) / (tx - ex)
        y = ty + (tx - x) * slope
        return np.where((x >= ex) & (x <= tx), y, np.nan)


def tool_tip_path(kin: Kinematics, x):
    """Tip height y = -feed + A sin(2 pi x / lambda + phase0)."""
    x = np.asarray(x, dtype=float)
    y = -kin.nominal_feed + kin.amplitude * np.sin(2.0 * math.pi * x / kin.wavelength + kin.phase0)
    return float(y) if y.ndim == 0 else y


def footprint_at(tool: ToolGeometry, tip, rake_length: float = 10.0) -> ToolFootprint:
    tx, ty = float(tip[0]), float(tip[1])
    g = tool.relief_angle
    relief_end = (tx - tool.relief_length * math.cos(g), ty + tool.relief_length * math.sin(g))
    # rake face leans forward by the rake angle from vertical
    a = math.pi / 2 - tool.rake_angle
    rake_end = (tx + rake_length * math.cos(a), ty + rake_length * math.sin(a))
    return ToolFootprint((tx, ty), relief_end, rake_end)


def check_grid(wl: float, extent: float, dx: float) -> None:
    if not extent > wl:
        raise ConfigurationError(f"extent {extent!r} must exceed one wavelength ({wl!r})")
    if not dx > 0 or dx > wl / MIN_POINTS_PER_WAVELENGTH * (1 + 1e-12):
        raise ConfigurationError(
            f"dx={dx!r} too coarse; need 0 < dx <= wavelength/{MIN_POINTS_PER_WAVELENGTH}")


def relief_offsets(tool: ToolGeometry, dx: float) -> int:
    """Number of whole grid steps covered by the relief face behind the tip."""
    return int(math.floor(tool.relief_run / dx + 1e-9))


def machined_surface(tool: ToolGeometry, kin: Kinematics, extent: float,
                     dx: float | None = None,
                     initial: SurfaceProfile | None = None) -> SurfaceProfile:
    """
    Sweep the tool over ``[0, extent]`` and return the surface it leaves.

    Tip positions are the grid nodes. At each node the result is the minimum
    of the free surface (or ``initial``), the tip height there, and every
    relief face whose span reaches back over the node.

    Parameters
    ----------
    tool, kin
        Cutter and motion.
    extent : float
        Length of cut [mils]; must exceed one wavelength.
    dx : float, optional
        Grid step; defaults to wavelength/1000 and may not exceed
        wavelength/200.
    initial : SurfaceProfile, optional
        Surface before the pass. Must share the grid. Defaults to y = 0.
    """
    wl = kin.wavelength
    if dx is None:
        dx = wl / DEFAULT_POINTS_PER_WAVELENGTH
    check_grid(wl, extent, dx)
    n = int(round(extent / dx)) + 1
    x = dx * np.arange(n)
    tip = tool_tip_path(kin, x)

    if initial is None:
        h = np.minimum(0.0, tip)
    else:
        if initial.heights.size != n or abs(initial.dx - dx) > 1e-12 * dx or initial.x0 != 0.0:
            raise ConfigurationError("initial surface must share the sweep grid")
        h = np.minimum(initial.heights, tip)

    rise = dx * math.tan(tool.relief_angle)
    for j in range(1, min(relief_offsets(tool, dx), n - 1) + 1):
        # relief face of the tip j nodes ahead, evaluated here
        np.minimum(h[:-j], tip[j:] + j * rise, out=h[:-j])
    return SurfaceProfile(0.0, dx, h)
