"""
Force analysis: Merchant decomposition, fixed-wavelength sinusoid fits and
phase leads, crushing-force extraction from paired runs, and linear
force-vs-contact regression.
"""
from __future__ import annotations

import math
import re
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .core import SinusoidFit, Trace
from .errors import AlignmentError, DomainError, FitError, UndefinedPhaseError

_RANK_RTOL = 1e-10


@dataclass(frozen=True)
class ForceSeries:
    """Cutting (fx) and thrust (fy) force [lbf] sampled along x [mils]."""

    x: np.ndarray
    fx: np.ndarray
    fy: np.ndarray

    def __post_init__(self):
        arrs = [np.array(a, dtype=float) for a in (self.x, self.fx, self.fy)]
        if not (arrs[0].ndim == 1 and arrs[0].shape == arrs[1].shape == arrs[2].shape):
            raise DomainError("x, fx and fy must be 1-D and of equal length")
        if not all(np.all(np.isfinite(a)) for a in arrs):
            raise DomainError("force samples must be finite")
        for name, a in zip(("x", "fx", "fy"), arrs):
            a.setflags(write=False)
            object.__setattr__(self, name, a)

    def cutting(self) -> Trace:
        return Trace(self.x, self.fx, "lbf", name="fx")

    def thrust(self) -> Trace:
        return Trace(self.x, self.fy, "lbf", name="fy")


@dataclass(frozen=True)
class MerchantInputs:
    tau: float  # shear stress, lbf/mil^2
    w: float  # cutting width, mils
    phi: float

    def __post_init__(self):
        if not (self.tau > 0 and self.w > 0):
            raise DomainError("tau and w must be positive")
        if not 0 < self.phi < math.pi / 2:
            raise DomainError("phi must lie in (0, pi/2)")


@dataclass(frozen=True)
class LinearFit:
    slope: float
    intercept: float
    rms_error: float = 0.0

    def __post_init__(self):
        if not self.rms_error >= 0:
            raise DomainError("rms_error must be non-negative")

    def __call__(self, x):
        return self.slope * np.asarray(x, dtype=float) + self.intercept

    def equation(self, digits: int = 3) -> str:
        """Table-style rendering, e.g. ``Y = 1.132 * X - 1.539``."""
        sign = "-" if self.intercept < 0 else "+"
        return f"Y = {self.slope:.{digits}f} * X {sign} {abs(self.intercept):.{digits}f}"


_LINE_RE = re.compile(
    r"^\s*Y\s*=\s*([-+]?\d*\.?\d+(?:[eE][-+]?\d+)?)\s*\*\s*X\s*([-+])\s*(\d*\.?\d+(?:[eE][-+]?\d+)?)\s*$")


def parse_equation(text: str, rms_error: float = 0.0) -> LinearFit:
    """Inverse of :meth:`LinearFit.equation`."""
    m = _LINE_RE.match(text)
    if m is None:
        raise ValueError(f"not a fitted-line expression: {text!r}")
    b = float(m.group(3))
    return LinearFit(float(m.group(1)), -b if m.group(2) == "-" else b, rms_error)


# --- Merchant decomposition -------------------------------------------------

def resultant(fx: float, fy: float) -> tuple[float, float]:
    """Magnitude of the total force and its angle psi = arctan(fy/fx)."""
    if fx == 0 and fy == 0:
        raise DomainError("resultant of a zero force vector is undefined")
    return math.hypot(fx, fy), math.atan2(fy, fx)


def shear_force(fx: float, fy: float, phi: float) -> float:
    """Shear-plane force ||R|| cos(phi + psi)."""
    if not 0 <= phi < math.pi / 2:
        raise DomainError("phi must lie in [0, pi/2)")
    mag, psi = resultant(fx, fy)
    return mag * math.cos(phi + psi)


def shear_force_series(forces: ForceSeries, phi) -> Trace:
    """Vectorised :func:`shear_force` over a force series; ``phi`` scalar or per-sample."""
    phi = np.broadcast_to(np.asarray(phi, dtype=float), forces.x.shape)
    mag = np.hypot(forces.fx, forces.fy)
    if np.any(mag == 0):
        raise DomainError("zero force vector in series")
    return Trace(forces.x, mag * np.cos(phi + np.arctan2(forces.fy, forces.fx)), "lbf", name="fs")


def merchant_predict(inp: MerchantInputs, l: float) -> float:
    """Predicted shear-plane force tau * w * l."""
    if l < 0:
        raise DomainError("shear-plane length must be non-negative")
    return inp.tau * inp.w * l


# --- sinusoid fitting and phase ---------------------------------------------

def _lstsq(design: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, float]:
    sv = np.linalg.svd(design, compute_uv=False)
    if sv[-1] <= _RANK_RTOL * sv[0]:
        raise FitError("rank-deficient least-squares design")
    coef, *_ = np.linalg.lstsq(design, y, rcond=None)
    resid = y - design @ coef
    return coef, float(np.sqrt(np.mean(resid ** 2)))


def sinusoid_design(x, wl: float) -> np.ndarray:
    k = 2.0 * math.pi / wl
    x = np.asarray(x, dtype=float)
    return np.column_stack((np.ones_like(x), np.cos(k * x), np.sin(k * x)))


def fit_sinusoid(trace: Trace, wl: float) -> SinusoidFit:
    """
    Least-squares fit of a0 + a1 cos(2 pi x/wl) + a2 sin(2 pi x/wl).

    The wavelength is fixed, not fitted. The trace must hold at least 8
    samples covering one wavelength.
    """
    if not wl > 0:
        raise DomainError("wavelength must be positive")
    x = trace.x
    if x.size < 8:
        raise DomainError("need at least 8 samples to fit a sinusoid")
    span = x[-1] - x[0] + (x[-1] - x[0]) / (x.size - 1)
    if span < wl * (1 - 1e-9):
        raise DomainError("trace must span at least one wavelength")
    (a0, a1, a2), rms = _lstsq(sinusoid_design(x, wl), trace.values)
    return SinusoidFit(wl, float(a0), float(a1), float(a2), rms)


def fundamental_phase(fit: SinusoidFit) -> float:
    """Phase p of the fundamental written as r cos(2 pi x / wl + p)."""
    if fit.amplitude == 0:
        raise UndefinedPhaseError("fit has zero fundamental amplitude")
    return math.atan2(-fit.a2, fit.a1)


def wrap_angle(a):
    """Wrap to (-pi, pi]."""
    return math.pi - np.mod(math.pi - np.asarray(a, dtype=float), 2 * math.pi)


def phase_lead(a: SinusoidFit, b: SinusoidFit) -> float:
    """
    How far ``a`` leads ``b`` in phase, in (-pi, pi].

    Positive when ``a`` peaks at smaller x than ``b``.
    """
    if not math.isclose(a.wavelength, b.wavelength, rel_tol=1e-12):
        raise DomainError("phase lead needs fits at the same wavelength")
    return float(wrap_angle(fundamental_phase(a) - fundamental_phase(b)))


# --- crushing force ---------------------------------------------------------

def crushing_force(crush: Trace, nocrush: Trace) -> Trace:
    """
    Crushing run minus the non-crushing run on their common x range.

    The non-crushing trace is linearly interpolated onto the crushing run's
    abscissae; no extrapolation.
    """
    lo, hi = nocrush.x[0], nocrush.x[-1]
    keep = (crush.x >= lo) & (crush.x <= hi)
    if keep.sum() < 2:
        raise AlignmentError("traces do not overlap on at least two crushing-run samples")
    x = crush.x[keep]
    return Trace(x, crush.values[keep] - np.interp(x, nocrush.x, nocrush.values),
                 crush.unit, name="crushing_force")


# --- linear regression and summaries ----------------------------------------

def fit_linear(x, y) -> LinearFit:
    """Ordinary least squares y = m x + b with root-mean-square residual."""
    x = np.asarray(x, dtype=float)
    y = np.asarray(y, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise DomainError("x and y must be 1-D and of equal length")
    if x.size < 3:
        raise FitError("need at least 3 points for a linear fit")
    if np.ptp(x) == 0:
        raise FitError("x values are all equal")
    (b, m), rms = _lstsq(np.column_stack((np.ones_like(x), x)), y)
    return LinearFit(float(m), float(b), rms)


def slope_stats(fits: Sequence[LinearFit]) -> tuple[float, float]:
    """Sample mean and sample standard deviation of the slopes."""
    if len(fits) < 2:
        raise DomainError("need at least 2 fits")
    s = np.array([f.slope for f in fits])
    return float(s.mean()), float(s.std(ddof=1))


TRENDS = ("increasing", "decreasing", "indeterminate")


@dataclass(frozen=True)
class WavelengthTrend:
    wavelengths: tuple[float, ...]
    maxima: tuple[float, ...]
    trend: str

    @property
    def spread(self) -> float:
        """(max - min) / max of the per-wavelength maxima."""
        hi = max(self.maxima)
        return (hi - min(self.maxima)) / hi if hi else 0.0


def _ordinate(obj) -> np.ndarray:
    for attr in ("contact", "values"):
        if hasattr(obj, attr):
            return np.asarray(getattr(obj, attr), dtype=float)
    return np.asarray(obj, dtype=float)


def classify_trend(values: Sequence[float], rtol: float = 1e-9) -> str:
    """'increasing'/'decreasing' only if every successive difference agrees in sign."""
    v = np.asarray(values, dtype=float)
    d = np.diff(v)
    scale = np.max(np.abs(v)) if v.size else 0.0
    d[np.abs(d) <= rtol * scale] = 0.0
    if np.all(d > 0):
        return "increasing"
    if np.all(d < 0):
        return "decreasing"
    return "indeterminate"


def max_force_vs_wavelength(loops: Iterable, rtol: float = 1e-9) -> WavelengthTrend:
    """
    Per-wavelength maximum of a loop ordinate and its monotonic trend.

    ``loops`` yields ``(wavelength, loop)`` pairs; ``loop`` may be an
    engagement loop (contact), a Trace, or an array of ordinates.
    """
    pairs = sorted(((float(w), float(_ordinate(lp).max())) for w, lp in loops), key=lambda p: p[0])
    if len(pairs) < 2:
        raise DomainError("need at least 2 wavelengths")
    wls, mx = zip(*pairs)
    return WavelengthTrend(wls, mx, classify_trend(mx, rtol))
