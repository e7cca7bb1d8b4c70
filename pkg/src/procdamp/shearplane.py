"""
Sliding-line shear plane through a wavy free surface.

A straight line leaves the tool tip at a fixed angle phi and runs forward
and upward until it meets the surface y(x) = A sin(2 pi x / lambda + phase).
The tip rides at a constant depth below the mean surface. The shear-plane
length is the distance from the tip to the first crossing.
"""
from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import Trace
from .errors import DomainError, SearchWindowError

SCAN_STEPS_PER_WAVELENGTH = 10_000
# bisection stops once the shear-plane length is known to this many mils
LENGTH_TOL = 1e-10


@dataclass(frozen=True)
class WavySurfaceSpec:
    """Sinusoidal free surface seen from a tip at constant depth."""

    mean_depth: float
    amplitude: float
    wavelength: float
    phase: float = 0.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError("wavelength must be positive")
        if not self.amplitude >= 0:
            raise DomainError("amplitude must be non-negative")
        if not self.mean_depth > self.amplitude:
            raise DomainError("mean_depth must exceed the amplitude (tip always below the surface)")

    def height(self, x):
        return self.amplitude * np.sin(2.0 * math.pi * np.asarray(x, dtype=float) / self.wavelength + self.phase)

    def chip_thickness(self, x):
        """Uncut thickness directly above a tip at ``x``."""
        return self.mean_depth + self.height(x)

    @property
    def max_slope(self) -> float:
        return 2.0 * math.pi * self.amplitude / self.wavelength


def _check_phi(phi: float) -> None:
    if not (0.0 < phi < math.pi / 2 + 1e-15):
        raise DomainError(f"phi must lie in (0, pi/2], got {phi!r}")


def shear_length_flat(depth: float, phi: float) -> float:
    if not depth > 0:
        raise DomainError("depth must be positive")
    _check_phi(phi)
    return depth / math.sin(phi)


def _gap(surf: WavySurfaceSpec, tip_x: float, phi: float):
    """Surface height minus line height; positive while the line is submerged."""
    t = math.tan(phi)
    return lambda x: surf.height(x) + surf.mean_depth - (x - tip_x) * t


def _first_crossings(surf: WavySurfaceSpec, tips: np.ndarray, phi: float,
                     block: int = 64) -> np.ndarray:
    t = math.tan(phi)
    xtol = LENGTH_TOL * math.cos(phi)
    h = surf.wavelength / SCAN_STEPS_PER_WAVELENGTH
    # beyond this offset the line is above the highest crest
    span = (surf.mean_depth + surf.amplitude) / t
    u = h * np.arange(int(math.ceil(span / h)) + 2)
    out = np.empty(tips.size)
    for s in range(0, tips.size, block):
        tp = tips[s:s + block, None]
        fx = surf.height(tp + u) + surf.mean_depth - u * t
        below = fx <= 0.0
        i = np.argmax(below, axis=1)
        if not below[np.arange(i.size), i].all() or np.any(i == 0):
            raise SearchWindowError(f"no crossing found within {u[-1]:.6g} mils of the tip")
        a, b = u[i - 1], u[i]
        exact = fx[np.arange(i.size), i] == 0.0
        while np.max(b - a) > xtol:
            mid = 0.5 * (a + b)
            pos = surf.height(tp[:, 0] + mid) + surf.mean_depth - mid * t > 0.0
            a = np.where(pos, mid, a)
            b = np.where(pos, b, mid)
        out[s:s + block] = tp[:, 0] + np.where(exact, b, 0.5 * (a + b))
    return out


def first_crossing(surf: WavySurfaceSpec, tip_x: float, phi: float) -> float:
    """
    Smallest x* > tip_x where the line from the tip meets the surface.

    Bracketed by a scan with step wavelength/10^4, then refined by bisection
    until the shear-plane length is resolved to 1e-10 mils.
    """
    _check_phi(phi)
    if phi >= math.pi / 2:
        return float(tip_x)
    return float(_first_crossings(surf, np.array([float(tip_x)]), phi)[0])


def shear_length_wavy(surf: WavySurfaceSpec, tip_x: float, phi: float) -> float:
    """Distance from the tip to the first surface crossing along angle ``phi``."""
    _check_phi(phi)
    if phi >= math.pi / 2:
        return float(surf.chip_thickness(tip_x))
    return (first_crossing(surf, tip_x, phi) - tip_x) / math.cos(phi)


def _lengths(surf: WavySurfaceSpec, tips: np.ndarray, phi: float) -> np.ndarray:
    if phi >= math.pi / 2:
        return surf.chip_thickness(tips)
    return (_first_crossings(surf, tips, phi) - tips) / math.cos(phi)


def shear_length_series(surf: WavySurfaceSpec, phi: float, n: int = 256) -> Trace:
    """Shear-plane length at ``n`` uniform tip positions over one wavelength."""
    if n < 16:
        raise DomainError("need at least 16 tip positions")
    _check_phi(phi)
    tips = surf.wavelength * np.arange(n) / n
    return Trace(tips, _lengths(surf, tips, phi), "mils", name="shear_length")


def chip_thickness_series(surf: WavySurfaceSpec, n: int = 256) -> Trace:
    tips = surf.wavelength * np.arange(n) / n
    return Trace(tips, surf.chip_thickness(tips), "mils", name="chip_thickness")


def multiple_roots_possible(surf: WavySurfaceSpec, phi: float) -> bool:
    """True when some line at angle ``phi`` can be tangent to the surface."""
    return surf.max_slope > math.tan(phi)


def find_jumps(surf: WavySurfaceSpec, phi: float, n: int = 512,
               min_jump: float = 1e-6, refine: int = 60) -> list[float]:
    """
    Tip positions where the shear-plane length is discontinuous.

    Every neighbouring pair of samples whose difference is well above the
    typical step is narrowed by bisection on tip_x, keeping the half with the
    larger change. A jump survives only if it is still larger than
    ``min_jump`` once the tip interval has shrunk by 2^refine.
    """
    tips = surf.wavelength * np.arange(n + 1) / n
    lengths = _lengths(surf, tips, phi)
    steps = np.abs(np.diff(lengths))
    typical = float(np.median(steps))
    jumps = []
    for i in np.flatnonzero(steps > max(4.0 * typical, min_jump)):
        a, b = tips[i], tips[i + 1]
        la, lb = lengths[i], lengths[i + 1]
        for _ in range(refine):
            mid = 0.5 * (a + b)
            lm = shear_length_wavy(surf, mid, phi)
            if abs(lm - la) >= abs(lb - lm):
                b, lb = mid, lm
            else:
                a, la = mid, lm
            if b - a < 1e-12 * surf.wavelength:
                break
        if abs(lb - la) > min_jump:
            jumps.append(0.5 * (a + b))
    return jumps


def harmonic_amplitudes(trace: Trace, wl: float, orders=(1, 3)) -> dict[int, float]:
    """
    Amplitudes of selected harmonics by least squares on the basis
    {1, cos(j k x), sin(j k x) for j in 1..max(orders)}.
    """
    top = max(orders)
    k = 2.0 * math.pi / wl
    x = trace.x
    cols = [np.ones_like(x)]
    for j in range(1, top + 1):
        cols += [np.cos(j * k * x), np.sin(j * k * x)]
    coef, *_ = np.linalg.lstsq(np.column_stack(cols), trace.values, rcond=None)
    return {j: float(math.hypot(coef[2 * j - 1], coef[2 * j])) for j in orders}


def third_harmonic_ratio(trace: Trace, wl: float) -> float:
    """Third-harmonic amplitude relative to the fundamental; grows as the series turns triangular."""
    h = harmonic_amplitudes(trace, wl, (1, 3))
    return h[3] / h[1]


def length_phase_leads(surf: WavySurfaceSpec, phis, n: int = 128,
                       dphi: float = 0.01) -> np.ndarray:
    """
    Phase lead of the shear-plane length over the chip thickness, unwrapped,
    at each angle in ``phis``.

    At phi = pi/2 the line reads the chip thickness directly above the tip,
    so the lead is zero. The lead is tracked by continuation from there down
    through every requested angle in steps of at most ``dphi`` and unwrapped
    along the way, so leads beyond half a wavelength are not folded into lags.
    """
    from .forces import fit_sinusoid, phase_lead

    phis = np.atleast_1d(np.asarray(phis, dtype=float))
    for p in phis:
        _check_phi(float(p))
    chip = fit_sinusoid(chip_thickness_series(surf, n), surf.wavelength)
    lo = float(phis.min())
    steps = max(1, int(math.ceil((math.pi / 2 - lo) / dphi)))
    path = np.union1d(np.linspace(lo, math.pi / 2, steps + 1), phis)[::-1]
    wrapped = [0.0]
    for p in path[1:]:
        fit = fit_sinusoid(shear_length_series(surf, float(p), n), surf.wavelength)
        wrapped.append(phase_lead(fit, chip))
    unwrapped = np.unwrap(wrapped)
    return np.array([unwrapped[np.flatnonzero(path == p)[0]] for p in phis])


def length_phase_lead(surf: WavySurfaceSpec, phi: float, n: int = 128,
                      dphi: float = 0.01) -> float:
    """Single-angle form of :func:`length_phase_leads`."""
    return float(length_phase_leads(surf, [phi], n, dphi)[0])
