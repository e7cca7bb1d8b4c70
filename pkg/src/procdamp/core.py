"""
Units, parameter types and small derived quantities shared by every module.

Lengths are in mils, angles in radians, forces in lbf. Cutting speed (SFM)
and vibration frequency (kHz) are only accepted at the boundary and are
converted here.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Literal

import numpy as np

from .errors import DomainError

MILS_PER_FOOT = 12_000.0
SECONDS_PER_MINUTE = 60.0
HZ_PER_KHZ = 1000.0

UNIT_TAGS = ("mils", "lbf", "radians", "dimensionless")

AmplitudeConvention = Literal["half", "peak_to_valley"]


def sfm_to_mils_per_second(speed: float) -> float:
    """Surface feet per minute to mils per second (x200)."""
    return speed * (MILS_PER_FOOT / SECONDS_PER_MINUTE)


def wavelength(speed: float, frequency: float) -> float:
    """
    Spatial wavelength cut by a tool vibrating while it translates.

    Parameters
    ----------
    speed : float
        Cutting speed V [SFM].
    frequency : float
        Vibration frequency nu [kHz].

    Returns
    -------
    float
        lambda = V / nu [mils].
    """
    if not (speed > 0 and frequency > 0):
        raise DomainError(f"speed and frequency must be positive, got {speed!r}, {frequency!r}")
    return sfm_to_mils_per_second(speed) / (frequency * HZ_PER_KHZ)


def frequency_for_wavelength(speed: float, wl: float) -> float:
    """Inverse of :func:`wavelength`; returns kHz."""
    if not (speed > 0 and wl > 0):
        raise DomainError(f"speed and wavelength must be positive, got {speed!r}, {wl!r}")
    return sfm_to_mils_per_second(speed) / wl / HZ_PER_KHZ


@dataclass(frozen=True)
class ToolGeometry:
    """Rigid cutter profile. Angles in radians, lengths in mils.

    ``relief_angle`` is the clearance of the relief face below horizontal,
    measured behind the tip. ``edge_radius`` is carried for reporting only.
    """

    rake_angle: float
    relief_angle: float
    relief_length: float
    edge_radius: float = 0.0

    def __post_init__(self):
        if not (0.0 < self.relief_angle < math.pi / 2):
            raise DomainError(f"relief_angle must lie in (0, pi/2), got {self.relief_angle!r}")
        if not self.relief_length > 0:
            raise DomainError(f"relief_length must be positive, got {self.relief_length!r}")
        if not self.edge_radius >= 0:
            raise DomainError(f"edge_radius must be non-negative, got {self.edge_radius!r}")

    @classmethod
    def from_degrees(cls, rake_deg: float, relief_deg: float, relief_length: float,
                     edge_radius: float = 0.0) -> "ToolGeometry":
        return cls(math.radians(rake_deg), math.radians(relief_deg), relief_length, edge_radius)

    @property
    def relief_run(self) -> float:
        """Horizontal extent of the relief face, L_r cos(gamma)."""
        return self.relief_length * math.cos(self.relief_angle)


@dataclass(frozen=True)
class Kinematics:
    """
    Cutting speed, vertical vibration and feed of one run.

    Parameters
    ----------
    cutting_speed : float
        V [SFM].
    vibration_frequency : float
        nu [kHz].
    vibration_amplitude : float
        Amplitude as quoted for the run [mils]. How it is read depends on
        ``amplitude_convention``: ``"half"`` stores the sine amplitude
        directly, ``"peak_to_valley"`` stores the full swing (twice the sine
        amplitude).
    nominal_feed : float
        Mean depth of the tip below the undisturbed surface [mils].
    amplitude_convention : {"half", "peak_to_valley"}
    phase0 : float
        Starting phase of the tip oscillation [rad].
    """

    cutting_speed: float
    vibration_frequency: float
    vibration_amplitude: float
    nominal_feed: float
    amplitude_convention: AmplitudeConvention = "half"
    phase0: float = 0.0

    def __post_init__(self):
        if not (self.cutting_speed > 0 and self.vibration_frequency > 0 and self.nominal_feed > 0):
            raise DomainError("cutting_speed, vibration_frequency and nominal_feed must be positive")
        if not self.vibration_amplitude >= 0:
            raise DomainError(f"vibration_amplitude must be non-negative, got {self.vibration_amplitude!r}")
        if self.amplitude_convention not in ("half", "peak_to_valley"):
            raise DomainError(f"unknown amplitude convention {self.amplitude_convention!r}")

    @classmethod
    def from_wavelength(cls, cutting_speed: float, wl: float, vibration_amplitude: float,
                        nominal_feed: float, **kw) -> "Kinematics":
        """Build kinematics for a target wavelength at fixed speed."""
        return cls(cutting_speed, frequency_for_wavelength(cutting_speed, wl),
                   vibration_amplitude, nominal_feed, **kw)

    @property
    def wavelength(self) -> float:
        return wavelength(self.cutting_speed, self.vibration_frequency)

    @property
    def amplitude(self) -> float:
        """Sine amplitude A of the tip path [mils]."""
        if self.amplitude_convention == "peak_to_valley":
            return 0.5 * self.vibration_amplitude
        return self.vibration_amplitude

    @property
    def peak_to_valley(self) -> float:
        return 2.0 * self.amplitude


def _readonly(a) -> np.ndarray:
    a = np.array(a, dtype=float)
    a.setflags(write=False)
    return a


@dataclass(frozen=True)
class Trace:
    """Sampled signal over x [mils] with a single unit tag for the ordinate."""

    x: np.ndarray
    values: np.ndarray
    unit: str = "dimensionless"
    name: str = field(default="", compare=False)

    def __post_init__(self):
        x = _readonly(self.x)
        v = _readonly(self.values)
        if x.ndim != 1 or v.shape != x.shape:
            raise DomainError("trace x and values must be 1-D arrays of equal length")
        if x.size < 2:
            raise DomainError("a trace needs at least 2 points")
        if not np.all(np.diff(x) > 0):
            raise DomainError("trace abscissae must be strictly increasing")
        if self.unit not in UNIT_TAGS:
            raise DomainError(f"unknown unit tag {self.unit!r}")
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "values", v)

    def __len__(self):
        return self.x.size


@dataclass(frozen=True)
class SinusoidFit:
    """a0 + a1 cos(2 pi x / wavelength) + a2 sin(2 pi x / wavelength)."""

    wavelength: float
    a0: float
    a1: float
    a2: float
    rms_residual: float = 0.0

    def __post_init__(self):
        if not self.wavelength > 0:
            raise DomainError(f"wavelength must be positive, got {self.wavelength!r}")
        if not self.rms_residual >= 0:
            raise DomainError("rms_residual must be non-negative")

    @property
    def amplitude(self) -> float:
        return math.hypot(self.a1, self.a2)

    def __call__(self, x):
        return evaluate_sinusoid(self, x)


def evaluate_sinusoid(fit: SinusoidFit, x):
    """Evaluate a fitted sinusoid at scalar or array ``x``."""
    kx = 2.0 * math.pi / fit.wavelength * np.asarray(x, dtype=float)
    y = fit.a0 + fit.a1 * np.cos(kx) + fit.a2 * np.sin(kx)
    return float(y) if y.ndim == 0 else y
