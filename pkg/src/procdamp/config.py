"""
Flat key = value run configuration with dotted keys.

Example::

    tool.rake_angle_deg = 10
    tool.relief_angle_deg = 6
    tool.relief_length = 100
    kinematics.speed_sfm = 2680
    kinematics.frequency_khz = 6.7
    kinematics.amplitude = 3
    kinematics.amplitude_convention = half
    kinematics.feed = 1

Angles are given in degrees here and converted to radians. Either
``kinematics.frequency_khz`` or ``kinematics.wavelength`` sets the vibration.
"""
from __future__ import annotations

import configparser
import math
from dataclasses import dataclass, field, replace
from pathlib import Path

from .core import Kinematics, ToolGeometry, frequency_for_wavelength
from .errors import ConfigurationError, ProcDampError
from .surface import DEFAULT_POINTS_PER_WAVELENGTH

_SECTION = "run"

KNOWN_KEYS = {
    "tool.rake_angle_deg", "tool.relief_angle_deg", "tool.relief_length", "tool.edge_radius",
    "kinematics.speed_sfm", "kinematics.frequency_khz", "kinematics.wavelength",
    "kinematics.amplitude", "kinematics.amplitude_convention", "kinematics.feed",
    "kinematics.phase0_deg",
    "grid.dx", "grid.points_per_wavelength", "grid.extent", "grid.cycles",
    "sweep.wavelengths", "sweep.relief_lengths",
    "shearplane.mean_depth", "shearplane.amplitude", "shearplane.wavelength",
    "shearplane.phase_deg", "shearplane.phi", "shearplane.samples",
    "io.inputs", "io.out_dir", "io.format",
    "run.seed", "run.workers",
}


@dataclass(frozen=True)
class GridConfig:
    dx: float | None = None
    points_per_wavelength: int = DEFAULT_POINTS_PER_WAVELENGTH
    extent: float | None = None
    cycles: int = 3

    def step(self, wl: float) -> float:
        return self.dx if self.dx is not None else wl / self.points_per_wavelength

    def length(self, wl: float) -> float:
        return self.extent if self.extent is not None else self.cycles * wl


@dataclass(frozen=True)
class IOConfig:
    inputs: tuple[str, ...] = ()
    out_dir: str = "."
    format: str = "csv"


@dataclass(frozen=True)
class RunConfig:
    tool: ToolGeometry | None = None
    kinematics: Kinematics | None = None
    grid: GridConfig = field(default_factory=GridConfig)
    io: IOConfig = field(default_factory=IOConfig)
    sweep_wavelengths: tuple[float, ...] = ()
    sweep_relief_lengths: tuple[float, ...] = ()
    shearplane: dict = field(default_factory=dict)
    seed: int = 0
    workers: int = 1

    def require_tool(self) -> ToolGeometry:
        if self.tool is None:
            raise ConfigurationError("config lacks tool.* settings")
        return self.tool

    def require_kinematics(self) -> Kinematics:
        if self.kinematics is None:
            raise ConfigurationError("config lacks kinematics.* settings")
        return self.kinematics


def _floats(text: str) -> tuple[float, ...]:
    return tuple(float(t) for t in text.replace(";", ",").split(",") if t.strip())


def parse_config(text: str) -> RunConfig:
    cp = configparser.ConfigParser(interpolation=None, inline_comment_prefixes=("#",))
    cp.optionxform = str
    try:
        cp.read_string(f"[{_SECTION}]\n{text}")
    except configparser.Error as exc:
        raise ConfigurationError(f"malformed config: {exc}") from None
    if cp.sections() != [_SECTION]:
        raise ConfigurationError("config is a flat key = value file; section headers are not allowed")
    kv = dict(cp[_SECTION])
    unknown = sorted(set(kv) - KNOWN_KEYS)
    if unknown:
        raise ConfigurationError(f"unknown config key(s): {', '.join(unknown)}")
    try:
        return _build(kv)
    except ConfigurationError:
        raise
    except (ValueError, ProcDampError) as exc:
        raise ConfigurationError(str(exc)) from None


def _build(kv: dict[str, str]) -> RunConfig:
    def num(key, default=None):
        return float(kv[key]) if key in kv else default

    tool = None
    if "tool.relief_angle_deg" in kv or "tool.relief_length" in kv:
        tool = ToolGeometry.from_degrees(num("tool.rake_angle_deg", 0.0), num("tool.relief_angle_deg"),
                                         num("tool.relief_length"), num("tool.edge_radius", 0.0))

    kin = None
    if "kinematics.speed_sfm" in kv:
        speed = num("kinematics.speed_sfm")
        if ("kinematics.frequency_khz" in kv) == ("kinematics.wavelength" in kv):
            raise ConfigurationError("give exactly one of kinematics.frequency_khz, kinematics.wavelength")
        freq = num("kinematics.frequency_khz")
        if freq is None:
            freq = frequency_for_wavelength(speed, num("kinematics.wavelength"))
        amp = num("kinematics.amplitude", 0.0)
        conv = kv.get("kinematics.amplitude_convention")
        if conv is None and amp > 0:
            raise ConfigurationError(
                "kinematics.amplitude_convention must be set (half or peak_to_valley) for a nonzero amplitude")
        kin = Kinematics(speed, freq, amp, num("kinematics.feed"), conv or "half",
                         math.radians(num("kinematics.phase0_deg", 0.0)))

    grid = GridConfig(
        dx=num("grid.dx"),
        points_per_wavelength=int(kv.get("grid.points_per_wavelength", DEFAULT_POINTS_PER_WAVELENGTH)),
        extent=num("grid.extent"),
        cycles=int(kv.get("grid.cycles", 3)),
    )
    fmt = kv.get("io.format", "csv")
    if fmt not in ("csv", "json"):
        raise ConfigurationError(f"io.format must be csv or json, got {fmt!r}")
    iocfg = IOConfig(tuple(s.strip() for s in kv.get("io.inputs", "").split(",") if s.strip()),
                     kv.get("io.out_dir", "."), fmt)

    sp = {}
    for key in ("mean_depth", "amplitude", "wavelength", "phase_deg"):
        if f"shearplane.{key}" in kv:
            sp[key] = num(f"shearplane.{key}")
    if "shearplane.phi" in kv:
        sp["phi"] = _floats(kv["shearplane.phi"])
    if "shearplane.samples" in kv:
        sp["samples"] = int(kv["shearplane.samples"])

    return RunConfig(tool, kin, grid, iocfg,
                     _floats(kv.get("sweep.wavelengths", "")),
                     _floats(kv.get("sweep.relief_lengths", "")),
                     sp, int(kv.get("run.seed", 0)), int(kv.get("run.workers", 1)))


def load_config(path) -> RunConfig:
    try:
        text = Path(path).read_text()
    except OSError as exc:
        raise ConfigurationError(f"cannot read config {path}: {exc.strerror}") from None
    return parse_config(text)


def with_overrides(cfg: RunConfig, **kw) -> RunConfig:
    """Copy of ``cfg`` with non-None keyword overrides applied."""
    return replace(cfg, **{k: v for k, v in kw.items() if v is not None})
