"""Process-damping geometry: relief-face contact, shear-plane length and force fits."""
from .core import Kinematics, SinusoidFit, ToolGeometry, Trace, evaluate_sinusoid, wavelength
from .engagement import (EngagementLoop, contact_length, downstroke_onset, engagement_loop,
                         loop_orientation, predicted_onset_height)
from .errors import (AlignmentError, ConfigurationError, DegenerateLoopError, DomainError, FitError,
                     ParseError, ProcDampError, SearchWindowError, UndefinedPhaseError)
from .forces import (ForceSeries, LinearFit, MerchantInputs, crushing_force, fit_linear, fit_sinusoid,
                     max_force_vs_wavelength, merchant_predict, phase_lead, shear_force, slope_stats)
from .shearplane import (WavySurfaceSpec, find_jumps, first_crossing, length_phase_lead,
                         shear_length_flat, shear_length_series, shear_length_wavy,
                         third_harmonic_ratio)
from .surface import SurfaceProfile, footprint_at, machined_surface, tool_tip_path

__version__ = "0.1.0"

__all__ = [
    "AlignmentError", "ConfigurationError", "DegenerateLoopError", "DomainError", "EngagementLoop",
    "FitError", "ForceSeries", "Kinematics", "LinearFit", "MerchantInputs", "ParseError",
    "ProcDampError", "SearchWindowError", "SinusoidFit", "SurfaceProfile", "ToolGeometry", "Trace",
    "UndefinedPhaseError", "WavySurfaceSpec", "contact_length", "crushing_force", "downstroke_onset",
    "engagement_loop", "evaluate_sinusoid", "find_jumps", "first_crossing", "fit_linear",
    "fit_sinusoid", "footprint_at", "length_phase_lead", "loop_orientation", "machined_surface",
    "max_force_vs_wavelength", "merchant_predict", "phase_lead", "predicted_onset_height",
    "shear_force", "shear_length_flat", "shear_length_series", "shear_length_wavy", "slope_stats",
    "third_harmonic_ratio", "tool_tip_path", "wavelength",
]
