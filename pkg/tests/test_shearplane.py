import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

import oracles
from procdamp import DomainError, Trace, WavySurfaceSpec, fit_sinusoid, phase_lead
from procdamp.shearplane import (chip_thickness_series, find_jumps, first_crossing,
                                 harmonic_amplitudes, length_phase_lead, length_phase_leads,
                                 multiple_roots_possible, shear_length_flat, shear_length_series,
                                 shear_length_wavy, third_harmonic_ratio)
from procdamp.forces import wrap_angle


@pytest.mark.parametrize("depth, phi, expected", [
    (6, math.pi / 6, 12.0),
    (6, math.pi / 2, 6.0),
    (12, 0.49, 12 / math.sin(0.49)),
])
def test_flat_closed_form(depth, phi, expected):
    assert shear_length_flat(depth, phi) == pytest.approx(expected, abs=1e-12)


def test_flat_example_value():
    assert shear_length_flat(12, 0.49) == pytest.approx(25.49, abs=0.01)


@pytest.mark.parametrize("phi", [0.0, -0.1, math.pi / 2 + 0.01])
def test_phi_out_of_range(phi):
    with pytest.raises(DomainError):
        shear_length_flat(6, phi)


def test_surface_spec_requires_feed_above_amplitude():
    with pytest.raises(DomainError):
        WavySurfaceSpec(1.0, 1.5, 40)
    with pytest.raises(DomainError):
        WavySurfaceSpec(6.0, 1.5, 0)


@given(st.floats(0, 40), st.floats(0.15, 1.4))
@settings(max_examples=30, deadline=None)
def test_zero_amplitude_reduces_to_flat(tip, phi):
    assert shear_length_wavy(WavySurfaceSpec(6.0, 0.0, 40), tip, phi) == pytest.approx(6 / math.sin(phi), abs=1e-9)


@given(tip=st.floats(0, 40), phi=st.floats(0.15, 1.2), amp=st.floats(0.1, 2.5),
       phase=st.floats(-math.pi, math.pi))
@settings(max_examples=8, deadline=None)
def test_matches_dense_scan(tip, phi, amp, phase):
    surf = WavySurfaceSpec(6.0, amp, 40.0, phase)
    ref = oracles.dense_first_crossing(6.0, amp, 40.0, phase, tip, phi)
    assert abs(first_crossing(surf, tip, phi) - ref) <= 1e-6


@given(tip=st.floats(0, 40), phi=st.floats(0.15, 1.4))
@settings(max_examples=30, deadline=None)
def test_length_bounds(tip, phi):
    surf = WavySurfaceSpec(6.0, 1.5, 40.0)
    l = shear_length_wavy(surf, tip, phi)
    assert (6.0 - 1.5) / math.sin(phi) - 1e-9 <= l <= (6.0 + 1.5) / math.sin(phi) + 40.0


def test_vertical_plane_reads_chip_thickness():
    surf = WavySurfaceSpec(6.0, 1.5, 40.0)
    s = shear_length_series(surf, math.pi / 2, 64)
    np.testing.assert_allclose(s.values, surf.chip_thickness(s.x))
    assert length_phase_lead(surf, 1.55) == pytest.approx(0.0, abs=0.05)


def test_zero_amplitude_series_constant():
    s = shear_length_series(WavySurfaceSpec(6.0, 0.0, 40.0), 0.5, 32)
    np.testing.assert_allclose(s.values, 6 / math.sin(0.5), atol=1e-9)


def test_length_leads_chip_thickness_at_mean_angle():
    surf = WavySurfaceSpec(12.0, 1.5, 40.0)
    lead = length_phase_lead(surf, 0.49)
    assert lead > 0
    # same lead from the plain wrapped fit comparison, modulo a full turn
    fit_l = fit_sinusoid(shear_length_series(surf, 0.49, 128), 40.0)
    fit_c = fit_sinusoid(chip_thickness_series(surf, 128), 40.0)
    assert float(wrap_angle(lead - phase_lead(fit_l, fit_c))) == pytest.approx(0.0, abs=1e-9)


def test_lead_is_shift_of_chip_series():
    # the length series is the chip series shifted ahead by depth * cot(phi)
    surf = WavySurfaceSpec(6.0, 1.5, 40.0)
    leads = length_phase_leads(surf, [0.6, 0.8])
    np.testing.assert_allclose(leads, 2 * math.pi * 6.0 / np.tan([0.6, 0.8]) / 40.0, rtol=0.02)


def test_jump_appears_below_critical_angle():
    surf = WavySurfaceSpec(12.0, 1.5, 40.0)
    crit = math.atan(surf.max_slope)
    assert multiple_roots_possible(surf, crit - 0.01)
    assert not multiple_roots_possible(surf, crit + 0.01)
    jumps = find_jumps(surf, crit - 0.03)
    assert len(jumps) == 1
    l = shear_length_series(surf, crit - 0.03, 512)
    assert np.max(np.abs(np.diff(l.values))) > 1.0
    assert find_jumps(surf, crit + 0.03) == []


def test_triangularity_grows_as_angle_falls():
    surf = WavySurfaceSpec(12.0, 1.5, 40.0)
    r = [third_harmonic_ratio(shear_length_series(surf, p, 256), 40.0) for p in (0.8, 0.6, 0.4)]
    assert r[0] < r[1] < r[2]


def test_harmonic_amplitudes_exact():
    x = np.arange(128) / 128 * 40
    t = Trace(x, 1 + 2 * np.sin(2 * np.pi * x / 40) + 0.5 * np.cos(6 * np.pi * x / 40))
    h = harmonic_amplitudes(t, 40.0, (1, 3))
    assert h[1] == pytest.approx(2.0) and h[3] == pytest.approx(0.5)


def test_series_needs_enough_samples():
    with pytest.raises(DomainError):
        shear_length_series(WavySurfaceSpec(6.0, 1.5, 40.0), 0.5, 8)
