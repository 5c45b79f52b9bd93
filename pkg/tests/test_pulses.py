import json
import math

import numpy as np
import pytest
from numpy.testing import assert_allclose

from rotorwave.model import LIH, transition_dipole, transition_frequency
from rotorwave.optimizer import max_orientation, optimal_amplitudes, orientation_target
from rotorwave.pulses import (
    InfeasibleTargetError,
    PulseSequence,
    cross_talk_report,
    design_sequence,
    field_amplitude,
    fourier_area,
    pulse_areas_from_amplitudes,
    subpulse_phases,
)

TROT = LIH.t_rot_au


class TestPulseAreas:
    def test_equal_superposition(self):
        thetas = pulse_areas_from_amplitudes([1 / math.sqrt(2), 1 / math.sqrt(2)])
        assert_allclose(thetas, [math.pi / 4], rtol=1e-14)

    def test_identity_case_no_pulse(self):
        thetas = pulse_areas_from_amplitudes([1.0, 0.0])
        assert thetas[0] == 0.0

    def test_round_trip_identity_deep_ladder(self):
        c = optimal_amplitudes(15, max_orientation(15))
        thetas = pulse_areas_from_amplitudes(c)
        assert abs(math.prod(math.sin(t) for t in thetas) - c[-1]) < 1e-12

    def test_areas_within_quarter_turn(self):
        c = optimal_amplitudes(10, max_orientation(10))
        thetas = pulse_areas_from_amplitudes(c)
        assert np.all(thetas >= 0) and np.all(thetas <= math.pi / 2)

    def test_infeasible_leading_amplitude(self):
        # norm within slack but the leading component exceeds 1 past round-off
        with pytest.raises(InfeasibleTargetError):
            pulse_areas_from_amplitudes([1.0 + 1e-10, 0.0])

    def test_unnormalized_rejected(self):
        with pytest.raises(ValueError):
            pulse_areas_from_amplitudes([0.5, 0.5])


class TestSubpulsePhases:
    def test_single_pulse_zero(self):
        phis = subpulse_phases(LIH, [0.0], 0.0)
        assert phis[0] == 0.0

    def test_two_pulse_formula(self):
        tau2 = 7.0 * TROT
        phis = subpulse_phases(LIH, [0.0, tau2], 0.0)
        expected = transition_frequency(LIH, 1) * tau2 - math.pi / 2
        assert math.isclose(phis[1], expected, rel_tol=1e-12)

    def test_unordered_times_rejected(self):
        with pytest.raises(ValueError):
            subpulse_phases(LIH, [1.0, 0.5], 0.0)


class TestDesignSequence:
    def test_single_pulse_defaults(self):
        seq = design_sequence(orientation_target(1), LIH)
        assert len(seq) == 1
        p = seq.subpulses[0]
        assert math.isclose(p.area, math.pi / 4, rel_tol=1e-12)
        assert math.isclose(p.duration, 3 * TROT, rel_tol=1e-14)
        assert math.isclose(p.carrier, 2 * LIH.b_au, rel_tol=1e-14)
        # duration in lab units: 3 revival periods of 2.22 ps
        from rotorwave.units import au_to_ps

        assert abs(au_to_ps(p.duration) - 6.66) < 0.01

    def test_fifteen_pulse_layout(self):
        seq = design_sequence(orientation_target(15), LIH)
        assert len(seq) == 15
        assert math.isclose(seq.subpulses[-1].center_time, 210 * TROT, rel_tol=1e-12)
        assert math.isclose(seq.t_on, -15 * TROT, rel_tol=1e-12)
        assert math.isclose(seq.t_off, 225 * TROT, rel_tol=1e-12)
        carriers = [p.carrier for p in seq.subpulses]
        assert_allclose(carriers, 2 * LIH.b_au * np.arange(1, 16), rtol=1e-14)

    def test_fifteen_pulse_peak_intensity_value(self):
        # frozen from the amplitude formula; the strongest subpulse is the
        # second one (largest area-to-dipole ratio)
        seq = design_sequence(orientation_target(15), LIH)
        assert math.isclose(seq.peak_intensity_w_cm2, 3.8671e5, rel_tol=1e-3)
        amps = [p.field_amplitude for p in seq.subpulses]
        assert int(np.argmax(amps)) == 1

    def test_determinism(self):
        a = design_sequence(orientation_target(5), LIH)
        b = design_sequence(orientation_target(5), LIH)
        assert a == b
        assert json.dumps(a.to_dict()) == json.dumps(b.to_dict())

    def test_doubling_duration_halves_amplitudes(self):
        t = orientation_target(3)
        seq1 = design_sequence(t, LIH, t_sub=3 * TROT)
        seq2 = design_sequence(t, LIH, t_sub=6 * TROT)
        for p1, p2 in zip(seq1.subpulses, seq2.subpulses):
            assert math.isclose(p1.area, p2.area, rel_tol=1e-14)
            assert math.isclose(p1.field_amplitude, 2 * p2.field_amplitude, rel_tol=1e-14)
        # quadrature confirms the stretched pulse still carries the same area
        p2 = seq2.subpulses[0]
        lo, hi = p2.window
        area = transition_dipole(LIH, 0) * abs(fourier_area(p2, p2.carrier, lo, hi))
        assert math.isclose(area, p2.area, rel_tol=1e-6)

    def test_overlapping_spacing_rejected(self):
        with pytest.raises(ValueError):
            design_sequence(orientation_target(2), LIH, spacing_factor=3.0)

    def test_json_round_trip(self, tmp_path):
        seq = design_sequence(orientation_target(3), LIH)
        path = tmp_path / "pulse.json"
        seq.save(path)
        assert PulseSequence.load(path) == seq


class TestFieldAmplitude:
    def test_negligible_outside_active_window(self):
        seq = design_sequence(orientation_target(2), LIH)
        for t in (seq.t_on - 40 * TROT, seq.t_off + 40 * TROT):
            assert abs(field_amplitude(seq, t)) < 1e-15

    def test_envelope_peak_with_zero_phase(self):
        seq = design_sequence(orientation_target(1), LIH, phi_1=0.0)
        p = seq.subpulses[0]
        assert math.isclose(field_amplitude(seq, p.center_time), p.field_amplitude,
                            rel_tol=1e-12)

    def test_area_quadrature_round_trip(self):
        seq = design_sequence(orientation_target(1), LIH)
        p = seq.subpulses[0]
        area = transition_dipole(LIH, 0) * abs(
            fourier_area(p, p.carrier, p.center_time - 8 * p.duration,
                         p.center_time + 8 * p.duration)
        )
        assert math.isclose(area, p.area, rel_tol=1e-6)

    def test_spectrum_matches_gaussian(self):
        """Direct DFT of the sampled field against the analytic spectrum.

        The span is an exact number of revival periods so the carrier falls
        on an FFT bin; the spectral amplitude at resonance equals
        area / transition dipole and falls off as a Gaussian of width 1/T.
        """
        seq = design_sequence(orientation_target(1), LIH)
        p = seq.subpulses[0]
        span = 64 * TROT
        n = 1 << 16
        t = p.center_time - span / 2 + span * np.arange(n) / n
        dt = span / n
        spectrum = np.fft.fft(field_amplitude(seq, t)) * dt
        freqs = 2 * math.pi * np.fft.fftfreq(n, d=dt)
        k = int(round(p.carrier * span / (2 * math.pi)))
        assert math.isclose(abs(freqs[k]), p.carrier, rel_tol=1e-12)
        a_res = p.area / transition_dipole(LIH, 0)
        assert math.isclose(abs(spectrum[k]), a_res, rel_tol=1e-4)
        # one bandwidth away from the carrier the Gaussian drops to exp(-1/2)
        dw = 1.0 / p.duration
        k_off = int(round((p.carrier + dw) * span / (2 * math.pi)))
        expected = a_res * math.exp(-((freqs[k_off] - p.carrier) * p.duration) ** 2 / 2)
        assert math.isclose(abs(spectrum[k_off]), expected, rel_tol=1e-4)


class TestCrossTalk:
    def test_single_pulse_diagonal(self):
        seq = design_sequence(orientation_target(1), LIH)
        report = cross_talk_report(seq)
        assert report.areas.shape == (1, 1)
        assert math.isclose(report.areas[0, 0], math.pi / 4, rel_tol=1e-6)
        assert report.ok

    def test_default_design_is_clean(self):
        seq = design_sequence(orientation_target(3), LIH)
        report = cross_talk_report(seq)
        thetas = pulse_areas_from_amplitudes(orientation_target(3).amplitudes)
        assert_allclose(np.diag(report.areas), thetas, rtol=1e-6)
        assert report.max_off_diagonal < 1e-3
        assert report.ok

    def test_short_pulses_raise_flag(self):
        seq = design_sequence(orientation_target(2), LIH, t_sub=0.1 * TROT)
        report = cross_talk_report(seq)
        assert not report.ok
        assert report.max_off_diagonal > 1e-3
