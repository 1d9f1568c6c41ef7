"""Physics-core tests against independent closed forms.

The single-stage interference energy has an exact analytic expression
(Gaussian overlap times carrier cosine); most of the pipeline is checked
against it rather than against its own outputs.
"""

import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from ops_sim import (
    C_UM_PER_PS,
    ConfigurationError,
    DelayRangeError,
    FieldGrid,
    StackConfig,
    apply_delay,
    energy_in_window,
    make_pulse_train,
    optimal_delays,
    pulse_energy,
    reference_energies,
    single_pulse_energy,
    stack_all,
    stack_stage,
)

CFG1 = StackConfig(n_stages=1)
CFG2 = StackConfig(n_stages=2)
TRAIN1 = make_pulse_train(CFG1)
TRAIN2 = make_pulse_train(CFG2)


def two_pulse_energy(cfg: StackConfig, tau: float) -> float:
    """Exact single-stage output energy for unit Gaussian pulses.

    E(tau)/E_p = 1 + cos(w0 tau) * exp(-ln2 (tau - T)^2 / fwhm^2)
    (combiner halves the sum of both pulse energies; the cross term is the
    Gaussian autocorrelation at the walk-off times the carrier fringe).
    """
    e_p = cfg.pulse_fwhm * math.sqrt(math.pi / (4.0 * math.log(2.0)))
    overlap = math.exp(-math.log(2.0) * (tau - cfg.period) ** 2 / cfg.pulse_fwhm**2)
    return e_p * (1.0 + math.cos(cfg.carrier_freq * tau) * overlap)


class TestStackConfig:
    def test_carrier_is_period_harmonic(self):
        # the carrier phase accumulated over one period is a multiple of 2 pi
        assert math.cos(CFG2.carrier_freq * CFG2.period) == pytest.approx(1.0, abs=1e-12)

    def test_fringe_close_to_wavelength_over_c(self):
        lam_over_c = CFG2.carrier_wavelength / C_UM_PER_PS
        assert abs(CFG2.fringe_delay - lam_over_c) / lam_over_c < 2e-4

    def test_auto_grid_len_is_power_of_two_and_sufficient(self):
        assert CFG2.grid_len >= CFG2.min_grid_len
        assert CFG2.grid_len & (CFG2.grid_len - 1) == 0

    def test_explicit_grid_len_too_small_names_minimum(self):
        with pytest.raises(ConfigurationError, match=str(CFG2.min_grid_len)):
            StackConfig(n_stages=2, grid_len=100)

    def test_rejects_bad_values(self):
        with pytest.raises(ConfigurationError):
            StackConfig(n_stages=0)
        with pytest.raises(ConfigurationError):
            StackConfig(n_stages=1, period=-1.0)
        with pytest.raises(ConfigurationError):
            StackConfig(n_stages=1, combiner_loss=1.0)
        with pytest.raises(ConfigurationError):
            StackConfig(n_stages=1, grid_dt=0.3)  # undersamples 0.5 ps pulses


class TestPulseTrain:
    def test_single_pulse_energy_matches_analytic_gaussian(self):
        # integral of exp(-4 ln2 t^2 / w^2) = w sqrt(pi / (4 ln2))
        expected = CFG1.pulse_fwhm * math.sqrt(math.pi / (4.0 * math.log(2.0)))
        assert single_pulse_energy(CFG1) == pytest.approx(expected, rel=1e-9)

    def test_train_energy_is_pulse_count_times_single(self):
        assert pulse_energy(TRAIN2) == pytest.approx(4.0 * single_pulse_energy(CFG2), rel=1e-9)

    def test_each_input_slot_holds_one_pulse_energy(self):
        e_p = single_pulse_energy(CFG2)
        for i in range(CFG2.n_pulses):
            lo = i * CFG2.period - CFG2.period / 2
            slot = energy_in_window(TRAIN2, lo, lo + CFG2.period)
            assert slot == pytest.approx(e_p, rel=1e-9)


class TestApplyDelay:
    def test_energy_preserved(self):
        for tau in (0.37, -1.2, CFG1.fringe_delay * 3.5):
            delayed = apply_delay(TRAIN1, tau)
            assert pulse_energy(delayed) == pytest.approx(pulse_energy(TRAIN1), rel=1e-12)

    def test_envelope_moves_by_tau(self):
        tau = 1.75
        delayed = apply_delay(TRAIN1, tau)
        t = TRAIN1.times
        peak_before = t[np.argmax(np.abs(TRAIN1.samples))]
        peak_after = t[np.argmax(np.abs(delayed.samples))]
        assert peak_after - peak_before == pytest.approx(tau, abs=2 * CFG1.grid_dt)

    def test_carrier_phase_advances_with_delay(self):
        # delaying by an integer number of fringes leaves the phase untouched;
        # half a fringe flips the sign
        f = CFG1.fringe_delay
        base = apply_delay(TRAIN1, 2 * f)
        flipped = apply_delay(TRAIN1, 2.5 * f)
        i_peak = int(np.argmax(np.abs(TRAIN1.samples)))
        assert np.angle(base.samples[i_peak] / TRAIN1.samples[i_peak]) == pytest.approx(
            0.0, abs=1e-6
        )
        assert abs(np.angle(flipped.samples[i_peak] / TRAIN1.samples[i_peak])) == pytest.approx(
            math.pi, abs=1e-3
        )

    @settings(max_examples=25, deadline=None)
    @given(
        a=st.floats(min_value=-2.0, max_value=2.0),
        b=st.floats(min_value=-2.0, max_value=2.0),
    )
    def test_shift_composition(self, a, b):
        once = apply_delay(TRAIN1, a + b)
        twice = apply_delay(apply_delay(TRAIN1, a), b)
        assert np.max(np.abs(once.samples - twice.samples)) < 1e-9

    def test_inverse_delay_restores_field(self):
        back = apply_delay(apply_delay(TRAIN1, 1.3), -1.3)
        assert np.max(np.abs(back.samples - TRAIN1.samples)) < 1e-10

    def test_out_of_window_delay_raises_with_range(self):
        with pytest.raises(DelayRangeError, match="admits delays in"):
            apply_delay(TRAIN1, 100.0)
        with pytest.raises(DelayRangeError):
            apply_delay(TRAIN1, -100.0)
        with pytest.raises(DelayRangeError):
            apply_delay(TRAIN1, math.inf)

    def test_zero_field_any_delay(self):
        zero = FieldGrid(
            samples=np.zeros(256, dtype=complex), t0=0.0, dt=0.05,
            carrier_freq=CFG1.carrier_freq, guard=1.0,
        )
        assert pulse_energy(apply_delay(zero, 3.0)) == 0.0


class TestSingleStage:
    def test_energy_matches_closed_form_across_fringes(self):
        f = CFG1.fringe_delay
        e_p = single_pulse_energy(CFG1)
        offsets = np.concatenate([np.linspace(-3, 3, 13) * f, [-1.0, -0.4, 0.4, 1.0]])
        for off in offsets:
            tau = CFG1.period + off
            out = stack_stage(TRAIN1, CFG1, 1, tau)
            assert pulse_energy(out) == pytest.approx(two_pulse_energy(CFG1, tau), abs=1e-6 * e_p)

    def test_zero_delay_keeps_single_pulse_energy(self):
        out = stack_stage(TRAIN1, CFG1, 1, 0.0)
        assert pulse_energy(out) == pytest.approx(single_pulse_energy(CFG1), rel=1e-9)

    def test_half_fringe_extinguishes(self):
        tau = CFG1.period + CFG1.fringe_delay / 2
        out = stack_stage(TRAIN1, CFG1, 1, tau)
        assert pulse_energy(out) < 1e-4 * pulse_energy(TRAIN1)

    def test_energy_periodic_in_fringe(self):
        f = CFG1.fringe_delay
        e0 = pulse_energy(stack_stage(TRAIN1, CFG1, 1, CFG1.period))
        e1 = pulse_energy(stack_stage(TRAIN1, CFG1, 1, CFG1.period + f))
        assert abs(e1 - e0) / e0 < 1e-4

    def test_invalid_stage_index(self):
        with pytest.raises(ConfigurationError):
            stack_stage(TRAIN1, CFG1, 2, CFG1.period)
        with pytest.raises(ConfigurationError):
            stack_stage(TRAIN1, CFG1, 0, CFG1.period)


class TestFullStack:
    @pytest.mark.parametrize("n", [1, 2, 3, 4])
    def test_energy_multiplication(self, n):
        cfg = StackConfig(n_stages=n)
        out = stack_all(make_pulse_train(cfg), cfg, optimal_delays(cfg))
        ratio = pulse_energy(out) / single_pulse_energy(cfg)
        assert ratio == pytest.approx(2.0**n, rel=1e-9)

    def test_optimal_delays_double_each_stage(self):
        np.testing.assert_allclose(optimal_delays(StackConfig(n_stages=4)),
                                   [10.0, 20.0, 40.0, 80.0])

    def test_stacked_energy_lands_in_last_slot(self):
        out = stack_all(TRAIN2, CFG2, optimal_delays(CFG2))
        center = (CFG2.n_pulses - 1) * CFG2.period
        slot = energy_in_window(out, center - CFG2.period / 2, center + CFG2.period / 2)
        assert slot >= (1.0 - 1e-9) * pulse_energy(out)

    def test_energy_never_exceeds_input(self):
        rng = np.random.default_rng(11)
        nominal = optimal_delays(CFG2)
        e_in = pulse_energy(TRAIN2)
        for _ in range(25):
            taus = nominal + rng.uniform(-1.0, 1.0, size=2)
            e_out = pulse_energy(stack_all(TRAIN2, CFG2, taus))
            assert e_out <= e_in * (1.0 + 1e-12)

    def test_wrong_tau_shape_rejected(self):
        with pytest.raises(ConfigurationError):
            stack_all(TRAIN2, CFG2, np.zeros(3))

    def test_combiner_loss_scales_output(self):
        loss = 0.01
        lossy = StackConfig(n_stages=2, combiner_loss=loss)
        e_ideal = pulse_energy(stack_all(TRAIN2, CFG2, optimal_delays(CFG2)))
        e_lossy = pulse_energy(
            stack_all(make_pulse_train(lossy), lossy, optimal_delays(lossy))
        )
        assert e_lossy / e_ideal == pytest.approx((1.0 - loss) ** 4, rel=1e-9)

    def test_reference_energies(self):
        p_max, p_min = reference_energies(CFG2)
        out = stack_all(TRAIN2, CFG2, optimal_delays(CFG2))
        assert p_max == pulse_energy(out)
        assert p_min == 0.0
