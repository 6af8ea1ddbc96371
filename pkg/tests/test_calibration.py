import math

import numpy as np
import pytest

from calibration import (ChevronDataset, SearchConfig, extract_phases, fit_cosine, fit_slice, phases_from_unitary,
                         resonance_from_chevron, run_chevron, search_window)
from calibration.czCalibration import _refine
from device import effective_coupling
from dynamics import (average_gate_fidelity, cphase_unitary, gate_superoperator, ideal_cz_unitary, propagator,
                      state_index)
from errors import InvalidInputError, LowSignalError
from pulse import idle_pulse


def _synthetic_dataset(omega, durations, frequencies=(92.0,)):
    populations = np.array([0.5 + 0.5 * np.cos(omega * durations) for _ in frequencies])
    return ChevronDataset(epsilon=0.6, frequencies=np.array(frequencies), durations=durations,
                          populations=populations)


def test_fit_cosine_recovers_frequency():
    durations = np.linspace(0.0, 400.0, 60)
    populations = 0.45 * np.cos(0.05 * durations + 0.3) + 0.5
    amplitude, omega, phase, offset = fit_cosine(durations, populations)
    assert omega == pytest.approx(0.05, rel=1e-3)
    assert amplitude == pytest.approx(0.45, rel=1e-3)
    assert offset == pytest.approx(0.5, abs=1e-3)


def test_fit_slice_full_return():
    omega = 2 * math.pi / 147.0
    dataset = _synthetic_dataset(omega, np.linspace(0.0, 400.0, 40))
    fit = fit_slice(dataset, 92.0)
    assert fit.t_return == pytest.approx(147.0, rel=1e-3)
    assert fit.rabi_freq == pytest.approx(1000.0 / 147.0, rel=1e-3)
    assert fit.contrast == pytest.approx(1.0, rel=1e-3)


def test_fit_slice_needs_points():
    dataset = _synthetic_dataset(0.04, np.linspace(0.0, 100.0, 6))
    with pytest.raises(InvalidInputError):
        fit_slice(dataset, 92.0)


def test_constant_slice_is_low_signal():
    durations = np.linspace(0.0, 200.0, 20)
    dataset = ChevronDataset(epsilon=0.6, frequencies=np.array([90.0]), durations=durations,
                             populations=np.full((1, 20), 0.98))
    with pytest.raises(LowSignalError):
        fit_slice(dataset, 90.0)


def test_dataset_shape_checked():
    with pytest.raises(InvalidInputError):
        ChevronDataset(epsilon=0.6, frequencies=np.array([90.0, 91.0]), durations=np.array([0.0, 1.0]),
                       populations=np.zeros((3, 2)))


def test_dataset_frame_round_trip():
    durations = np.linspace(0.0, 300.0, 12)
    dataset = _synthetic_dataset(0.03, durations, frequencies=(88.0, 92.0))
    restored = ChevronDataset.from_frame(dataset.to_frame(), epsilon=0.6)
    assert np.allclose(restored.populations, dataset.populations)
    assert np.allclose(restored.frequencies, dataset.frequencies)


def test_resonance_from_synthetic_chevron():
    g_eff = 3.4
    frequencies = np.linspace(86.0, 98.0, 7)
    durations = np.linspace(0.0, 400.0, 80)
    populations = []
    for frequency in frequencies:
        detuning = 2.0 * (frequency - 92.0)
        rabi = math.hypot(detuning, 2.0 * g_eff)
        contrast = (2.0 * g_eff / rabi) ** 2
        populations.append(1.0 - contrast * np.sin(math.pi * rabi * 1e-3 * durations) ** 2)
    dataset = ChevronDataset(epsilon=0.6, frequencies=frequencies, durations=durations,
                             populations=np.array(populations))
    resonance, coupling = resonance_from_chevron(dataset)
    assert resonance == pytest.approx(92.0, abs=0.1)
    assert coupling == pytest.approx(g_eff, rel=0.02)


def test_phases_of_ideal_cz():
    phases = phases_from_unitary(ideal_cz_unitary())
    assert phases.entangling_phase == pytest.approx(math.pi)
    assert phases.theta_tunable == 0.0
    assert phases.theta_fixed == 0.0
    assert phases.leakage == pytest.approx(0.0, abs=1e-12)


def test_phases_with_local_rotations():
    unitary = np.diag([1.0, np.exp(0.3j), np.exp(0.5j), np.exp(1j * (0.8 + 2.0))])
    phases = phases_from_unitary(unitary)
    assert phases.theta_tunable == pytest.approx(0.3)
    assert phases.theta_fixed == pytest.approx(0.5)
    assert phases.entangling_phase == pytest.approx(2.0)


def test_phases_wrap_into_range():
    phases = phases_from_unitary(cphase_unitary(-0.5))
    assert phases.entangling_phase == pytest.approx(2 * math.pi - 0.5)


def test_identity_pulse_has_no_phase(weak_pair):
    phases = extract_phases(weak_pair, idle_pulse(50.0))
    assert phases.entangling_phase == pytest.approx(0.0, abs=1e-6)
    assert phases.theta_tunable == pytest.approx(0.0, abs=1e-6)
    assert phases.theta_fixed == pytest.approx(0.0, abs=1e-6)


def test_far_detuned_slice_stays_in_11(q6q7):
    dataset = run_chevron(q6q7, 0.6, [60.0], np.linspace(0.0, 200.0, 9))
    assert np.all(dataset.populations > 0.95)


def test_search_config_defaults():
    search = SearchConfig()
    assert search.leakage_threshold == 1e-3
    assert search.edge == 24.0


def test_search_window_seeded_from_bessel_coupling(q6q7):
    search = SearchConfig()
    center, g_predicted, predicted, frequency_bounds, duration_bounds = search_window(q6q7, 0.6, search)
    assert g_predicted == pytest.approx(abs(effective_coupling(q6q7, 0.6, center, mode='bessel')))
    assert abs(predicted - 176.0) <= 0.25 * 176.0
    # duração de retorno do acoplamento medido na fatia de Rabi ressonante (≈4 MHz)
    assert duration_bounds[0] <= 1000.0 / (2 * 4.016) + search.edge <= duration_bounds[1]
    assert duration_bounds[1] < 250.0
    assert frequency_bounds == pytest.approx((center - 3.0, center + 3.0))


def test_refinement_stays_inside_search_window():
    search = SearchConfig(max_iterations=200)
    bounds = [(89.0, 95.0), (120.0, 190.0)]

    def cost(x):
        # mínimo livre em (97, 280): fora da janela nas duas direções
        return (x[0] - 97.0) ** 2 + ((x[1] - 280.0) / 10.0) ** 2

    result = _refine(cost, (92.0, 189.0), bounds, search)
    assert bounds[0][0] <= result.x[0] <= bounds[0][1]
    assert bounds[1][0] <= result.x[1] <= bounds[1][1]
    assert result.x[0] == pytest.approx(95.0, abs=0.05)
    assert result.x[1] == pytest.approx(190.0, abs=0.5)


@pytest.mark.slow
def test_chevron_resonance_near_92_mhz(q6q7):
    dataset = run_chevron(q6q7, 0.6, np.linspace(80.0, 104.0, 40), np.linspace(0.0, 400.0, 40))
    resonance, _ = resonance_from_chevron(dataset)
    assert abs(resonance - 92.0) < 10.0
    fit = fit_slice(dataset, resonance)
    assert 2.7 <= fit.rabi_freq / 2.0 <= 4.1
    assert fit.t_return == pytest.approx(1000.0 / fit.rabi_freq, rel=0.05)


@pytest.mark.slow
def test_noiseless_calibration(q6q7, calibrated_cz):
    assert calibrated_cz.fidelity > 0.999
    assert calibrated_cz.residual_11_02_population < 1e-3
    assert abs(calibrated_cz.omega_p - 92.0) < 10.0
    assert abs(calibrated_cz.duration - 176.0) <= 0.25 * 176.0
    assert 2.7 <= calibrated_cz.g_eff <= 4.1

    channel = gate_superoperator(q6q7, calibrated_cz.pulse(), frame_corrections=calibrated_cz)
    assert average_gate_fidelity(channel, ideal_cz_unitary()) == pytest.approx(calibrated_cz.fidelity, abs=1e-9)


@pytest.mark.slow
def test_extracted_phase_matches_unitary_diagonal(q6q7, calibrated_cz):
    unitary = propagator(q6q7, calibrated_cz.pulse())
    u = {label: unitary[state_index(label), state_index(label)] for label in ('00', '01', '10', '11')}
    expected = (np.angle(u['11']) + np.angle(u['00']) - np.angle(u['01']) - np.angle(u['10'])) % (2 * math.pi)
    phases = extract_phases(q6q7, calibrated_cz.pulse())
    difference = (phases.entangling_phase - expected + math.pi) % (2 * math.pi) - math.pi
    assert abs(difference) < 1e-3


@pytest.mark.slow
def test_chevron_symmetric_about_resonance(q6q7):
    durations = np.linspace(0.0, 300.0, 48)
    dataset = run_chevron(q6q7, 0.6, np.linspace(84.0, 100.0, 17), durations)
    resonance, g_eff = resonance_from_chevron(dataset)
    for offset in (3.0, 5.0):
        sides = run_chevron(q6q7, 0.6, [resonance - offset, resonance + offset], durations)
        below, above = (fit_slice(sides, freq) for freq in sides.frequencies)
        assert below.rabi_freq == pytest.approx(above.rabi_freq, rel=0.08)
        # Rabi generalizado de dois níveis: Ω² = (2δ)² + (2g)²
        expected = math.hypot(2.0 * offset, 2.0 * g_eff)
        assert 0.5 * (below.rabi_freq + above.rabi_freq) == pytest.approx(expected, rel=0.08)
        assert np.mean(sides.populations[0]) == pytest.approx(np.mean(sides.populations[1]), abs=0.05)
