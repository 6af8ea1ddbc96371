import math

import numpy as np
import pytest
from scipy import stats

from device import modulation_response, sweet_spot_amplitude
from errors import InvalidInputError, NoSweetSpotError, ParseError
from noise import (NoiseProfile, amplitude_scale_from_curve, fit_ramsey, fit_t1, load_psd, noise_realization,
                   profile_from_psd, psd_summary, simulate_ramsey_under_modulation, simulate_t1_under_modulation)


def _write(tmp_path, text, name='psd.csv'):
    path = tmp_path / name
    path.write_text(text, encoding='utf-8')
    return str(path)


def test_white_flux_psd_conversion():
    profile = NoiseProfile(white_floor=-150.0)
    assert profile.white_flux_psd == pytest.approx(0.15 * 1e-15)
    assert profile.raised(15.0).white_floor == -135.0
    assert NoiseProfile().white_flux_psd == 0.0


def test_t1_drift_schedule():
    profile = NoiseProfile(t1_drift=[(0.0, 1.0), (5.0, 0.5), (8.5, 0.8)])
    assert profile.t1_multiplier(0) == 1.0
    assert profile.t1_multiplier(5.2) == 0.5
    assert profile.t1_multiplier(9) == 0.8


def test_t1_drift_must_be_sorted():
    with pytest.raises(InvalidInputError):
        NoiseProfile(t1_drift=[(3.0, 0.5), (1.0, 1.0)])


def test_load_minimal_psd(tmp_path):
    psd = load_psd(_write(tmp_path, '10,-140\n20,-141\n'))
    assert psd.frequencies.tolist() == [10.0, 20.0]
    assert psd.power.tolist() == [-140.0, -141.0]


def test_load_psd_with_header_and_comments(tmp_path):
    text = '# medido no gerador A\nfrequency_mhz,power_dbm_hz\n10,-140\n\n# pico\n20,-139\n'
    psd = load_psd(_write(tmp_path, text))
    assert len(psd.frequencies) == 2


def test_malformed_row_reports_line(tmp_path):
    with pytest.raises(ParseError) as info:
        load_psd(_write(tmp_path, 'frequency_mhz,power_dbm_hz\n10,-140\n20,abc\n'))
    assert info.value.line == 3


def test_non_monotone_grid_rejected(tmp_path):
    with pytest.raises(InvalidInputError):
        load_psd(_write(tmp_path, '10,-140\n5,-140\n20,-140\n'))


def test_flat_floor_with_spur(tmp_path):
    rows = [f'{f},-140' for f in range(1, 301)]
    rows[99] = '100,-110'
    psd = load_psd(_write(tmp_path, '\n'.join(rows) + '\n'))
    summary = psd_summary(psd)
    assert summary['white_floor_dbm_hz'] == pytest.approx(-140.0, abs=0.1)
    assert summary['spurs'] == [{'frequency_mhz': 100.0, 'power_dbm_hz': -110.0}]
    profile = profile_from_psd(psd)
    assert profile.white_floor == pytest.approx(-140.0, abs=0.1)
    assert profile.spurs == [(100.0, -110.0)]


def test_zero_profile_gives_zero_trace():
    realization = noise_realization(NoiseProfile(), 100.0, 1.0, seed=1)
    assert np.all(realization.white == 0.0)
    assert realization.amplitude_offset == 0.0 and realization.dc_offset == 0.0


def test_white_variance_matches_floor():
    profile = NoiseProfile(white_floor=-140.0)
    target = profile.white_flux_psd * 1e9 / 2.0
    realization = noise_realization(profile, 1e6, 1.0, seed=7)
    assert np.var(realization.white) == pytest.approx(target, rel=0.05)
    longer = noise_realization(profile, 2e6, 1.0, seed=8)
    assert np.var(longer.white) == pytest.approx(target, rel=0.05)


def test_realization_reproducible():
    profile = NoiseProfile(white_floor=-140.0, one_over_f_amp=5.0)
    first = noise_realization(profile, 500.0, 1.0, seed=42)
    second = noise_realization(profile, 500.0, 1.0, seed=42)
    assert np.array_equal(first.white, second.white)
    assert first.amplitude_offset == second.amplitude_offset != 0.0


def test_quasi_static_variance():
    profile = NoiseProfile(one_over_f_amp=2.0, experiment_time_s=100.0)
    expected = (2e-6) ** 2 * math.log((1.0 / 1000e-9) / (1.0 / 100.0))
    assert profile.quasi_static_variance(1000.0) == pytest.approx(expected)


def test_fit_t1_noiseless():
    delays = np.linspace(0.0, 60000.0, 41)
    fit = fit_t1(delays, np.exp(-delays / 20000.0))
    assert fit.value_us == pytest.approx(20.0, rel=1e-6)


def test_fit_ramsey_noiseless():
    delays = np.linspace(0.0, 40000.0, 201)
    probabilities = 0.5 + 0.5 * np.exp(-delays / 15000.0) * np.cos(2 * np.pi * 0.1e-3 * delays)
    fit = fit_ramsey(delays, probabilities, 0.1)
    assert fit.value_us == pytest.approx(15.0, rel=1e-4)
    assert fit.parameters['frequency_mhz'] == pytest.approx(0.1, rel=1e-4)


def test_ramsey_without_noise_recovers_t2(q6q7):
    delays = np.linspace(0.0, 2.5 * q6q7.tunable.t2_star * 1000.0, 61)
    fit = simulate_ramsey_under_modulation(q6q7, 0.0, 92.0, NoiseProfile(), delays, 400, seed=3)
    assert fit.ci_low_us - 1.0 <= q6q7.tunable.t2_star <= fit.ci_high_us + 1.0


def test_ramsey_span_too_short(q6q7):
    with pytest.raises(InvalidInputError):
        simulate_ramsey_under_modulation(q6q7, 0.0, 92.0, NoiseProfile(), np.linspace(0, 5000.0, 20), 10, seed=1)


def test_t1_unaffected_by_modulation(q6q7):
    delays = np.linspace(0.0, 80000.0, 41)
    at_zero = simulate_t1_under_modulation(q6q7, 0.0, 92.0, NoiseProfile(), delays, 300, seed=5)
    at_sweet = simulate_t1_under_modulation(q6q7, 0.6, 92.0, NoiseProfile(white_floor=-150.0), delays, 300, seed=5)
    # mesma semente: só a hibridização dispersiva (~(g/Δ)²) separa os dois casos
    assert at_sweet.value_us == pytest.approx(at_zero.value_us, rel=0.05)
    assert at_zero.ci_low_us <= 23.6 <= at_zero.ci_high_us or abs(at_zero.value_us - 23.6) < 2.5


def test_t1_drift_halves_t1(q6q7):
    profile = NoiseProfile(t1_drift=[(0.0, 0.5)])
    delays = np.linspace(0.0, 80000.0, 41)
    fit = simulate_t1_under_modulation(q6q7, 0.0, 92.0, profile, delays, 1000, seed=9, experiment_index=1)
    assert fit.value_us == pytest.approx(11.8, rel=0.08)


def test_t1_survival_comes_from_propagation(q6q7, monkeypatch):
    import noise.coherence as coherence
    calls = []
    original = coherence.excitation_survival

    def spy(pair, flux, sample_rate, rates, indices):
        calls.append((np.ptp(flux), rates.t1_tunable))
        return original(pair, flux, sample_rate, rates, indices)

    monkeypatch.setattr(coherence, 'excitation_survival', spy)
    profile = NoiseProfile(t1_drift=[(0.0, 1.0), (3.0, 0.5)])
    simulate_t1_under_modulation(q6q7, 0.3, 92.0, profile, np.linspace(0.0, 60000.0, 16), 4, seed=2,
                                 experiment_index=3, max_workers=1)
    assert len(calls) == 4
    # o fluxo propagado carrega a modulação de amplitude 0.3 Φ0 e a deriva de T1
    assert all(span == pytest.approx(0.6, abs=0.01) for span, _ in calls)
    assert all(t1 == pytest.approx(0.5 * q6q7.tunable.t1) for _, t1 in calls)


def test_amplitude_scale_from_curve():
    raw = np.linspace(0.0, 2.4, 25)
    assert amplitude_scale_from_curve(raw, (raw - 1.2) ** 2 - 3.0) == pytest.approx(0.5)
    raw = np.linspace(0.0, 1.2, 25)
    assert amplitude_scale_from_curve(raw, (raw - 0.6) ** 2) == pytest.approx(1.0)


def test_amplitude_scale_needs_interior_minimum():
    raw = np.linspace(0.0, 1.0, 11)
    with pytest.raises(NoSweetSpotError):
        amplitude_scale_from_curve(raw, -raw)


def _t2_star_series(pair, epsilon, profile, delays, seeds, shots=150):
    return [simulate_ramsey_under_modulation(pair, epsilon, 92.0, profile, delays, shots, seed=seed).value_us
            for seed in seeds]


@pytest.mark.slow
def test_resurgence_contrast(q6q7):
    epsilon_star = sweet_spot_amplitude(q6q7.tunable, 92.0)
    delays = np.linspace(0.0, 2.5 * q6q7.tunable.t2_star * 1000.0, 61)
    ratios = {}
    for floor in (-150.0, -135.0):
        profile = NoiseProfile(white_floor=floor)
        at_zero = _t2_star_series(q6q7, 0.0, profile, delays, range(100, 120))
        at_star = _t2_star_series(q6q7, epsilon_star, profile, delays, range(200, 220))
        ratios[floor] = np.mean(at_star) / np.mean(at_zero)
    assert ratios[-150.0] > 0.9
    assert 0.4 <= ratios[-135.0] <= 0.8


@pytest.mark.slow
def test_raising_white_floor_never_lengthens_t2_star(q6q7):
    delays = np.linspace(0.0, 2.5 * q6q7.tunable.t2_star * 1000.0, 61)
    quiet = _t2_star_series(q6q7, 0.5, NoiseProfile(white_floor=-150.0), delays, range(20))
    loud = _t2_star_series(q6q7, 0.5, NoiseProfile(white_floor=-135.0), delays, range(20))
    assert stats.mannwhitneyu(loud, quiet, alternative='less').pvalue < 0.05
    assert np.mean(loud) < np.mean(quiet)


@pytest.mark.slow
def test_one_over_f_dip_away_from_sweet_spot(q6q7):
    epsilon_star = sweet_spot_amplitude(q6q7.tunable, 92.0)
    grid = np.linspace(0.02, epsilon_star, 40)
    shifts = [modulation_response(q6q7.tunable, epsilon, 92.0).avg_shift for epsilon in grid]
    steepest = float(grid[int(np.argmax(np.abs(np.gradient(shifts, grid))))])
    assert steepest < 0.9 * epsilon_star

    profile = NoiseProfile(one_over_f_amp=10.0)
    delays = np.linspace(0.0, 2.5 * q6q7.tunable.t2_star * 1000.0, 201)
    at_steepest = _t2_star_series(q6q7, steepest, profile, delays, range(300, 305), shots=200)
    at_star = _t2_star_series(q6q7, epsilon_star, profile, delays, range(400, 405), shots=200)
    assert np.mean(at_steepest) < 0.8 * np.mean(at_star)
