import math

import numpy as np
import pytest
from scipy import special

from device import (TransmonSpec, detuning_mhz, effective_coupling, frequency_at_flux, frequency_derivative,
                    modulation_response, pair_from_dict, pure_dephasing_time, resonance_contour, resonance_offset,
                    sweet_spot_amplitude)
from errors import ConfigError, InvalidInputError, NoSweetSpotError


def test_frequency_extremes(q6q7):
    spec = q6q7.tunable
    assert frequency_at_flux(spec, 0.0) == pytest.approx(4.475, abs=1e-9)
    assert frequency_at_flux(spec, 0.5) == pytest.approx(4.080, abs=1e-9)


def test_frequency_is_even_and_periodic(q6q7):
    spec = q6q7.tunable
    phi = np.linspace(-0.7, 0.7, 29)
    assert np.allclose(frequency_at_flux(spec, phi), frequency_at_flux(spec, -phi), atol=1e-12)
    assert np.allclose(frequency_at_flux(spec, phi), frequency_at_flux(spec, phi + 1.0), atol=1e-12)


def test_frequency_closed_form_quarter_flux(q6q7):
    spec = q6q7.tunable
    d = ((4.080 + 0.2) / (4.475 + 0.2)) ** 2
    expected = (4.475 + 0.2) * (0.5 + 0.5 * d * d) ** 0.25 - 0.2
    assert d == pytest.approx(0.838, abs=1e-3)
    assert frequency_at_flux(spec, 0.25) == pytest.approx(expected, abs=1e-12)


def test_derivative_matches_finite_difference(q6q7):
    spec = q6q7.tunable
    h = 1e-6
    for phi in (0.1, 0.25, 0.4):
        numeric = (frequency_at_flux(spec, phi + h) - frequency_at_flux(spec, phi - h)) / (2 * h)
        assert frequency_derivative(spec, phi) == pytest.approx(numeric, rel=1e-6)


def test_fixed_transmon_rejected(q6q7):
    with pytest.raises(InvalidInputError):
        frequency_at_flux(q6q7.fixed, 0.1)


def test_average_shift_scales_quadratically(q6q7):
    small = modulation_response(q6q7.tunable, 0.01, 92.0).avg_shift
    double = modulation_response(q6q7.tunable, 0.02, 92.0).avg_shift
    assert small < 0
    assert double / small == pytest.approx(4.0, rel=0.01)


def test_zero_amplitude_has_no_shift(q6q7):
    response = modulation_response(q6q7.tunable, 0.0, 92.0)
    assert response.avg_shift == 0.0
    assert response.lambda_2 == 0.0


def test_only_even_harmonics_at_zero_bias(q6q7):
    response = modulation_response(q6q7.tunable, 0.3, 92.0)
    assert [m for m, _ in response.harmonics] == [2, 4, 6]
    assert response.lambda_2 < 0


def test_excursion_beyond_half_flux_is_flagged(q6q7):
    assert modulation_response(q6q7.tunable, 0.7, 92.0).excursion_flagged
    assert not modulation_response(q6q7.tunable, 0.4, 92.0).excursion_flagged


def test_sweet_spot_location(q6q7):
    epsilon_star = sweet_spot_amplitude(q6q7.tunable, 92.0)
    assert 0.5 <= epsilon_star <= 0.7
    left = modulation_response(q6q7.tunable, epsilon_star - 0.01, 92.0).avg_shift
    at = modulation_response(q6q7.tunable, epsilon_star, 92.0).avg_shift
    right = modulation_response(q6q7.tunable, epsilon_star + 0.01, 92.0).avg_shift
    assert at <= left and at <= right


def test_sweet_spot_matches_dense_scan(q6q7):
    perturbed = q6q7.tunable.model_copy(update={'f_min': 3.980})
    grid = np.arange(0.3, 0.9, 0.001)
    shifts = [modulation_response(perturbed, float(e), 92.0).avg_shift for e in grid]
    assert sweet_spot_amplitude(perturbed, 92.0) == pytest.approx(grid[int(np.argmin(shifts))], abs=2e-3)


def test_flat_spectrum_has_no_sweet_spot():
    flat = TransmonSpec(f_max=4.0, f_min=4.0, anharmonicity=200.0, tunable=True)
    with pytest.raises(NoSweetSpotError):
        sweet_spot_amplitude(flat, 92.0)


def test_resonance_offset_without_modulation(q6q7):
    assert detuning_mhz(q6q7) == pytest.approx(649.0, abs=1e-6)
    assert resonance_offset(q6q7, 0.0, 92.0) == pytest.approx(-265.0, abs=1e-6)


def test_contour_zeroes_the_offset(q6q7):
    epsilons = [0.4, 0.6, 0.8]
    for epsilon, omega_p in zip(epsilons, resonance_contour(q6q7, epsilons)):
        assert resonance_offset(q6q7, epsilon, omega_p) == pytest.approx(0.0, abs=1e-9)


def test_sign_convention_alternative(q6q7):
    offset = resonance_offset(q6q7, 0.0, 92.0, convention='eta_adds')
    assert offset == pytest.approx(2 * 92.0 - (649.0 + 200.0), abs=1e-6)
    with pytest.raises(InvalidInputError):
        resonance_offset(q6q7, 0.0, 92.0, convention='other')


def test_effective_coupling_numerical_matches_bessel_over_amplitude_sweep(q6q7):
    checked = 0
    for epsilon in np.linspace(0.02, 0.95, 32):
        shift = modulation_response(q6q7.tunable, epsilon, 92.0).avg_shift
        if abs(shift / (2 * 92.0)) > 1.0:
            continue
        bessel = effective_coupling(q6q7, epsilon, 92.0, mode='bessel')
        numerical = effective_coupling(q6q7, epsilon, 92.0, mode='numerical')
        assert abs(numerical - bessel) <= 0.05 * abs(bessel), epsilon
        assert np.sign(numerical) == np.sign(bessel)
        checked += 1
    assert checked >= 8


def test_effective_coupling_waveform_agrees_at_small_amplitude(q6q7):
    for epsilon in (0.05, 0.1):
        bessel = effective_coupling(q6q7, epsilon, 92.0, mode='bessel')
        waveform = effective_coupling(q6q7, epsilon, 92.0, mode='waveform')
        assert waveform == pytest.approx(bessel, rel=0.05)


def test_effective_coupling_unknown_mode(q6q7):
    with pytest.raises(InvalidInputError):
        effective_coupling(q6q7, 0.3, 92.0, mode='exact')


def test_effective_coupling_small_argument_linearity(q6q7):
    ratios = []
    for epsilon in (0.03, 0.06, 0.09):
        shift = modulation_response(q6q7.tunable, epsilon, 92.0).avg_shift
        assert abs(shift / (2 * 92.0)) <= 0.1
        ratios.append(effective_coupling(q6q7, epsilon, 92.0) / shift)
    assert np.ptp(ratios) / abs(np.mean(ratios)) < 0.01
    assert ratios[0] == pytest.approx(math.sqrt(2) * q6q7.g / (4 * 92.0), rel=0.01)


def test_effective_coupling_bessel_formula(q6q7):
    shift = modulation_response(q6q7.tunable, 0.6, 92.0).avg_shift
    expected = math.sqrt(2) * 5.0 * special.jv(1, shift / (2 * 92.0))
    assert effective_coupling(q6q7, 0.6, 92.0) == pytest.approx(expected, rel=1e-9)


def test_pure_dephasing_time():
    assert pure_dephasing_time(10.0, 10.0) == pytest.approx(20.0)
    assert math.isinf(pure_dephasing_time(20.0, 40.0))


def test_pair_from_dict_reports_the_key(q6q7):
    data = q6q7.model_dump()
    del data['tunable']['f_max']
    with pytest.raises(ConfigError) as info:
        pair_from_dict(data)
    assert info.value.key == 'tunable.f_max'


def test_unphysical_t2_rejected(q6q7):
    data = q6q7.model_dump()
    data['fixed']['t2_star'] = 3.0 * data['fixed']['t1']
    with pytest.raises(ConfigError):
        pair_from_dict(data)


def test_tunable_role_enforced(q6q7):
    data = q6q7.model_dump()
    data['tunable']['tunable'] = False
    with pytest.raises(ConfigError):
        pair_from_dict(data)
