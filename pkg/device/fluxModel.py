"""
Física estática do transmon assimétrico sob modulação de fluxo:
espectro f(Φ), expansão da modulação, ponto doce AC, acoplamento efetivo
e condição de ressonância |11>-|02>.
"""

import math

import numpy as np
from pydantic import BaseModel, ConfigDict
from scipy import integrate, optimize, special

import config
from errors import InvalidInputError, NoSweetSpotError
from logging_config import get_device_logger

# Obtém o logger configurado para este módulo
logging = get_device_logger()

SIGN_CONVENTIONS = ('eta_subtracts', 'eta_adds')


class ModulationResponse(BaseModel):
    model_config = ConfigDict(frozen=True)

    epsilon: float
    mod_freq: float
    avg_shift: float                       # δω_T/2π (MHz)
    harmonics: list[tuple[int, float]]     # (índice do harmônico de ω_p, amplitude em MHz)
    excursion_flagged: bool = False

    @property
    def lambda_2(self):
        """Amplitude λ(ε) do termo cos(2ω_p t) (MHz)."""
        for index, amplitude in self.harmonics:
            if index == 2:
                return amplitude
        return 0.0


def frequency_at_flux(spec, phi):
    """
    Frequência 0→1 (GHz) do transmon assimétrico no fluxo phi (Φ0).

    f(Φ) = (f_max+|η|)·[cos²(πΦ) + d²·sin²(πΦ)]^(1/4) − |η|
    Aceita escalares ou arrays numpy.
    """
    if not spec.tunable:
        raise InvalidInputError('frequency_at_flux exige um transmon sintonizável')
    eta = spec.eta_ghz
    d = spec.asymmetry
    angle = np.pi * np.asarray(phi, dtype=float)
    # cos² + d²sin² = 1 − (1−d²)sin²; forma estável perto de Φ = 0
    bracket = 1.0 - (1.0 - d * d) * np.sin(angle) ** 2
    freq = (spec.f_max + eta) * bracket ** 0.25 - eta
    return float(freq) if np.ndim(freq) == 0 else freq


def frequency_derivative(spec, phi):
    """df/dΦ (GHz/Φ0), usado pelos modelos de ruído."""
    eta = spec.eta_ghz
    d = spec.asymmetry
    angle = np.pi * np.asarray(phi, dtype=float)
    k = 1.0 - d * d
    bracket = 1.0 - k * np.sin(angle) ** 2
    return -(spec.f_max + eta) * (np.pi * k / 4.0) * np.sin(2 * angle) * bracket ** -0.75


def _average_shift_mhz(spec, epsilon, dc_bias=0.0):
    """δω_T/2π (MHz) por quadratura adaptativa sobre um período da modulação."""
    if epsilon == 0.0:
        return 0.0
    f_park = frequency_at_flux(spec, dc_bias)

    def integrand(theta):
        return frequency_at_flux(spec, dc_bias + epsilon * math.cos(theta)) - f_park

    if dc_bias == 0.0:
        # integrando par e simétrico em θ → π − θ: basta meio período
        value, _ = integrate.quad(integrand, 0.0, math.pi, epsrel=config.QUADRATURE_RTOL,
                                  epsabs=1e-14, limit=200)
        value /= math.pi
    else:
        value, _ = integrate.quad(integrand, 0.0, 2 * math.pi, epsrel=config.QUADRATURE_RTOL,
                                  epsabs=1e-14, limit=200)
        value /= 2 * math.pi
    shift = value + f_park - spec.f_max
    return 1000.0 * shift


def modulation_response(spec, epsilon, omega_p, dc_bias=0.0, n_harmonics=3):
    """
    Resposta da frequência do transmon a Φ(t) = Φ_dc + ε·cos(ω_p t).

    Retorna δω_T = média temporal − f_max e os coeficientes de Fourier λ_m
    (MHz) dos harmônicos m·ω_p. Com Φ_dc = 0 só aparecem harmônicos pares.
    """
    if epsilon < 0:
        raise InvalidInputError('epsilon deve ser >= 0')
    flagged = abs(dc_bias) + epsilon > 0.5
    if flagged:
        logging.warning('Excursão de fluxo além de ±0.5 Φ0 (ε=%.3f, Φ_dc=%.3f); usando a forma periódica',
                        epsilon, dc_bias)

    avg_shift = _average_shift_mhz(spec, epsilon, dc_bias)

    harmonics = []
    if epsilon > 0:
        # série de Fourier em θ = ω_p t; função par em θ → só cossenos
        n_theta = 2048
        theta = 2 * np.pi * np.arange(n_theta) / n_theta
        trace = 1000.0 * frequency_at_flux(spec, dc_bias + epsilon * np.cos(theta))
        coeffs = np.fft.rfft(trace) / n_theta
        indices = range(2, 2 * n_harmonics + 1, 2) if dc_bias == 0.0 else range(1, 2 * n_harmonics + 1)
        for m in indices:
            harmonics.append((m, float(2.0 * coeffs[m].real)))
    else:
        harmonics = [(m, 0.0) for m in range(2, 2 * n_harmonics + 1, 2)]

    return ModulationResponse(epsilon=epsilon, mod_freq=omega_p, avg_shift=avg_shift,
                              harmonics=harmonics, excursion_flagged=flagged)


def sweet_spot_amplitude(spec, omega_p=None, dc_bias=0.0):
    """
    Amplitude ε* do ponto doce AC: mínimo de ω̄_T(ε) em (0, 1] Φ0.

    Varredura grossa para encontrar o colchete e busca de seção áurea em seguida.
    omega_p não altera a média temporal; é aceito para manter a assinatura da operação.
    """
    if not spec.tunable or spec.f_max - spec.f_min <= 1e-12:
        raise NoSweetSpotError('espectro plano: não existe ponto doce AC')

    step = config.SWEET_SPOT_GRID_STEP
    grid = np.arange(step, 1.0 + step / 2, step)
    shifts = np.array([_average_shift_mhz(spec, e, dc_bias) for e in grid])
    i = int(np.argmin(shifts))
    if i == 0 or i == len(grid) - 1:
        raise NoSweetSpotError(f'sem mínimo interior de δω_T em (0, 1] Φ0 (argmin na borda ε={grid[i]:.3f})')

    result = optimize.minimize_scalar(lambda e: _average_shift_mhz(spec, e, dc_bias),
                                      bracket=(grid[i - 1], grid[i], grid[i + 1]),
                                      method='golden', tol=1e-10)
    epsilon_star = float(result.x)
    logging.info('Ponto doce AC em ε*=%.5f Φ0 (δω_T=%.3f MHz)', epsilon_star, result.fun)
    return epsilon_star


def detuning_mhz(pair):
    """Δ/2π = ω_T(Φ_dc) − ω_F em MHz."""
    return 1000.0 * (frequency_at_flux(pair.tunable, pair.dc_bias) - pair.fixed_frequency)


def _transition_gap(pair, avg_shift, convention):
    convention = convention or config.RESONANCE_SIGN_CONVENTION
    if convention not in SIGN_CONVENTIONS:
        raise InvalidInputError(f'convenção de sinal desconhecida: {convention}')
    eta = pair.tunable.anharmonicity
    if convention == 'eta_subtracts':
        return abs(detuning_mhz(pair) - eta + avg_shift)
    return abs(detuning_mhz(pair) + eta + avg_shift)


def resonance_offset(pair, epsilon, omega_p, convention=None):
    """
    Ξ = 2ω_p − |Δ − |η_T| + δω_T(ε)| (MHz). Ξ = 0 define o contorno de ressonância.
    `convention='eta_adds'` usa a leitura alternativa |Δ + |η_T| + δω_T|.
    """
    shift = _average_shift_mhz(pair.tunable, epsilon, pair.dc_bias)
    return 2.0 * omega_p - _transition_gap(pair, shift, convention)


def resonance_contour(pair, epsilons, harmonic=1, convention=None):
    """ω_p(ε) que anula Ξ para cada amplitude (o contorno amplitude-frequência)."""
    freqs = []
    for e in np.atleast_1d(epsilons):
        shift = _average_shift_mhz(pair.tunable, float(e), pair.dc_bias)
        freqs.append(_transition_gap(pair, shift, convention) / (2.0 * harmonic))
    return np.array(freqs)


def _phase_factor_coefficient(deviation, omega_p, theta):
    """Coeficiente da fase exp(−iϕ) na banda lateral 2ω_p que fecha a ressonância |11>-|02>."""
    n_theta = theta.size
    spectrum = np.fft.fft(deviation - deviation.mean())
    m = np.fft.fftfreq(n_theta, d=1.0 / n_theta)
    phase_spec = np.zeros_like(spectrum)
    nonzero = m != 0
    # ϕ(θ) = (1/ω_p)∫(f − f̄)dθ ⇒ coeficiente / (i·m·ω_p)
    phase_spec[nonzero] = spectrum[nonzero] / (1j * m[nonzero] * omega_p)
    phase = np.fft.ifft(phase_spec).real
    # E11 − E02 = −(f_T − f_F − η): a fase do tunável entra com sinal negativo
    return float(-np.mean(np.exp(-1j * phase) * np.exp(-2j * theta)).real)


def sideband_coefficient(spec, epsilon, omega_p, dc_bias=0.0, n_theta=4096, waveform=False):
    """
    Coeficiente de Fourier c_1 do fator de fase da modulação de frequência na
    frequência 2ω_p, calculado por FFT sobre uma volta de θ = ω_p·t.

    waveform=False usa a modulação de frequência de tom único δω_T·cos(2ω_p t),
    para a qual c_1 = J₁(δω_T/2ω_p) a menos do erro de discretização.
    waveform=True usa a forma de onda completa f(Φ_dc + ε·cos θ), com todos os
    harmônicos; só coincide com a forma de Bessel para ε pequeno.
    """
    if epsilon == 0.0:
        return 0.0
    theta = 2 * np.pi * np.arange(n_theta) / n_theta
    if waveform:
        deviation = 1000.0 * frequency_at_flux(spec, dc_bias + epsilon * np.cos(theta))
    else:
        deviation = _average_shift_mhz(spec, epsilon, dc_bias) * np.cos(2.0 * theta)
    return _phase_factor_coefficient(deviation, omega_p, theta)


def effective_coupling(pair, epsilon, omega_p, mode='bessel'):
    """
    g_eff/2π (MHz) do acoplamento |11>-|02> sob modulação.

    mode='bessel'    -> √2·g·J₁(δω_T/2ω_p)
    mode='numerical' -> √2·g·c_1, com c_1 obtido numericamente do fator de fase
    mode='waveform'  -> √2·g·c_1 da forma de onda de frequência completa
    O sinal segue o de δω_T (negativo ao modular em torno do máximo).
    """
    if mode == 'bessel':
        shift = _average_shift_mhz(pair.tunable, epsilon, pair.dc_bias)
        return math.sqrt(2.0) * pair.g * float(special.jv(1, shift / (2.0 * omega_p)))
    if mode in ('numerical', 'waveform'):
        c1 = sideband_coefficient(pair.tunable, epsilon, omega_p, pair.dc_bias, waveform=(mode == 'waveform'))
        return math.sqrt(2.0) * pair.g * c1
    raise InvalidInputError(f'modo de acoplamento desconhecido: {mode}')
