"""
Ajuste fino do CZ paramétrico: extração das fases por Ramsey condicional
simulado e escolha do ponto de operação (ω_p, duração) perto do contorno
de ressonância.
"""

import math
import time
from concurrent.futures import ThreadPoolExecutor

import numpy as np
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize

import config
from device import effective_coupling, resonance_contour
from dynamics import (COMPUTATIONAL_INDICES, DIM, average_gate_fidelity, evolve_operators, gate_superoperator,
                      ideal_cz_unitary, propagator, state_index)
from errors import CalibrationFailedError, FitError, InvalidInputError, LowSignalError, UnreliablePhaseError
from logging_config import get_calibration_logger
from pulse import FluxPulse
from .chevron import fit_slice, run_chevron

# Obtém o logger configurado para este módulo
logging = get_calibration_logger()

TWO_PI = 2.0 * math.pi

# estados preparados na sequência de Ramsey condicional (fixo, sintonizável)
_RAMSEY_PREPARATIONS = {
    'tunable': ('00', '01'),
    'fixed': ('00', '10'),
    'conditional': ('10', '11'),
}


class PhaseExtraction(BaseModel):
    model_config = ConfigDict(frozen=True)

    entangling_phase: float
    theta_tunable: float
    theta_fixed: float
    leakage: float
    residual_11_02_population: float
    swap_error: float


class CZCalibration(BaseModel):
    model_config = ConfigDict(frozen=True)

    omega_p: float                  # MHz
    duration: float                 # ns
    epsilon: float                  # Φ0
    edge: float                     # ns
    dc_bias: float = 0.0
    entangling_phase: float         # rad, em [0, 2π)
    theta_tunable: float
    theta_fixed: float
    g_eff: float                    # MHz
    residual_11_02_population: float = Field(ge=0)
    phase_error: float              # |φ − π|
    leakage: float = 0.0
    swap_error: float = 0.0
    fidelity: float | None = None   # fidelidade média após correção de referencial
    met_threshold: bool = True

    @property
    def frame_z(self):
        return self.theta_tunable, self.theta_fixed

    def pulse(self):
        return FluxPulse(amplitude=self.epsilon, mod_freq=self.omega_p, duration=self.duration, edge=self.edge,
                         dc_bias=self.dc_bias)


class SearchConfig(BaseModel):
    model_config = ConfigDict(frozen=True)

    frequency_span: float = Field(default=6.0, gt=0, description='MHz em torno do contorno')
    frequency_points: int = Field(default=13, ge=3)
    duration_points: int = Field(default=13, ge=3)
    duration_window: tuple[float, float] = (0.8, 1.25)     # frações da duração prevista
    edge: float = Field(default=24.0, ge=0)
    leakage_threshold: float = Field(default=config.DEFAULT_LEAKAGE_THRESHOLD, gt=0)
    leakage_weight: float = Field(default=10.0, ge=0)
    swap_weight: float = Field(default=10.0, ge=0)
    refine: bool = True
    max_iterations: int = Field(default=300, ge=1)
    rabi_points: int = Field(default=48, ge=8)
    sample_rate: float | None = None
    max_workers: int | None = None


def _wrap(phase):
    """Fase em [0, 2π); valores a 1e-9 de 2π voltam para 0."""
    wrapped = phase % TWO_PI
    return 0.0 if TWO_PI - wrapped < 1e-9 else wrapped


def _ramsey_inputs(dim):
    """Matrizes densidade das preparações (|a> + |b>)/√2 e dos estados |11>, |01>, |10>."""
    position = (lambda label: state_index(label)) if dim == DIM else \
        (lambda label: COMPUTATIONAL_INDICES.index(state_index(label)))
    states = []
    for first, second in _RAMSEY_PREPARATIONS.values():
        psi = np.zeros(dim, dtype=complex)
        psi[[position(first), position(second)]] = 1.0 / math.sqrt(2.0)
        states.append(np.outer(psi, psi.conj()))
    for label in ('11', '01', '10'):
        psi = np.zeros(dim, dtype=complex)
        psi[position(label)] = 1.0
        states.append(np.outer(psi, psi.conj()))
    return np.array(states), position


def _phases_from_outputs(outputs, position):
    """Fases de Ramsey a partir das coerências finais; populações para vazamento e troca."""
    coherences = []
    for rho, (first, second) in zip(outputs[:3], _RAMSEY_PREPARATIONS.values()):
        coherences.append(np.angle(rho[position(second), position(first)]))
    theta_tunable, theta_fixed, conditional = coherences

    rho_11, rho_01, rho_10 = outputs[3], outputs[4], outputs[5]
    if rho_11.shape[0] == DIM:
        computational = np.real(sum(rho_11[i, i] for i in COMPUTATIONAL_INDICES))
        residual = float(np.real(rho_11[state_index('02'), state_index('02')]))
    else:
        computational = float(np.real(np.trace(rho_11)))
        residual = 0.0
    swap = 0.5 * float(np.real(rho_01[position('10'), position('10')] + rho_10[position('01'), position('01')]))

    return PhaseExtraction(entangling_phase=_wrap(conditional - theta_tunable),
                           theta_tunable=_wrap(theta_tunable), theta_fixed=_wrap(theta_fixed),
                           leakage=max(0.0, 1.0 - computational),
                           residual_11_02_population=max(residual, 0.0), swap_error=max(swap, 0.0))


def phases_from_unitary(unitary):
    """Ramsey condicional aplicado a um propagador 4×4 (computacional) ou 9×9."""
    unitary = np.asarray(unitary, dtype=complex)
    inputs, position = _ramsey_inputs(unitary.shape[0])
    outputs = unitary[None] @ inputs @ unitary.conj().T[None]
    return _phases_from_outputs(outputs, position)


def extract_phases(pair, pulse, rates=None, sample_rate=None):
    """
    φ, θ_T e θ_F por Ramsey condicional simulado.

    θ vem da superposição de um qubit com o parceiro em |0>; φ é a fase com o
    parceiro em |1> menos θ_T. Vazamento de |11> acima de 5% torna a fase não confiável.
    """
    inputs, position = _ramsey_inputs(DIM)
    outputs = evolve_operators(pair, pulse, inputs, rates, sample_rate)
    phases = _phases_from_outputs(outputs, position)
    if phases.leakage > config.MAX_PHASE_LEAKAGE:
        raise UnreliablePhaseError(f'vazamento de {phases.leakage:.3f} torna a fase entrelaçante não confiável')
    return phases


def _objective(phases, search):
    return (abs(phases.entangling_phase - math.pi) + search.leakage_weight * phases.residual_11_02_population
            + search.swap_weight * phases.swap_error)


def _evaluate(pair, epsilon, omega_p, duration, search):
    pulse = FluxPulse(amplitude=epsilon, mod_freq=omega_p, duration=duration, edge=search.edge,
                      dc_bias=pair.dc_bias)
    phases = phases_from_unitary(propagator(pair, pulse, search.sample_rate))
    return pulse, phases


def _penalized(phases, search):
    excess = max(0.0, phases.residual_11_02_population - search.leakage_threshold)
    return _objective(phases, search) + 1e3 * excess


def _resonant_rabi(pair, epsilon, omega_p, predicted_period, search):
    """g_eff pelo ajuste de uma fatia de Rabi de pulso plano na frequência escolhida."""
    durations = np.linspace(0.0, 2.0 * predicted_period, search.rabi_points)
    dataset = run_chevron(pair, epsilon, [omega_p], durations, edge=0.0, sample_rate=search.sample_rate,
                          max_workers=search.max_workers)
    fit = fit_slice(dataset, omega_p)
    return fit.rabi_freq / 2.0


def search_window(pair, epsilon, search):
    """
    Janela de busca do CZ: centro no contorno de ressonância e duração prevista
    a partir do g_eff de Bessel (ciclo completo ≈ π/g_eff, mais meia borda de cada lado).
    Devolve (centro, g previsto, duração prevista, limites de ω_p, limites de duração).
    """
    center = float(resonance_contour(pair, [epsilon])[0])
    g_predicted = abs(effective_coupling(pair, epsilon, center, mode='bessel'))
    if g_predicted <= 0:
        raise CalibrationFailedError('acoplamento efetivo nulo nesta amplitude')
    predicted = 1000.0 / (2.0 * g_predicted) + search.edge
    lo, hi = search.duration_window
    frequency_bounds = (center - search.frequency_span / 2, center + search.frequency_span / 2)
    duration_bounds = (max(lo * predicted, 2.0 * search.edge), hi * predicted)
    return center, g_predicted, predicted, frequency_bounds, duration_bounds


def _refine(cost, start, bounds, search):
    """Nelder-Mead limitado à janela de busca; o simplex inicial anda para dentro dos limites."""
    steps = (0.2, 2.0)
    simplex = [list(start)]
    for axis, step in enumerate(steps):
        vertex = list(start)
        low, high = bounds[axis]
        vertex[axis] = vertex[axis] + step if vertex[axis] + step <= high else vertex[axis] - step
        vertex[axis] = min(max(vertex[axis], low), high)
        simplex.append(vertex)
    return optimize.minimize(cost, x0=list(start), method='Nelder-Mead', bounds=bounds,
                             options={'xatol': 1e-4, 'fatol': 1e-7, 'maxiter': search.max_iterations,
                                      'initial_simplex': simplex})


def calibrate_cz(pair, epsilon, search_config=None):
    """
    Escolhe (ω_p, duração) que mais se aproxima de CPHASE(π) com população residual
    em |02> abaixo do limiar. Grade grossa ao redor do contorno, depois Nelder-Mead
    sobre |φ − π| + w·vazamento + w·troca, sem sair da janela da grade.
    Caminho sem ruído: determinístico.
    """
    search = search_config or SearchConfig()
    if epsilon <= 0:
        raise InvalidInputError('epsilon deve ser positivo para calibrar o CZ')

    logging.info('=' * 60)
    logging.info('Calibração do CZ em ε=%.4f Φ0', epsilon)
    inicio = time.time()

    center, g_predicted, predicted, frequency_bounds, duration_bounds = search_window(pair, epsilon, search)
    logging.info('Contorno: ω_p=%.3f MHz, g_eff previsto %.3f MHz, duração prevista %.1f ns',
                 center, g_predicted, predicted)

    frequencies = np.linspace(*frequency_bounds, search.frequency_points)
    durations = np.linspace(*duration_bounds, search.duration_points)
    grid = [(f, d) for f in frequencies for d in durations]
    with ThreadPoolExecutor(max_workers=search.max_workers) as executor:
        results = list(executor.map(lambda fd: _evaluate(pair, epsilon, fd[0], fd[1], search), grid))

    scored = [(_penalized(phases, search), pulse, phases) for pulse, phases in results]
    best_score, best_pulse, best_phases = min(scored, key=lambda item: item[0])
    logging.info('Grade: melhor ω_p=%.3f MHz, T=%.2f ns, |φ−π|=%.4f, |02>=%.2e',
                 best_pulse.mod_freq, best_pulse.duration, abs(best_phases.entangling_phase - math.pi),
                 best_phases.residual_11_02_population)

    if search.refine:
        def cost(x):
            return _penalized(_evaluate(pair, epsilon, x[0], x[1], search)[1], search)

        result = _refine(cost, (best_pulse.mod_freq, best_pulse.duration), [frequency_bounds, duration_bounds],
                         search)
        if result.fun < best_score:
            best_pulse, best_phases = _evaluate(pair, epsilon, result.x[0], result.x[1], search)
            best_score = result.fun
        logging.info('Refinamento Nelder-Mead: %d avaliações, custo %.3e', result.nfev, best_score)

    try:
        g_eff = _resonant_rabi(pair, epsilon, best_pulse.mod_freq, 1000.0 / (2.0 * g_predicted), search)
    except (FitError, LowSignalError) as e:
        logging.warning('Ajuste de Rabi ressonante falhou (%s); usando g_eff previsto', e)
        g_eff = g_predicted

    met = best_phases.residual_11_02_population < search.leakage_threshold
    channel = gate_superoperator(pair, best_pulse,
                                 frame_corrections=(best_phases.theta_tunable, best_phases.theta_fixed),
                                 sample_rate=search.sample_rate)
    calibration = CZCalibration(
        omega_p=float(best_pulse.mod_freq), duration=float(best_pulse.duration), epsilon=epsilon,
        edge=search.edge, dc_bias=pair.dc_bias, entangling_phase=best_phases.entangling_phase,
        theta_tunable=best_phases.theta_tunable, theta_fixed=best_phases.theta_fixed, g_eff=float(g_eff),
        residual_11_02_population=best_phases.residual_11_02_population,
        phase_error=abs(best_phases.entangling_phase - math.pi), leakage=best_phases.leakage,
        swap_error=best_phases.swap_error, fidelity=average_gate_fidelity(channel, ideal_cz_unitary()),
        met_threshold=met)

    logging.info('CZ: ω_p=%.3f MHz, T=%.2f ns, φ=%.5f rad, F=%.6f, |02>=%.2e (%.2f s)',
                 calibration.omega_p, calibration.duration, calibration.entangling_phase, calibration.fidelity,
                 calibration.residual_11_02_population, time.time() - inicio)
    logging.info('=' * 60)
    if not met:
        raise CalibrationFailedError(f'nenhum ponto com população residual em |02> abaixo de '
                                     f'{search.leakage_threshold:g}', best=calibration)
    return calibration
