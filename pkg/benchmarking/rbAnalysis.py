"""
Análise de decaimentos de RB: ajuste A·p^m + B, infidelidade de porta
intercalada, intervalos por bootstrap paramétrico, teste de estabilidade
entre decaimentos repetidos e ECDF com banda de confiança.
"""

import math

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field
from scipy import optimize, stats

import config
from errors import FitError, InvalidInputError
from logging_config import get_benchmarking_logger

# Obtém o logger configurado para este módulo
logging = get_benchmarking_logger()

QUBIT_DIM = 4
MAX_FAILED_FRACTION = 0.05
LM_ITERATIONS = 80


def _decay(m, amplitude, p, offset):
    return amplitude * np.power(p, m) + offset


def _z_value(confidence):
    return float(stats.norm.ppf(0.5 + confidence / 2.0))


class DecayFit(BaseModel):
    model_config = ConfigDict(frozen=True)

    amplitude: float
    p: float
    offset: float
    covariance: list[list[float]]
    p_ci: tuple[float, float]
    weighted: bool = True
    clamped: bool = False           # p ajustado fora de [0, 1]
    residual_rms: float = 0.0

    @property
    def p_sigma(self):
        return math.sqrt(max(self.covariance[1][1], 0.0))

    @property
    def p_bounded(self):
        return min(max(self.p, 0.0), 1.0)


def _initial_guess(lengths, means, dim):
    """B fixo em 1/d e pré-ajuste log-linear de A·p^m."""
    offset = 1.0 / dim
    shifted = means - offset
    mask = shifted > 1e-6
    if np.count_nonzero(mask) >= 2:
        slope, intercept = np.polyfit(lengths[mask], np.log(shifted[mask]), 1)
        p = float(np.clip(math.exp(slope), 0.5, 0.99999))
        return [float(math.exp(intercept)), p, offset]
    return [0.5, 0.95, offset]


def fit_decay(dataset, dim=QUBIT_DIM, confidence=config.CONFIDENCE_LEVEL):
    """
    Mínimos quadrados ponderados pela variância entre sequências de cada comprimento.

    Sem variância (ou se o ajuste ponderado falhar) recai no ajuste sem pesos
    e marca `weighted=False`. Dados constantes devolvem p = 1.
    """
    lengths, means, variances, counts = dataset.by_length()
    lengths = lengths.astype(float)
    if len(lengths) < 3:
        raise InvalidInputError(f'são necessários pelo menos 3 comprimentos; recebidos {len(lengths)}')

    if np.ptp(means) < 1e-12:
        return DecayFit(amplitude=0.0, p=1.0, offset=float(means[0]), covariance=np.zeros((3, 3)).tolist(),
                        p_ci=(1.0, 1.0), weighted=False)

    sigma = np.sqrt(variances / counts)
    p0 = _initial_guess(lengths, means, dim)
    bounds = ([-1.0, 0.0, -1.0], [2.0, 1.5, 2.0])
    attempts = [True, False] if np.all(sigma > 0) else [False]

    last_error = None
    for weighted in attempts:
        try:
            params, covariance = optimize.curve_fit(_decay, lengths, means, p0=p0, bounds=bounds,
                                                    sigma=sigma if weighted else None,
                                                    absolute_sigma=weighted, maxfev=20000)
        except (RuntimeError, ValueError) as e:
            last_error = e
            continue
        if not np.all(np.isfinite(covariance)):
            last_error = ValueError('covariância indefinida')
            continue
        if not weighted and len(attempts) > 1:
            logging.warning('Ajuste ponderado falhou (%s); usando ajuste sem pesos', last_error)
        residuals = means - _decay(lengths, *params)
        half_width = _z_value(confidence) * math.sqrt(covariance[1, 1])
        return DecayFit(amplitude=float(params[0]), p=float(params[1]), offset=float(params[2]),
                        covariance=covariance.tolist(), p_ci=(float(params[1] - half_width), float(params[1] + half_width)),
                        weighted=weighted, clamped=not 0.0 <= params[1] <= 1.0,
                        residual_rms=float(np.sqrt(np.mean(residuals ** 2))))

    raise FitError(f'ajuste do decaimento não convergiu: {last_error}', residuals=means - np.mean(means))


# --- ajuste vetorizado para as réplicas de bootstrap ----------------------------

def _grouped_moments(lengths, unique_lengths, survival):
    """Média e variância por comprimento de uma matriz (réplicas, linhas)."""
    means = np.empty((survival.shape[0], len(unique_lengths)))
    variances = np.empty_like(means)
    counts = np.empty(len(unique_lengths))
    for j, length in enumerate(unique_lengths):
        values = survival[:, lengths == length]
        counts[j] = values.shape[1]
        means[:, j] = values.mean(axis=1)
        variances[:, j] = values.var(axis=1, ddof=1) if values.shape[1] > 1 else 0.0
    return means, variances, counts


def _batch_fit(lengths, means, weights, start, iterations=LM_ITERATIONS):
    """Levenberg-Marquardt simultâneo de A·p^m + B para cada linha de `means`."""
    m = lengths.astype(float)[None, :]
    theta = np.tile(np.asarray(start, dtype=float), (means.shape[0], 1))
    damping = np.full(means.shape[0], 1e-3)

    def cost_of(params):
        model = params[:, 0:1] * np.power(params[:, 1:2], m) + params[:, 2:3]
        return np.sum((weights * (means - model)) ** 2, axis=1)

    with np.errstate(all='ignore'):
        cost = cost_of(theta)
        for _ in range(iterations):
            amplitude, p = theta[:, 0:1], theta[:, 1:2]
            power = np.power(p, m)
            jacobian = np.stack([power, amplitude * m * np.power(p, m - 1.0), np.ones_like(power)], axis=-1)
            jacobian = jacobian * weights[..., None]
            residual = weights * (means - (amplitude * power + theta[:, 2:3]))
            normal = np.einsum('rli,rlj->rij', jacobian, jacobian)
            gradient = np.einsum('rli,rl->ri', jacobian, residual)
            diagonal = np.einsum('rii->ri', normal)
            damped = normal + (damping[:, None] * diagonal + 1e-12)[..., None] * np.eye(3)
            try:
                step = np.linalg.solve(damped, gradient[..., None])[..., 0]
            except np.linalg.LinAlgError:
                break
            trial = theta + step
            trial_cost = cost_of(trial)
            better = np.isfinite(trial_cost) & (trial_cost < cost)
            theta[better] = trial[better]
            cost[better] = trial_cost[better]
            damping = np.where(better, damping * 0.3, damping * 10.0)
    ok = np.all(np.isfinite(theta), axis=1) & (theta[:, 1] > 0.0) & (theta[:, 1] < 1.5)
    return theta, ok


def _fit_survival(dataset, survival, start):
    """p ajustado por linha de uma matriz de sobrevivência (réplicas, linhas); NaN nas falhas."""
    unique_lengths = dataset.unique_lengths
    means, variances, counts = _grouped_moments(dataset.lengths, unique_lengths, survival)
    sigma = np.sqrt(variances / counts)
    weights = np.where(np.all(sigma > 0, axis=1, keepdims=True), 1.0 / np.where(sigma > 0, sigma, 1.0), 1.0)
    theta, ok = _batch_fit(unique_lengths, means, weights, start)
    estimates = np.where(ok, theta[:, 1], np.nan)
    # réplicas constantes (sobrevivência 1 em tudo) têm p indeterminado; ficam no valor inicial
    constant = np.ptp(means, axis=1) < 1e-12
    estimates[constant] = start[1]
    return estimates


def _replicate_p(dataset, probabilities, replicants, rng, start):
    """p ajustado em réplicas binomiais com probabilidade `probabilities` por linha (NaN nas falhas)."""
    successes = rng.binomial(dataset.shots[None, :], probabilities[None, :], size=(replicants, len(dataset.shots)))
    return _fit_survival(dataset, successes / dataset.shots[None, :], start)


def _length_means(dataset):
    lengths, means, _, _ = dataset.by_length()
    lookup = dict(zip(lengths.tolist(), means))
    return np.array([lookup[length] for length in dataset.lengths.tolist()])


class BootstrapResult(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    estimate: float
    low: float
    high: float
    samples: np.ndarray
    failures: int = 0
    unstable: bool = False


def bootstrap_ci(dataset, replicants=config.BOOTSTRAP_REPLICANTS, seed=None, confidence=config.CONFIDENCE_LEVEL,
                 statistic=None):
    """
    Intervalo percentil por bootstrap paramétrico.

    Cada réplica sorteia as contagens de cada sequência de Binomial(disparos, p̄_m),
    com p̄_m a média amostral do comprimento. Sem `statistic` a estatística é o p
    do decaimento (ajuste vetorizado); caso contrário `statistic(conjunto)` é
    chamado por réplica. Mais de 5% de ajustes falhos marca `unstable`.
    """
    if replicants < 1:
        raise InvalidInputError('são necessárias réplicas de bootstrap')
    rng = np.random.default_rng(seed)
    probabilities = _length_means(dataset)
    fit = fit_decay(dataset)

    if statistic is None:
        estimate = fit.p
        samples = _replicate_p(dataset, probabilities, replicants, rng, [fit.amplitude, fit.p, fit.offset])
    else:
        estimate = statistic(dataset)
        samples = np.empty(replicants)
        for i in range(replicants):
            successes = rng.binomial(dataset.shots, probabilities)
            try:
                samples[i] = statistic(dataset.with_successes(successes))
            except FitError:
                samples[i] = np.nan

    valid = samples[np.isfinite(samples)]
    failures = replicants - len(valid)
    unstable = failures > MAX_FAILED_FRACTION * replicants
    if unstable:
        logging.warning('Bootstrap instável: %d de %d ajustes falharam', failures, replicants)
    if len(valid) == 0:
        raise FitError('nenhuma réplica de bootstrap convergiu')
    tail = 100.0 * (1.0 - confidence) / 2.0
    low, high = np.percentile(valid, [tail, 100.0 - tail])
    return BootstrapResult(estimate=float(estimate), low=float(low), high=float(high), samples=valid,
                           failures=int(failures), unstable=bool(unstable))


class StabilityResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_first: float
    p_second: float
    difference: float
    p_value: float
    passed: bool


def stability_test(first, second, replicants=config.BOOTSTRAP_REPLICANTS, seed=None, alpha=config.STABILITY_ALPHA):
    """
    Testa se dois decaimentos repetidos vêm da mesma distribuição.

    Sob H0 as contagens de ambos são reamostradas da média agrupada de cada
    comprimento; o valor-p é a fração de réplicas com |Δp*| ≥ |Δp observado|.
    Δp observado e réplicas usam o mesmo ajuste em lote, partindo do ajuste agrupado.
    """
    if not np.array_equal(first.unique_lengths, second.unique_lengths):
        raise InvalidInputError('decaimentos com comprimentos diferentes não podem ser comparados')

    pooled = first.pooled(second)
    pooled_fit = fit_decay(pooled)
    probabilities = _length_means(pooled)
    start = [pooled_fit.amplitude, pooled_fit.p, pooled_fit.offset]

    p_first = float(_fit_survival(first, first.survival[None, :], start)[0])
    p_second = float(_fit_survival(second, second.survival[None, :], start)[0])
    if not (np.isfinite(p_first) and np.isfinite(p_second)):
        raise FitError('ajuste em lote dos decaimentos observados não convergiu')
    observed = p_first - p_second

    rng = np.random.default_rng(seed)
    n_first = len(first.lengths)
    replicated_first = _replicate_p(first, probabilities[:n_first], replicants, rng, start)
    replicated_second = _replicate_p(second, probabilities[n_first:], replicants, rng, start)
    differences = replicated_first - replicated_second
    differences = differences[np.isfinite(differences)]
    if len(differences) == 0:
        raise FitError('nenhuma réplica do teste de estabilidade convergiu')

    p_value = float(np.mean(np.abs(differences) >= abs(observed) - 1e-15))
    passed = p_value >= alpha
    logging.debug('Estabilidade: Δp=%.2e, valor-p=%.3f (%s)', observed, p_value, 'aceito' if passed else 'rejeitado')
    return StabilityResult(p_first=p_first, p_second=p_second, difference=float(observed),
                           p_value=p_value, passed=passed)


class IRBResult(BaseModel):
    model_config = ConfigDict(frozen=True)

    p_ref: float
    p_int: float
    infidelity: float
    avg_fidelity: float
    infidelity_ci: tuple[float, float]
    fidelity_ci: tuple[float, float]
    negative_infidelity: bool = False
    stability_passed: bool = True


def _p_and_sigma(value):
    if isinstance(value, DecayFit):
        return value.p, value.p_sigma
    return float(value), 0.0


def irb_estimate(reference, interleaved, dim=QUBIT_DIM, reference_samples=None, interleaved_samples=None,
                 confidence=config.CONFIDENCE_LEVEL):
    """
    r = (d−1)(1 − p_int/p_ref)/d e F̄ = 1 − r, sem truncar.

    Com amostras de bootstrap de ambos os p o IC é percentil sobre r*; senão
    propagação linear das variâncias dos ajustes. Infidelidade negativa além
    da tolerância estatística é sinalizada.
    """
    p_ref, sigma_ref = _p_and_sigma(reference)
    p_int, sigma_int = _p_and_sigma(interleaved)
    if p_ref <= 0.0:
        raise InvalidInputError(f'p de referência deve ser positivo: {p_ref}')
    scale = (dim - 1.0) / dim
    infidelity = scale * (1.0 - p_int / p_ref)

    if reference_samples is not None and interleaved_samples is not None:
        n = min(len(reference_samples), len(interleaved_samples))
        replicated = scale * (1.0 - np.asarray(interleaved_samples[:n]) / np.asarray(reference_samples[:n]))
        tail = 100.0 * (1.0 - confidence) / 2.0
        low, high = (float(v) for v in np.percentile(replicated, [tail, 100.0 - tail]))
        sigma = float(np.std(replicated))
    else:
        sigma = scale * math.hypot(sigma_int / p_ref, p_int * sigma_ref / p_ref ** 2)
        half_width = _z_value(confidence) * sigma
        low, high = infidelity - half_width, infidelity + half_width

    negative = infidelity < 0.0 and infidelity + _z_value(confidence) * sigma < 0.0
    if negative:
        logging.warning('Infidelidade negativa além da tolerância: r=%.2e', infidelity)
    return IRBResult(p_ref=p_ref, p_int=p_int, infidelity=float(infidelity), avg_fidelity=float(1.0 - infidelity),
                     infidelity_ci=(float(low), float(high)), fidelity_ci=(float(1.0 - high), float(1.0 - low)),
                     negative_infidelity=negative)


class ECDF(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    values: np.ndarray
    cumulative: np.ndarray
    band_low: np.ndarray
    band_high: np.ndarray
    epsilon: float
    n_samples: int = Field(ge=1)

    def to_frame(self):
        return pd.DataFrame({'infidelity': self.values, 'cumulative_probability': self.cumulative,
                             'band_low': self.band_low, 'band_high': self.band_high})

    def evaluate(self, x):
        """F(x) da função degrau."""
        position = np.searchsorted(self.values, x, side='right')
        return np.where(position > 0, self.cumulative[np.maximum(position - 1, 0)], 0.0)


def ecdf_with_band(samples, confidence=config.CONFIDENCE_LEVEL):
    """ECDF com banda de Dvoretzky-Kiefer-Wolfowitz: ε = √(ln(2/α)/(2n)), α = 1 − confiança."""
    samples = np.asarray(samples, dtype=float)
    samples = samples[np.isfinite(samples)]
    if len(samples) == 0:
        raise InvalidInputError('ECDF sem amostras')
    values, counts = np.unique(samples, return_counts=True)
    cumulative = np.cumsum(counts) / len(samples)
    epsilon = math.sqrt(math.log(2.0 / (1.0 - confidence)) / (2.0 * len(samples)))
    return ECDF(values=values, cumulative=cumulative, band_low=np.clip(cumulative - epsilon, 0.0, 1.0),
                band_high=np.clip(cumulative + epsilon, 0.0, 1.0), epsilon=epsilon, n_samples=len(samples))
