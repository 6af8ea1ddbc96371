"""
Figuras SVG opcionais geradas a partir das tabelas já gravadas.

Backend Agg e salt fixo no SVG para que a mesma tabela produza o mesmo arquivo.
"""

import matplotlib

matplotlib.use('Agg')

import matplotlib.pyplot as plt  # noqa: E402

from logging_config import get_storage_logger  # noqa: E402

# Obtém o logger configurado para este módulo
logging = get_storage_logger()

plt.rcParams['svg.hashsalt'] = 'paramlab'


def _save(figure, path):
    figure.tight_layout()
    figure.savefig(path, format='svg', metadata={'Date': None})
    plt.close(figure)
    return path


def plot_lines(frame, x, columns, path, xlabel=None, ylabel=None, marker=None):
    """Curvas `columns` contra `x`; `marker` = (x, y) destaca um ponto."""
    figure, axis = plt.subplots(figsize=(6, 4))
    for column in columns:
        axis.plot(frame[x], frame[column], label=column)
    if marker is not None:
        axis.plot([marker[0]], [marker[1]], 'o', color='black')
    axis.set_xlabel(xlabel or x)
    axis.set_ylabel(ylabel or ', '.join(columns))
    if len(columns) > 1:
        axis.legend()
    return _save(figure, path)


def plot_chevron(dataset, path):
    figure, axis = plt.subplots(figsize=(6, 4))
    mesh = axis.pcolormesh(dataset.durations, dataset.frequencies, dataset.populations, shading='auto',
                           vmin=0.0, vmax=1.0)
    figure.colorbar(mesh, ax=axis, label='P(fixo excitado)')
    axis.set_xlabel('duração (ns)')
    axis.set_ylabel('ω_p (MHz)')
    return _save(figure, path)


def plot_decays(reference, interleaved, path):
    figure, axis = plt.subplots(figsize=(6, 4))
    for dataset, label in ((reference, 'referência'), (interleaved, 'intercalado')):
        lengths, means, _, _ = dataset.by_length()
        axis.plot(dataset.lengths, dataset.survival, '.', alpha=0.2)
        axis.plot(lengths, means, 'o-', label=label)
    axis.set_xlabel('número de Cliffords')
    axis.set_ylabel('sobrevivência |00>')
    axis.legend()
    return _save(figure, path)


def plot_ecdf(ecdf_frame, path):
    figure, axis = plt.subplots(figsize=(6, 4))
    axis.step(ecdf_frame['infidelity'], ecdf_frame['cumulative_probability'], where='post')
    axis.fill_between(ecdf_frame['infidelity'], ecdf_frame['band_low'], ecdf_frame['band_high'], step='post',
                      alpha=0.3)
    axis.set_xlabel('infidelidade do CZ')
    axis.set_ylabel('ECDF')
    return _save(figure, path)


def plot_ptm(ptm_frame, path):
    figure, axis = plt.subplots(figsize=(6, 5))
    image = axis.imshow(ptm_frame.to_numpy(), cmap='RdBu', vmin=-1.0, vmax=1.0)
    axis.set_xticks(range(len(ptm_frame.columns)), ptm_frame.columns, rotation=90)
    axis.set_yticks(range(len(ptm_frame.index)), ptm_frame.index)
    figure.colorbar(image, ax=axis)
    return _save(figure, path)
