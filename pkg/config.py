#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Arquivo de configuração com constantes compartilhadas do laboratório numérico.

Unidades adotadas em todo o código:
    frequências de transmon em GHz, acoplamentos e modulação em MHz,
    tempos de pulso em ns, tempos de coerência em µs, fluxo em Φ0.
"""

import os

VERSION = '1.0.0'

# Diretório de logs (pode ser sobrescrito por variável de ambiente)
LOG_DIR = os.environ.get('PARAMLAB_LOG_DIR', os.path.join(os.getcwd(), 'logs'))

# Preset do par Q6-Q7 distribuído com o repositório
PRESET_DIR = os.path.join(os.path.dirname(os.path.abspath(__file__)), 'presets')

# Acoplamento nu g (MHz): transições separadas por ~5g, ou ~25 MHz
DEFAULT_COUPLING_MHZ = 5.0

# Convenção de sinal da condição de ressonância:
#   'eta_subtracts' -> Ξ = 2ω_p − |Δ − |η_T| + δω_T|
#   'eta_adds'      -> Ξ = 2ω_p − |Δ + |η_T| + δω_T|
RESONANCE_SIGN_CONVENTION = os.environ.get('PARAMLAB_RESONANCE_SIGN', 'eta_subtracts')

# Ponto doce AC
SWEET_SPOT_GRID_STEP = 0.01          # Φ0, varredura grossa antes da seção áurea
QUADRATURE_RTOL = 1e-9

# Integração temporal
POINTS_PER_PERIOD = 40               # pontos por período da frequência mais rápida no referencial girante
DEFAULT_SAMPLE_RATE = 32.0           # amostras/ns

# Calibração
DEFAULT_LEAKAGE_THRESHOLD = 1e-3
MAX_PHASE_LEAKAGE = 0.05

# Ruído: conversão de densidade espectral (mW/Hz) para fluxo (Φ0²/Hz)
DEFAULT_PSD_TO_FLUX = 0.15
DEFAULT_EXPERIMENT_TIME_S = 100.0    # limite inferior da banda 1/f = 1/t_experimento

# Benchmarking
RB_LENGTHS = [2, 4, 8, 16, 32, 64]
RB_SEQUENCES_PER_LENGTH = 32
RB_SHOTS_PER_SEQUENCE = 500
BOOTSTRAP_REPLICANTS = 2000
CONFIDENCE_LEVEL = 0.90
STABILITY_ALPHA = 0.10
CLIFFORD_GROUP_ORDER = 11520
