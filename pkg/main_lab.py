#!/usr/bin/env python3
# -*- coding: utf-8 -*-
"""
Ponto de entrada em lote do laboratório numérico.

Uso:
    python main_lab.py <subcomando> [--config arquivo.json] [--seed N] [--out dir] [--svg] [--verbose]
    python main_lab.py psd entrada.csv [--out dir]

Imprime um resumo JSON {'sucesso': ..., 'mensagem': ...} e sai com
0 (sucesso), 2 (erro de configuração/entrada) ou 3 (falha numérica).
"""

import argparse
import json
import os
import sys
import time

import numpy as np

import config
from errors import ConfigError, LabError, NumericalError
from experiments import (RunContext, handle_calibrate, handle_chevron, handle_coherence, handle_dum, handle_irb,
                         handle_psd, handle_ptm, handle_repeat_irb, load_config)
from logging_config import enable_console_echo, get_lab_logger
from storage import file_lock

# Obtém o logger configurado para este módulo
logging = get_lab_logger()

DEFAULT_CONFIG = os.path.join(config.PRESET_DIR, 'q6q7.json')
NUMERICAL_FAILURES = (np.linalg.LinAlgError, ArithmeticError, RuntimeError, ValueError)

HANDLERS = {
    'dum': handle_dum,
    'coherence': handle_coherence,
    'chevron': handle_chevron,
    'calibrate': handle_calibrate,
    'irb': handle_irb,
    'repeat-irb': handle_repeat_irb,
    'ptm': handle_ptm,
}


def build_parser():
    parser = argparse.ArgumentParser(description='Laboratório numérico do CZ paramétrico')
    parser.add_argument('command', choices=sorted([*HANDLERS, 'psd']), help='experimento a executar')
    parser.add_argument('input', nargs='?', help='CSV de PSD (apenas para o subcomando psd)')
    parser.add_argument('--config', default=DEFAULT_CONFIG, help='documento JSON do experimento')
    parser.add_argument('--seed', type=int, help='semente mestre (sobrepõe a do arquivo)')
    parser.add_argument('--out', help='diretório de saída')
    parser.add_argument('--svg', action='store_true', help='gera figuras SVG além dos CSVs')
    parser.add_argument('--verbose', action='store_true', help='replica os logs no stderr')
    return parser


def run(args):
    raw, experiment = load_config(args.config, seed=args.seed)
    out_dir = args.out or experiment.out or os.path.join(os.getcwd(), 'out', args.command)
    context = RunContext(experiment, raw, out_dir, svg=args.svg)

    with file_lock(out_dir):
        if args.command == 'psd':
            if not args.input:
                raise ConfigError('o subcomando psd exige o caminho do CSV de entrada', key='input')
            return handle_psd(context, args.input)
        return HANDLERS[args.command](context)


def _report_failure(command, error):
    logging.error('Erro em %s: %s', command, str(error), exc_info=True)
    print(json.dumps({'sucesso': False, 'mensagem': str(error), 'tipo': type(error).__name__}, ensure_ascii=False))
    return error.exit_code


def main(argv=None):
    """Função principal"""
    args = build_parser().parse_args(argv)
    if args.verbose:
        enable_console_echo()

    logging.info('=' * 60)
    logging.info('Iniciando %s (versão %s, config %s)', args.command, config.VERSION, args.config)
    inicio = time.time()
    try:
        summary = run(args)
    except LabError as e:
        return _report_failure(args.command, e)
    except NUMERICAL_FAILURES as e:
        # falhas de numpy/scipy sem tradução no caminho chamado
        error = NumericalError(f'falha numérica ({type(e).__name__}): {e}')
        error.__cause__ = e
        return _report_failure(args.command, error)
    finally:
        logging.info('%s finalizado em %.2f s', args.command, time.time() - inicio)
        logging.info('=' * 60)

    print(json.dumps({'sucesso': True, **summary}, ensure_ascii=False, default=str))
    return 0


if __name__ == '__main__':
    sys.exit(main())
