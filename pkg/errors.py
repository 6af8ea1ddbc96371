"""
Hierarquia de exceções do laboratório.

Cada classe carrega o código de saída usado pelo main_lab.py:
    2 -> erro de configuração / entrada inválida
    3 -> falha numérica
"""


class LabError(Exception):
    """Erro base de todas as operações do laboratório."""
    exit_code = 1


class ConfigError(LabError):
    """Configuração ausente ou fora do esquema. `key` traz o caminho pontuado."""
    exit_code = 2

    def __init__(self, message, key=None):
        super().__init__(message if key is None else f'{message} (chave: {key})')
        self.key = key


class InvalidInputError(LabError):
    exit_code = 2


class InvalidPulseError(InvalidInputError):
    pass


class NoSweetSpotError(InvalidInputError):
    pass


class ParseError(InvalidInputError):
    """Linha malformada em um arquivo de entrada."""

    def __init__(self, message, line=None):
        super().__init__(message if line is None else f'linha {line}: {message}')
        self.line = line


class NumericalError(LabError):
    exit_code = 3


class IntegrationError(NumericalError):
    """Falha de passo/precisão do integrador. `diagnostics` descreve o estado."""

    def __init__(self, message, diagnostics=None):
        super().__init__(message)
        self.diagnostics = diagnostics or {}


class ChannelValidationError(NumericalError):
    pass


class FitError(NumericalError):
    """Ajuste não convergente. `residuals` guarda os resíduos quando disponíveis."""

    def __init__(self, message, residuals=None):
        super().__init__(message)
        self.residuals = residuals


class LowSignalError(FitError):
    pass


class UnreliablePhaseError(NumericalError):
    pass


class CalibrationFailedError(NumericalError):
    """Nenhum ponto atende o limiar; `best` traz o melhor candidato encontrado."""

    def __init__(self, message, best=None):
        super().__init__(message)
        self.best = best
