import os
import tempfile

# os logs dos testes não devem cair no diretório do repositório
os.environ.setdefault('PARAMLAB_LOG_DIR', os.path.join(tempfile.gettempdir(), 'paramlab-test-logs'))

import pytest

import config
from device import load_pair


PRESET = os.path.join(config.PRESET_DIR, 'q6q7.json')


@pytest.fixture(scope='session')
def preset_path():
    return PRESET


@pytest.fixture(scope='session')
def q6q7():
    return load_pair(PRESET)


@pytest.fixture(scope='session')
def weak_pair(q6q7):
    """Par Q6-Q7 praticamente desacoplado e sem decoerência."""
    return q6q7.model_copy(update={'g': 1e-4}).with_coherence(float('inf'), float('inf'),
                                                              float('inf'), float('inf'))


@pytest.fixture(scope='session')
def calibrated_cz(q6q7):
    from calibration import calibrate_cz
    return calibrate_cz(q6q7, 0.6)
