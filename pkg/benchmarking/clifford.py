"""
Grupo de Clifford de dois qubits (11520 elementos, módulo fase global).

Cada elemento tem um índice canônico 0..11519 decomposto em
(idx0, idx1, idx2) = (idx // 480, (idx % 480) // 20, idx % 20):
idx0/idx1 escolhem as rotações iniciais dos qubits 0 (fixo) e 1 (sintonizável),
idx2 a classe: 0 -> só um qubit, 1 -> tipo SWAP (3 CZ), 2..10 -> tipo CNOT (1 CZ),
11..19 -> tipo iSWAP (2 CZ).

A composição e a inversão são exatas sobre o tableau: imagens de X0, Z0, X1, Z1
por conjugação, cada uma como i^k·X^x·Z^z (linhas [x0, x1, z0, z1, k]).
"""

import functools
import itertools
from typing import Literal

import numpy as np
from pydantic import BaseModel, ConfigDict, model_validator

import config
from errors import InvalidInputError

GROUP_ORDER = config.CLIFFORD_GROUP_ORDER
GLOBAL_PHASE_TOLERANCE = 1e-9

_I2 = np.eye(2, dtype=complex)
_X = np.array([[0, 1], [1, 0]], dtype=complex)
_Y = np.array([[0, -1j], [1j, 0]], dtype=complex)
_Z = np.array([[1, 0], [0, -1]], dtype=complex)
_AXES = {'X': _X, 'Y': _Y}

CZ_UNITARY = np.diag([1, 1, 1, -1]).astype(complex)

# listas de rotações (eixo, potência) em ordem temporal; potência t = rotação de π·t
_C1_IN_XY = []
for _phi_0, _phi_1 in itertools.product([1.0, 0.5, -0.5], [0.0, 0.5, -0.5]):
    _C1_IN_XY.append((('X', _phi_0), ('Y', _phi_1)))
    _C1_IN_XY.append((('Y', _phi_0), ('X', _phi_1)))
_C1_IN_XY.append((('X', 0.0),))
_C1_IN_XY.append((('Y', 1.0), ('X', 1.0)))
for _y0, _x, _y1 in [[-0.5, 0.5, 0.5], [-0.5, -0.5, 0.5], [0.5, 0.5, 0.5], [-0.5, 0.5, -0.5]]:
    _C1_IN_XY.append((('Y', _y0), ('X', _x), ('Y', _y1)))

_S1 = [(('X', 0.0),), (('Y', 0.5), ('X', 0.5)), (('X', -0.5), ('Y', -0.5))]
_S1_X = [(('X', 0.5),), (('X', 0.5), ('Y', 0.5), ('X', 0.5)), (('Y', -0.5),)]
_S1_Y = [(('Y', 0.5),), (('X', -0.5), ('Y', -0.5), ('X', 0.5)), (('Y', 1.0), ('X', 0.5))]


def rotation(axis, power):
    """exp(−i·π·t·σ/2) para σ em X, Y."""
    angle = np.pi * power
    return np.cos(angle / 2) * _I2 - 1j * np.sin(angle / 2) * _AXES[axis]


def _sequence_unitary(gates):
    unitary = _I2
    for axis, power in gates:
        unitary = rotation(axis, power) @ unitary
    return unitary


class NativeLayer(BaseModel):
    model_config = ConfigDict(frozen=True)

    kind: Literal['1Q', 'CZ']
    fixed: tuple[tuple[str, float], ...] = ()
    tunable: tuple[tuple[str, float], ...] = ()

    def unitary(self):
        if self.kind == 'CZ':
            return CZ_UNITARY
        return np.kron(_sequence_unitary(self.fixed), _sequence_unitary(self.tunable))


class NativeSequence(BaseModel):
    """Camadas em ordem temporal: rotações de um qubit e instâncias de CZ."""
    model_config = ConfigDict(frozen=True)

    layers: tuple[NativeLayer, ...] = ()

    @property
    def cz_count(self):
        return sum(1 for layer in self.layers if layer.kind == 'CZ')

    def unitary(self):
        unitary = np.eye(4, dtype=complex)
        for layer in self.layers:
            unitary = layer.unitary() @ unitary
        return unitary


def _one_qubit(fixed=(), tunable=()):
    return NativeLayer(kind='1Q', fixed=tuple(fixed), tunable=tuple(tunable))


_CZ_LAYER = NativeLayer(kind='CZ')


def split_index(index):
    return index // 480, (index % 480) // 20, index % 20


def _raw_layers(index):
    idx0, idx1, idx2 = split_index(index)
    layers = [_one_qubit(_C1_IN_XY[idx0], _C1_IN_XY[idx1])]
    if idx2 == 1:
        layers += [_CZ_LAYER, _one_qubit([('Y', -0.5)], [('Y', 0.5)]),
                   _CZ_LAYER, _one_qubit([('Y', 0.5)], [('Y', -0.5)]),
                   _CZ_LAYER, _one_qubit([], [('Y', 0.5)])]
    elif 2 <= idx2 <= 10:
        layers += [_CZ_LAYER, _one_qubit(_S1[(idx2 - 2) // 3], _S1_Y[(idx2 - 2) % 3])]
    elif idx2 >= 11:
        layers += [_CZ_LAYER, _one_qubit([('Y', 0.5)], [('X', -0.5)]),
                   _CZ_LAYER, _one_qubit(_S1_Y[(idx2 - 11) // 3], _S1_X[(idx2 - 11) % 3])]
    return layers


def _simplify(layers):
    """Funde camadas de um qubit consecutivas e remove rotações nulas."""
    merged = []
    for layer in layers:
        if layer.kind == '1Q':
            fixed = tuple(g for g in layer.fixed if g[1] != 0.0)
            tunable = tuple(g for g in layer.tunable if g[1] != 0.0)
            if merged and merged[-1].kind == '1Q':
                previous = merged.pop()
                fixed, tunable = previous.fixed + fixed, previous.tunable + tunable
            if fixed or tunable:
                merged.append(_one_qubit(fixed, tunable))
        else:
            merged.append(layer)
    return tuple(merged)


# --- aritmética de Pauli sobre linhas [x0, x1, z0, z1, k] ---------------------

def _pauli_multiply(p, q):
    """Linha de p·q (p à esquerda)."""
    x = (p[0:2] + q[0:2]) % 2
    z = (p[2:4] + q[2:4]) % 2
    k = (p[4] + q[4] + 2 * int(np.dot(p[2:4], q[0:2]))) % 4
    return np.array([x[0], x[1], z[0], z[1], k], dtype=np.int64)


_IDENTITY_ROW = np.zeros(5, dtype=np.int64)
_IDENTITY_TABLEAU = np.array([[1, 0, 0, 0, 0],     # X0
                              [0, 0, 1, 0, 0],     # Z0
                              [0, 1, 0, 0, 0],     # X1
                              [0, 0, 0, 1, 0]],    # Z1
                             dtype=np.int64)


def _conjugate(tableau, row):
    """Imagem da Pauli `row` pela conjugação do Clifford de `tableau`."""
    x0, x1, z0, z1, k = row
    result = _IDENTITY_ROW.copy()
    result[4] = k % 4
    for power, generator in ((x0, 0), (z0, 1), (x1, 2), (z1, 3)):
        if power:
            result = _pauli_multiply(result, tableau[generator])
    return result


def _symplectic_product(a, b):
    return int(np.dot(a[0:2], b[2:4]) + np.dot(a[2:4], b[0:2])) % 2


def _pauli_matrix(row):
    x0, x1, z0, z1, k = row
    first = np.linalg.matrix_power(_X, x0) @ np.linalg.matrix_power(_Z, z0)
    second = np.linalg.matrix_power(_X, x1) @ np.linalg.matrix_power(_Z, z1)
    return (1j ** k) * np.kron(first, second)


_PATTERNS = np.array([[x0, x1, z0, z1, 0] for x0, x1, z0, z1 in itertools.product((0, 1), repeat=4)],
                     dtype=np.int64)


def tableaus_from_unitaries(unitaries):
    """Tableaus (N, 4, 5) extraídos por conjugação dos geradores; exato para Cliffords."""
    unitaries = np.asarray(unitaries, dtype=complex)
    generators = np.array([_pauli_matrix(row) for row in _IDENTITY_TABLEAU])
    paulis = np.array([_pauli_matrix(row) for row in _PATTERNS])
    images = unitaries[:, None] @ generators[None] @ unitaries.conj().swapaxes(-1, -2)[:, None]
    overlaps = np.einsum('mab,ngab->ngm', paulis.conj(), images) / 4.0
    best = np.argmax(np.abs(overlaps), axis=-1)
    coefficient = np.take_along_axis(overlaps, best[..., None], axis=-1)[..., 0]
    if np.max(np.abs(np.abs(coefficient) - 1.0)) > 1e-6:
        raise InvalidInputError('unitário não é um Clifford: imagem de Pauli não é uma Pauli')
    phases = np.rint(np.angle(coefficient) / (np.pi / 2)).astype(np.int64) % 4
    tableaus = _PATTERNS[best].copy()
    tableaus[..., 4] = phases
    return tableaus


def _key(tableau):
    return tuple(int(v) for v in np.asarray(tableau).ravel())


class _CliffordTable:
    """Enumeração canônica: unitários, tableaus e índice por chave do tableau."""

    def __init__(self):
        starters = np.array([np.kron(_sequence_unitary(_C1_IN_XY[i0]), _sequence_unitary(_C1_IN_XY[i1]))
                             for i0 in range(24) for i1 in range(24)])
        mixers = []
        for idx2 in range(20):
            sequence = NativeSequence(layers=_simplify(_raw_layers(idx2)[1:]))
            mixers.append(sequence.unitary())
        mixers = np.array(mixers)
        self.unitaries = (mixers[None] @ starters[:, None]).reshape(GROUP_ORDER, 4, 4)
        self.tableaus = tableaus_from_unitaries(self.unitaries)
        self.lookup = {_key(t): i for i, t in enumerate(self.tableaus)}


@functools.lru_cache(maxsize=1)
def clifford_table():
    return _CliffordTable()


class CliffordElement(BaseModel):
    model_config = ConfigDict(frozen=True, arbitrary_types_allowed=True)

    index: int
    tableau: np.ndarray

    @model_validator(mode='after')
    def _check(self):
        if not 0 <= self.index < GROUP_ORDER:
            raise InvalidInputError(f'índice de Clifford fora do grupo: {self.index}')
        return self

    @property
    def key(self):
        return _key(self.tableau)

    @property
    def unitary(self):
        return clifford_table().unitaries[self.index]

    def is_symplectic(self):
        for i, j in itertools.product(range(4), repeat=2):
            expected = _symplectic_product(_IDENTITY_TABLEAU[i], _IDENTITY_TABLEAU[j])
            if _symplectic_product(self.tableau[i], self.tableau[j]) != expected:
                return False
        hermitian = all(row[4] % 2 == (row[0] * row[2] + row[1] * row[3]) % 2 for row in self.tableau)
        return hermitian

    def __eq__(self, other):
        return isinstance(other, CliffordElement) and self.key == other.key

    def __hash__(self):
        return hash(self.key)


def clifford_from_index(index):
    index = int(index)
    if not 0 <= index < GROUP_ORDER:
        raise InvalidInputError(f'índice de Clifford fora do grupo: {index}')
    return CliffordElement(index=index, tableau=clifford_table().tableaus[index].copy())


def _from_tableau(tableau):
    index = clifford_table().lookup.get(_key(tableau))
    if index is None:
        raise InvalidInputError('tableau fora da enumeração canônica')
    return CliffordElement(index=index, tableau=np.asarray(tableau, dtype=np.int64))


def clifford_from_unitary(unitary):
    return _from_tableau(tableaus_from_unitaries(np.asarray(unitary)[None])[0])


def clifford_identity():
    return _from_tableau(_IDENTITY_TABLEAU)


def clifford_cz():
    return clifford_from_unitary(CZ_UNITARY)


def clifford_sample(seed):
    """Elemento uniforme do grupo; `seed` aceita int, SeedSequence ou Generator."""
    rng = np.random.default_rng(seed)
    return clifford_from_index(int(rng.integers(GROUP_ORDER)))


def clifford_compose(a, b):
    """Produto a·b (b aplicado primeiro)."""
    tableau = np.array([_conjugate(a.tableau, row) for row in b.tableau])
    return _from_tableau(tableau)


def clifford_invert(a):
    tableau = np.zeros_like(_IDENTITY_TABLEAU)
    for g, target in enumerate(_IDENTITY_TABLEAU):
        for pattern in _PATTERNS:
            image = _conjugate(a.tableau, pattern)
            if np.array_equal(image[:4], target[:4]):
                tableau[g] = pattern
                tableau[g, 4] = (-image[4]) % 4
                break
    return _from_tableau(tableau)


def compile_to_native(element, interleaved=False):
    """
    Sequência nativa (rotações de um qubit + CZ) que reproduz o Clifford a menos de fase global.

    interleaved=True expressa o elemento como CZ·c', compilando c' e anexando o CZ.
    """
    if not interleaved:
        return NativeSequence(layers=_simplify(_raw_layers(element.index)))
    cz = clifford_cz()
    remainder = clifford_compose(clifford_invert(cz), element)
    return NativeSequence(layers=_simplify(_raw_layers(remainder.index)) + (_CZ_LAYER,))


def equal_up_to_phase(u, v, tolerance=GLOBAL_PHASE_TOLERANCE):
    """|Tr(U†V)|/d = 1 dentro da tolerância."""
    d = u.shape[0]
    return abs(abs(np.trace(u.conj().T @ v)) / d - 1.0) < tolerance


def decomposition_class(index):
    idx2 = index % 20
    if idx2 == 0:
        return 'single'
    if idx2 == 1:
        return 'swap'
    return 'cnot' if idx2 <= 10 else 'iswap'
