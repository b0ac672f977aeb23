"""The two-qubit Clifford group modulo global phase (11520 elements).

Every element is written uniquely as ``kron(A, B) @ R`` with ``A, B`` from the
24 single-qubit Cliffords and ``R`` one of 20 left-coset representatives of the
local subgroup. A uniform draw is a uniform index into that product.
"""

from __future__ import annotations

from collections import deque
from functools import lru_cache

import numpy as np

ORDER = 11520
SINGLE_QUBIT_ORDER = 24

_H = np.array([[1, 1], [1, -1]], dtype=np.complex128) / np.sqrt(2)
_S = np.diag([1, 1j])
_I2 = np.eye(2, dtype=np.complex128)
# wires (q+1, q) -> (high, low); control on the low bit
_CNOT = np.array(
    [[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]], dtype=np.complex128
)

PAULIS = {
    "I": _I2,
    "X": np.array([[0, 1], [1, 0]], dtype=np.complex128),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=np.complex128),
    "Z": np.diag([1.0 + 0j, -1.0]),
}


def normalize_phase(m: np.ndarray) -> np.ndarray:
    flat = m.ravel()
    lead = flat[np.argmax(np.abs(flat) > 1e-9)]
    return m * (abs(lead) / lead)


def _key(m: np.ndarray) -> bytes:
    r = np.round(normalize_phase(m), 8) + 0.0  # drop negative zeros
    return r.tobytes()


def _closure(generators: list[np.ndarray]) -> list[np.ndarray]:
    start = np.eye(generators[0].shape[0], dtype=np.complex128)
    seen = {_key(start)}
    out = [start]
    queue = deque([start])
    while queue:
        g = queue.popleft()
        for h in generators:
            m = normalize_phase(h @ g)
            k = _key(m)
            if k not in seen:
                seen.add(k)
                out.append(m)
                queue.append(m)
    return out


@lru_cache(maxsize=None)
def single_qubit_cliffords() -> tuple[np.ndarray, ...]:
    group = _closure([_H, _S])
    assert len(group) == SINGLE_QUBIT_ORDER
    return tuple(group)


@lru_cache(maxsize=None)
def coset_representatives() -> tuple[np.ndarray, ...]:
    locals_ = single_qubit_cliffords()
    local_pairs = [np.kron(a, b) for a in locals_ for b in locals_]
    generators = [np.kron(_H, _I2), np.kron(_I2, _H), np.kron(_S, _I2), np.kron(_I2, _S), _CNOT]
    covered: set[bytes] = set()
    reps = []
    for g in _closure(generators):
        if _key(g) in covered:
            continue
        reps.append(g)
        covered.update(_key(p @ g) for p in local_pairs)
    assert len(reps) * SINGLE_QUBIT_ORDER**2 == ORDER == len(covered)
    return tuple(reps)


def clifford_from_index(index: int) -> np.ndarray:
    """Element ``index`` in [0, 11520) of the canonical decomposition."""
    if not 0 <= index < ORDER:
        raise ValueError(f"Clifford index must be in [0, {ORDER}), got {index}")
    rep, rest = divmod(index, SINGLE_QUBIT_ORDER**2)
    a, b = divmod(rest, SINGLE_QUBIT_ORDER)
    c1 = single_qubit_cliffords()
    return np.kron(c1[a], c1[b]) @ coset_representatives()[rep]


IDENTITY_INDEX = 0  # rep 0 and both locals are the closure seeds, i.e. identity


def sample_clifford_index(stream: np.random.Generator, size=None):
    return stream.integers(0, ORDER, size=size)


def sample_clifford_two_qubit(stream: np.random.Generator) -> np.ndarray:
    return clifford_from_index(int(sample_clifford_index(stream)))


def pauli_string(label: str) -> np.ndarray:
    """Two-qubit Pauli, first letter on the high wire (qubit q+1)."""
    return np.kron(PAULIS[label[0]], PAULIS[label[1]])


def conjugated_pauli_phase(gate: np.ndarray, label: str):
    """Return ``(phase, label')`` with gate P gate^dag = phase * P', or None."""
    image = gate @ pauli_string(label) @ gate.conj().T
    for a in "IXYZ":
        for b in "IXYZ":
            p = pauli_string(a + b)
            overlap = np.trace(p @ image) / 4
            if abs(abs(overlap) - 1) < 1e-9:
                return overlap, a + b
    return None
