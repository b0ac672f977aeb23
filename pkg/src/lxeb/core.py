"""Dense statevector simulation of nearest-neighbour two-qubit circuits.

Bit convention: qubit ``i`` is bit ``i`` of the basis-state index, qubit 0
least significant. A 4x4 gate on wires ``(q, q+1)`` indexes its local basis
as ``2 * bit(q+1) + bit(q)``.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numba
import numpy as np

from .errors import CapacityError

DEFAULT_MAX_QUBITS = 26
BYTES_PER_AMPLITUDE = 16


@dataclass(eq=False)
class Statevector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError(
                f"expected {1 << self.n} amplitudes for n={self.n}, "
                f"got shape {self.amplitudes.shape}"
            )

    def norm(self) -> float:
        return float(np.sqrt(np.vdot(self.amplitudes, self.amplitudes).real))

    def copy(self) -> "Statevector":
        return Statevector(self.n, self.amplitudes.copy())


@dataclass(eq=False)
class OutputDistribution:
    n: int
    probs: np.ndarray

    @property
    def dim(self) -> int:
        return 1 << self.n


@dataclass(eq=False)
class CircuitInstance:
    """Ordered layers of ``(q, gate)`` pairs; each gate acts on wires ``(q, q+1)``."""

    n: int
    layers: list = field(default_factory=list)

    @property
    def depth(self) -> int:
        return len(self.layers)

    def num_gates(self) -> int:
        return sum(len(layer) for layer in self.layers)

    def validate(self) -> None:
        for depth_index, layer in enumerate(self.layers):
            used = set()
            for q, gate in layer:
                if not 0 <= q <= self.n - 2:
                    raise ValueError(f"layer {depth_index}: qubit index {q} out of range for n={self.n}")
                if q in used or q + 1 in used:
                    raise ValueError(f"layer {depth_index}: wires ({q}, {q + 1}) overlap another gate")
                used.update((q, q + 1))
                if np.shape(gate) != (4, 4):
                    raise ValueError(f"layer {depth_index}: gate has shape {np.shape(gate)}, expected (4, 4)")


def check_capacity(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> None:
    if not 1 <= n <= max_qubits:
        need = (1 << n) * BYTES_PER_AMPLITUDE if n >= 0 else 0
        raise CapacityError(
            f"n={n} outside [1, {max_qubits}]: a statevector needs 2^{n} x "
            f"{BYTES_PER_AMPLITUDE} bytes = {need} bytes"
        )


def new_zero_state(n: int, max_qubits: int = DEFAULT_MAX_QUBITS) -> Statevector:
    check_capacity(n, max_qubits)
    amps = np.zeros(1 << n, dtype=np.complex128)
    amps[0] = 1.0
    return Statevector(n, amps)


@numba.njit(cache=True, nogil=True)
def _apply_2q_inplace(amps, gate, q):
    n_groups = amps.shape[0] >> 2
    low_mask = (1 << q) - 1
    b0 = 1 << q
    b1 = 1 << (q + 1)
    g00 = gate[0, 0]; g01 = gate[0, 1]; g02 = gate[0, 2]; g03 = gate[0, 3]
    g10 = gate[1, 0]; g11 = gate[1, 1]; g12 = gate[1, 2]; g13 = gate[1, 3]
    g20 = gate[2, 0]; g21 = gate[2, 1]; g22 = gate[2, 2]; g23 = gate[2, 3]
    g30 = gate[3, 0]; g31 = gate[3, 1]; g32 = gate[3, 2]; g33 = gate[3, 3]
    for i in range(n_groups):
        base = ((i >> q) << (q + 2)) | (i & low_mask)
        i1 = base | b0
        i2 = base | b1
        i3 = i1 | b1
        a0 = amps[base]
        a1 = amps[i1]
        a2 = amps[i2]
        a3 = amps[i3]
        amps[base] = g00 * a0 + g01 * a1 + g02 * a2 + g03 * a3
        amps[i1] = g10 * a0 + g11 * a1 + g12 * a2 + g13 * a3
        amps[i2] = g20 * a0 + g21 * a1 + g22 * a2 + g23 * a3
        amps[i3] = g30 * a0 + g31 * a1 + g32 * a2 + g33 * a3


def apply_two_qubit_gate(state: Statevector, gate, q: int) -> Statevector:
    """Apply ``gate`` to wires ``(q, q+1)`` in place and return ``state``."""
    if not 0 <= q <= state.n - 2:
        raise ValueError(f"qubit index {q} out of range for n={state.n} (need 0 <= q <= n-2)")
    gate = np.ascontiguousarray(gate, dtype=np.complex128)
    if gate.shape != (4, 4):
        raise ValueError(f"gate must be 4x4, got {gate.shape}")
    _apply_2q_inplace(state.amplitudes, gate, q)
    return state


def run_circuit(circuit: CircuitInstance, max_qubits: int = DEFAULT_MAX_QUBITS) -> Statevector:
    state = new_zero_state(circuit.n, max_qubits)
    for layer in circuit.layers:
        for q, gate in layer:
            apply_two_qubit_gate(state, gate, q)
    return state


def full_distribution(state: Statevector) -> OutputDistribution:
    amps = state.amplitudes
    return OutputDistribution(state.n, amps.real * amps.real + amps.imag * amps.imag)


@numba.njit(cache=True)
def _build_alias(probs):
    size = probs.shape[0]
    total = 0.0
    for i in range(size):
        total += probs[i]
    scaled = probs * (size / total)
    accept = np.ones(size)
    alias = np.arange(size)
    small = np.empty(size, dtype=np.int64)
    large = np.empty(size, dtype=np.int64)
    ns = 0
    nl = 0
    for i in range(size):
        if scaled[i] < 1.0:
            small[ns] = i
            ns += 1
        else:
            large[nl] = i
            nl += 1
    while ns > 0 and nl > 0:
        ns -= 1
        s = small[ns]
        g = large[nl - 1]
        accept[s] = scaled[s]
        alias[s] = g
        scaled[g] = (scaled[g] + scaled[s]) - 1.0
        if scaled[g] < 1.0:
            nl -= 1
            small[ns] = g
            ns += 1
    # leftovers are 1 up to rounding
    return accept, alias


class AliasTable:
    """Walker/Vose alias table: O(size) construction, O(1) per draw."""

    def __init__(self, probs):
        probs = np.ascontiguousarray(probs, dtype=np.float64)
        if probs.ndim != 1 or probs.size == 0:
            raise ValueError("probabilities must be a non-empty 1-d array")
        if np.any(probs < 0) or not np.isfinite(probs).all():
            raise ValueError("probabilities must be finite and non-negative")
        if probs.sum() <= 0:
            raise ValueError("probabilities sum to zero")
        self.accept, self.alias = _build_alias(probs)

    def sample(self, k: int, rng: np.random.Generator) -> np.ndarray:
        cols = rng.integers(0, self.accept.size, size=k)
        coins = rng.random(k)
        return np.where(coins < self.accept[cols], cols, self.alias[cols])


def sample_outcomes(dist: OutputDistribution, k: int, stream: np.random.Generator) -> np.ndarray:
    """Draw ``k`` basis-state indices from ``dist``; returns an int64 array."""
    if k < 1:
        raise ValueError(f"sample count must be >= 1, got {k}")
    return AliasTable(dist.probs).sample(k, stream)


def bitstring(index: int, n: int) -> str:
    """Render a basis index as a bit string, qubit n-1 leftmost."""
    return format(int(index), f"0{n}b")
