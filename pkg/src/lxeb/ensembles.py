"""Gate samplers, circuit builders and design-depth calculators."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import clifford
from .core import CircuitInstance
from .seeding import SeedPlan

GATE_KINDS = ("haar-unitary", "haar-orthogonal", "clifford", "identity")
ARCHITECTURES = ("brickwork", "coarse-grained")
MAX_HAAR_DIM = 64

_I4 = np.eye(4, dtype=np.complex128)


@dataclass(frozen=True)
class EnsembleSpec:
    kind: str = "haar-unitary"
    architecture: str = "brickwork"
    n: int = 2
    depth: int = 0
    t: int | None = None
    epsilon: float | None = None
    block_depth: int | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate ensemble {self.kind!r}; expected one of {GATE_KINDS}")
        if self.architecture not in ARCHITECTURES:
            raise ValueError(f"unknown architecture {self.architecture!r}; expected one of {ARCHITECTURES}")
        if self.depth < 0:
            raise ValueError("depth must be >= 0")
        if self.architecture == "coarse-grained":
            if self.t is None or self.epsilon is None or self.block_depth is None:
                raise ValueError("coarse-grained ensembles need t, epsilon and block_depth")


# -- gate samplers -----------------------------------------------------------

def _mezzadri_unitary(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    diag = np.diagonal(r, axis1=-2, axis2=-1)
    return q * (diag / np.abs(diag))[..., None, :]


def _mezzadri_orthogonal(z: np.ndarray) -> np.ndarray:
    q, r = np.linalg.qr(z)
    return q * np.sign(np.diagonal(r, axis1=-2, axis2=-1))[..., None, :]


def sample_haar_unitary(d: int, stream: np.random.Generator, size: int | None = None) -> np.ndarray:
    """Haar-random d x d unitary (or a stack of ``size`` of them).

    Complex Ginibre matrix, QR, then each column rescaled by the phase of the
    matching diagonal entry of R so the result is Haar rather than QR-biased.
    """
    if not 2 <= d <= MAX_HAAR_DIM:
        raise ValueError(f"dimension must be in [2, {MAX_HAAR_DIM}], got {d}")
    shape = (2, d, d) if size is None else (size, 2, d, d)
    g = stream.standard_normal(shape)
    z = (g[..., 0, :, :] + 1j * g[..., 1, :, :]) / np.sqrt(2)
    return _mezzadri_unitary(z)


def sample_haar_orthogonal(d: int, stream: np.random.Generator, size: int | None = None) -> np.ndarray:
    if not 2 <= d <= MAX_HAAR_DIM:
        raise ValueError(f"dimension must be in [2, {MAX_HAAR_DIM}], got {d}")
    shape = (d, d) if size is None else (size, d, d)
    return _mezzadri_orthogonal(stream.standard_normal(shape)).astype(np.complex128)


def sample_haar_su4(stream: np.random.Generator) -> np.ndarray:
    # U(4), not SU(4): the global phase never reaches an output probability
    return sample_haar_unitary(4, stream)


def sample_haar_orthogonal4(stream: np.random.Generator) -> np.ndarray:
    return sample_haar_orthogonal(4, stream)


sample_clifford_two_qubit = clifford.sample_clifford_two_qubit


def sample_gates(kind: str, streams: list) -> list:
    """One gate per stream. Draws match the single-gate samplers exactly."""
    if not streams:
        return []
    if kind == "identity":
        return [_I4] * len(streams)
    if kind == "clifford":
        return [clifford.sample_clifford_two_qubit(s) for s in streams]
    if kind == "haar-unitary":
        g = np.stack([s.standard_normal((2, 4, 4)) for s in streams])
        return list(_mezzadri_unitary((g[:, 0] + 1j * g[:, 1]) / np.sqrt(2)))
    if kind == "haar-orthogonal":
        g = np.stack([s.standard_normal((4, 4)) for s in streams])
        return list(_mezzadri_orthogonal(g).astype(np.complex128))
    raise ValueError(f"unknown gate ensemble {kind!r}")


# -- circuit builders --------------------------------------------------------

def brickwork_pairs(start: int, stop: int, layer: int) -> list[int]:
    """Lower wires of the gates in ``layer`` of a brickwork on wires [start, stop)."""
    first = start + (layer % 2)
    return list(range(first, stop - 1, 2))


def _fill_gates(kind: str, layout: list[list[int]], seed_plan: SeedPlan, n: int) -> CircuitInstance:
    counters = []
    c = 0
    for layer in layout:
        counters.append(range(c, c + len(layer)))
        c += len(layer)
    streams = [] if kind == "identity" else [seed_plan.gate_stream(i) for i in range(c)]
    gates = sample_gates(kind, streams) if streams else [_I4] * c
    layers = [[(q, gates[i]) for q, i in zip(layer, idx)] for layer, idx in zip(layout, counters)]
    return CircuitInstance(n, layers)


def brickwork_layout(n: int, depth: int) -> list[list[int]]:
    if n < 2 or n % 2:
        raise ValueError(f"brickwork circuits need an even qubit count >= 2, got n={n}")
    if depth < 0:
        raise ValueError("depth must be >= 0")
    return [brickwork_pairs(0, n, layer) for layer in range(depth)]


def build_brickwork(spec: EnsembleSpec, seed_plan: SeedPlan) -> CircuitInstance:
    """Alternating layers on pairs (0,1),(2,3),... then (1,2),(3,4),...; open boundary."""
    return _fill_gates(spec.kind, brickwork_layout(spec.n, spec.depth), seed_plan, spec.n)


def block_size(n: int, t: int, epsilon: float) -> int:
    """2 log2(n t / eps), rounded up to even and clamped to [2, n]."""
    if t < 1:
        raise ValueError(f"t must be >= 1, got {t}")
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")
    xi = math.ceil(2 * math.log2(n * t / epsilon))
    xi += xi % 2
    return max(2, min(n, xi))


def _blocks(n: int, xi: int, offset: int) -> list[tuple[int, int]]:
    edges = [0] + list(range(offset, n, xi)) + [n]
    edges = sorted(set(edges))
    return list(zip(edges[:-1], edges[1:]))


def coarse_grained_layout(n: int, xi: int, block_depth: int) -> list[list[int]]:
    if block_depth < 0 or block_depth % 2:
        raise ValueError(f"block_depth must be an even non-negative integer, got {block_depth}")
    stage = block_depth // 2
    layout = []
    for offset in (0, xi // 2):
        blocks = _blocks(n, xi, offset)
        for layer in range(stage):
            layout.append([q for lo, hi in blocks for q in brickwork_pairs(lo, hi, layer)])
    return layout


def build_coarse_grained(n: int, t: int, epsilon: float, block_depth: int,
                         seed_plan: SeedPlan, kind: str = "haar-unitary") -> CircuitInstance:
    """Two stages of independent per-block brickworks, the second shifted by half a block.

    Stage blocks are contiguous runs of ``block_size`` qubits; a leftover run
    at either edge becomes its own (smaller) block. Gates never cross a block
    boundary within a stage.
    """
    if n < 2:
        raise ValueError("coarse-grained circuits need n >= 2")
    xi = block_size(n, t, epsilon)
    return _fill_gates(kind, coarse_grained_layout(n, xi, block_depth), seed_plan, n)


def build_circuit(spec: EnsembleSpec, seed_plan: SeedPlan) -> CircuitInstance:
    if spec.architecture == "brickwork":
        return build_brickwork(spec, seed_plan)
    return build_coarse_grained(spec.n, spec.t, spec.epsilon, spec.block_depth, seed_plan, spec.kind)


# -- design depth calculators ------------------------------------------------

def _check_eps(epsilon):
    if not 0 < epsilon < 1:
        raise ValueError(f"epsilon must lie in (0, 1), got {epsilon}")


def required_depth_4design(n: int, epsilon: float) -> int:
    """Brickwork depth for an epsilon-approximate 4-design: 16 (4n + log2(1/eps))."""
    _check_eps(epsilon)
    return math.ceil(16 * (4 * n + math.log2(1 / epsilon)))


def required_depth_tdesign(n: int, t: int, epsilon: float, constant: float = 1.0) -> int:
    """constant * log2(t)^7 * (2 n t + log2(1/eps)).

    The leading constant is not known; the default of 1 is illustrative only.
    """
    _check_eps(epsilon)
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    if constant <= 0:
        raise ValueError("constant must be positive")
    return math.ceil(constant * math.log2(t) ** 7 * (2 * n * t + math.log2(1 / epsilon)))


def required_depth_coarse(n: int, t: int, epsilon: float, constant: float = 1.0) -> int:
    """constant * log2(t)^7 * t * log2(n t / eps), relative-error designs.

    Illustrative constant, as for :func:`required_depth_tdesign`.
    """
    _check_eps(epsilon)
    if t < 2:
        raise ValueError(f"t must be >= 2, got {t}")
    if constant <= 0:
        raise ValueError("constant must be positive")
    return math.ceil(constant * math.log2(t) ** 7 * t * math.log2(n * t / epsilon))
