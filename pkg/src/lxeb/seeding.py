"""Counter-based seed derivation.

The algorithm below is frozen: changing it changes every report.

    trial_seed = mix64(master_seed + (trial_index + 1) * GOLDEN  mod 2^64)
    gate stream = Philox keyed by trial_seed + 2^64 * gate_counter

``mix64`` is the SplitMix64 output finalizer, a bijection on 64-bit words, so
distinct trial indices below 2^64 always give distinct trial seeds.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

MASK64 = (1 << 64) - 1
GOLDEN = 0x9E3779B97F4A7C15


def mix64(z: int) -> int:
    z &= MASK64
    z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & MASK64
    z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & MASK64
    return z ^ (z >> 31)


def derive_trial_seed(master_seed: int, trial_index: int) -> int:
    if trial_index < 0:
        raise ValueError("trial index must be non-negative")
    return mix64(master_seed + (trial_index + 1) * GOLDEN)


def philox_stream(seed: int, counter: int = 0) -> np.random.Generator:
    """Independent generator keyed by a 64-bit seed and a 64-bit counter."""
    return np.random.Generator(np.random.Philox(key=(seed & MASK64) | ((counter & MASK64) << 64)))


@dataclass(frozen=True)
class SeedPlan:
    master_seed: int
    trial_index: int = 0

    @property
    def trial_seed(self) -> int:
        return derive_trial_seed(self.master_seed, self.trial_index)

    def gate_stream(self, gate_counter: int) -> np.random.Generator:
        return philox_stream(self.trial_seed, gate_counter)
