"""Per-circuit statistics of output distributions and finite samples.

Sums over the 2^n outputs use :func:`math.fsum`, so they are correctly
rounded regardless of n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .core import OutputDistribution

DEFAULT_B = 1.97
UNIFORM_TOL = 1e-9


@dataclass(frozen=True)
class LxebResult:
    statistic: float
    threshold: float
    passed: bool
    k: int
    b: float


def lxeb_statistic(dist: OutputDistribution, samples) -> float:
    """Mean of the true output probabilities at the sampled indices."""
    samples = np.asarray(samples, dtype=np.int64)
    if samples.size == 0:
        raise ValueError("need at least one sample")
    if samples.min() < 0 or samples.max() >= dist.probs.size:
        raise ValueError(f"sample index out of range for n={dist.n}")
    return math.fsum(dist.probs[samples]) / samples.size


def lxeb_test(dist: OutputDistribution, samples, b: float = DEFAULT_B) -> LxebResult:
    if not 1 < b < 2:
        raise ValueError(f"b must lie in (1, 2), got {b}")
    stat = lxeb_statistic(dist, samples)
    threshold = b / 2**dist.n
    return LxebResult(stat, threshold, stat >= threshold, int(np.size(samples)), b)


def collision_probability_exact(dist: OutputDistribution) -> float:
    p = dist.probs
    return math.fsum(p * p)


def max_output_probability(dist: OutputDistribution) -> float:
    return float(dist.probs.max())


def maxp_threshold(n: int) -> float:
    """4n / 2^n, the level the max output probability rarely exceeds."""
    return 4 * n / 2**n


def sample_variance_over_outputs(dist: OutputDistribution) -> float:
    """Var_{x ~ p}(p(x)) = sum p^3 - (sum p^2)^2."""
    p = dist.probs
    p2 = p * p
    s2 = math.fsum(p2)
    return math.fsum(p2 * p) - s2 * s2


def empirical_probe_moment(dists, t: int, x: int = 0) -> tuple[float, float]:
    """Mean and standard error of p(x)^t across distributions.

    With a single distribution the standard error is undefined and NaN is returned.
    """
    values = np.array([d.probs[x] ** t for d in dists], dtype=np.float64)
    if values.size == 0:
        raise ValueError("need at least one distribution")
    return mean_and_se(values)


def mean_and_se(values: np.ndarray) -> tuple[float, float]:
    values = np.asarray(values, dtype=np.float64)
    mean = math.fsum(values) / values.size
    if values.size < 2:
        return mean, math.nan
    var = math.fsum((values - mean) ** 2) / (values.size - 1)
    return mean, math.sqrt(var / values.size)


def is_uniform_distribution(dist: OutputDistribution, tol: float = UNIFORM_TOL) -> bool:
    return bool(np.all(np.abs(dist.probs - 1.0 / dist.probs.size) <= tol))


def porter_thomas_histogram(dists, bins=20, range_=(0.0, 10.0)):
    """Density histogram of the rescaled probabilities d * p(x) pooled over ``dists``.

    Returns ``(density, edges)``; compare against exp(-x).
    """
    dists = list(dists)
    if not dists:
        raise ValueError("need at least one distribution")
    scaled = np.concatenate([d.probs * d.probs.size for d in dists])
    density, edges = np.histogram(scaled, bins=bins, range=range_, density=True)
    return density, edges


def porter_thomas_mass(edges) -> np.ndarray:
    """Exponential-law probability of each bin, exp(-a) - exp(-b)."""
    edges = np.asarray(edges, dtype=np.float64)
    return np.exp(-edges[:-1]) - np.exp(-edges[1:])
