"""Exact Haar moments of computational-basis output probabilities.

Everything here returns :class:`fractions.Fraction`. The unitary and orthogonal
closed forms are keyed by an integer partition ``lam`` of ``t`` together with
the Hilbert-space dimension ``d``; the bit strings carrying the parts are
taken to be pairwise distinct.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from math import factorial, prod

GROUPS = ("unitary", "orthogonal")
MAX_ORACLE_T = 6
MAX_MATCHING_T = 8


def as_partition(lam) -> tuple[int, ...]:
    if isinstance(lam, int):
        lam = (lam,)
    parts = tuple(int(p) for p in lam)
    if not parts:
        raise ValueError("partition must be non-empty")
    if any(p < 1 for p in parts):
        raise ValueError(f"partition parts must be positive, got {parts}")
    return tuple(sorted(parts, reverse=True))


def parse_partition(text: str) -> tuple[int, ...]:
    """``"2,1,1"`` or ``"2 1 1"`` -> (2, 1, 1)."""
    try:
        parts = [int(tok) for tok in text.replace(",", " ").split()]
    except ValueError:
        raise ValueError(f"malformed partition {text!r}") from None
    return as_partition(parts)


def _check_group(group):
    if group not in GROUPS:
        raise ValueError(f"group must be one of {GROUPS}, got {group!r}")


def _rising(d, t, step=1):
    return prod(d + step * i for i in range(t))


def double_factorial_odd(m: int) -> int:
    """(2m)! / (2^m m!) = 1 * 3 * ... * (2m - 1), the number of perfect matchings of 2m points."""
    return prod(range(1, 2 * m, 2))


def haar_unitary_moment(lam, d: int) -> Fraction:
    lam = as_partition(lam)
    return Fraction(prod(factorial(p) for p in lam), _rising(d, sum(lam)))


def haar_orthogonal_moment(lam, d: int) -> Fraction:
    lam = as_partition(lam)
    return Fraction(prod(double_factorial_odd(p) for p in lam), _rising(d, sum(lam), 2))


def haar_moment(lam, d: int, group: str = "unitary") -> Fraction:
    _check_group(group)
    return haar_unitary_moment(lam, d) if group == "unitary" else haar_orthogonal_moment(lam, d)


# -- pair partitions ----------------------------------------------------------

@dataclass(frozen=True)
class PairPartition:
    """Perfect matching of {1, ..., 2t} as sorted pairs, pairs sorted by first element."""

    pairs: tuple[tuple[int, int], ...]

    @property
    def t(self) -> int:
        return len(self.pairs)


def _matchings(points):
    if not points:
        yield ()
        return
    first, rest = points[0], points[1:]
    for i, partner in enumerate(rest):
        remaining = rest[:i] + rest[i + 1:]
        for tail in _matchings(remaining):
            yield ((first, partner),) + tail


def enumerate_pair_partitions(t: int) -> list[PairPartition]:
    if not 1 <= t <= MAX_MATCHING_T:
        raise ValueError(f"t must be in [1, {MAX_MATCHING_T}], got {t}")
    return [PairPartition(m) for m in _matchings(tuple(range(1, 2 * t + 1)))]


def orthogonal_moment_oracle(lam, d: int) -> Fraction:
    """Sum over perfect matchings of {1..2t} of tr(Pi_sigma . x-labels), over prod(d + 2i).

    Positions 1..t are kets and t+1..2t bras; position j and t+j carry the
    same bit string. Against basis states the trace of a matching operator is
    1 exactly when every pair joins positions with equal strings.
    """
    lam = as_partition(lam)
    t = sum(lam)
    if t > MAX_ORACLE_T:
        raise ValueError(f"oracle limited to t <= {MAX_ORACLE_T}, got t={t}")
    labels = [i for i, p in enumerate(lam) for _ in range(p)]
    label_of = labels + labels
    hits = sum(
        all(label_of[a - 1] == label_of[b - 1] for a, b in m.pairs)
        for m in enumerate_pair_partitions(t)
    )
    return Fraction(hits, _rising(d, t, 2))


# -- power-sum expectations ---------------------------------------------------

def _set_partitions(items):
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in _set_partitions(rest):
        yield [[first]] + part
        for i in range(len(part)):
            yield part[:i] + [[first] + part[i]] + part[i + 1:]


def expected_power_sum_product(exponents, d: int, group: str = "unitary") -> Fraction:
    """E[ prod_j sum_x p(x)^{e_j} ] by splitting the index tuple on coincidences.

    Each set partition of the sums fixes which indices coincide; the distinct
    values then contribute d (d-1) ... (d-b+1) times the distinct-string moment.
    """
    _check_group(group)
    exps = [int(e) for e in exponents]
    total = Fraction(0)
    for part in _set_partitions(list(range(len(exps)))):
        lam = [sum(exps[i] for i in block) for block in part]
        placements = prod(d - i for i in range(len(part)))
        if placements:
            total += placements * haar_moment(lam, d, group)
    return total


# -- closed forms for collision and sample-variance statistics --------------

def collision_mean(d: int, group: str = "unitary") -> Fraction:
    _check_group(group)
    return Fraction(2, d + 1) if group == "unitary" else Fraction(3, d + 2)


def collision_variance(d: int, group: str = "unitary") -> Fraction:
    _check_group(group)
    if group == "unitary":
        return Fraction(4 * (d - 1), (d + 1) ** 2 * (d + 2) * (d + 3))
    return Fraction(24 * (d - 1), (d + 2) ** 2 * (d + 4) * (d + 6))


def sample_variance_mean(d: int, group: str = "unitary") -> Fraction:
    """Haar mean of sum p^3 - (sum p^2)^2."""
    _check_group(group)
    if group == "unitary":
        return Fraction(2 * (d - 1), (d + 1) * (d + 2) * (d + 3))
    return Fraction(6 * (d - 1), (d + 2) * (d + 4) * (d + 6))


def sum_p3p3(d: int) -> Fraction:
    """sum_{x,y} E[p(x)^3 p(y)^3], unitary."""
    return Fraction(36 * (d + 19), _rising(d + 1, 5))


def sum_p3p2p2(d: int) -> Fraction:
    """sum_{x,y,z} E[p(x)^3 p(y)^2 p(z)^2], unitary."""
    return Fraction(24 * (d * d + 23 * d + 186), _rising(d + 1, 6))


def sum_p2p2p2p2(d: int) -> Fraction:
    """sum_{w,x,y,z} E[p(w)^2 p(x)^2 p(y)^2 p(z)^2], unitary."""
    return Fraction(16 * (d**3 + 30 * d * d + 371 * d + 2118), _rising(d + 1, 7))


def variance_of_variance(d: int, group: str = "unitary") -> Fraction:
    """Haar variance over the group of sum p^3 - (sum p^2)^2."""
    _check_group(group)
    if group == "unitary":
        num = 8 * (17 * d**5 + 42 * d**4 - 106 * d**3 - 72 * d**2 + 449 * d - 330)
        den = (d + 1) ** 2 * (d + 2) ** 2 * (d + 3) ** 2 * (d + 4) * (d + 5) * (d + 6) * (d + 7)
    else:
        num = 72 * (37 * d**5 + 277 * d**4 - 198 * d**3 - 1852 * d**2 + 8360 * d - 6624)
        den = ((d + 2) ** 2 * (d + 4) ** 2 * (d + 6) ** 2
               * (d + 8) * (d + 10) * (d + 12) * (d + 14))
    return Fraction(num, den)


def variance_of_variance_from_sums(d: int) -> Fraction:
    """Unitary variance of variance assembled from the three closed-form sub-sums."""
    return sum_p3p3(d) - 2 * sum_p3p2p2(d) + sum_p2p2p2p2(d) - sample_variance_mean(d) ** 2


@dataclass(frozen=True)
class QMomentStats:
    mean: Fraction
    variance: Fraction
    variance_bound: Fraction


def qmoment_sum_stats(d: int, q: int) -> QMomentStats:
    """Haar mean and variance of sum_x p(x)^q, plus the bound (2q)!/d^(2q-1)."""
    if q < 2:
        raise ValueError(f"q must be >= 2, got {q}")
    fq = factorial(q)
    mean = Fraction(d * fq, _rising(d, q))
    second = Fraction(d * factorial(2 * q) + d * (d - 1) * fq * fq, _rising(d, 2 * q))
    return QMomentStats(mean, second - mean * mean, Fraction(factorial(2 * q), d ** (2 * q - 1)))


def moment_with_design_error(lam, d: int, epsilon, group: str = "unitary") -> tuple[Fraction, Fraction]:
    """Interval [haar - eps, haar + eps] for an eps-approximate design."""
    eps = Fraction(epsilon)
    if eps < 0:
        raise ValueError("epsilon must be non-negative")
    value = haar_moment(lam, d, group)
    return value - eps, value + eps


def integer_partitions(t: int):
    """All partitions of t as non-increasing tuples."""
    def rec(remaining, cap):
        if remaining == 0:
            yield ()
            return
        for p in range(min(remaining, cap), 0, -1):
            for tail in rec(remaining - p, p):
                yield (p,) + tail
    return list(rec(t, t))

