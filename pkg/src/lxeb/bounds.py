"""Concentration tail bounds and the closed-form LXEB pass-probability guarantees.

Tails are clipped to [0, 1]; guarantees keep their raw (possibly negative)
value and flag it as vacuous instead.
"""

from __future__ import annotations

import math
from dataclasses import dataclass


def _clip01(x: float) -> float:
    return min(1.0, max(0.0, x))


def bennett_h(u: float) -> float:
    """h(u) = (1 + u) ln(1 + u) - u."""
    if u < 0:
        raise ValueError(f"u must be >= 0, got {u}")
    return (1 + u) * math.log1p(u) - u


def bennett_tail(k: float, sigma2: float, alpha: float, delta: float) -> float:
    """exp(-(k sigma^2 / alpha^2) h(alpha delta / sigma^2)) for a k-sample mean."""
    if min(k, sigma2, alpha, delta) <= 0:
        raise ValueError("k, sigma2, alpha and delta must all be positive")
    return math.exp(-(k * sigma2 / alpha**2) * bennett_h(alpha * delta / sigma2))


def hoeffding_tail(k: float, delta: float, n: int) -> float:
    """2 exp(-2 k delta^2 / 16 n^2): deviation delta/d of a mean of values in [0, 4n/d].

    Returned raw; it exceeds 1 for small k delta^2.
    """
    return 2.0 * math.exp(-2.0 * k * delta**2 / (16.0 * n**2))


def chebyshev_tail(variance: float, delta: float) -> float:
    if delta <= 0:
        raise ValueError("delta must be positive")
    return _clip01(variance / delta**2)


def markov_tail(mean: float, threshold: float) -> float:
    if threshold <= 0:
        raise ValueError("threshold must be positive")
    return _clip01(mean / threshold)


def maxp_tail(n: int) -> float:
    """Probability bound 2/2^n on max_x p(x) >= 4n/2^n."""
    return _clip01(2.0 / 2**n)


@dataclass(frozen=True)
class GuaranteeReport:
    theorem: str
    k: int
    n: int
    raw: float
    log_base: str = "e"

    @property
    def bound(self) -> float:
        return _clip01(self.raw)

    @property
    def vacuous(self) -> bool:
        return self.raw <= 0

    def as_dict(self) -> dict:
        return {
            "theorem": self.theorem,
            "k": self.k,
            "n": self.n,
            "raw": self.raw,
            "bound": self.bound,
            "vacuous": self.vacuous,
            "log_base": self.log_base,
            "formula": FORMULAS[self.theorem],
        }


FORMULAS = {
    "lindepth": "1 - 200*sqrt(2)/sqrt(k) - 50000/2^n",
    "8design": "1 - 400/k - 210000/2^n",
    "polydepth": "1 - exp(-(k/(800 n)) log(n/200)) - 50006/2^n",
    "orthogonal": "1 - exp(-(k/(16 n)) log(n/6)) - 180/2^n",
}
THEOREMS = tuple(FORMULAS)


def _log(x: float, base: str) -> float:
    return math.log(x) if base == "e" else math.log2(x)


def _exp_term(k, n, scale, ratio, base):
    # exp(-(k / (scale n)) log(n / ratio)); overflow means an astronomically vacuous term
    exponent = -(k / (scale * n)) * _log(n / ratio, base)
    return math.inf if exponent > 700 else math.exp(exponent)


def guarantee(theorem: str, k: int, n: int, log_base: str = "e") -> GuaranteeReport:
    """Lower bound on the probability of passing the LXEB test at b = 1.97."""
    if k < 1 or n < 1:
        raise ValueError("k and n must be >= 1")
    if log_base not in ("e", "2"):
        raise ValueError("log_base must be 'e' or '2'")
    d = 2.0**n
    if theorem == "lindepth":
        raw = 1 - 200 * math.sqrt(2) / math.sqrt(k) - 50000 / d
    elif theorem == "8design":
        raw = 1 - 400 / k - 210000 / d
    elif theorem == "polydepth":
        raw = 1 - _exp_term(k, n, 800, 200, log_base) - 50006 / d
    elif theorem == "orthogonal":
        raw = 1 - _exp_term(k, n, 16, 6, log_base) - 180 / d
    else:
        raise ValueError(f"unknown theorem {theorem!r}; expected one of {THEOREMS}")
    return GuaranteeReport(theorem, k, n, raw, log_base)
