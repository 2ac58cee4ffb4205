"""Truncated discrete power-law distributions.

Both node degrees and community sizes are drawn from distributions of the
form P(k) proportional to k**(-exponent) on the integer range
[low, high]. Sampling goes through a precomputed cumulative table and a
binary search, so a draw costs O(log(high - low)).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InvalidParamsError

__all__ = ["PowerLawSpec", "pmf", "sample", "expected_value"]


@dataclass(frozen=True)
class PowerLawSpec:
    """Truncated discrete power law on the integers {low, ..., high}.

    Attributes:
        exponent: Decay exponent, must be > 0.
        low: Smallest value in the support (>= 1).
        high: Largest value in the support (>= low).
    """

    exponent: float
    low: int
    high: int

    def __post_init__(self):
        if not np.isfinite(self.exponent) or self.exponent <= 0:
            raise InvalidParamsError(f"exponent must be > 0, got {self.exponent}")
        if self.low < 1:
            raise InvalidParamsError(f"minimum value must be >= 1, got {self.low}")
        if self.high < self.low:
            raise InvalidParamsError(
                f"maximum value {self.high} is below minimum value {self.low}"
            )

    def support(self) -> np.ndarray:
        return np.arange(self.low, self.high + 1, dtype=np.int64)


def pmf(spec: PowerLawSpec) -> np.ndarray:
    """Probability vector over {spec.low, ..., spec.high}.

    Entry i holds P(low + i) = (low + i)**(-exponent), normalized to sum 1.
    """
    k = spec.support().astype(np.float64)
    weights = k ** (-spec.exponent)
    return weights / weights.sum()


def sample(spec: PowerLawSpec, count: int, rng: np.random.Generator) -> np.ndarray:
    """Draw `count` i.i.d. values from the distribution.

    Deterministic given the state of `rng`. Returns an int64 array.
    """
    if count < 0:
        raise InvalidParamsError(f"count must be >= 0, got {count}")
    if count == 0:
        return np.empty(0, dtype=np.int64)
    cdf = np.cumsum(pmf(spec))
    u = rng.random(count)
    idx = np.searchsorted(cdf, u, side="right")
    # Guard against cdf[-1] landing a hair below 1.0.
    np.minimum(idx, cdf.size - 1, out=idx)
    return spec.low + idx.astype(np.int64)


def expected_value(spec: PowerLawSpec) -> float:
    """Mean of the distribution, sum over k of k * P(k)."""
    k = spec.support().astype(np.float64)
    return float(np.dot(k, pmf(spec)))
