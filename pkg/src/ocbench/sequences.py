"""Concrete degree sequences and community-size sequences.

Degrees are sampled per node and sorted non-increasing; the total volume is
forced to be even so that a stub matching exists. Community sizes are
sampled until they cover the target node count and the overshoot is folded
back so the sizes sum to the target exactly.
"""

from __future__ import annotations

import heapq

import numpy as np

from .errors import InfeasibleError, InvalidParamsError, ParseError
from .powerlaw import PowerLawSpec, expected_value, sample

__all__ = [
    "generate_degrees",
    "solve_min_degree",
    "generate_community_sizes",
    "read_sequence_file",
]


def generate_degrees(spec: PowerLawSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Sample a degree sequence of length n, sorted non-increasing.

    If the sampled volume is odd, one minimum-degree node is raised by 1
    when that stays within the range, otherwise one maximum-degree node is
    lowered by 1. With a single-point support and odd total there is no
    in-range fix, which is reported as infeasible.
    """
    if n < 1:
        raise InvalidParamsError(f"n must be >= 1, got {n}")
    degrees = sample(spec, n, rng)
    degrees[::-1].sort()  # non-increasing
    if int(degrees.sum()) % 2 == 1:
        if spec.low == spec.high:
            raise InfeasibleError(
                f"odd total volume {degrees.sum()} cannot be fixed when the "
                f"degree range is the single value {spec.low}"
            )
        if degrees[-1] < spec.high:
            # First node holding the minimum: bumping it keeps the sort order.
            i = int(np.searchsorted(-degrees, -degrees[-1]))
            degrees[i] += 1
        else:
            degrees[-1] -= 1
    return degrees


def solve_min_degree(gamma: float, target_avg: float, max_degree: int) -> int:
    """Smallest minimum degree whose truncated power law reaches target_avg.

    The expected value is strictly increasing in the minimum degree, so a
    binary search over [1, max_degree] finds the smallest value with
    expected_value >= target_avg.
    """
    if target_avg < 1:
        raise InvalidParamsError(f"average degree must be >= 1, got {target_avg}")
    if max_degree < target_avg:
        raise InfeasibleError(
            f"average degree {target_avg} is unreachable with maximum degree {max_degree}"
        )
    lo, hi = 1, max_degree
    while lo < hi:
        mid = (lo + hi) // 2
        if expected_value(PowerLawSpec(gamma, mid, max_degree)) >= target_avg:
            hi = mid
        else:
            lo = mid + 1
    return lo


def generate_community_sizes(
    spec: PowerLawSpec, target_total: int, rng: np.random.Generator
) -> np.ndarray:
    """Sample community sizes summing exactly to target_total.

    Sizes are drawn until their running sum reaches the target. The
    overshoot is subtracted from the last community when that keeps it in
    range; otherwise the last sample is dropped and the missing mass is
    added one unit at a time to the smallest communities still below the
    maximum size. The result is sorted non-increasing.
    """
    if target_total < spec.low:
        raise InfeasibleError(
            f"target total {target_total} is below the minimum community size {spec.low}"
        )
    # At most target//low + 1 draws can be needed.
    budget = target_total // spec.low + 1
    sizes = sample(spec, budget, rng)
    cum = np.cumsum(sizes)
    cut = int(np.searchsorted(cum, target_total))
    sizes = sizes[: cut + 1]
    overshoot = int(cum[cut]) - target_total
    if overshoot == 0:
        return np.sort(sizes)[::-1]
    if sizes[-1] - overshoot >= spec.low:
        sizes[-1] -= overshoot
        return np.sort(sizes)[::-1]
    # Drop the last sample and spread its remaining mass over the smallest
    # communities that can still grow.
    deficit = int(sizes[-1]) - overshoot
    sizes = sizes[:-1]
    room = int((spec.high - sizes).sum())
    if deficit > room:
        raise InfeasibleError(
            f"cannot place {deficit} remaining nodes: all {sizes.size} "
            f"communities are at the maximum size {spec.high}"
        )
    heap = list(sizes)
    heapq.heapify(heap)
    parked = []  # communities that reached the maximum size
    for _ in range(deficit):
        s = heapq.heappop(heap)
        while s >= spec.high:
            parked.append(s)
            s = heapq.heappop(heap)
        heapq.heappush(heap, s + 1)
    sizes = np.sort(np.array(parked + heap, dtype=np.int64))[::-1]
    return sizes


def read_sequence_file(path) -> np.ndarray:
    """Read one integer per line; blank lines and #-comments are skipped."""
    values = []
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            try:
                values.append(int(text))
            except ValueError:
                raise ParseError(path, line_no, f"expected an integer, got {text!r}") from None
    return np.array(values, dtype=np.int64)
