"""Outlier selection, community assignment, and the degree split.

Outliers are the nodes that get no home community: their whole degree is
routed to the background graph. Everyone else has their degree split into
a community part and a background part, and is assigned to a community
large enough to hold the neighbors expected to land next to them.
"""

from __future__ import annotations

import numpy as np

from .errors import InfeasibleError, InvalidParamsError

__all__ = [
    "OUTLIER_LABEL",
    "expected_background_count",
    "select_outliers",
    "compute_phi",
    "internal_degree_target",
    "assign_communities",
    "split_degrees",
    "randomized_round",
]

OUTLIER_LABEL = 0

# Slack for comparing integer degrees against float thresholds.
_EPS = 1e-9


def expected_background_count(degrees: np.ndarray, xi: float) -> float:
    """Expected number of nodes with a positive background degree.

    A node of degree w contributes min(1, xi * w): nodes with xi*w >= 1
    are certain to keep a background stub, lighter nodes keep one with
    probability xi*w.
    """
    if not 0.0 <= xi <= 1.0:
        raise InvalidParamsError(f"xi must lie in [0, 1], got {xi}")
    return float(np.minimum(1.0, xi * np.asarray(degrees, dtype=np.float64)).sum())


def _outlier_degree_bound(degrees: np.ndarray, n_outliers: int, xi: float) -> float:
    l_bar = expected_background_count(degrees, xi)
    n = len(degrees)
    return l_bar + n_outliers - l_bar * n_outliers / n - 1.0


def select_outliers(
    degrees: np.ndarray, n_outliers: int, xi: float, rng: np.random.Generator
) -> np.ndarray:
    """Pick the outlier nodes, uniformly among the eligible ones.

    A node is eligible when its degree does not exceed
    L + s0 - L*s0/n - 1, where L is the expected number of nodes with a
    positive background degree. The cap guarantees the background graph
    has enough distinct endpoints for a simple realization even when xi
    is small (at xi=0 it reduces to degree < s0).

    Returns a sorted array of node ids. Raises InfeasibleError when fewer
    than n_outliers nodes are eligible.
    """
    if n_outliers < 0:
        raise InvalidParamsError(f"number of outliers must be >= 0, got {n_outliers}")
    if n_outliers == 0:
        return np.empty(0, dtype=np.int64)
    bound = _outlier_degree_bound(degrees, n_outliers, xi)
    eligible = np.flatnonzero(degrees <= bound + _EPS)
    if eligible.size < n_outliers:
        raise InfeasibleError(
            f"only {eligible.size} nodes satisfy the outlier degree bound "
            f"{bound:.3f}, but {n_outliers} outliers were requested; "
            f"raise xi or lower the outlier count"
        )
    picked = rng.choice(eligible, size=n_outliers, replace=False)
    return np.sort(picked).astype(np.int64)


def compute_phi(sizes: np.ndarray, n: int, n_outliers: int, xi: float) -> float:
    """Effective mixing correction for the community size profile.

    phi = 1 - sum_j (s_j / (n - s0))^2 * (n - s0) xi / ((n - s0) xi + s0).

    With no outliers the trailing fraction is 1 and the original
    1 - sum (s_j / n)^2 is recovered, for every xi. With xi = 0 and
    outliers present the background holds only outlier stubs and the
    fraction is 0.
    """
    sizes = np.asarray(sizes, dtype=np.float64)
    regulars = n - n_outliers
    if int(sizes.sum()) != regulars:
        raise InvalidParamsError(
            f"community sizes sum to {int(sizes.sum())}, expected n - s0 = {regulars}"
        )
    shares_sq = float(np.dot(sizes, sizes)) / regulars**2
    if n_outliers == 0:
        fraction = 1.0
    else:
        fraction = regulars * xi / (regulars * xi + n_outliers)
    return 1.0 - shares_sq * fraction


def internal_degree_target(degree, xi: float, phi: float):
    """Expected number of neighbors landing in the node's own community."""
    return (1.0 - xi * phi) * degree


def assign_communities(
    degrees: np.ndarray,
    outliers: np.ndarray,
    sizes: np.ndarray,
    xi: float,
    rng: np.random.Generator,
) -> np.ndarray:
    """Assign every non-outlier to a community; returns labels per node.

    Labels are 1..len(sizes); outliers get OUTLIER_LABEL (0). A node may
    only land in a community whose size exceeds its expected internal
    degree, x_i <= s_j - 1. Nodes are processed from the largest x_i down
    and each picks an admissible community with probability proportional
    to its remaining capacity. Processing in that order makes the greedy
    complete: it fails only when no admissible assignment exists at all.
    """
    n = len(degrees)
    sizes = np.asarray(sizes, dtype=np.int64)
    outliers = np.asarray(outliers, dtype=np.int64)
    if int(sizes.sum()) + outliers.size != n:
        raise InvalidParamsError(
            f"sizes sum to {int(sizes.sum())} and there are {outliers.size} "
            f"outliers; together they must cover all {n} nodes"
        )
    labels = np.zeros(n, dtype=np.int64)
    if sizes.size == 0:
        return labels

    phi = compute_phi(sizes, n, outliers.size, xi)
    is_outlier = np.zeros(n, dtype=bool)
    is_outlier[outliers] = True
    members = np.flatnonzero(~is_outlier)
    x = internal_degree_target(degrees[members].astype(np.float64), xi, phi)

    # Communities sorted by size descending; a node's admissible set is a
    # prefix of this order, and the prefix only grows as x decreases.
    order = np.argsort(-sizes, kind="stable")
    sorted_sizes = sizes[order]
    xo = np.argsort(-x, kind="stable")
    by_x = members[xo]
    x_sorted = x[xo]
    prefix = np.searchsorted(-sorted_sizes, -(x_sorted + 1 - _EPS), side="right")

    capacity = sorted_sizes.copy()
    start = 0
    while start < by_x.size:
        # Batch of nodes sharing one admissible prefix. Filling them one at
        # a time with probability proportional to remaining capacity is the
        # same as drawing that many community slots uniformly without
        # replacement, i.e. a multivariate hypergeometric draw.
        stop = int(np.searchsorted(prefix, prefix[start], side="right"))
        p = int(prefix[start])
        batch = by_x[start:stop]
        room = capacity[:p]
        total = int(room.sum())
        if p == 0 or total < batch.size:
            raise InfeasibleError(
                f"cannot place {batch.size} nodes with expected internal degree "
                f">= {x_sorted[start]:.2f} (degree {int(degrees[batch[0]])}): "
                f"admissible communities have {total} free slots; "
                f"increase the maximum community size"
            )
        counts = rng.multivariate_hypergeometric(room, batch.size)
        shuffled = rng.permutation(batch)
        offset = 0
        for j, c in enumerate(counts):
            if c:
                labels[shuffled[offset : offset + c]] = order[j] + 1
                offset += c
        capacity[:p] -= counts
        start = stop
    return labels


def randomized_round(values: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Round each entry up with probability equal to its fractional part."""
    values = np.asarray(values, dtype=np.float64)
    base = np.floor(values)
    frac = values - base
    return (base + (rng.random(values.shape) < frac)).astype(np.int64)


def split_degrees(
    labels: np.ndarray,
    degrees: np.ndarray,
    xi: float,
    rng: np.random.Generator,
) -> tuple[np.ndarray, np.ndarray]:
    """Split each degree w into a community part y and background part z.

    Non-outliers get y from a randomized rounding of (1 - xi) * w, so
    E[y] = (1 - xi) * w before parity correction. Outliers get y = 0.
    Within each community the sum of y must be even for a stub matching to
    exist; odd communities get one uniformly chosen member toggled by +1
    when that stays <= w, else by -1. The background total is then even
    automatically because the full volume is even.
    """
    degrees = np.asarray(degrees, dtype=np.int64)
    n = degrees.size
    y = randomized_round(internal_degree_target(degrees, xi, 1.0), rng)
    y[labels == OUTLIER_LABEL] = 0

    n_comms = int(labels.max())
    if n_comms > 0:
        totals = np.bincount(labels, weights=y, minlength=n_comms + 1)
        odd = np.flatnonzero(totals.astype(np.int64) % 2 == 1)
        if odd.size:
            by_label = np.argsort(labels, kind="stable")
            bounds = np.searchsorted(labels[by_label], np.arange(n_comms + 2))
            for lbl in odd:
                group = by_label[bounds[lbl] : bounds[lbl + 1]]
                pick = int(group[rng.integers(group.size)])
                if y[pick] + 1 <= degrees[pick]:
                    y[pick] += 1
                else:
                    y[pick] -= 1
    z = degrees - y
    return y, z
