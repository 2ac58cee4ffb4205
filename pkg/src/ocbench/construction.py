"""Graph construction: configuration-model matchings, rewiring, assembly.

Each community contributes a configuration-model graph on the community
degrees of its members; one background configuration-model graph spans all
nodes with a positive background degree. Collisions (self-loops, parallel
edges, background copies of community edges) are removed by
degree-preserving 2-swaps, so the requested degree sequence is realized
exactly. Community collisions that local swaps cannot clear hand their
stubs to the background pool.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .assignment import (
    OUTLIER_LABEL,
    assign_communities,
    compute_phi,
    select_outliers,
    split_degrees,
)
from .errors import InfeasibleError, InvalidParamsError
from .graph import Graph
from .powerlaw import PowerLawSpec
from .sequences import generate_community_sizes, generate_degrees, solve_min_degree

__all__ = [
    "BACKGROUND",
    "GeneratorParams",
    "LabeledGraph",
    "configuration_matching",
    "rewire_to_simple",
    "build_graph",
    "generate",
]

# Edge-origin code for the background graph; communities use their 1-based id.
BACKGROUND = 0

_MAX_REWIRE_PASSES = 100

# Substream ids for deriving independent generators from one seed. The
# per-community streams make the community phase order-independent, so it
# could run in parallel workers without changing the output.
_S_DEGREES, _S_SIZES, _S_OUTLIERS, _S_ASSIGN, _S_SPLIT, _S_BACKGROUND = range(6)
_S_COMMUNITY = 6


def _substream(seed: int, *key: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=key))


def configuration_matching(stubs: np.ndarray, rng: np.random.Generator) -> np.ndarray:
    """Uniform random perfect matching of the stub list.

    Returns an (m, 2) edge multiset; each node appears as an endpoint
    exactly as often as it appears in ``stubs``. Self-loops and parallel
    edges are possible and left to the rewiring step.
    """
    stubs = np.asarray(stubs, dtype=np.int64)
    if stubs.size % 2 == 1:
        raise InvalidParamsError(f"stub list has odd length {stubs.size}")
    shuffled = stubs.copy()
    rng.shuffle(shuffled)
    return shuffled.reshape(-1, 2)


def _edge_keys(edges: np.ndarray, n: int) -> np.ndarray:
    lo = edges.min(axis=1).astype(np.int64)
    hi = edges.max(axis=1).astype(np.int64)
    return lo * n + hi


def _collision_mask(edges: np.ndarray, n: int, forbidden) -> np.ndarray:
    """True for every edge instance that keeps the multiset from being a
    simple graph: self-loops, all-but-one copy of a repeated pair, and any
    copy of a forbidden pair."""
    keys = _edge_keys(edges, n)
    bad = edges[:, 0] == edges[:, 1]
    order = np.argsort(keys, kind="stable")
    sorted_keys = keys[order]
    dup = np.zeros(edges.shape[0], dtype=bool)
    dup[order[1:]] = sorted_keys[1:] == sorted_keys[:-1]
    bad = bad | dup
    if forbidden is not None:
        bad = bad | forbidden.contains(keys)
    return bad


class _ForbiddenKeys:
    """Static sorted key set with fast vectorized membership."""

    def __init__(self, keys: np.ndarray):
        self._keys = np.unique(keys)

    def contains(self, keys: np.ndarray) -> np.ndarray:
        if self._keys.size == 0:
            return np.zeros(np.shape(keys), dtype=bool)
        idx = np.minimum(np.searchsorted(self._keys, keys), self._keys.size - 1)
        return self._keys[idx] == keys

    def as_set(self) -> set:
        return set(self._keys.tolist())


def rewire_to_simple(
    edges: np.ndarray,
    n: int,
    rng: np.random.Generator,
    forbidden: np.ndarray | None = None,
    max_passes: int = _MAX_REWIRE_PASSES,
    transfer_on_fail: bool = False,
) -> tuple[np.ndarray, np.ndarray]:
    """Remove collisions by degree-preserving 2-swaps.

    Every colliding edge instance proposes a swap with a uniformly random
    other edge; the swap is kept only when it strictly lowers the number
    of collisions. ``forbidden`` holds edge keys (u*n+v, u<v) that must
    not appear, e.g. community edges when rewiring the background graph.

    Returns ``(simple_edges, leftover_edges)``. With ``transfer_on_fail``
    edges still colliding after ``max_passes`` are pulled out and returned
    as leftovers (their stubs move to the background pool); otherwise the
    leftovers trigger an InfeasibleError.
    """
    edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2).copy()
    fkeys = _ForbiddenKeys(forbidden if forbidden is not None else np.empty(0, dtype=np.int64))
    bad = _collision_mask(edges, n, fkeys)
    if not bad.any():
        return edges, np.empty((0, 2), dtype=np.int64)

    m = edges.shape[0]
    if m < 2:
        # No swap partner exists; a lone colliding edge cannot be fixed.
        if not transfer_on_fail:
            raise InfeasibleError("cannot rewire a single colliding edge")
        return edges[~bad], edges[bad]

    counts: dict[int, int] = {}
    for k in _edge_keys(edges, n).tolist():
        counts[k] = counts.get(k, 0) + 1
    fset = fkeys.as_set()

    def cost(key: int) -> int:
        """Collision units carried by all copies of one key: every copy of
        a self-loop or forbidden pair counts, duplicates count all but one."""
        c = counts.get(key, 0)
        if c <= 0:
            return 0
        if key // n == key % n or key in fset:
            return c
        return c - 1

    eu = edges[:, 0].tolist()
    ev = edges[:, 1].tolist()
    for _ in range(max_passes):
        bad_idx = np.flatnonzero(_collision_mask(edges, n, fkeys)).tolist()
        if not bad_idx:
            break
        partners = rng.integers(0, m - 1, size=len(bad_idx)).tolist()
        flips = rng.integers(0, 2, size=len(bad_idx)).tolist()
        for e1, e2, flip in zip(bad_idx, partners, flips):
            a, b = eu[e1], ev[e1]
            k1 = (a * n + b) if a < b else (b * n + a)
            # An earlier swap this pass may already have fixed this instance.
            if a != b and counts.get(k1, 0) <= 1 and k1 not in fset:
                continue
            if e2 >= e1:
                e2 += 1
            c, d = eu[e2], ev[e2]
            # Two swap orientations preserve degrees: (a,c)+(b,d) or (a,d)+(b,c).
            if flip:
                c, d = d, c
            k2 = (c * n + d) if c < d else (d * n + c)
            nk1 = (a * n + c) if a < c else (c * n + a)
            nk2 = (b * n + d) if b < d else (d * n + b)
            affected = {k1, k2, nk1, nk2}
            before = sum(cost(k) for k in affected)
            counts[k1] -= 1
            counts[k2] -= 1
            counts[nk1] = counts.get(nk1, 0) + 1
            counts[nk2] = counts.get(nk2, 0) + 1
            after = sum(cost(k) for k in affected)
            if after < before:
                eu[e1], ev[e1] = a, c
                eu[e2], ev[e2] = b, d
            else:
                counts[nk1] -= 1
                counts[nk2] -= 1
                counts[k1] += 1
                counts[k2] += 1
        edges[:, 0] = eu
        edges[:, 1] = ev
    bad = _collision_mask(edges, n, fkeys)
    if bad.any():
        if not transfer_on_fail:
            raise InfeasibleError(
                f"rewiring exhausted after {max_passes} passes with "
                f"{int(bad.sum())} colliding edges left"
            )
        return edges[~bad], edges[bad]
    return edges, np.empty((0, 2), dtype=np.int64)


@dataclass
class GeneratorParams:
    """Full parameterization of one benchmark graph.

    Either ``degree_spec`` or an explicit ``degrees`` array must be given;
    likewise ``size_spec`` or ``community_sizes``. When ``avg_degree`` is
    set instead of a minimum degree, the minimum is solved so the degree
    distribution reaches that average.
    """

    n: int
    xi: float
    n_outliers: int = 0
    degree_spec: PowerLawSpec | None = None
    size_spec: PowerLawSpec | None = None
    seed: int = 0
    degrees: np.ndarray | None = None
    community_sizes: np.ndarray | None = None

    @classmethod
    def from_options(
        cls,
        *,
        n: int,
        xi: float,
        n_outliers: int = 0,
        gamma: float | None = None,
        min_degree: int | None = None,
        max_degree: int | None = None,
        avg_degree: float | None = None,
        beta: float | None = None,
        min_size: int | None = None,
        max_size: int | None = None,
        seed: int = 0,
        degrees: np.ndarray | None = None,
        community_sizes: np.ndarray | None = None,
    ) -> "GeneratorParams":
        degree_spec = None
        if degrees is None:
            if gamma is None or max_degree is None:
                raise InvalidParamsError("need gamma and max degree (or an explicit degree file)")
            if min_degree is None:
                if avg_degree is None:
                    raise InvalidParamsError("need either a minimum or an average degree")
                min_degree = solve_min_degree(gamma, avg_degree, max_degree)
            degree_spec = PowerLawSpec(gamma, min_degree, max_degree)
        size_spec = None
        if community_sizes is None:
            if beta is None or min_size is None or max_size is None:
                raise InvalidParamsError(
                    "need beta and the community size range (or an explicit size file)"
                )
            size_spec = PowerLawSpec(beta, min_size, max_size)
        params = cls(
            n=n,
            xi=xi,
            n_outliers=n_outliers,
            degree_spec=degree_spec,
            size_spec=size_spec,
            seed=seed,
            degrees=degrees,
            community_sizes=community_sizes,
        )
        params.validate()
        return params

    def validate(self):
        if self.n < 1:
            raise InvalidParamsError(f"n must be >= 1, got {self.n}")
        if not 0.0 <= self.xi <= 1.0:
            raise InvalidParamsError(f"xi must lie in [0, 1], got {self.xi}")
        if not 0 <= self.n_outliers <= self.n:
            raise InvalidParamsError(
                f"outlier count must lie in [0, n], got {self.n_outliers}"
            )
        if self.degree_spec is not None and self.degree_spec.high > self.n - 1:
            raise InvalidParamsError(
                f"maximum degree {self.degree_spec.high} exceeds n - 1 = {self.n - 1}"
            )
        if self.degree_spec is not None and self.size_spec is not None:
            if self.size_spec.low < self.degree_spec.low + 1:
                raise InvalidParamsError(
                    f"minimum community size {self.size_spec.low} must be at least "
                    f"minimum degree + 1 = {self.degree_spec.low + 1}, or small "
                    f"communities cannot accommodate their members"
                )
        if self.degrees is not None:
            degrees = np.asarray(self.degrees)
            if degrees.size != self.n:
                raise InvalidParamsError(
                    f"explicit degree sequence has {degrees.size} entries, expected {self.n}"
                )
            if degrees.min() < 1 or degrees.max() > self.n - 1:
                raise InvalidParamsError("explicit degrees must lie in [1, n-1]")
            if int(degrees.sum()) % 2 == 1:
                raise InvalidParamsError(
                    "explicit degree sequence has odd total volume; supply an even one"
                )
        if self.community_sizes is not None:
            sizes = np.asarray(self.community_sizes)
            if sizes.size and sizes.min() < 1:
                raise InvalidParamsError("explicit community sizes must be positive")
            if int(sizes.sum()) != self.n - self.n_outliers:
                raise InvalidParamsError(
                    f"explicit community sizes sum to {int(sizes.sum())}, "
                    f"expected n - s0 = {self.n - self.n_outliers}"
                )

    def echo(self) -> dict:
        """All resolved values, for the reproducibility record."""
        out = {"n": self.n, "outliers": self.n_outliers, "xi": self.xi, "seed": self.seed}
        if self.degree_spec is not None:
            out["gamma"] = self.degree_spec.exponent
            out["min_degree"] = self.degree_spec.low
            out["max_degree"] = self.degree_spec.high
        else:
            out["degrees"] = "explicit"
        if self.size_spec is not None:
            out["beta"] = self.size_spec.exponent
            out["min_size"] = self.size_spec.low
            out["max_size"] = self.size_spec.high
        else:
            out["community_sizes"] = "explicit"
        return out


@dataclass
class LabeledGraph:
    """A generated graph with its ground truth.

    ``labels[i]`` is the community of node i (1..ell) or 0 for outliers.
    ``edge_origin[e]`` tells which configuration model produced edge e:
    a community id, or 0 for the background graph.
    """

    graph: Graph
    labels: np.ndarray
    edge_origin: np.ndarray
    requested_degrees: np.ndarray
    community_sizes: np.ndarray
    params: dict = field(default_factory=dict)

    @property
    def n(self) -> int:
        return self.graph.n

    @property
    def outlier_mask(self) -> np.ndarray:
        return self.labels == OUTLIER_LABEL

    @property
    def outliers(self) -> np.ndarray:
        return np.flatnonzero(self.outlier_mask)


def build_graph(
    degrees: np.ndarray,
    labels: np.ndarray,
    y: np.ndarray,
    z: np.ndarray,
    seed: int,
    max_passes: int = _MAX_REWIRE_PASSES,
) -> tuple[np.ndarray, np.ndarray]:
    """Materialize the edge set from the degree split.

    Community graphs are matched and rewired first, each on its own
    substream; unresolvable community collisions move their stubs to the
    background pool. The background matching is then rewired against the
    union, so the final graph is simple and realizes ``degrees`` exactly.

    Returns ``(edges, origins)`` with edges canonical (u < v, sorted).
    """
    n = degrees.size
    n_comms = int(labels.max()) if labels.size else 0
    parts: list[np.ndarray] = []
    origins: list[np.ndarray] = []
    extra_background: list[np.ndarray] = []
    for comm in range(1, n_comms + 1):
        members = np.flatnonzero(labels == comm)
        stubs = np.repeat(members, y[members])
        if stubs.size == 0:
            continue
        rng = _substream(seed, _S_COMMUNITY, comm)
        matched = configuration_matching(stubs, rng)
        simple, leftover = rewire_to_simple(
            matched, n, rng, max_passes=max_passes, transfer_on_fail=True
        )
        parts.append(simple)
        origins.append(np.full(simple.shape[0], comm, dtype=np.int64))
        if leftover.size:
            extra_background.append(leftover.ravel())

    community_edges = (
        np.concatenate(parts) if parts else np.empty((0, 2), dtype=np.int64)
    )
    forbidden = _edge_keys(community_edges, n) if community_edges.size else None

    bg_stubs = np.repeat(np.arange(n, dtype=np.int64), z)
    if extra_background:
        bg_stubs = np.concatenate([bg_stubs] + extra_background)
    if bg_stubs.size:
        rng = _substream(seed, _S_BACKGROUND)
        matched = configuration_matching(bg_stubs, rng)
        simple, _ = rewire_to_simple(
            matched, n, rng, forbidden=forbidden, max_passes=max_passes
        )
        parts.append(simple)
        origins.append(np.full(simple.shape[0], BACKGROUND, dtype=np.int64))

    if parts:
        edges = np.concatenate(parts)
        origin = np.concatenate(origins)
    else:
        edges = np.empty((0, 2), dtype=np.int64)
        origin = np.empty(0, dtype=np.int64)
    lo = edges.min(axis=1) if edges.size else np.empty(0, dtype=np.int64)
    hi = edges.max(axis=1) if edges.size else np.empty(0, dtype=np.int64)
    order = np.lexsort((hi, lo))
    edges = np.column_stack([lo, hi])[order] if edges.size else edges
    origin = origin[order]

    realized = np.bincount(edges.ravel(), minlength=n) if edges.size else np.zeros(n, dtype=np.int64)
    if not np.array_equal(realized, degrees):
        raise InfeasibleError("internal error: realized degrees differ from the request")
    return edges, origin


def generate(params: GeneratorParams) -> LabeledGraph:
    """Run the full pipeline: sequences, outliers, assignment, split, edges."""
    params.validate()
    seed = params.seed

    if params.degrees is not None:
        degrees = np.asarray(params.degrees, dtype=np.int64)
    else:
        degrees = generate_degrees(params.degree_spec, params.n, _substream(seed, _S_DEGREES))

    if params.community_sizes is not None:
        sizes = np.asarray(params.community_sizes, dtype=np.int64)
    else:
        sizes = generate_community_sizes(
            params.size_spec, params.n - params.n_outliers, _substream(seed, _S_SIZES)
        )

    outliers = select_outliers(
        degrees, params.n_outliers, params.xi, _substream(seed, _S_OUTLIERS)
    )
    labels = assign_communities(degrees, outliers, sizes, params.xi, _substream(seed, _S_ASSIGN))
    y, z = split_degrees(labels, degrees, params.xi, _substream(seed, _S_SPLIT))
    edges, origin = build_graph(degrees, labels, y, z, seed)

    echo = params.echo()
    echo["phi"] = compute_phi(sizes, params.n, params.n_outliers, params.xi)
    echo["n_communities"] = int(sizes.size)
    echo["volume"] = int(degrees.sum())
    return LabeledGraph(
        graph=Graph(params.n, edges, _validated=True),
        labels=labels,
        edge_origin=origin,
        requested_degrees=degrees,
        community_sizes=sizes,
        params=echo,
    )
