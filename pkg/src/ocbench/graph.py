"""Simple undirected graphs: in-memory structure, file formats, k-core.

File formats:
  * edge list: one edge per line, two 1-based node ids separated by a tab,
    each undirected edge once, lines sorted by the id pair;
  * community file: ``node<TAB>label`` per line, community labels 1..ell,
    outliers labeled 0.

Readers are liberal (any whitespace, duplicate or reversed edges collapse,
self-loops drop) so that third-party edge lists can be analyzed directly;
writers always emit the canonical form.
"""

from __future__ import annotations

import os
import tempfile

import numpy as np

from .errors import InvalidParamsError, ParseError

__all__ = [
    "Graph",
    "read_edge_list",
    "write_edge_list",
    "read_labels",
    "write_labels",
    "write_id_list",
    "k_core",
    "subgraph",
]


class Graph:
    """Immutable simple undirected graph on nodes 0..n-1.

    Edges are stored once per unordered pair with u < v, sorted. Adjacency
    is exposed through a CSR layout built on first use.
    """

    def __init__(self, n: int, edges: np.ndarray, _validated: bool = False):
        edges = np.asarray(edges, dtype=np.int64).reshape(-1, 2)
        if not _validated:
            if edges.size:
                lo = edges.min(axis=1)
                hi = edges.max(axis=1)
                if lo.min() < 0 or hi.max() >= n:
                    raise InvalidParamsError("edge endpoint out of range")
                if (lo == hi).any():
                    raise InvalidParamsError("self-loops are not allowed")
                edges = np.column_stack([lo, hi])
                order = np.lexsort((edges[:, 1], edges[:, 0]))
                edges = edges[order]
                key = edges[:, 0] * n + edges[:, 1]
                if key.size > 1 and (np.diff(key) == 0).any():
                    raise InvalidParamsError("duplicate edges are not allowed")
        self.n = int(n)
        self.edges = edges
        self._degrees = None
        self._indptr = None
        self._indices = None

    @property
    def m(self) -> int:
        return self.edges.shape[0]

    @property
    def degrees(self) -> np.ndarray:
        if self._degrees is None:
            self._degrees = np.bincount(self.edges.ravel(), minlength=self.n)
        return self._degrees

    def _build_csr(self):
        half = self.edges
        src = np.concatenate([half[:, 0], half[:, 1]])
        dst = np.concatenate([half[:, 1], half[:, 0]])
        order = np.argsort(src, kind="stable")
        self._indices = dst[order]
        self._indptr = np.zeros(self.n + 1, dtype=np.int64)
        np.cumsum(np.bincount(src, minlength=self.n), out=self._indptr[1:])

    @property
    def indptr(self) -> np.ndarray:
        if self._indptr is None:
            self._build_csr()
        return self._indptr

    @property
    def indices(self) -> np.ndarray:
        if self._indices is None:
            self._build_csr()
        return self._indices

    def neighbors(self, v: int) -> np.ndarray:
        return self.indices[self.indptr[v] : self.indptr[v + 1]]

    def adjacency_lists(self) -> list[list[int]]:
        """Python-native adjacency, for tight loops."""
        indptr, indices = self.indptr, self.indices.tolist()
        return [indices[indptr[v] : indptr[v + 1]] for v in range(self.n)]


def _atomic_write(path, text: str):
    path = os.fspath(path)
    directory = os.path.dirname(path) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-", text=True)
    try:
        with os.fdopen(fd, "w", encoding="utf-8", newline="\n") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def read_edge_list(path, zero_based: bool = False) -> tuple[Graph, np.ndarray]:
    """Read an edge list; returns (graph, original node id per internal index).

    Duplicate and reversed pairs collapse to one edge and self-loops are
    dropped. Node ids need not be contiguous: ids are compacted and the
    mapping back to the original ids is returned.
    """
    pairs = []
    base = 0 if zero_based else 1
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected two node ids, got {text!r}")
            try:
                u, v = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, f"non-integer node id in {text!r}") from None
            if u < base or v < base:
                raise ParseError(path, line_no, f"node id below {base} in {text!r}")
            pairs.append((u, v))
    if not pairs:
        raise ParseError(path, 0, "edge list is empty")
    arr = np.array(pairs, dtype=np.int64)
    node_ids = np.unique(arr)
    compact = np.searchsorted(node_ids, arr)
    lo = compact.min(axis=1)
    hi = compact.max(axis=1)
    keep = lo != hi
    key = np.unique(lo[keep] * node_ids.size + hi[keep])
    edges = np.column_stack([key // node_ids.size, key % node_ids.size])
    return Graph(node_ids.size, edges, _validated=True), node_ids


def write_edge_list(path, graph: Graph, node_ids: np.ndarray | None = None):
    """Write the canonical tab-separated edge list (1-based by default)."""
    if node_ids is None:
        node_ids = np.arange(1, graph.n + 1)
    u = node_ids[graph.edges[:, 0]]
    v = node_ids[graph.edges[:, 1]]
    lines = [f"{a}\t{b}" for a, b in zip(u.tolist(), v.tolist())]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def read_labels(path, node_ids: np.ndarray, shift_labels: bool = False) -> np.ndarray:
    """Read a ``node<TAB>label`` file aligned to the given node ids.

    Node ids are matched verbatim against ``node_ids`` (whatever their
    base). With ``shift_labels`` every label is increased by one, for
    files whose community ids start at 0 (0 is reserved for outliers
    in this package). The file may cover a superset of the graph's nodes
    (useful after a k-core reduction); every graph node must be present.
    """
    mapping = {}
    with open(path, "r", encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            parts = text.split()
            if len(parts) != 2:
                raise ParseError(path, line_no, f"expected 'node label', got {text!r}")
            try:
                node, label = int(parts[0]), int(parts[1])
            except ValueError:
                raise ParseError(path, line_no, f"non-integer field in {text!r}") from None
            if shift_labels:
                label += 1
            mapping[node] = label
    labels = np.empty(node_ids.size, dtype=np.int64)
    for i, nid in enumerate(node_ids.tolist()):
        if nid not in mapping:
            raise ParseError(path, 0, f"node {nid} has no label")
        labels[i] = mapping[nid]
    return labels


def write_labels(path, labels: np.ndarray, node_ids: np.ndarray | None = None):
    if node_ids is None:
        node_ids = np.arange(1, labels.size + 1)
    lines = [f"{n}\t{l}" for n, l in zip(node_ids.tolist(), np.asarray(labels).tolist())]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def write_id_list(path, ids: np.ndarray):
    lines = [str(i) for i in np.asarray(ids).tolist()]
    _atomic_write(path, "\n".join(lines) + ("\n" if lines else ""))


def k_core(graph: Graph, k: int) -> np.ndarray:
    """Boolean mask of nodes in the k-core (peel degree < k until stable)."""
    if k < 1:
        raise InvalidParamsError(f"k must be >= 1, got {k}")
    alive = np.ones(graph.n, dtype=bool)
    deg = graph.degrees.copy()
    indptr, indices = graph.indptr, graph.indices
    stack = list(np.flatnonzero(deg < k))
    alive[deg < k] = False
    while stack:
        v = stack.pop()
        for w in indices[indptr[v] : indptr[v + 1]]:
            if alive[w]:
                deg[w] -= 1
                if deg[w] < k:
                    alive[w] = False
                    stack.append(int(w))
    return alive


def subgraph(graph: Graph, mask: np.ndarray) -> tuple[Graph, np.ndarray]:
    """Induced subgraph on the masked nodes; returns (graph, kept indices)."""
    kept = np.flatnonzero(mask)
    keep_edge = mask[graph.edges[:, 0]] & mask[graph.edges[:, 1]]
    remap = np.full(graph.n, -1, dtype=np.int64)
    remap[kept] = np.arange(kept.size)
    edges = remap[graph.edges[keep_edge]]
    return Graph(kept.size, edges, _validated=True), kept
