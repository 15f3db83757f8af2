"""Graph and drawing primitives.

Graphs are simple, undirected, and treated as immutable once built. Hop
distances are computed lazily (breadth-first search per source): the
combinatorial crossing bounds work on any simple graph, while the stress
metrics additionally require connectivity and trigger it on first use.
"""
from __future__ import annotations

import math
from collections import deque
from typing import Iterable, NamedTuple, Sequence

import numpy as np

from .errors import GraphConnectivityError, GraphGenerationError

Edge = tuple[int, int]

DEFAULT_ATTEMPT_CAP = 10_000


class PairTable(NamedTuple):
    """All node pairs i < j sorted by hop distance, with tie-block bounds.

    ``block_starts`` has one entry per run of equal hop distance plus a
    terminal sentinel, so pairs ``order k in [block_starts[b], block_starts[b+1])``
    share ``dist[b]``.
    """

    i: np.ndarray
    j: np.ndarray
    dist: np.ndarray
    block_starts: np.ndarray


class Graph:
    """Simple undirected graph on nodes ``0..n-1``."""

    __slots__ = ("n", "edges", "_adjacency", "_dist", "_pairs")

    def __init__(self, n: int, edges: Iterable[Sequence[int]]):
        if n < 1:
            raise ValueError(f"node count must be positive, got {n}")
        seen: set[Edge] = set()
        for e in edges:
            u, v = int(e[0]), int(e[1])
            if u == v:
                raise ValueError(f"self-loop at node {u}")
            if not (0 <= u < n and 0 <= v < n):
                raise ValueError(f"edge ({u}, {v}) out of range for n={n}")
            if u > v:
                u, v = v, u
            if (u, v) in seen:
                raise ValueError(f"duplicate edge ({u}, {v})")
            seen.add((u, v))
        self.n = n
        self.edges: tuple[Edge, ...] = tuple(sorted(seen))
        self._adjacency: tuple[tuple[int, ...], ...] | None = None
        self._dist: np.ndarray | None = None
        self._pairs: PairTable | None = None

    @property
    def m(self) -> int:
        return len(self.edges)

    @property
    def adjacency(self) -> tuple[tuple[int, ...], ...]:
        if self._adjacency is None:
            nbrs: list[list[int]] = [[] for _ in range(self.n)]
            for u, v in self.edges:
                nbrs[u].append(v)
                nbrs[v].append(u)
            self._adjacency = tuple(tuple(sorted(a)) for a in nbrs)
        return self._adjacency

    def degrees(self) -> np.ndarray:
        return np.array([len(a) for a in self.adjacency], dtype=np.int64)

    def is_connected(self) -> bool:
        if self.n == 1:
            return True
        seen = _bfs_distances(self.adjacency, 0)
        return bool((seen >= 0).all())

    @property
    def dist(self) -> np.ndarray:
        """Hop-count distance matrix; raises if the graph is disconnected."""
        if self._dist is None:
            d = all_pairs_shortest_paths(self.adjacency)
            d.setflags(write=False)
            self._dist = d
        return self._dist

    def distance_sorted_pairs(self) -> PairTable:
        """Pairs sorted ascending by hop distance (stable in (i, j))."""
        if self._pairs is None:
            iu, ju = np.triu_indices(self.n, k=1)
            d = self.dist[iu, ju]
            order = np.argsort(d, kind="stable")
            dsort = d[order]
            changes = np.flatnonzero(np.diff(dsort)) + 1
            starts = np.concatenate(([0], changes, [dsort.size]))
            self._pairs = PairTable(
                i=np.ascontiguousarray(iu[order], dtype=np.int32),
                j=np.ascontiguousarray(ju[order], dtype=np.int32),
                dist=np.ascontiguousarray(dsort, dtype=np.int32),
                block_starts=np.ascontiguousarray(starts, dtype=np.int32),
            )
        return self._pairs

    def __eq__(self, other) -> bool:
        if not isinstance(other, Graph):
            return NotImplemented
        return self.n == other.n and self.edges == other.edges

    def __hash__(self) -> int:
        return hash((self.n, self.edges))

    def __repr__(self) -> str:
        return f"Graph(n={self.n}, m={self.m})"

    def __reduce__(self):
        return (Graph, (self.n, self.edges))

    def to_json(self) -> dict:
        return {"n": self.n, "edges": [list(e) for e in self.edges]}

    @classmethod
    def from_json(cls, obj: dict) -> "Graph":
        """Ingest the wire format, enforcing the stimulus-corpus constraints.

        Programmatic construction accepts any simple graph; files must
        describe a connected graph with m < 2n.
        """
        g = cls(int(obj["n"]), obj["edges"])
        if g.m >= 2 * g.n:
            raise ValueError(f"edge count {g.m} violates m < 2n for n={g.n}")
        if not g.is_connected():
            raise GraphConnectivityError("ingested graph is not connected")
        return g


def _bfs_distances(adjacency: Sequence[Sequence[int]], source: int) -> np.ndarray:
    n = len(adjacency)
    dist = np.full(n, -1, dtype=np.int32)
    dist[source] = 0
    queue = deque([source])
    while queue:
        u = queue.popleft()
        du = dist[u]
        for v in adjacency[u]:
            if dist[v] < 0:
                dist[v] = du + 1
                queue.append(v)
    return dist


def all_pairs_shortest_paths(adjacency: Sequence[Sequence[int]]) -> np.ndarray:
    """Hop-count distances via BFS per source.

    Raises GraphConnectivityError when any pair is unreachable.
    """
    n = len(adjacency)
    out = np.empty((n, n), dtype=np.int32)
    for s in range(n):
        d = _bfs_distances(adjacency, s)
        if (d < 0).any():
            raise GraphConnectivityError(
                f"node {int(np.flatnonzero(d < 0)[0])} unreachable from {s}"
            )
        out[s] = d
    return out


def default_edge_probability(n: int) -> float:
    """Default Erdos-Renyi edge probability for the stimulus generator.

    2.2/(n-1) keeps the expected edge count at 1.1n, comfortably below the
    2n cap, while connected samples stay frequent enough for rejection
    sampling at every supported size. Measured acceptance: 0.41 at n=10,
    0.072 at n=25, 0.0037 at n=50 (~270 attempts on average, cap 10,000).
    A mean degree of 1.5 would need ~20,000 attempts at n=50.
    """
    if n < 2:
        raise ValueError("need at least two nodes")
    return min(1.0, 2.2 / (n - 1))


def generate_graph(
    n: int,
    edge_probability: float | None = None,
    seed=None,
    *,
    max_attempts: int = DEFAULT_ATTEMPT_CAP,
) -> Graph:
    """Sample a connected Erdos-Renyi graph with m < 2n by rejection.

    Whole-graph resampling (rather than repair) preserves the G(n, p)
    distribution conditioned on the constraints. Deterministic for a fixed
    seed; raises GraphGenerationError when the cap is exhausted.
    """
    if n < 2:
        raise ValueError(f"need n >= 2, got {n}")
    p = default_edge_probability(n) if edge_probability is None else float(edge_probability)
    if not (0.0 < p <= 1.0):
        raise ValueError(f"edge probability must be in (0, 1], got {p}")
    rng = np.random.default_rng(seed)
    iu, ju = np.triu_indices(n, k=1)
    cap = 2 * n
    for _ in range(max_attempts):
        mask = rng.random(iu.size) < p
        if int(mask.sum()) >= cap:
            continue
        ei = iu[mask]
        ej = ju[mask]
        adjacency: list[list[int]] = [[] for _ in range(n)]
        for u, v in zip(ei.tolist(), ej.tolist()):
            adjacency[u].append(v)
            adjacency[v].append(u)
        if (_bfs_distances(adjacency, 0) >= 0).all():
            return Graph(n, list(zip(ei.tolist(), ej.tolist())))
    raise GraphGenerationError(n, p, max_attempts)


class Drawing:
    """Node positions for a graph.

    Coordinates are plain floats; the stimulus pipeline keeps them inside the
    unit square but the metrics accept any finite layout (they are checked to
    be scale and rotation invariant). ``ksm`` is a cache slot, filled in by
    the stress module or loaded from disk.
    """

    __slots__ = ("graph", "pos", "ksm")

    def __init__(self, graph: Graph, pos, ksm: float | None = None):
        arr = np.array(pos, dtype=np.float64)
        if arr.shape != (graph.n, 2):
            raise ValueError(f"expected {graph.n}x2 positions, got {arr.shape}")
        if not np.isfinite(arr).all():
            raise ValueError("non-finite coordinate in drawing")
        arr.setflags(write=False)
        self.graph = graph
        self.pos = arr
        self.ksm = ksm

    def __repr__(self) -> str:
        k = "?" if self.ksm is None else f"{self.ksm:.3f}"
        return f"Drawing(n={self.graph.n}, ksm={k})"

    def to_json(self, graph_id: str) -> dict:
        return {
            "graph_id": graph_id,
            "pos": [[float(x), float(y)] for x, y in self.pos],
            "ksm": None if self.ksm is None else float(self.ksm),
        }

    @classmethod
    def from_json(cls, obj: dict, graph: Graph, *, graph_id: str | None = None) -> "Drawing":
        """Ingest the wire format; rejects coincident nodes (exact equality)."""
        if graph_id is not None and obj.get("graph_id") != graph_id:
            raise ValueError(
                f"drawing belongs to graph {obj.get('graph_id')!r}, expected {graph_id!r}"
            )
        pos = obj["pos"]
        if len({(float(x), float(y)) for x, y in pos}) != graph.n:
            raise ValueError("coincident node positions in ingested drawing")
        k = obj.get("ksm")
        return cls(graph, pos, ksm=None if k is None else float(k))


def euclidean_distance_matrix(drawing: Drawing) -> np.ndarray:
    """Pairwise Euclidean distances between drawn node positions."""
    pos = drawing.pos
    diff = pos[:, None, :] - pos[None, :, :]
    return np.sqrt((diff * diff).sum(axis=-1))


def rescale_to_unit_square(points) -> np.ndarray:
    """Uniformly scale and translate points into [0, 1]^2, preserving shape.

    The longer bounding-box side maps to [0, 1]; degenerate (single point)
    input maps to the center.
    """
    arr = np.asarray(points, dtype=np.float64)
    lo = arr.min(axis=0)
    span = float((arr.max(axis=0) - lo).max())
    if span == 0.0:
        return np.full_like(arr, 0.5)
    out = (arr - lo) / span
    return out
