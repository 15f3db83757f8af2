"""Layout quality metrics: edge crossings with a combinatorial bound,
node uniformity, length averages, and Pearson correlation across a corpus.

Crossing detection uses orientation predicates with a floating-point error
filter; borderline sign tests fall back to exact rational arithmetic, so
collinear and touching configurations are classified without tolerance
tuning.
"""
from __future__ import annotations

import math
from fractions import Fraction
from typing import NamedTuple, Sequence

import numpy as np

from .errors import AnalysisError
from .graphs import Drawing, Graph

# Shewchuk-style filter constant for the 2x2 orientation determinant:
# (3 + 16u)u with u = 2^-53. |det| above errbound * detsum is trustworthy.
_ORIENT_ERRBOUND = 3.3306690738754716e-16


def orientation(ax, ay, bx, by, cx, cy) -> int:
    """Sign of the cross product (b - a) x (c - a): 1 ccw, -1 cw, 0 collinear."""
    detleft = (bx - ax) * (cy - ay)
    detright = (by - ay) * (cx - ax)
    det = detleft - detright
    detsum = abs(detleft) + abs(detright)
    if abs(det) > _ORIENT_ERRBOUND * detsum:
        return 1 if det > 0.0 else -1
    if detsum == 0.0:
        return 0
    exact = (Fraction(bx) - Fraction(ax)) * (Fraction(cy) - Fraction(ay)) - (
        Fraction(by) - Fraction(ay)
    ) * (Fraction(cx) - Fraction(ax))
    if exact > 0:
        return 1
    if exact < 0:
        return -1
    return 0


def _strictly_between(a, b, c) -> bool:
    # assumes a, b, c collinear
    if a[0] != b[0]:
        lo, hi = min(a[0], b[0]), max(a[0], b[0])
        return lo < c[0] < hi
    lo, hi = min(a[1], b[1]), max(a[1], b[1])
    return lo < c[1] < hi


def _collinear_overlap(p, q, r, s) -> bool:
    xs = (p[0], q[0], r[0], s[0])
    ys = (p[1], q[1], r[1], s[1])
    axis = 0 if max(xs) - min(xs) >= max(ys) - min(ys) else 1
    lo1, hi1 = sorted((p[axis], q[axis]))
    lo2, hi2 = sorted((r[axis], s[axis]))
    return max(lo1, lo2) < min(hi1, hi2)


def segments_cross(p, q, r, s) -> bool:
    """Whether segments pq and rs cross for crossing-count purposes.

    Counts proper interior intersections, an endpoint of one segment lying
    strictly inside the other, and collinear overlap beyond a single point.
    Segments that merely touch endpoint-to-endpoint do not cross. Callers
    exclude segment pairs sharing a graph endpoint before calling.
    """
    o1 = orientation(p[0], p[1], q[0], q[1], r[0], r[1])
    o2 = orientation(p[0], p[1], q[0], q[1], s[0], s[1])
    o3 = orientation(r[0], r[1], s[0], s[1], p[0], p[1])
    o4 = orientation(r[0], r[1], s[0], s[1], q[0], q[1])
    if o1 == 0 and o2 == 0 and o3 == 0 and o4 == 0:
        return _collinear_overlap(p, q, r, s)
    if o1 * o2 < 0 and o3 * o4 < 0:
        return True
    if o1 == 0 and _strictly_between(p, q, r):
        return True
    if o2 == 0 and _strictly_between(p, q, s):
        return True
    if o3 == 0 and _strictly_between(r, s, p):
        return True
    if o4 == 0 and _strictly_between(r, s, q):
        return True
    return False


def count_crossings(drawing: Drawing) -> int:
    """Number of crossing edge pairs; pairs sharing an endpoint never count."""
    edges = drawing.graph.edges
    pos = drawing.pos
    segs = [(tuple(pos[u]), tuple(pos[v])) for u, v in edges]
    boxes = [
        (min(a[0], b[0]), min(a[1], b[1]), max(a[0], b[0]), max(a[1], b[1]))
        for a, b in segs
    ]
    total = 0
    for a in range(len(edges)):
        ua, va = edges[a]
        xa0, ya0, xa1, ya1 = boxes[a]
        for b in range(a + 1, len(edges)):
            ub, vb = edges[b]
            if ua == ub or ua == vb or va == ub or va == vb:
                continue
            xb0, yb0, xb1, yb1 = boxes[b]
            if xb0 > xa1 or xa0 > xb1 or yb0 > ya1 or ya0 > yb1:
                continue
            if segments_cross(segs[a][0], segs[a][1], segs[b][0], segs[b][1]):
                total += 1
    return total


class CrossingBound(NamedTuple):
    """Breakdown of the crossing upper bound for a graph."""

    all_pairs: int
    adjacent: int
    triangle: int
    four_cycle: int
    max_crossings: int


def adjacent_crossing_exclusions(graph: Graph) -> int:
    """Edge pairs that share a node and therefore cannot cross."""
    deg = graph.degrees()
    return int((deg * (deg - 1)).sum()) // 2


def triangles(graph: Graph) -> list[tuple[int, int, int]]:
    """All triangles as sorted node triples, each exactly once."""
    adj = [set(a) for a in graph.adjacency]
    out = []
    for u, v in graph.edges:
        for w in sorted(adj[u] & adj[v]):
            if w > v:
                out.append((u, v, w))
    return out


def triangle_crossing_exclusions(graph: Graph) -> int:
    """Crossing exclusions from triangle interactions.

    Per triangle, each edge that is neither part of nor node-adjacent to any
    triangle contributes 1. Each triangle pair contributes 1 sharing an
    edge, 2 sharing only a node, 3 when disjoint.
    """
    tris = triangles(graph)
    if not tris:
        return 0
    tri_nodes: set[int] = set()
    for t in tris:
        tri_nodes.update(t)
    lone_edges = sum(
        1 for u, v in graph.edges if u not in tri_nodes and v not in tri_nodes
    )
    count = len(tris) * lone_edges
    for a in range(len(tris)):
        sa = set(tris[a])
        for b in range(a + 1, len(tris)):
            shared = len(sa.intersection(tris[b]))
            if shared >= 2:
                count += 1
            elif shared == 1:
                count += 2
            else:
                count += 3
    return count


def four_cycle_count(graph: Graph) -> int:
    """Distinct simple 4-cycles, each counted once.

    Every 4-cycle is determined by its two diagonal pairs; summing
    C(codegree, 2) over node pairs counts each cycle twice.
    """
    n = graph.n
    a = np.zeros((n, n), dtype=np.int64)
    for u, v in graph.edges:
        a[u, v] = a[v, u] = 1
    codeg = a @ a
    iu, ju = np.triu_indices(n, k=1)
    c = codeg[iu, ju]
    return int((c * (c - 1) // 2).sum()) // 2


def crossing_bound(graph: Graph) -> CrossingBound:
    """Upper bound on straight-line crossings, with its exclusion terms.

    The exclusion terms can overlap on graphs dense with triangles, so the
    difference is clamped at zero.
    """
    m = graph.m
    all_pairs = m * (m - 1) // 2
    adjacent = adjacent_crossing_exclusions(graph)
    triangle = triangle_crossing_exclusions(graph)
    four_cycle = four_cycle_count(graph)
    max_crossings = max(0, all_pairs - adjacent - triangle - four_cycle)
    return CrossingBound(all_pairs, adjacent, triangle, four_cycle, max_crossings)


def edge_crossing_metric(
    drawing: Drawing,
    *,
    bound: CrossingBound | None = None,
    crossings: int | None = None,
) -> float:
    """1 - crossings/bound, clamped to [0, 1]; 1 when the bound is zero.

    `bound` and `crossings` short-circuit recomputation when the caller
    already has them (batch scoring reuses one bound per graph).
    """
    if bound is None:
        bound = crossing_bound(drawing.graph)
    if bound.max_crossings == 0:
        return 1.0
    if crossings is None:
        crossings = count_crossings(drawing)
    return max(0.0, 1.0 - crossings / bound.max_crossings)


def node_uniformity(drawing: Drawing) -> float:
    """How evenly nodes fill their bounding box, in [0, 1].

    The box is split into k x k cells with k = ceil(sqrt(n)) and the cell
    histogram is compared to the uniform one by total variation, normalized
    so one fully-occupied cell scores exactly 0. A zero-extent axis is
    widened by 1e-6 on each side before binning.
    """
    n = drawing.graph.n
    if n < 2:
        raise ValueError("need at least two nodes")
    k = math.isqrt(n - 1) + 1
    pts = drawing.pos
    lo = pts.min(axis=0).copy()
    hi = pts.max(axis=0).copy()
    for axis in range(2):
        if hi[axis] == lo[axis]:
            lo[axis] -= 1e-6
            hi[axis] += 1e-6
    scaled = (pts - lo) / (hi - lo) * k
    idx = np.clip(scaled.astype(np.int64), 0, k - 1)
    counts = np.bincount(idx[:, 0] * k + idx[:, 1], minlength=k * k)
    expected = n / (k * k)
    tv = 0.5 * float(np.abs(counts - expected).sum())
    return 1.0 - tv / (n * (1.0 - 1.0 / (k * k)))


def average_edge_length(drawing: Drawing) -> float:
    edges = drawing.graph.edges
    if not edges:
        raise ValueError("graph has no edges")
    pos = drawing.pos
    e = np.array(edges, dtype=np.int64)
    diff = pos[e[:, 0]] - pos[e[:, 1]]
    return float(np.sqrt((diff * diff).sum(axis=1)).mean())


def average_node_distance(drawing: Drawing) -> float:
    n = drawing.graph.n
    if n < 2:
        raise ValueError("need at least two nodes")
    pos = drawing.pos
    iu, ju = np.triu_indices(n, k=1)
    diff = pos[iu] - pos[ju]
    return float(np.sqrt((diff * diff).sum(axis=1)).mean())


def pearson(x, y) -> float:
    """Two-pass Pearson coefficient; raises on zero variance."""
    a = np.asarray(x, dtype=np.float64)
    b = np.asarray(y, dtype=np.float64)
    if a.size != b.size or a.size < 3:
        raise AnalysisError("need two equal-length samples of at least 3 points")
    da = a - a.mean()
    db = b - b.mean()
    va = float(da @ da)
    vb = float(db @ db)
    if va == 0.0 or vb == 0.0:
        raise AnalysisError("zero-variance sample in correlation")
    r = float(da @ db) / math.sqrt(va * vb)
    return min(1.0, max(-1.0, r))


class CorrelationMatrix(NamedTuple):
    metrics: list[str]
    pearson: list[list[float | None]]

    def to_json(self) -> dict:
        return {"metrics": self.metrics, "pearson": self.pearson}


def correlation_matrix(
    rows: Sequence[dict], metrics: Sequence[str] | None = None
) -> CorrelationMatrix:
    """Pairwise Pearson matrix over metric-report rows.

    Zero-variance columns get explicit None entries (including the diagonal)
    rather than silent NaN.
    """
    if len(rows) < 3:
        raise AnalysisError(f"need at least 3 rows, got {len(rows)}")
    if metrics is None:
        metrics = [
            k
            for k, v in rows[0].items()
            if isinstance(v, (int, float)) and not isinstance(v, bool)
        ]
    cols = {m: np.array([float(r[m]) for r in rows]) for m in metrics}
    centered = {}
    variance = {}
    for m in metrics:
        d = cols[m] - cols[m].mean()
        centered[m] = d
        variance[m] = float(d @ d)
    out: list[list[float | None]] = []
    for mi in metrics:
        row: list[float | None] = []
        for mj in metrics:
            if variance[mi] == 0.0 or variance[mj] == 0.0:
                row.append(None)
            elif mi == mj:
                row.append(1.0)
            else:
                r = float(centered[mi] @ centered[mj]) / math.sqrt(
                    variance[mi] * variance[mj]
                )
                row.append(min(1.0, max(-1.0, r)))
        out.append(row)
    return CorrelationMatrix(list(metrics), out)
