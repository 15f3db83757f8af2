"""Stress measures for graph drawings.

Two families: the metric form, which penalizes squared deviation of drawn
distances from graph distances weighted by 1/d^2, and the non-metric
(Kruskal) form, which penalizes deviation from the best monotone fit of
drawn distances over the graph-distance ordering. The KSM score used by the
experiment pipeline is 1 minus the non-metric value.
"""
from __future__ import annotations

import math
from typing import NamedTuple

import numpy as np

from . import kernels
from .errors import DegenerateDrawingError
from .graphs import Drawing, Graph

# Pairs closer than this are "coincident" for the degenerate-drawing check
# only; individual zero distances remain legal regression inputs.
COINCIDENCE_EPS = 1e-12


class ShepardPoints(NamedTuple):
    """Per-pair scatter data in the regression order.

    Sorted by graph distance, then drawn distance ascending within each tie
    block (equal drawn values keep index order), so ``drawn`` is exactly the
    sequence the monotone fit runs over.
    """

    drawn: np.ndarray
    input: np.ndarray
    i: np.ndarray
    j: np.ndarray


def evaluator_for(graph: Graph) -> kernels.StressEvaluator:
    """Kruskal-stress evaluator bound to this graph's pair table.

    Reusable across many position arrays of the same graph; this is the hot
    path of stimulus generation.
    """
    table = graph.distance_sorted_pairs()
    return kernels.StressEvaluator(table.i, table.j, table.block_starts)


def shepard_points(drawing: Drawing) -> ShepardPoints:
    table = drawing.graph.distance_sorted_pairs()
    pos = drawing.pos
    dx = pos[table.i, 0] - pos[table.j, 0]
    dy = pos[table.i, 1] - pos[table.j, 1]
    drawn = np.sqrt(dx * dx + dy * dy)
    order = np.empty_like(table.i)
    starts = table.block_starts
    for b in range(starts.size - 1):
        lo, hi = starts[b], starts[b + 1]
        order[lo:hi] = lo + np.argsort(drawn[lo:hi], kind="stable")
    return ShepardPoints(
        drawn=drawn[order],
        input=table.dist.copy(),
        i=table.i[order].copy(),
        j=table.j[order].copy(),
    )


def isotonic_fit(values) -> np.ndarray:
    """Least-squares non-decreasing fit of an already-ordered sequence.

    Pool-adjacent-violators; fitted blocks carry the mean of their members.
    """
    arr = np.asarray(values, dtype=np.float64)
    if arr.ndim != 1:
        raise ValueError(f"expected a 1-d sequence, got shape {arr.shape}")
    if arr.size == 0:
        raise ValueError("empty sequence")
    return kernels.isotonic_increasing(arr)


def _drawn_distances(drawing: Drawing) -> tuple[np.ndarray, np.ndarray]:
    table = drawing.graph.distance_sorted_pairs()
    pos = drawing.pos
    dx = pos[table.i, 0] - pos[table.j, 0]
    dy = pos[table.i, 1] - pos[table.j, 1]
    return np.sqrt(dx * dx + dy * dy), np.asarray(table.dist, dtype=np.float64)


def _check_not_degenerate(drawn: np.ndarray) -> None:
    if drawn.size == 0 or float(drawn.max()) < COINCIDENCE_EPS:
        raise DegenerateDrawingError("all node positions coincide")


def metric_stress(drawing: Drawing) -> float:
    """Sum of (drawn - graph distance)^2 / graph distance^2 over pairs."""
    drawn, d = _drawn_distances(drawing)
    r = (drawn - d) / d
    return float(r @ r)


def kruskal_stress(drawing: Drawing) -> float:
    drawn, _ = _drawn_distances(drawing)
    _check_not_degenerate(drawn)
    value = evaluator_for(drawing.graph)(np.ascontiguousarray(drawing.pos))
    if value < 0.0:
        raise DegenerateDrawingError("all drawn distances are zero")
    return value


def ksm(drawing: Drawing) -> float:
    """Kruskal Stress Metric: 1 - kruskal_stress, so 1 means zero stress.

    Always recomputes; the drawing's ksm slot is refreshed as a side effect
    (stored values from disk are provenance, not a trusted cache).
    """
    value = 1.0 - kruskal_stress(drawing)
    drawing.ksm = value
    return value


def normalized_metric_stress(drawing: Drawing) -> float:
    """Metric stress minimized over a uniform scaling of the drawing.

    The optimal scale has the closed form s* = sum(e/d) / sum(e^2/d^2) for
    drawn distances e and graph distances d, which makes the value
    scale-invariant and comparable across drawings.
    """
    drawn, d = _drawn_distances(drawing)
    _check_not_degenerate(drawn)
    e_over_d = drawn / d
    num = float(e_over_d.sum())
    den = float(e_over_d @ e_over_d)
    if den == 0.0:
        raise DegenerateDrawingError("all drawn distances are zero")
    s = num / den
    r = s * e_over_d - 1.0
    return float(r @ r)


def optimal_uniform_scale(drawing: Drawing) -> float:
    """The s* minimizing metric stress of the uniformly scaled drawing."""
    drawn, d = _drawn_distances(drawing)
    _check_not_degenerate(drawn)
    e_over_d = drawn / d
    den = float(e_over_d @ e_over_d)
    if den == 0.0:
        raise DegenerateDrawingError("all drawn distances are zero")
    return float(e_over_d.sum()) / den
