"""Pure NumPy evaluator for non-metric stress on a fixed pair table.

This is the fallback backend; the compiled extension mirrors it operation
for operation. Both take positions plus the precomputed pair table (pairs
sorted ascending by graph distance, with tie-block boundaries) and return
the Kruskal stress value, or -1.0 when the denominator is zero.
"""
from __future__ import annotations

import math

import numpy as np

NAME = "pure"


def isotonic_increasing(values: np.ndarray) -> np.ndarray:
    """Least-squares non-decreasing fit via pool-adjacent-violators.

    Returns the fitted sequence; each pooled block carries the mean of its
    members. Input order is the regression order.
    """
    y = np.asarray(values, dtype=np.float64)
    k = y.size
    if k == 0:
        raise ValueError("empty sequence")
    sums = np.empty(k, dtype=np.float64)
    counts = np.empty(k, dtype=np.int64)
    top = 0
    for v in y:
        sums[top] = v
        counts[top] = 1
        # merge while the previous block mean exceeds the new one
        while top > 0 and sums[top - 1] * counts[top] > sums[top] * counts[top - 1]:
            sums[top - 1] += sums[top]
            counts[top - 1] += counts[top]
            top -= 1
        top += 1
    return np.repeat(sums[:top] / counts[:top], counts[:top])


class StressEvaluator:
    """Reusable Kruskal-stress evaluator bound to one pair table."""

    def __init__(self, pi: np.ndarray, pj: np.ndarray, block_starts: np.ndarray):
        self.pi = np.ascontiguousarray(pi, dtype=np.int32)
        self.pj = np.ascontiguousarray(pj, dtype=np.int32)
        self.block_starts = np.ascontiguousarray(block_starts, dtype=np.int32)

    def __call__(self, pos: np.ndarray) -> float:
        dx = pos[self.pi, 0] - pos[self.pj, 0]
        dy = pos[self.pi, 1] - pos[self.pj, 1]
        drawn = np.sqrt(dx * dx + dy * dy)
        den = float(drawn @ drawn)
        if den == 0.0:
            return -1.0
        starts = self.block_starts
        for b in range(starts.size - 1):
            drawn[starts[b]:starts[b + 1]].sort()
        fit = isotonic_increasing(drawn)
        resid = drawn - fit
        return math.sqrt(float(resid @ resid) / den)


def kruskal_stress_sorted(pos, pi, pj, block_starts) -> float:
    return StressEvaluator(pi, pj, block_starts)(np.asarray(pos, dtype=np.float64))
