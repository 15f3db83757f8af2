"""Hill climbing toward a target KSM value.

One node moves per iteration, to a uniform random position inside the disc
of the current radius intersected with the unit square. A candidate is kept
only when it strictly reduces |ksm - target|. The radius decays linearly
from half the unit-square diagonal down to a floor, so the search coarsens
to fine adjustments as iterations accumulate.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .errors import NonConvergenceError
from .graphs import Drawing, Graph
from .stress import evaluator_for

# re-picking the node after this many failed in-square position draws keeps
# per-iteration work bounded (corner nodes with a large radius reject a lot)
_POSITION_TRIES = 64


@dataclass(frozen=True)
class HillClimbConfig:
    target_ksm: float
    tolerance: float = 0.01
    initial_radius: float = math.sqrt(2.0) / 2.0
    min_radius: float = 0.02
    max_iterations: int = 200_000
    seed: object = None

    def __post_init__(self):
        if not (0.0 <= self.target_ksm <= 1.0):
            raise ValueError(f"target_ksm must be in [0, 1], got {self.target_ksm}")
        if self.tolerance <= 0.0:
            raise ValueError("tolerance must be positive")
        if self.min_radius <= 0.0 or self.initial_radius < self.min_radius:
            raise ValueError("radii must satisfy 0 < min_radius <= initial_radius")
        if self.max_iterations < 1:
            raise ValueError("max_iterations must be positive")

    def radius_at(self, iteration: int) -> float:
        decayed = self.initial_radius * (1.0 - iteration / self.max_iterations)
        return max(self.min_radius, decayed)


@dataclass
class ClimbStats:
    """Provenance for one climb; iterations counts candidate evaluations."""

    iterations: int = 0
    accepted: int = 0
    achieved_ksm: float = field(default=math.nan)


def hill_climb(
    graph: Graph, config: HillClimbConfig, stats: ClimbStats | None = None
) -> Drawing:
    """Search for a drawing whose KSM is within tolerance of the target.

    Deterministic for a fixed (graph, config). Raises NonConvergenceError
    carrying the best KSM reached when the iteration budget runs out.
    """
    rng = np.random.default_rng(config.seed)
    n = graph.n
    evaluate = evaluator_for(graph)
    pos = rng.random((n, 2))
    current_ksm = 1.0 - evaluate(pos)
    err = abs(current_ksm - config.target_ksm)
    best_ksm = current_ksm
    best_err = err
    if stats is None:
        stats = ClimbStats()

    for t in range(config.max_iterations):
        if err <= config.tolerance:
            stats.achieved_ksm = current_ksm
            return Drawing(graph, pos, ksm=current_ksm)
        radius = config.radius_at(t)
        node = int(rng.integers(n))
        old_x, old_y = pos[node]
        placed = False
        for _ in range(_POSITION_TRIES):
            angle = 2.0 * math.pi * rng.random()
            dist = radius * math.sqrt(rng.random())
            x = old_x + dist * math.cos(angle)
            y = old_y + dist * math.sin(angle)
            if 0.0 <= x <= 1.0 and 0.0 <= y <= 1.0:
                placed = True
                break
        stats.iterations = t + 1
        if not placed:
            continue
        pos[node, 0] = x
        pos[node, 1] = y
        candidate_ksm = 1.0 - evaluate(pos)
        cand_err = abs(candidate_ksm - config.target_ksm)
        if cand_err < err:
            current_ksm = candidate_ksm
            err = cand_err
            stats.accepted += 1
            if cand_err < best_err:
                best_err = cand_err
                best_ksm = candidate_ksm
        else:
            pos[node, 0] = old_x
            pos[node, 1] = old_y

    if err <= config.tolerance:
        stats.achieved_ksm = current_ksm
        return Drawing(graph, pos, ksm=current_ksm)
    stats.achieved_ksm = best_ksm
    raise NonConvergenceError(config.target_ksm, best_ksm, config.max_iterations)
