"""Graph-drawing stress metrics, stimulus synthesis, and 2AFC study tooling."""

from .errors import (
    AnalysisError,
    DegenerateDrawingError,
    GraphConnectivityError,
    GraphGenerationError,
    IncompleteLogError,
    NonConvergenceError,
    SchedulingError,
    StressLabError,
)
from .graphs import Drawing, Graph, generate_graph
from .hillclimb import HillClimbConfig, hill_climb
from .kernels import BACKEND_NAME
from .quality import (
    correlation_matrix,
    count_crossings,
    crossing_bound,
    edge_crossing_metric,
    node_uniformity,
)
from .stress import (
    isotonic_fit,
    kruskal_stress,
    ksm,
    metric_stress,
    normalized_metric_stress,
    shepard_points,
)

__version__ = "0.1.0"

__all__ = [
    "AnalysisError",
    "BACKEND_NAME",
    "DegenerateDrawingError",
    "Drawing",
    "Graph",
    "GraphConnectivityError",
    "GraphGenerationError",
    "HillClimbConfig",
    "IncompleteLogError",
    "NonConvergenceError",
    "SchedulingError",
    "StressLabError",
    "correlation_matrix",
    "count_crossings",
    "crossing_bound",
    "edge_crossing_metric",
    "generate_graph",
    "hill_climb",
    "isotonic_fit",
    "kruskal_stress",
    "ksm",
    "metric_stress",
    "node_uniformity",
    "normalized_metric_stress",
    "shepard_points",
    "__version__",
]
