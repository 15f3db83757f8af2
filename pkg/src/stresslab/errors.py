"""Exception types shared across the package."""


class StressLabError(Exception):
    """Base class for all package-specific errors."""


class GraphGenerationError(StressLabError):
    """Raised when constrained random-graph sampling exhausts its attempt cap."""

    def __init__(self, n: int, p: float, attempts: int):
        self.n = n
        self.p = p
        self.attempts = attempts
        super().__init__(
            f"no connected graph with fewer than {2 * n} edges found for "
            f"n={n}, p={p} after {attempts} samples"
        )


class GraphConnectivityError(StressLabError):
    """Raised when an operation requiring a connected graph meets an unreachable pair."""


class DegenerateDrawingError(StressLabError):
    """Raised when all nodes of a drawing coincide and stress is undefined."""


class NonConvergenceError(StressLabError):
    """Hill climbing ran out of iterations before reaching the target band."""

    def __init__(self, target: float, best_ksm: float, iterations: int):
        self.target = target
        self.best_ksm = best_ksm
        self.iterations = iterations
        super().__init__(
            f"no drawing within tolerance of target {target:.3f} after "
            f"{iterations} iterations (best ksm {best_ksm:.4f})"
        )


class SchedulingError(StressLabError):
    """The stimulus corpus cannot realize a requested trial pairing."""


class IncompleteLogError(StressLabError):
    """A session log is missing responses for scheduled trials."""

    def __init__(self, participant_id: str, missing: list):
        self.participant_id = participant_id
        self.missing = list(missing)
        super().__init__(
            f"session for {participant_id!r} is missing trials {self.missing}"
        )


class AnalysisError(StressLabError):
    """Raised for undefined statistics (zero variance, empty samples, ...)."""
