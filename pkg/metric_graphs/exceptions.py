"""
Error types raised by metric_graphs.

Every error carries the process exit code the CLI returns for it:
  2 input parse, 3 metric validation, 4 infeasible request, 5 internal invariant.
"""
from typing import Optional, Sequence, Tuple


class MetricGraphsError(Exception):
    exit_code = 1


# ---------------------------------------------------------------------------
# input parse
# ---------------------------------------------------------------------------
class InputParseError(MetricGraphsError):
    exit_code = 2


# ---------------------------------------------------------------------------
# metric validation
# ---------------------------------------------------------------------------
class MetricValidationError(MetricGraphsError):
    exit_code = 3

    def __init__(self, message: str, indices: Sequence[int] = ()):
        super().__init__(message)
        self.indices: Tuple[int, ...] = tuple(int(i) for i in indices)


class DuplicatePoint(MetricValidationError):
    def __init__(self, i: int, j: int, distance: float):
        super().__init__(f"points {i} and {j} coincide (distance {distance!r})", (i, j))
        self.distance = distance


class DimensionMismatch(MetricValidationError):
    pass


class NormMismatch(MetricValidationError):
    pass


class NotSymmetric(MetricValidationError):
    def __init__(self, i: int, j: int, dij: float, dji: float):
        super().__init__(f"d({i},{j})={dij!r} but d({j},{i})={dji!r}", (i, j))


class NegativeDistance(MetricValidationError):
    def __init__(self, i: int, j: int, value: float):
        super().__init__(f"d({i},{j})={value!r} is negative", (i, j))


class ZeroOffDiagonal(MetricValidationError):
    def __init__(self, i: int, j: int, value: float):
        super().__init__(f"d({i},{j})={value!r} is zero for distinct points", (i, j))


class NonZeroDiagonal(MetricValidationError):
    def __init__(self, i: int, value: float):
        super().__init__(f"d({i},{i})={value!r} must be 0", (i,))


class TriangleViolation(MetricValidationError):
    def __init__(self, i: int, j: int, k: int, dik: float, dij: float, djk: float):
        super().__init__(
            f"triangle inequality fails: d({i},{k})={dik!r} > d({i},{j}) + d({j},{k}) = {dij!r} + {djk!r}",
            (i, j, k),
        )


# ---------------------------------------------------------------------------
# infeasible request
# ---------------------------------------------------------------------------
class InfeasibleRequest(MetricGraphsError):
    exit_code = 4


class InfeasibleModel(InfeasibleRequest):
    pass


class TooLarge(InfeasibleRequest):
    pass


class SizeMismatch(InfeasibleRequest):
    pass


class NotConnected(InfeasibleRequest):
    pass


class DegenerateDistanceSet(InfeasibleRequest):
    pass


class MissingCoordinates(InfeasibleRequest):
    pass


class ExhaustedAttempts(InfeasibleRequest):
    """
    Raised by perturb_to_ds when no attempt produced a distance separated cloud.
    `tie` holds the last surviving tie: ((i, j), (k, l), value).
    """

    def __init__(self, attempts: int, epsilon: float, tie: Optional[tuple] = None):
        msg = f"no distance separated perturbation found in {attempts} attempts (epsilon={epsilon!r})"
        if tie is not None:
            (a, b), (c, d), value = tie
            msg += f"; pairs {{{a},{b}}} and {{{c},{d}}} still tied at {value!r}"
            msg += " (raise epsilon or lower eq_tol)"
        super().__init__(msg)
        self.attempts = attempts
        self.epsilon = epsilon
        self.tie = tie


# ---------------------------------------------------------------------------
# internal invariant
# ---------------------------------------------------------------------------
class InternalInvariantViolation(MetricGraphsError):
    exit_code = 5
