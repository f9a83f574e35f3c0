"""
Finite metric spaces, their distance sets and the distance-separation predicates.

Every "these two distances are equal" decision in the package goes through
ToleranceConfig: two reals are equal when they differ by at most the effective
tolerance (eq_tol, or eq_tol x diameter in relative mode).
"""
import enum
import logging
from dataclasses import dataclass, field
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np
from scipy.spatial.distance import cdist
from sklearn.utils import check_array

from . import settings
from .exceptions import (
    DegenerateDistanceSet,
    DimensionMismatch,
    DuplicatePoint,
    InputParseError,
    MetricValidationError,
    NegativeDistance,
    NonZeroDiagonal,
    NotSymmetric,
    TriangleViolation,
    ZeroOffDiagonal,
)

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class Norm(str, enum.Enum):
    L1 = "l1"
    L2 = "l2"
    LINF = "linf"

    @property
    def cdist_metric(self) -> str:
        return {"l1": "cityblock", "l2": "euclidean", "linf": "chebyshev"}[self.value]

    @property
    def ord(self) -> float:
        return {"l1": 1, "l2": 2, "linf": np.inf}[self.value]


class ScaleMode(str, enum.Enum):
    ABSOLUTE = "absolute"
    RELATIVE = "relative"


@dataclass(frozen=True)
class ToleranceConfig:
    eq_tol: float = 1e-9
    scale_mode: ScaleMode = ScaleMode.ABSOLUTE

    def __post_init__(self):
        if not np.isfinite(self.eq_tol) or self.eq_tol < 0:
            raise InputParseError(f"eq_tol must be a finite nonnegative real, got {self.eq_tol!r}")
        object.__setattr__(self, "scale_mode", ScaleMode(self.scale_mode))

    @classmethod
    def default(cls) -> "ToleranceConfig":
        return cls(eq_tol=settings.EQ_TOL, scale_mode=ScaleMode(settings.SCALE_MODE))

    def effective(self, diameter: float) -> float:
        if self.scale_mode is ScaleMode.RELATIVE:
            return self.eq_tol * float(diameter)
        return self.eq_tol


def _readonly(arr: np.ndarray) -> np.ndarray:
    arr.setflags(write=False)
    return arr


@dataclass(frozen=True, eq=False)
class PointCloud:
    """m points of R^N under one of the L1 / L2 / Linf norms."""

    points: np.ndarray
    norm: Norm = Norm.L2
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        try:
            raw = np.asarray(self.points, dtype=np.float64)
        except (TypeError, ValueError) as exc:
            raise DimensionMismatch(f"point rows do not share one dimension: {exc}") from exc
        if raw.ndim != 2:
            raise DimensionMismatch(f"expected an m x N array of coordinates, got shape {raw.shape}")
        try:
            pts = check_array(raw, dtype=np.float64, ensure_min_samples=2, ensure_min_features=1, copy=True)
        except ValueError as exc:
            raise MetricValidationError(f"invalid point cloud: {exc}") from exc
        object.__setattr__(self, "points", _readonly(pts))
        object.__setattr__(self, "norm", Norm(self.norm))
        labels = tuple(str(x) for x in self.labels) or tuple(str(i) for i in range(pts.shape[0]))
        if len(labels) != pts.shape[0]:
            raise DimensionMismatch(f"{len(labels)} labels for {pts.shape[0]} points")
        object.__setattr__(self, "labels", labels)

    @property
    def size(self) -> int:
        return self.points.shape[0]

    @property
    def dimension(self) -> int:
        return self.points.shape[1]

    def replace_points(self, points: np.ndarray) -> "PointCloud":
        return PointCloud(points=points, norm=self.norm, labels=self.labels)


@dataclass(frozen=True)
class ExplicitMatrix:
    labels: Tuple[str, ...]
    source: str = "matrix"


Provenance = Union[PointCloud, ExplicitMatrix]


@dataclass(frozen=True, eq=False)
class FiniteMetricSpace:
    dist: np.ndarray
    provenance: Provenance
    tolerance: ToleranceConfig = field(default_factory=ToleranceConfig.default)

    def __post_init__(self):
        _readonly(self.dist)

    @property
    def size(self) -> int:
        return self.dist.shape[0]

    @property
    def diameter(self) -> float:
        return float(self.dist.max())

    @property
    def tol(self) -> float:
        return self.tolerance.effective(self.diameter)

    @property
    def labels(self) -> Tuple[str, ...]:
        return self.provenance.labels

    @property
    def cloud(self) -> Optional[PointCloud]:
        return self.provenance if isinstance(self.provenance, PointCloud) else None

    def d(self, i: int, j: int) -> float:
        return float(self.dist[i, j])

    def equal(self, a: float, b: float) -> bool:
        return abs(a - b) <= self.tol

    def with_tolerance(self, tolerance: ToleranceConfig) -> "FiniteMetricSpace":
        return FiniteMetricSpace(dist=self.dist, provenance=self.provenance, tolerance=tolerance)


@dataclass(frozen=True)
class DistanceSet:
    """
    Sorted distinct distances r_0 = 0 < r_1 < ... with multiplicities.
    Values within tolerance of a class representative (its smallest member) are one value.
    Multiplicities count unordered pairs; the 0 class counts the m diagonal entries.
    """

    values: Tuple[float, ...]
    multiplicity: Tuple[int, ...]
    tolerance: float = 0.0

    @property
    def positive(self) -> Tuple[float, ...]:
        return self.values[1:]

    @property
    def diameter(self) -> float:
        return self.values[-1]

    def index_of(self, r: float) -> int:
        """Index of the class containing r; raises KeyError when r is no distance of the space."""
        idx = int(np.searchsorted(self.values, r, side="right")) - 1
        if idx < 0 or r - self.values[idx] > self.tolerance:
            raise KeyError(r)
        return idx


# ---------------------------------------------------------------------------
# Construction
# ---------------------------------------------------------------------------
def from_points(cloud: PointCloud, tolerance: Optional[ToleranceConfig] = None) -> FiniteMetricSpace:
    tolerance = tolerance or ToleranceConfig.default()
    pts = cloud.points
    dist = cdist(pts, pts, metric=cloud.norm.cdist_metric)
    np.fill_diagonal(dist, 0.0)
    tol = tolerance.effective(dist.max())
    off = dist + np.diag(np.full(cloud.size, np.inf))
    if off.min() <= tol:
        i, j = _first_upper(off <= tol)
        raise DuplicatePoint(i, j, float(dist[i, j]))
    logger.debug("from_points: m=%s N=%s norm=%s", cloud.size, cloud.dimension, cloud.norm.value)
    return FiniteMetricSpace(dist=dist, provenance=cloud, tolerance=tolerance)


def from_matrix(
    table: Sequence[Sequence[float]],
    labels: Sequence[str] = (),
    tolerance: Optional[ToleranceConfig] = None,
    source: str = "matrix",
) -> FiniteMetricSpace:
    tolerance = tolerance or ToleranceConfig.default()
    try:
        arr = np.array(table, dtype=np.float64)
    except (TypeError, ValueError) as exc:
        raise InputParseError(f"distance table is not numeric: {exc}") from exc
    if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
        raise DimensionMismatch(f"distance table must be square, got shape {arr.shape}")
    m = arr.shape[0]
    if m < 2:
        raise DimensionMismatch("a metric space needs at least 2 points")
    if not np.all(np.isfinite(arr)):
        raise InputParseError("distance table contains NaN or infinite entries")
    labels = tuple(str(x) for x in labels) or tuple(str(i) for i in range(m))
    if len(labels) != m:
        raise DimensionMismatch(f"{len(labels)} labels for a {m} x {m} table")

    tol = tolerance.effective(np.abs(arr).max())

    diag = np.abs(np.diag(arr))
    if diag.max() > tol:
        i = int(np.argmax(diag > tol))
        raise NonZeroDiagonal(i, float(arr[i, i]))

    asym = np.abs(arr - arr.T) > tol
    if asym.any():
        i, j = _first_upper(asym)
        raise NotSymmetric(i, j, float(arr[i, j]), float(arr[j, i]))

    dist = (arr + arr.T) / 2.0
    np.fill_diagonal(dist, 0.0)
    offdiag = ~np.eye(m, dtype=bool)

    neg = (dist < -tol) & offdiag
    if neg.any():
        i, j = _first_upper(neg)
        raise NegativeDistance(i, j, float(dist[i, j]))

    zero = (dist <= tol) & offdiag
    if zero.any():
        i, j = _first_upper(zero)
        raise ZeroOffDiagonal(i, j, float(dist[i, j]))

    for j in range(m):
        bad = dist > dist[:, [j]] + dist[[j], :] + tol
        if bad.any():
            i, k = (int(v) for v in np.argwhere(bad)[0])
            raise TriangleViolation(i, j, k, float(dist[i, k]), float(dist[i, j]), float(dist[j, k]))

    return FiniteMetricSpace(dist=dist, provenance=ExplicitMatrix(labels=labels, source=source), tolerance=tolerance)


def _first_upper(mask: np.ndarray) -> Pair:
    """First (i, j), i < j, in row-major order where the symmetric mask holds."""
    i, j = (int(v) for v in np.argwhere(np.triu(mask, 1))[0])
    return i, j


# ---------------------------------------------------------------------------
# Distance set
# ---------------------------------------------------------------------------
def _pair_classes(M: FiniteMetricSpace):
    """
    Sorted positive distances grouped into tolerance classes.
    Returns (pairs sorted by distance, sorted distances, class start offsets).
    """
    iu, ju = np.triu_indices(M.size, 1)
    vals = M.dist[iu, ju]
    order = np.lexsort((ju, iu, vals))
    vals = vals[order]
    pairs = np.stack([iu[order], ju[order]], axis=1)
    tol = M.tol
    starts: List[int] = []
    pos = 0
    while pos < len(vals):
        starts.append(pos)
        pos = int(np.searchsorted(vals, vals[pos] + tol, side="right"))
    return pairs, vals, starts


def distance_set(M: FiniteMetricSpace) -> DistanceSet:
    pairs, vals, starts = _pair_classes(M)
    bounds = starts + [len(vals)]
    values = [0.0] + [float(vals[s]) for s in starts]
    mult = [M.size] + [bounds[k + 1] - bounds[k] for k in range(len(starts))]
    return DistanceSet(values=tuple(values), multiplicity=tuple(mult), tolerance=M.tol)


def mesh_delta(D: DistanceSet) -> float:
    if len(D.values) < 2:
        raise DegenerateDistanceSet("distance set has no positive value")
    return float(np.diff(np.asarray(D.values)).min())


def is_distance_separated(M: FiniteMetricSpace) -> bool:
    return all(c == 1 for c in distance_set(M).multiplicity[1:])


def tied_pairs(M: FiniteMetricSpace) -> List[Tuple[Pair, Pair, float]]:
    """
    Ties among positive distances, as links (pair, next pair in the same class, class value).
    A class of k pairs contributes k - 1 links; an empty list means M is distance separated.
    """
    pairs, vals, starts = _pair_classes(M)
    bounds = starts + [len(vals)]
    links = []
    for k, s in enumerate(starts):
        e = bounds[k + 1]
        for a in range(s, e - 1):
            p = (int(pairs[a][0]), int(pairs[a][1]))
            q = (int(pairs[a + 1][0]), int(pairs[a + 1][1]))
            links.append((p, q, float(vals[s])))
    return links


def sphere(M: FiniteMetricSpace, x: int, r: float) -> Tuple[int, ...]:
    return tuple(int(y) for y in np.flatnonzero(np.abs(M.dist[x] - r) <= M.tol))


def openness_radius(M: FiniteMetricSpace) -> float:
    """Radius of the d_B ball around a distance separated M that stays distance separated."""
    return mesh_delta(distance_set(M)) / 10.0


def format_real(x: float) -> str:
    """Shortest round-trip text for a float, without a trailing '.0'."""
    text = repr(float(x))
    return text[:-2] if text.endswith(".0") else text
