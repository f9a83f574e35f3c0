"""
The space of m-point subsets of R^N with the bottleneck distance d_B, and the
random machinery around it: perturbation into distance separated position,
point-cloud samplers and rigid motions.

All randomness comes from numpy's default_rng (PCG64) seeded with an unsigned
64-bit integer, so every draw is reproducible across platforms.
"""
import itertools
import logging
from dataclasses import dataclass
from typing import Optional, Tuple, Union

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import maximum_bipartite_matching
from scipy.spatial.distance import cdist

from . import settings
from .exceptions import (
    DimensionMismatch,
    DuplicatePoint,
    ExhaustedAttempts,
    InfeasibleModel,
    InputParseError,
    MetricValidationError,
    MissingCoordinates,
    NormMismatch,
    SizeMismatch,
    TooLarge,
)
from .metrics import FiniteMetricSpace, Norm, PointCloud, ToleranceConfig, from_points, tied_pairs

logger = logging.getLogger(__name__)

CloudLike = Union[PointCloud, FiniteMetricSpace]

MAX_SEED = 2 ** 64


def make_rng(seed: int) -> np.random.Generator:
    seed = int(seed)
    if not 0 <= seed < MAX_SEED:
        raise InputParseError(f"seed must be an unsigned 64-bit integer, got {seed}")
    return np.random.default_rng(seed)


# ---------------------------------------------------------------------------
# Bijections
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Bijection:
    forward: Tuple[int, ...]

    def __post_init__(self):
        forward = tuple(int(v) for v in self.forward)
        if sorted(forward) != list(range(len(forward))):
            raise InputParseError(f"{forward} is not a permutation of 0..{len(forward) - 1}")
        object.__setattr__(self, "forward", forward)

    @classmethod
    def identity(cls, m: int) -> "Bijection":
        return cls(tuple(range(m)))

    @classmethod
    def random(cls, m: int, rng: np.random.Generator) -> "Bijection":
        return cls(tuple(rng.permutation(m).tolist()))

    @property
    def size(self) -> int:
        return len(self.forward)

    def __call__(self, i: int) -> int:
        return self.forward[i]

    def inverse(self) -> "Bijection":
        inv = [0] * self.size
        for i, j in enumerate(self.forward):
            inv[j] = i
        return Bijection(tuple(inv))

    def compose(self, g: "Bijection") -> "Bijection":
        """g after self."""
        if g.size != self.size:
            raise SizeMismatch(f"cannot compose bijections of sizes {self.size} and {g.size}")
        return Bijection(tuple(g.forward[j] for j in self.forward))


def _cloud_of(obj: CloudLike) -> PointCloud:
    if isinstance(obj, PointCloud):
        return obj
    cloud = getattr(obj, "cloud", None)
    if cloud is None:
        raise MissingCoordinates("d_B needs point coordinates; this space was given as a bare distance matrix")
    return cloud


def _check_pair(A: PointCloud, B: PointCloud) -> None:
    if A.size != B.size:
        raise SizeMismatch(f"clouds have {A.size} and {B.size} points")
    if A.dimension != B.dimension:
        raise DimensionMismatch(f"clouds live in R^{A.dimension} and R^{B.dimension}")
    if A.norm is not B.norm:
        raise NormMismatch(f"clouds use norms {A.norm.value} and {B.norm.value}")


def _cross(A: PointCloud, B: PointCloud) -> np.ndarray:
    """cross[i, j] = ambient distance between point i of A and point j of B."""
    return cdist(A.points, B.points, metric=A.norm.cdist_metric)


def separation(M: CloudLike, M2: CloudLike, f: Bijection) -> float:
    """sep f: the largest ambient displacement max_x d(x, f(x))."""
    A, B = _cloud_of(M), _cloud_of(M2)
    _check_pair(A, B)
    if f.size != A.size:
        raise SizeMismatch(f"bijection of size {f.size} for {A.size} points")
    cross = _cross(A, B)
    return float(cross[np.arange(A.size), list(f.forward)].max())


def _perfect_matching(allowed: np.ndarray) -> Optional[np.ndarray]:
    match = maximum_bipartite_matching(csr_matrix(allowed.astype(np.int8)), perm_type="column")
    return match if (match >= 0).all() else None


def bottleneck_distance(M: CloudLike, M2: CloudLike, cap: Optional[int] = None) -> Tuple[float, Bijection]:
    """
    d_B(M, M') and one bijection achieving it.

    The optimum is one of the m^2 cross distances; binary search over them, testing
    each threshold t for a perfect matching among the pairs at distance <= t.
    """
    A, B = _cloud_of(M), _cloud_of(M2)
    _check_pair(A, B)
    cap = settings.BOTTLENECK_CAP if cap is None else cap
    if A.size > cap:
        raise TooLarge(f"bottleneck matching capped at m={cap}, got m={A.size}")

    cross = _cross(A, B)
    candidates = np.unique(cross)
    lo, hi = 0, len(candidates) - 1
    found = None
    while lo < hi:
        mid = (lo + hi) // 2
        match = _perfect_matching(cross <= candidates[mid])
        if match is not None:
            hi, found = mid, (mid, match)
        else:
            lo = mid + 1
    if found is None or found[0] != lo:
        found = (lo, _perfect_matching(cross <= candidates[lo]))
    logger.debug("bottleneck_distance: m=%s, %s candidates, optimum index %s", A.size, len(candidates), lo)
    return float(candidates[lo]), Bijection(tuple(found[1].tolist()))


def bottleneck_bruteforce(M: CloudLike, M2: CloudLike, cap: Optional[int] = None) -> float:
    """Exhaustive minimum of sep f over all m! bijections."""
    A, B = _cloud_of(M), _cloud_of(M2)
    _check_pair(A, B)
    cap = settings.BRUTEFORCE_CAP if cap is None else cap
    if A.size > cap:
        raise TooLarge(f"exhaustive search capped at m={cap}, got m={A.size}")
    cross = _cross(A, B)
    perms = np.array(list(itertools.permutations(range(A.size))))
    return float(cross[np.arange(A.size), perms].max(axis=1).min())


# ---------------------------------------------------------------------------
# Perturbation into distance separated position
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class PerturbReport:
    output: PointCloud
    displacement: float
    attempts: int
    seed: int
    epsilon: float


def jitter(cloud: PointCloud, radius: float, rng: np.random.Generator) -> np.ndarray:
    """One offset per point, uniform in the norm ball of the given radius."""
    m, n = cloud.size, cloud.dimension
    if cloud.norm is Norm.LINF:
        return rng.uniform(-radius, radius, size=(m, n))
    if cloud.norm is Norm.L1:
        # uniform on the simplex (flat Dirichlet, last coordinate dropped), random orthant
        spacings = rng.exponential(size=(m, n + 1))
        simplex = spacings[:, :n] / spacings.sum(axis=1, keepdims=True)
        signs = rng.choice([-1.0, 1.0], size=(m, n))
        return radius * simplex * signs
    directions = rng.standard_normal(size=(m, n))
    directions /= np.linalg.norm(directions, axis=1, keepdims=True)
    radii = radius * rng.random(m) ** (1.0 / n)
    return directions * radii[:, None]


def perturb_to_ds(
    cloud: PointCloud,
    epsilon: float,
    seed: int,
    max_attempts: Optional[int] = None,
    tolerance: Optional[ToleranceConfig] = None,
) -> PerturbReport:
    """
    Move every point by less than epsilon/2 until the cloud is distance separated.

    The identity bijection then has separation < epsilon, so d_B(input, output) < epsilon.
    Clouds whose ties survive are a null set, so each attempt succeeds almost surely.
    """
    if not epsilon > 0:
        raise InputParseError(f"epsilon must be positive, got {epsilon!r}")
    max_attempts = settings.MAX_ATTEMPTS if max_attempts is None else int(max_attempts)
    if max_attempts < 1:
        raise InputParseError("max_attempts must be at least 1")
    rng = make_rng(seed)
    identity = Bijection.identity(cloud.size)
    tie = None

    for attempt in range(1, max_attempts + 1):
        candidate = cloud.replace_points(cloud.points + jitter(cloud, epsilon / 2.0, rng))
        try:
            space = from_points(candidate, tolerance)
        except DuplicatePoint as exc:
            logger.warning("perturb_to_ds attempt %s produced coincident points: %s", attempt, exc)
            continue
        ties = tied_pairs(space)
        if not ties:
            displacement = separation(cloud, candidate, identity)
            logger.info("perturb_to_ds: separated after %s attempt(s), displacement %s", attempt, displacement)
            return PerturbReport(candidate, displacement, attempt, int(seed), float(epsilon))
        tie = ties[0]
        logger.debug("perturb_to_ds attempt %s: %s tie link(s) left", attempt, len(ties))

    raise ExhaustedAttempts(max_attempts, float(epsilon), tie)


# ---------------------------------------------------------------------------
# Samplers
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class UniformCube:
    dim: int
    side: float = 1.0

    def describe(self) -> str:
        return f"uniform:{self.dim}:{self.side:g}"


@dataclass(frozen=True)
class Grid:
    dim: int
    k: int

    def describe(self) -> str:
        return f"grid:{self.dim}:{self.k}"


@dataclass(frozen=True)
class JitteredGrid:
    dim: int
    k: int
    sigma: float

    def describe(self) -> str:
        return f"jittered:{self.dim}:{self.k}:{self.sigma:g}"


Model = Union[UniformCube, Grid, JitteredGrid]


def parse_model(text: str) -> Model:
    """'uniform:N:side', 'grid:N:k' or 'jittered:N:k:sigma'."""
    parts = [p.strip() for p in str(text).split(":")]
    kind, args = parts[0].lower(), parts[1:]
    try:
        if kind in ("uniform", "uniformcube") and len(args) in (1, 2):
            model = UniformCube(int(args[0]), float(args[1]) if len(args) == 2 else 1.0)
            bad = model.dim < 1 or not model.side > 0
        elif kind == "grid" and len(args) == 2:
            model = Grid(int(args[0]), int(args[1]))
            bad = model.dim < 1 or model.k < 1
        elif kind in ("jittered", "jitteredgrid") and len(args) == 3:
            model = JitteredGrid(int(args[0]), int(args[1]), float(args[2]))
            bad = model.dim < 1 or model.k < 1 or not model.sigma > 0
        else:
            raise InputParseError(f"unknown model {text!r}; use uniform:N:side, grid:N:k or jittered:N:k:sigma")
    except ValueError as exc:
        raise InputParseError(f"bad model parameters in {text!r}: {exc}") from exc
    if bad:
        raise InputParseError(f"model parameters must be positive: {text!r}")
    return model


def _lattice(dim: int, k: int, m: int) -> np.ndarray:
    if m > k ** dim:
        raise InfeasibleModel(f"grid {k}^{dim} has {k ** dim} points, {m} requested")
    return np.array(list(itertools.islice(itertools.product(range(k), repeat=dim), m)), dtype=np.float64)


def sample_cloud(model: Model, m: int, seed: int, norm: Norm = Norm.L2) -> PointCloud:
    if m < 2:
        raise InfeasibleModel(f"a cloud needs at least 2 points, {m} requested")
    rng = make_rng(seed)
    if isinstance(model, UniformCube):
        points = rng.uniform(0.0, model.side, size=(m, model.dim))
    elif isinstance(model, Grid):
        points = _lattice(model.dim, model.k, m)
    elif isinstance(model, JitteredGrid):
        points = _lattice(model.dim, model.k, m) + rng.uniform(-model.sigma, model.sigma, size=(m, model.dim))
    else:
        raise InputParseError(f"unsupported model {model!r}")
    return PointCloud(points=points, norm=norm)


def unstable_threshold(n: int) -> float:
    return (1.0 - np.sqrt(1.0 + n)) / n


def unstable_family(n: int, x: float) -> PointCloud:
    """
    The n+1 points a = x(1,...,1), e_1..e_n of R^n (x <= 0).
    CS is the star centred at a above unstable_threshold(n) and complete at or below it.
    """
    points = np.vstack([np.full((1, n), float(x)), np.eye(n)])
    labels = ["a"] + [f"e{i}" for i in range(1, n + 1)]
    return PointCloud(points=points, norm=Norm.L2, labels=labels)


# ---------------------------------------------------------------------------
# Rigid motions
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class RigidMotion:
    rotation: np.ndarray
    translation: np.ndarray
    relabeling: Bijection

    def __post_init__(self):
        R = np.asarray(self.rotation, dtype=np.float64)
        t = np.asarray(self.translation, dtype=np.float64)
        if R.ndim != 2 or R.shape[0] != R.shape[1] or t.shape != (R.shape[0],):
            raise DimensionMismatch(f"rotation {R.shape} and translation {t.shape} do not fit")
        if not np.allclose(R.T @ R, np.eye(R.shape[0]), atol=1e-9):
            raise MetricValidationError("rotation matrix is not orthogonal")
        object.__setattr__(self, "rotation", R)
        object.__setattr__(self, "translation", t)

    @property
    def dimension(self) -> int:
        return self.rotation.shape[0]

    @classmethod
    def identity(cls, n: int, m: int) -> "RigidMotion":
        return cls(np.eye(n), np.zeros(n), Bijection.identity(m))


def random_rigid_motion(n: int, seed: int, m: int, norm: Norm = Norm.L2) -> RigidMotion:
    """
    Random isometry of (R^n, norm) plus a random relabeling of m points.
    L2 draws a Haar orthogonal matrix; L1 and Linf draw a signed permutation matrix,
    the linear isometries of those norms.
    """
    if n < 1:
        raise InputParseError("dimension must be at least 1")
    rng = make_rng(seed)
    if Norm(norm) is Norm.L2:
        q, r = np.linalg.qr(rng.standard_normal((n, n)))
        rotation = q * np.sign(np.diag(r))
    else:
        signs = rng.choice([-1.0, 1.0], size=n)
        rotation = np.eye(n)[rng.permutation(n)] * signs[:, None]
    translation = rng.uniform(-1.0, 1.0, size=n)
    return RigidMotion(rotation, translation, Bijection.random(m, rng))


def apply_motion(motion: RigidMotion, cloud: PointCloud) -> PointCloud:
    """Point i moves to x -> Rx + t and is stored at index relabeling(i)."""
    if motion.dimension != cloud.dimension:
        raise DimensionMismatch(f"motion acts on R^{motion.dimension}, cloud lives in R^{cloud.dimension}")
    if motion.relabeling.size != cloud.size:
        raise SizeMismatch(f"relabeling of size {motion.relabeling.size} for {cloud.size} points")
    moved = cloud.points @ motion.rotation.T + motion.translation
    index = list(motion.relabeling.forward)
    points = np.empty_like(moved)
    points[index] = moved
    labels = [""] * cloud.size
    for i, j in enumerate(index):
        labels[j] = cloud.labels[i]
    return PointCloud(points=points, norm=cloud.norm, labels=labels)


def relabel(cloud: PointCloud, f: Bijection) -> PointCloud:
    return apply_motion(RigidMotion(np.eye(cloud.dimension), np.zeros(cloud.dimension), f), cloud)
