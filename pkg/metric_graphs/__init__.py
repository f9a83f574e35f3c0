"""Connected sparse, minimum connected and minimal length-space graphs of finite metric spaces."""
from .constructions import build_cs, build_mc, build_sigma, classify_intrinsic, relations_report
from .exceptions import MetricGraphsError
from .metrics import FiniteMetricSpace, Norm, PointCloud, ToleranceConfig, distance_set, from_matrix, from_points

__version__ = "0.1.0"

__all__ = [
    "FiniteMetricSpace",
    "MetricGraphsError",
    "Norm",
    "PointCloud",
    "ToleranceConfig",
    "build_cs",
    "build_mc",
    "build_sigma",
    "classify_intrinsic",
    "distance_set",
    "from_matrix",
    "from_points",
    "relations_report",
]
