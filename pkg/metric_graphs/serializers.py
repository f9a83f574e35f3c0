# metric_graphs/serializers.py
"""
Readers and writers for everything the CLI consumes or produces.

Inputs:  point-cloud CSV, distance-matrix CSV, canonical space JSON.
Outputs: edge lists, DOT, and JSON reports built from the pydantic schemas below.

JSON artifacts are written with sorted keys, 2-space indent and a trailing newline,
so identical runs give identical bytes.
"""
import io
import json
import logging
import sys
from pathlib import Path
from typing import Dict, List, Literal, Optional, Tuple, Union

import numpy as np
import pandas as pd
from pydantic import BaseModel, ConfigDict, Field, ValidationError

from . import settings
from .constructions import CsTrace, RelationsReport
from .exceptions import DimensionMismatch, InputParseError
from .graphs import WeightedGraph
from .metrics import (
    FiniteMetricSpace,
    Norm,
    PointCloud,
    ScaleMode,
    ToleranceConfig,
    format_real,
    from_matrix,
    from_points,
)

logger = logging.getLogger(__name__)

InputFormat = Literal["points-csv", "matrix-csv", "space-json"]
EmitFormat = Literal["edges", "dot", "json"]


# ---------------------------------------------------------------------------
# Schemas
# ---------------------------------------------------------------------------
class RunConfig(BaseModel):
    """Validated options of one CLI invocation."""

    model_config = ConfigDict(frozen=True, extra="ignore")

    input: Optional[Path] = None
    format: InputFormat = "points-csv"
    norm: Norm = Norm.L2
    eq_tol: float = Field(default_factory=lambda: settings.EQ_TOL, ge=0)
    scale_mode: ScaleMode = Field(default_factory=lambda: ScaleMode(settings.SCALE_MODE))
    out: Optional[Path] = None
    emit: EmitFormat = "edges"
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2 ** 64)
    epsilon: Optional[float] = Field(default=None, gt=0)
    model: Optional[str] = None
    trials: int = Field(default=1, ge=1)
    m: Optional[int] = Field(default=None, ge=2)
    max_attempts: int = Field(default_factory=lambda: settings.MAX_ATTEMPTS, ge=1)

    @classmethod
    def from_options(cls, options: Dict) -> "RunConfig":
        clean = {k: v for k, v in options.items() if v is not None}
        try:
            return cls.model_validate(clean)
        except ValidationError as exc:
            raise InputParseError(f"invalid options: {exc}") from exc

    def tolerance(self) -> ToleranceConfig:
        return ToleranceConfig(eq_tol=self.eq_tol, scale_mode=self.scale_mode)


class EdgeSchema(BaseModel):
    i: int
    j: int
    weight: float


class GraphSchema(BaseModel):
    kind: str
    vertex_count: int
    labels: List[str]
    weight_mode: str
    edges: List[EdgeSchema]


class StepSchema(BaseModel):
    components: List[List[int]]
    nu: Dict[str, float]
    new_edges: List[Tuple[int, int]]


class TraceSchema(BaseModel):
    step_count: int
    max_nearest_neighbour: float
    steps: List[StepSchema]
    edges: List[Tuple[int, int]]


class ProvenanceSchema(BaseModel):
    kind: Literal["points", "matrix", "path_metric"]
    labels: List[str]
    norm: Optional[Norm] = None
    points: Optional[List[List[float]]] = None


class SpaceSchema(BaseModel):
    m: int = Field(ge=2)
    dist: List[float]
    provenance: ProvenanceSchema


class RelationsSchema(BaseModel):
    model_config = ConfigDict(populate_by_name=True)

    cs_edges: List[Tuple[int, int]]
    mc_edges: List[Tuple[int, int]]
    sigma_edges: List[Tuple[int, int]]
    sigma_cap_mc_edges: List[Tuple[int, int]]
    cut_value: float
    cut_index: int
    intrinsic_class: str = Field(alias="class")
    common_length: Optional[float] = None
    counts: Dict[str, int]
    relations: Dict[str, bool]


class PerturbSchema(BaseModel):
    m: int
    epsilon: float
    seed: int
    attempts: int
    displacement: float
    mesh: float
    distance_separated: bool


class BottleneckSchema(BaseModel):
    m: int
    distance: float
    bijection: List[int]
    bruteforce: Optional[float] = None


class InspectSchema(BaseModel):
    m: int
    values: List[float]
    multiplicity: List[int]
    mesh: Optional[float] = None
    distance_separated: bool
    ties: List[Tuple[Tuple[int, int], Tuple[int, int], float]]
    space: SpaceSchema


def dump_json(model: BaseModel) -> str:
    payload = model.model_dump(mode="json", by_alias=True)
    return json.dumps(payload, sort_keys=True, indent=2) + "\n"


# ---------------------------------------------------------------------------
# Graph exports
# ---------------------------------------------------------------------------
def format_edge_list(G: WeightedGraph) -> str:
    return "".join(f"{i} {j} {format_real(w)}\n" for (i, j), w in zip(G.edges, G.weights))


def _dot_quote(text: str) -> str:
    return '"' + str(text).replace("\\", "\\\\").replace('"', '\\"') + '"'


def format_dot(G: WeightedGraph, name: str = "G") -> str:
    lines = [f"graph {name} {{"]
    for v in range(G.vertex_count):
        lines.append(f"  {v} [label={_dot_quote(G.labels[v])}];")
    for (i, j), w in zip(G.edges, G.weights):
        lines.append(f"  {i} -- {j} [label={_dot_quote(format_real(w))}];")
    lines.append("}")
    return "\n".join(lines) + "\n"


def graph_schema(G: WeightedGraph, kind: str) -> GraphSchema:
    return GraphSchema(
        kind=kind,
        vertex_count=G.vertex_count,
        labels=list(G.labels),
        weight_mode=G.weight_mode.value,
        edges=[EdgeSchema(i=i, j=j, weight=w) for (i, j), w in zip(G.edges, G.weights)],
    )


def format_graph(G: WeightedGraph, emit: str, kind: str) -> str:
    if emit == "dot":
        return format_dot(G, name=kind.upper())
    if emit == "json":
        return dump_json(graph_schema(G, kind))
    return format_edge_list(G)


def trace_schema(trace: CsTrace) -> TraceSchema:
    steps = [
        StepSchema(
            components=[list(c) for c in step.partition.components],
            nu={str(k): v for k, v in step.nu.items()},
            new_edges=list(step.new_edges),
        )
        for step in trace.steps
    ]
    return TraceSchema(
        step_count=trace.step_count,
        max_nearest_neighbour=trace.max_nearest_neighbour,
        steps=steps,
        edges=list(trace.final_graph.edges),
    )


def relations_schema(report: RelationsReport) -> RelationsSchema:
    rel = report.relations
    return RelationsSchema(
        cs_edges=list(report.cs.edges),
        mc_edges=list(report.mc.edges),
        sigma_edges=list(report.sigma.edges),
        sigma_cap_mc_edges=list(report.sigma_cap_mc.edges),
        cut_value=report.cut_value.value,
        cut_index=report.cut_value.index,
        intrinsic_class=report.intrinsic.label.value,
        common_length=report.intrinsic.common_length,
        counts={
            "vertices": report.cs.vertex_count,
            "cs": report.cs.edge_count,
            "mc": report.mc.edge_count,
            "sigma": report.sigma.edge_count,
            "sigma_cap_mc": report.sigma_cap_mc.edge_count,
        },
        relations={name: getattr(rel, name) for name in rel.__dataclass_fields__},
    )


# ---------------------------------------------------------------------------
# Canonical space dump
# ---------------------------------------------------------------------------
def space_schema(M: FiniteMetricSpace) -> SpaceSchema:
    il, jl = np.tril_indices(M.size, -1)
    cloud = M.cloud
    if cloud is not None:
        prov = ProvenanceSchema(kind="points", labels=list(cloud.labels), norm=cloud.norm, points=cloud.points.tolist())
    else:
        kind = "path_metric" if M.provenance.source == "path_metric" else "matrix"
        prov = ProvenanceSchema(kind=kind, labels=list(M.labels))
    return SpaceSchema(m=M.size, dist=M.dist[il, jl].tolist(), provenance=prov)


def space_to_json(M: FiniteMetricSpace) -> str:
    return dump_json(space_schema(M))


def space_from_json(text: str, tolerance: Optional[ToleranceConfig] = None) -> FiniteMetricSpace:
    try:
        schema = SpaceSchema.model_validate_json(text)
    except ValidationError as exc:
        raise InputParseError(f"not a space dump: {exc}") from exc
    m = schema.m
    if len(schema.dist) != m * (m - 1) // 2:
        raise InputParseError(f"space dump for m={m} needs {m * (m - 1) // 2} distances, got {len(schema.dist)}")
    prov = schema.provenance
    if prov.kind == "points" and prov.points is not None:
        cloud = PointCloud(points=prov.points, norm=prov.norm or Norm.L2, labels=prov.labels)
        return from_points(cloud, tolerance)
    table = np.zeros((m, m))
    il, jl = np.tril_indices(m, -1)
    table[il, jl] = schema.dist
    table[jl, il] = schema.dist
    return from_matrix(table, labels=prov.labels, tolerance=tolerance, source=prov.kind)


# ---------------------------------------------------------------------------
# CSV
# ---------------------------------------------------------------------------
def _is_number(cell) -> bool:
    try:
        float(cell)
    except (TypeError, ValueError):
        return False
    return True


def _read_cells(source: Union[str, Path, io.StringIO]) -> pd.DataFrame:
    try:
        frame = pd.read_csv(source, header=None, dtype=str, skipinitialspace=True, keep_default_na=False)
    except FileNotFoundError as exc:
        raise InputParseError(f"input not found: {source}") from exc
    except pd.errors.EmptyDataError as exc:
        raise InputParseError(f"input {source} is empty") from exc
    except pd.errors.ParserError as exc:
        raise DimensionMismatch(f"rows of {source} have different lengths: {exc}") from exc
    except OSError as exc:
        raise InputParseError(f"cannot read {source}: {exc}") from exc
    return frame.fillna("").apply(lambda col: col.str.strip())


LABEL_HEADERS = {"", "label", "labels", "name", "id"}


def _split_table(frame: pd.DataFrame, source) -> Tuple[Optional[List[str]], Optional[List[str]], np.ndarray]:
    """Peel off an optional header row and an optional leading label column."""
    first = list(frame.iloc[0])
    header = None
    if any(not _is_number(c) for c in first[1:]) or (
        not _is_number(first[0]) and len(frame) > 1 and all(_is_number(c) for c in frame.iloc[1:, 0])
    ):
        header = first
        frame = frame.iloc[1:]
    if frame.empty:
        raise InputParseError(f"{source} has a header but no data rows")

    row_labels = None
    if not all(_is_number(c) for c in frame.iloc[:, 0]) or (header is not None and header[0].lower() in LABEL_HEADERS):
        row_labels = list(frame.iloc[:, 0])
        frame = frame.iloc[:, 1:]
        header = header[1:] if header is not None else None
    if frame.shape[1] == 0:
        raise InputParseError(f"{source} has no numeric columns")

    missing = (frame == "").to_numpy()
    if missing.any():
        r, c = (int(v) for v in np.argwhere(missing)[0])
        raise DimensionMismatch(f"row {r} of {source} is missing column {c}")
    try:
        values = frame.apply(pd.to_numeric, errors="raise").to_numpy(dtype=np.float64)
    except ValueError as exc:
        raise InputParseError(f"non-numeric cell in {source}: {exc}") from exc
    return header, row_labels, values


def read_points_csv(
    source: Union[str, Path, io.StringIO],
    norm: Norm = Norm.L2,
) -> PointCloud:
    _, labels, values = _split_table(_read_cells(source), source)
    logger.debug("read_points_csv: %s rows x %s columns from %s", *values.shape, source)
    return PointCloud(points=values, norm=norm, labels=labels or ())


def read_matrix_csv(
    source: Union[str, Path, io.StringIO],
    tolerance: Optional[ToleranceConfig] = None,
) -> FiniteMetricSpace:
    header, row_labels, values = _split_table(_read_cells(source), source)
    labels = header or row_labels or ()
    return from_matrix(values, labels=labels, tolerance=tolerance)


def write_points_csv(cloud: PointCloud, target: Union[str, Path, io.StringIO]) -> None:
    columns = [f"x{k}" for k in range(cloud.dimension)]
    frame = pd.DataFrame(cloud.points, columns=columns, index=pd.Index(cloud.labels, name="label"))
    frame.to_csv(target, float_format="%.17g", lineterminator="\n")


def read_space(
    path: Union[str, Path],
    fmt: str,
    norm: Norm = Norm.L2,
    tolerance: Optional[ToleranceConfig] = None,
) -> FiniteMetricSpace:
    if fmt == "points-csv":
        return from_points(read_points_csv(path, norm), tolerance)
    if fmt == "matrix-csv":
        return read_matrix_csv(path, tolerance)
    if fmt == "space-json":
        try:
            text = Path(path).read_text(encoding="utf8")
        except OSError as exc:
            raise InputParseError(f"cannot read {path}: {exc}") from exc
        return space_from_json(text, tolerance)
    raise InputParseError(f"unknown input format {fmt!r}")


def write_text(text: str, target: Optional[Union[str, Path]]) -> None:
    """Write an artifact to a file, or to stdout when no target is given."""
    if target is None:
        sys.stdout.write(text)
        return
    Path(target).parent.mkdir(parents=True, exist_ok=True)
    Path(target).write_text(text, encoding="utf8")
