"""
The graphs a finite metric space induces on its own points:

  CS(M)  connected sparse graph: every vertex (then every component) is joined to
         all of its nearest neighbours (nearest components) until connected;
  MC(M)  minimum connected graph: all pairs at distance <= the smallest distance
         value that makes the threshold graph connected;
  Σ_M    minimal length-space graph: the pairs with no intermediate point z
         satisfying d(x, z) + d(z, y) = d(x, y).

No construction ever chooses between tied candidates: ties (within the space's
tolerance) are all included.
"""
import enum
import logging
from dataclasses import dataclass
from typing import Dict, List, Mapping, Optional, Set, Tuple

import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import minimum_spanning_tree

from .exceptions import InternalInvariantViolation
from .graphs import (
    ComponentPartition,
    UnionFind,
    WeightedGraph,
    WeightMode,
    intersection,
    is_subgraph,
    is_tree,
)
from .metrics import FiniteMetricSpace, distance_set, format_real

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


# ---------------------------------------------------------------------------
# CS(M)
# ---------------------------------------------------------------------------
@dataclass(frozen=True, eq=False)
class CsStep:
    partition: ComponentPartition      # components before the step
    nu: Mapping[int, float]            # component id -> distance to its nearest outside point
    new_edges: Tuple[Pair, ...]        # edges the step adds


@dataclass(frozen=True, eq=False)
class CsTrace:
    steps: Tuple[CsStep, ...]
    final_graph: WeightedGraph
    final_partition: ComponentPartition

    @property
    def step_count(self) -> int:
        return len(self.steps)

    @property
    def max_nearest_neighbour(self) -> float:
        """Largest nearest-neighbour distance of a single point; every MC cut value is at least this."""
        return max(self.steps[0].nu.values()) if self.steps else 0.0


def build_cs(M: FiniteMetricSpace) -> CsTrace:
    # every crossing pair within tolerance of the component's nearest distance joins the batch
    D = M.dist
    tol = M.tol
    uf = UnionFind(M.size)
    partition = uf.partition()
    edges: Set[Pair] = set()
    steps: List[CsStep] = []

    while partition.count > 1:
        comp_id = np.asarray(partition.representative)
        dists = np.where(comp_id[:, None] != comp_id[None, :], D, np.inf)

        nu: Dict[int, float] = {}
        batch: Set[Pair] = set()
        for comp in partition.components:
            rows = np.asarray(comp)
            nearest = float(dists[rows].min())
            nu[comp[0]] = nearest
            for r, y in np.argwhere(dists[rows] <= nearest + tol):
                x = int(rows[r])
                batch.add((x, int(y)) if x < y else (int(y), x))

        new_edges = tuple(sorted(batch))
        steps.append(CsStep(partition=partition, nu=nu, new_edges=new_edges))
        for x, y in new_edges:
            uf.union(x, y)
        edges.update(new_edges)
        logger.debug("build_cs step %s: %s components, %s new edges", len(steps), partition.count, len(new_edges))
        partition = uf.partition()

    graph = WeightedGraph.from_space(M, edges, WeightMode.DISTANCE)
    logger.debug("build_cs: %s edges after %s steps", graph.edge_count, len(steps))
    return CsTrace(steps=tuple(steps), final_graph=graph, final_partition=partition)


# ---------------------------------------------------------------------------
# MC(M)
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class CutValue:
    """The smallest distance that connects the threshold graph, and the index of its distance-set class."""
    value: float
    index: int


def threshold_graph(M: FiniteMetricSpace, r: float) -> WeightedGraph:
    """G_r: all pairs at distance <= r (within tolerance)."""
    iu, ju = np.triu_indices(M.size, 1)
    keep = M.dist[iu, ju] <= r + M.tol
    return WeightedGraph.from_space(M, zip(iu[keep].tolist(), ju[keep].tolist()))


def build_mc(M: FiniteMetricSpace) -> Tuple[WeightedGraph, CutValue]:
    # the smallest connecting threshold is the bottleneck edge of a minimum spanning tree;
    # the closure window sits on that distance, the same window build_cs uses around nu
    mst = minimum_spanning_tree(csr_matrix(M.dist))
    bottleneck = float(mst.data.max())
    cut = CutValue(value=bottleneck, index=distance_set(M).index_of(bottleneck))
    graph = threshold_graph(M, cut.value)
    logger.debug("build_mc: cut value %s (index %s), %s edges", cut.value, cut.index, graph.edge_count)
    return graph, cut


# ---------------------------------------------------------------------------
# Σ_M
# ---------------------------------------------------------------------------
def build_sigma(M: FiniteMetricSpace) -> WeightedGraph:
    # a geodesic of count >= 2 exists iff one of count 2 does (split at its first
    # intermediate vertex), so only single intermediate points are tested
    D = M.dist
    m = M.size
    tol = M.tol
    keep: List[Pair] = []
    for x in range(m):
        via = D[x][:, None] + D          # via[z, y] = d(x, z) + d(z, y)
        via[x, :] = np.inf
        np.fill_diagonal(via, np.inf)
        shortcut = (via <= D[x][None, :] + tol).any(axis=0)
        keep.extend((x, y) for y in range(x + 1, m) if not shortcut[y])
    return WeightedGraph.from_space(M, keep)


class IntrinsicLabel(str, enum.Enum):
    EXTRINSIC = "extrinsic"
    INTRINSIC_I = "intrinsic-I"
    INTRINSIC_II = "intrinsic-II"


@dataclass(frozen=True)
class IntrinsicClass:
    label: IntrinsicLabel
    common_length: Optional[float] = None

    def describe(self) -> str:
        if self.label is IntrinsicLabel.INTRINSIC_I:
            return f"{self.label.value} (r={format_real(self.common_length)})"
        return self.label.value


def classify_intrinsic(M: FiniteMetricSpace, sigma: Optional[WeightedGraph] = None) -> IntrinsicClass:
    sigma = sigma if sigma is not None else build_sigma(M)
    if sigma.edge_count == M.size * (M.size - 1) // 2:
        return IntrinsicClass(IntrinsicLabel.EXTRINSIC)
    lengths = np.asarray(sigma.distances)
    if lengths.max() - lengths.min() <= M.tol:
        return IntrinsicClass(IntrinsicLabel.INTRINSIC_I, common_length=float(lengths.min()))
    return IntrinsicClass(IntrinsicLabel.INTRINSIC_II)


# ---------------------------------------------------------------------------
# Relations among the graphs
# ---------------------------------------------------------------------------
@dataclass(frozen=True)
class Relations:
    cs_subset_sigma: bool
    cs_subset_mc: bool
    cs_equals_sigma_cap_mc: bool
    sigma_equals_cs: bool
    mc_equals_cs: bool
    all_equal: bool
    cs_distorts_metric: bool
    sigma_is_tree: bool


@dataclass(frozen=True, eq=False)
class RelationsReport:
    cs: WeightedGraph
    mc: WeightedGraph
    sigma: WeightedGraph
    sigma_cap_mc: WeightedGraph
    cut_value: CutValue
    intrinsic: IntrinsicClass
    relations: Relations
    trace: CsTrace


def relations_report(M: FiniteMetricSpace) -> RelationsReport:
    trace = build_cs(M)
    cs = trace.final_graph
    mc, cut = build_mc(M)
    sigma = build_sigma(M)
    cap = intersection(sigma, mc)

    if not is_subgraph(cs, sigma):
        missing = sorted(cs.edge_set() - sigma.edge_set())
        raise InternalInvariantViolation(f"CS edges {missing} are not in Σ_M")
    if not is_subgraph(cs, mc):
        missing = sorted(cs.edge_set() - mc.edge_set())
        raise InternalInvariantViolation(f"CS edges {missing} are not in MC(M)")

    relations = Relations(
        cs_subset_sigma=True,
        cs_subset_mc=True,
        cs_equals_sigma_cap_mc=cs.same_edges(cap),
        sigma_equals_cs=sigma.same_edges(cs),
        mc_equals_cs=mc.same_edges(cs),
        all_equal=sigma.same_edges(cs) and mc.same_edges(cs),
        cs_distorts_metric=not sigma.same_edges(cs),
        sigma_is_tree=is_tree(sigma),
    )
    intrinsic = classify_intrinsic(M, sigma)
    logger.info(
        "relations: |CS|=%s |MC|=%s |Σ|=%s class=%s",
        cs.edge_count, mc.edge_count, sigma.edge_count, intrinsic.label.value,
    )
    return RelationsReport(
        cs=cs,
        mc=mc,
        sigma=sigma,
        sigma_cap_mc=cap,
        cut_value=cut,
        intrinsic=intrinsic,
        relations=relations,
        trace=trace,
    )
