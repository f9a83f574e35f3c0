"""
Undirected weighted simple graphs on the vertex set {0..m-1} of a metric space.

A graph stores the distance of each edge once; `weight_mode` picks which view the
path metric and the exporters see: UNIT (every edge weighs 1, the plain G(M)) or
DISTANCE (w_e = d(x, y), the weighted G(M)^w).
"""
import enum
import logging
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Tuple

import networkx as nx
import numpy as np
from scipy.sparse import csr_matrix
from scipy.sparse.csgraph import shortest_path

from .exceptions import InputParseError, NotConnected, SizeMismatch
from .metrics import ExplicitMatrix, FiniteMetricSpace, ToleranceConfig

logger = logging.getLogger(__name__)

Pair = Tuple[int, int]


class WeightMode(str, enum.Enum):
    UNIT = "unit"
    DISTANCE = "distance"


def _edge(i: int, j: int) -> Pair:
    i, j = int(i), int(j)
    return (i, j) if i < j else (j, i)


@dataclass(frozen=True, eq=False)
class WeightedGraph:
    vertex_count: int
    edges: Tuple[Pair, ...]
    distances: Tuple[float, ...]
    weight_mode: WeightMode = WeightMode.DISTANCE
    labels: Tuple[str, ...] = ()

    def __post_init__(self):
        if len(self.edges) != len(self.distances):
            raise InputParseError("every edge needs exactly one stored distance")
        object.__setattr__(self, "weight_mode", WeightMode(self.weight_mode))
        if not self.labels:
            object.__setattr__(self, "labels", tuple(str(v) for v in range(self.vertex_count)))

    @classmethod
    def from_edges(
        cls,
        vertex_count: int,
        weighted_edges: Iterable[Tuple[int, int, float]],
        weight_mode: WeightMode = WeightMode.DISTANCE,
        labels: Sequence[str] = (),
    ) -> "WeightedGraph":
        store: Dict[Pair, float] = {}
        for i, j, w in weighted_edges:
            if i == j:
                raise InputParseError(f"loop at vertex {i}")
            if not (0 <= i < vertex_count and 0 <= j < vertex_count):
                raise InputParseError(f"edge ({i}, {j}) outside vertex range 0..{vertex_count - 1}")
            w = float(w)
            if not w > 0:
                raise InputParseError(f"edge ({i}, {j}) has non-positive weight {w!r}")
            e = _edge(i, j)
            if e in store and store[e] != w:
                raise InputParseError(f"parallel edge {e} with weights {store[e]!r} and {w!r}")
            store[e] = w
        ordered = sorted(store)
        return cls(
            vertex_count=int(vertex_count),
            edges=tuple(ordered),
            distances=tuple(store[e] for e in ordered),
            weight_mode=weight_mode,
            labels=tuple(labels),
        )

    @classmethod
    def from_space(
        cls,
        M: FiniteMetricSpace,
        edges: Iterable[Pair],
        weight_mode: WeightMode = WeightMode.DISTANCE,
    ) -> "WeightedGraph":
        return cls.from_edges(
            M.size,
            ((i, j, M.dist[i, j]) for i, j in edges),
            weight_mode=weight_mode,
            labels=M.labels,
        )

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    @property
    def weights(self) -> Tuple[float, ...]:
        if self.weight_mode is WeightMode.UNIT:
            return tuple(1.0 for _ in self.edges)
        return self.distances

    def weight(self, i: int, j: int) -> float:
        e = _edge(i, j)
        idx = self._index().get(e)
        if idx is None:
            raise KeyError(e)
        return 1.0 if self.weight_mode is WeightMode.UNIT else self.distances[idx]

    def _index(self) -> Dict[Pair, int]:
        cached = self.__dict__.get("_edge_index")
        if cached is None:
            cached = {e: k for k, e in enumerate(self.edges)}
            object.__setattr__(self, "_edge_index", cached)
        return cached

    def has_edge(self, i: int, j: int) -> bool:
        return _edge(i, j) in self._index()

    def edge_set(self) -> FrozenSet[Pair]:
        return frozenset(self.edges)

    def neighbours(self, v: int) -> Tuple[int, ...]:
        out = [j for i, j in self.edges if i == v] + [i for i, j in self.edges if j == v]
        return tuple(sorted(out))

    def with_mode(self, mode: WeightMode) -> "WeightedGraph":
        return WeightedGraph(self.vertex_count, self.edges, self.distances, WeightMode(mode), self.labels)

    def same_edges(self, other: "WeightedGraph") -> bool:
        return self.vertex_count == other.vertex_count and self.edges == other.edges

    def to_csr(self) -> csr_matrix:
        m = self.vertex_count
        if not self.edges:
            return csr_matrix((m, m))
        rows = [i for i, _ in self.edges] + [j for _, j in self.edges]
        cols = [j for _, j in self.edges] + [i for i, _ in self.edges]
        data = list(self.weights) * 2
        return csr_matrix((data, (rows, cols)), shape=(m, m))

    def to_networkx(self) -> nx.Graph:
        g = nx.Graph()
        g.add_nodes_from(range(self.vertex_count))
        g.add_weighted_edges_from((i, j, w) for (i, j), w in zip(self.edges, self.weights))
        return g


@dataclass(frozen=True)
class ComponentPartition:
    """Component id of a vertex is the smallest vertex of its component."""

    representative: Tuple[int, ...]
    components: Tuple[Tuple[int, ...], ...]

    @property
    def count(self) -> int:
        return len(self.components)

    def component_of(self, v: int) -> Tuple[int, ...]:
        rep = self.representative[v]
        for comp in self.components:
            if comp[0] == rep:
                return comp
        raise KeyError(v)


class UnionFind:
    def __init__(self, n: int):
        self.parent = list(range(n))
        self.rank = [0] * n

    def find(self, x: int) -> int:
        root = x
        while self.parent[root] != root:
            root = self.parent[root]
        while self.parent[x] != root:
            self.parent[x], x = root, self.parent[x]
        return root

    def union(self, x: int, y: int) -> bool:
        px, py = self.find(x), self.find(y)
        if px == py:
            return False
        if self.rank[px] < self.rank[py]:
            px, py = py, px
        self.parent[py] = px
        if self.rank[px] == self.rank[py]:
            self.rank[px] += 1
        return True

    def partition(self) -> ComponentPartition:
        n = len(self.parent)
        groups: Dict[int, List[int]] = {}
        for v in range(n):
            groups.setdefault(self.find(v), []).append(v)
        comps = sorted(tuple(g) for g in groups.values())
        rep = [0] * n
        for comp in comps:
            for v in comp:
                rep[v] = comp[0]
        return ComponentPartition(representative=tuple(rep), components=tuple(comps))


def components(G: WeightedGraph) -> ComponentPartition:
    uf = UnionFind(G.vertex_count)
    for i, j in G.edges:
        uf.union(i, j)
    return uf.partition()


def is_connected(G: WeightedGraph) -> bool:
    return components(G).count == 1


def is_tree(G: WeightedGraph) -> bool:
    return G.edge_count == G.vertex_count - 1 and is_connected(G)


def has_cycle(G: WeightedGraph) -> bool:
    # a simple graph has a cycle iff some edge joins two already connected vertices
    uf = UnionFind(G.vertex_count)
    return any(not uf.union(i, j) for i, j in G.edges)


def path_metric(G: WeightedGraph, tolerance: Optional[ToleranceConfig] = None) -> FiniteMetricSpace:
    """All-pairs shortest paths (repeated Dijkstra) under the graph's weight mode."""
    if G.vertex_count < 2:
        raise NotConnected("path metric needs at least 2 vertices")
    dist = shortest_path(G.to_csr(), method="D", directed=False)
    if not np.all(np.isfinite(dist)):
        i, j = (int(v) for v in np.argwhere(~np.isfinite(dist))[0])
        raise NotConnected(f"vertices {i} and {j} lie in different components")
    np.fill_diagonal(dist, 0.0)
    return FiniteMetricSpace(
        dist=dist,
        provenance=ExplicitMatrix(labels=G.labels, source="path_metric"),
        tolerance=tolerance or ToleranceConfig.default(),
    )


def isomorphic_under(G: WeightedGraph, H: WeightedGraph, f) -> bool:
    """True iff the vertex map f sends E(G) exactly onto E(H)."""
    if G.vertex_count != H.vertex_count:
        raise SizeMismatch(f"graphs have {G.vertex_count} and {H.vertex_count} vertices")
    forward = tuple(getattr(f, "forward", f))
    if len(forward) != G.vertex_count:
        raise SizeMismatch(f"bijection of size {len(forward)} for {G.vertex_count} vertices")
    if G.edge_count != H.edge_count:
        return False
    return {_edge(forward[i], forward[j]) for i, j in G.edges} == H.edge_set()


def is_subgraph(G: WeightedGraph, H: WeightedGraph) -> bool:
    if G.vertex_count != H.vertex_count:
        raise SizeMismatch(f"graphs have {G.vertex_count} and {H.vertex_count} vertices")
    return G.edge_set() <= H.edge_set()


def intersection(G: WeightedGraph, H: WeightedGraph) -> WeightedGraph:
    if G.vertex_count != H.vertex_count:
        raise SizeMismatch(f"graphs have {G.vertex_count} and {H.vertex_count} vertices")
    keep = H.edge_set()
    return WeightedGraph.from_edges(
        G.vertex_count,
        ((i, j, w) for (i, j), w in zip(G.edges, G.distances) if (i, j) in keep),
        weight_mode=G.weight_mode,
        labels=G.labels,
    )


def without_edge(G: WeightedGraph, e: Pair) -> WeightedGraph:
    e = _edge(*e)
    return WeightedGraph.from_edges(
        G.vertex_count,
        ((i, j, w) for (i, j), w in zip(G.edges, G.distances) if (i, j) != e),
        weight_mode=G.weight_mode,
        labels=G.labels,
    )


def complete_graph(M: FiniteMetricSpace, weight_mode: WeightMode = WeightMode.DISTANCE) -> WeightedGraph:
    iu, ju = np.triu_indices(M.size, 1)
    return WeightedGraph.from_space(M, zip(iu.tolist(), ju.tolist()), weight_mode)


def _slack(M: FiniteMetricSpace) -> float:
    # path sums accumulate rounding proportional to the number of hops
    return M.tol + M.size * np.finfo(np.float64).eps * M.diameter


def metric_distortion(G: WeightedGraph, M: FiniteMetricSpace) -> float:
    """max |d_G^w(x, y) - d(x, y)| over all pairs."""
    if G.vertex_count != M.size:
        raise SizeMismatch(f"graph has {G.vertex_count} vertices, space has {M.size} points")
    pm = path_metric(G.with_mode(WeightMode.DISTANCE), M.tolerance)
    return float(np.abs(pm.dist - M.dist).max())


def reproduces_metric(G: WeightedGraph, M: FiniteMetricSpace) -> bool:
    """True iff the distance-weighted path metric of G equals d."""
    try:
        return metric_distortion(G, M) <= _slack(M)
    except NotConnected:
        return False
