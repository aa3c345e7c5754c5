"""Undirected simple graphs, edge-list/adjacency loaders and node-level scores."""
from __future__ import annotations

import logging
import math
from collections import deque
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, FrozenSet, Iterable, Mapping, Optional, Tuple

import numpy as np

logger = logging.getLogger(__name__)

Label = int
Edge = Tuple[Label, Label]


class GraphFormatError(ValueError):
    """Raised when an edge list or adjacency file cannot be parsed."""


@dataclass(frozen=True)
class Graph:
    """Immutable undirected simple graph keyed by external integer labels.

    Node labels are kept exactly as given; nothing is re-indexed.
    """

    nodes: Tuple[Label, ...]
    edges: FrozenSet[Edge]
    # neighbours kept sorted so every traversal is independent of input order
    adjacency: Mapping[Label, Tuple[Label, ...]] = field(repr=False, compare=False)

    @classmethod
    def from_edges(cls, edges: Iterable[Tuple[Label, Label]],
                   nodes: Optional[Iterable[Label]] = None) -> "Graph":
        """Build a graph; self-loops and duplicates are silently dropped."""
        adj: Dict[Label, set] = {}
        for n in nodes or ():
            adj.setdefault(int(n), set())
        canon = set()
        for u, v in edges:
            u, v = int(u), int(v)
            adj.setdefault(u, set())
            adj.setdefault(v, set())
            if u == v:
                continue
            canon.add((min(u, v), max(u, v)))
            adj[u].add(v)
            adj[v].add(u)
        order = tuple(sorted(adj))
        return cls(order, frozenset(canon), {n: tuple(sorted(adj[n])) for n in order})

    @property
    def n(self) -> int:
        return len(self.nodes)

    @property
    def m(self) -> int:
        return len(self.edges)

    def __contains__(self, label) -> bool:
        return label in self.adjacency

    def neighbors(self, label: Label) -> Tuple[Label, ...]:
        try:
            return self.adjacency[label]
        except KeyError:
            raise KeyError(f"unknown node label {label!r}") from None

    def subgraph(self, members: Iterable[Label]) -> "Graph":
        """Induced subgraph on ``members`` (labels preserved)."""
        keep = set(members)
        missing = keep.difference(self.adjacency)
        if missing:
            raise KeyError(f"unknown node labels {sorted(missing)}")
        sub = [(u, v) for u, v in self.edges if u in keep and v in keep]
        return Graph.from_edges(sub, nodes=keep)

    def adjacency_matrix(self) -> np.ndarray:
        """Dense 0/1 matrix with rows/columns in ``self.nodes`` order."""
        index = {n: i for i, n in enumerate(self.nodes)}
        a = np.zeros((self.n, self.n), dtype=np.int64)
        for u, v in self.edges:
            a[index[u], index[v]] = a[index[v], index[u]] = 1
        return a

    def to_edge_list(self) -> str:
        isolated = [n for n in self.nodes if not self.adjacency[n]]
        if isolated:
            # the edge-list format cannot carry isolated nodes
            logger.warning("dropping %d isolated node(s) on serialization", len(isolated))
        return "".join(f"{u} {v}\n" for u, v in sorted(self.edges))

    def is_connected(self) -> bool:
        return len(connected_components(self)) <= 1


@dataclass(frozen=True)
class LoadResult:
    graph: Graph
    self_loops: int = 0
    duplicates: int = 0


def load_edge_list(text: str) -> LoadResult:
    """Parse a whitespace-separated edge list.

    Lines starting with ``#`` and blank lines are ignored.  Self-loops and
    repeated edges are dropped and counted.
    """
    pairs = []
    loops = 0
    seen = set()
    dupes = 0
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        tokens = line.split()
        if len(tokens) != 2:
            raise GraphFormatError(f"line {lineno}: expected two node labels, got {line!r}")
        try:
            u, v = int(tokens[0]), int(tokens[1])
        except ValueError:
            raise GraphFormatError(f"line {lineno}: non-integer node label in {line!r}") from None
        if u == v:
            loops += 1
            continue
        key = (min(u, v), max(u, v))
        if key in seen:
            dupes += 1
        seen.add(key)
        pairs.append(key)
    if not seen:
        raise GraphFormatError("edge list contains no edges")
    if loops:
        logger.warning("dropped %d self-loop(s)", loops)
    return LoadResult(Graph.from_edges(pairs), self_loops=loops, duplicates=dupes)


def load_adjacency_csv(text: str) -> Graph:
    """Parse a comma-separated symmetric 0/1 matrix; labels are 1..n in row order."""
    rows = [r for r in (line.strip() for line in text.splitlines()) if r]
    try:
        mat = [[int(x) for x in r.split(",")] for r in rows]
    except ValueError as exc:
        raise GraphFormatError(f"non-integer entry in adjacency matrix: {exc}") from None
    n = len(mat)
    if n == 0 or any(len(r) != n for r in mat):
        raise GraphFormatError("adjacency matrix is not square")
    edges = []
    for i in range(n):
        if mat[i][i] != 0:
            raise GraphFormatError(f"nonzero diagonal entry at ({i + 1},{i + 1})")
        for j in range(n):
            if mat[i][j] not in (0, 1):
                raise GraphFormatError(f"entry at ({i + 1},{j + 1}) is not 0/1")
            if mat[i][j] != mat[j][i]:
                # report the lower-triangle position, 1-based
                a, b = max(i, j) + 1, min(i, j) + 1
                raise GraphFormatError(f"asymmetric entry at ({a},{b})")
            if j > i and mat[i][j]:
                edges.append((i + 1, j + 1))
    return Graph.from_edges(edges, nodes=range(1, n + 1))


def degree(g: Graph, i: Label) -> int:
    return len(g.neighbors(i))


def degree_distribution(g: Graph) -> Dict[Label, float]:
    """Degree of each node divided by the total degree ``2m``."""
    if g.m == 0:
        raise ValueError("degree distribution undefined for a graph without edges")
    total = 2 * g.m
    return {n: len(g.adjacency[n]) / total for n in g.nodes}


def connected_components(g: Graph):
    seen = set()
    comps = []
    for s in g.nodes:
        if s in seen:
            continue
        comp = {s}
        queue = deque([s])
        while queue:
            v = queue.popleft()
            for w in g.adjacency[v]:
                if w not in comp:
                    comp.add(w)
                    queue.append(w)
        seen |= comp
        comps.append(comp)
    return comps


def _single_source(g: Graph, s: Label):
    """BFS from ``s``: visitation stack, path counts and predecessor lists."""
    sigma = {s: 1}
    dist = {s: 0}
    preds: Dict[Label, list] = {s: []}
    stack = []
    queue = deque([s])
    while queue:
        v = queue.popleft()
        stack.append(v)
        for w in g.adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                sigma[w] = 0
                preds[w] = []
                queue.append(w)
            if dist[w] == dist[v] + 1:
                sigma[w] += sigma[v]
                preds[w].append(v)
    return stack, sigma, preds


def betweenness(g: Graph, ordered_pairs: bool = False, exact: bool = False) -> Dict[Label, float]:
    """Shortest-path betweenness, unnormalized.

    Sums ``g_se(i)/g_se`` over unordered pairs ``{s, e}`` not containing ``i``
    (``ordered_pairs=True`` counts both orientations, doubling every value).
    Uses dependency accumulation over each single-source shortest-path DAG.
    With ``exact=True`` the accumulation runs in rational arithmetic and
    :class:`fractions.Fraction` values are returned.
    """
    if not g.is_connected():
        logger.warning("graph is disconnected; pairs across components contribute 0")
    zero = Fraction(0) if exact else 0.0
    one = Fraction(1) if exact else 1.0
    score = {n: zero for n in g.nodes}
    # sources in label order keeps float accumulation order fixed
    for s in g.nodes:
        stack, sigma, preds = _single_source(g, s)
        delta = {v: zero for v in stack}
        while stack:
            w = stack.pop()
            coeff = (one + delta[w]) / sigma[w]
            for v in preds[w]:
                delta[v] += sigma[v] * coeff
            if w != s:
                score[w] += delta[w]
    scale = one if ordered_pairs else one / 2
    return {n: v * scale for n, v in score.items()}


@dataclass(frozen=True)
class TopologySummary:
    n: int
    m: int
    mean_degree: float
    max_degree: int
    mean_shortest_distance: float
    diameter: int
    connected: bool = True


def shortest_distances(g: Graph, s: Label) -> Dict[Label, int]:
    dist = {s: 0}
    queue = deque([s])
    while queue:
        v = queue.popleft()
        for w in g.adjacency[v]:
            if w not in dist:
                dist[w] = dist[v] + 1
                queue.append(w)
    return dist


def topology_summary(g: Graph) -> TopologySummary:
    """Counts, degree statistics and shortest-distance statistics.

    For a disconnected graph the distance statistics cover reachable pairs
    only and ``connected`` is False.
    """
    if g.n == 0:
        raise ValueError("empty graph")
    total = 0
    pairs = 0
    diameter = 0
    for s in g.nodes:
        for t, d in shortest_distances(g, s).items():
            if t > s:
                total += d
                pairs += 1
                diameter = max(diameter, d)
    connected = pairs == g.n * (g.n - 1) // 2
    if not connected:
        logger.warning("graph is disconnected; distances cover reachable pairs only")
    degrees = [len(g.adjacency[v]) for v in g.nodes]
    return TopologySummary(
        n=g.n,
        m=g.m,
        mean_degree=2 * g.m / g.n,
        max_degree=max(degrees),
        mean_shortest_distance=total / pairs if pairs else math.nan,
        diameter=diameter,
        connected=connected,
    )
