"""Modularity and deterministic greedy agglomerative community detection."""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator, ClusterMixin

from .graph import Graph, Label


class PartitionError(ValueError):
    pass


@dataclass(frozen=True)
class Partition:
    """Assignment of every node to exactly one community ``1..k``.

    Partitions built by :func:`detect_communities` are canonical (communities
    numbered by ascending smallest member label).  Partitions read with
    :func:`load_partition` keep the numbering of their source so reports line
    up with reference tables; call :meth:`canonical` to renumber.
    """

    assignment: Mapping[Label, int]
    k: int = field(init=False)

    def __post_init__(self):
        used = sorted(set(self.assignment.values()))
        if used != list(range(1, len(used) + 1)):
            raise PartitionError(f"community indices must be 1..k without gaps, got {used}")
        object.__setattr__(self, "assignment", dict(sorted(self.assignment.items())))
        object.__setattr__(self, "k", len(used))

    @classmethod
    def from_communities(cls, communities: Iterable[Iterable[Label]],
                         canonical: bool = True) -> "Partition":
        groups = [sorted(set(c)) for c in communities]
        if any(not c for c in groups):
            raise PartitionError("empty community")
        if canonical:
            groups.sort(key=lambda c: c[0])
        assignment: Dict[Label, int] = {}
        for idx, members in enumerate(groups, start=1):
            for v in members:
                if v in assignment:
                    raise PartitionError(f"node {v} appears in more than one community")
                assignment[v] = idx
        return cls(assignment)

    @property
    def communities(self) -> Tuple[Tuple[Label, ...], ...]:
        """Members of each community; entry ``c - 1`` holds community ``c``."""
        groups: List[List[Label]] = [[] for _ in range(self.k)]
        for v, c in self.assignment.items():
            groups[c - 1].append(v)
        return tuple(tuple(sorted(g)) for g in groups)

    def canonical(self) -> "Partition":
        return Partition.from_communities(self.communities, canonical=True)

    def is_canonical(self) -> bool:
        firsts = [c[0] for c in self.communities]
        return firsts == sorted(firsts)

    def labels(self, nodes: Sequence[Label]) -> np.ndarray:
        return np.array([self.assignment[v] for v in nodes], dtype=np.int64)

    def check_covers(self, g: Graph) -> None:
        missing = [v for v in g.nodes if v not in self.assignment]
        extra = [v for v in self.assignment if v not in g]
        if missing or extra:
            parts = []
            if missing:
                parts.append(f"nodes missing from partition: {missing}")
            if extra:
                parts.append(f"labels not in graph: {extra}")
            raise PartitionError("; ".join(parts))

    def to_text(self) -> str:
        return "".join(
            f"{c}: {', '.join(str(v) for v in members)}\n"
            for c, members in enumerate(self.communities, start=1)
        )

    def to_dict(self) -> dict:
        return {
            "k": self.k,
            "communities": {str(c): list(m) for c, m in enumerate(self.communities, start=1)},
        }


_LINE = re.compile(r"^\s*(\d+)\s*:\s*(.*)$")


def load_partition(text: str, graph: Optional[Graph] = None) -> Partition:
    """Parse ``index: label, label, ...`` lines (commas optional).

    Repeated index lines extend the same community.  With ``graph`` given,
    nodes missing from the partition or unknown to the graph are reported.
    """
    groups: Dict[int, List[Label]] = {}
    owner: Dict[Label, int] = {}
    dupes = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        match = _LINE.match(line)
        if not match:
            raise PartitionError(f"line {lineno}: expected 'index: labels', got {line!r}")
        idx = int(match.group(1))
        try:
            members = [int(tok) for tok in match.group(2).replace(",", " ").split()]
        except ValueError:
            raise PartitionError(f"line {lineno}: non-integer node label") from None
        for v in members:
            if v in owner:
                dupes.append(v)
            owner[v] = idx
        groups.setdefault(idx, []).extend(members)
    if dupes:
        raise PartitionError(f"nodes assigned more than once: {sorted(set(dupes))}")
    if not owner:
        raise PartitionError("partition is empty")
    partition = Partition(owner)
    if graph is not None:
        partition.check_covers(graph)
    return partition


def community_degree(g: Graph, members: Iterable[Label]) -> int:
    """Total degree of the given nodes."""
    return sum(len(g.neighbors(v)) for v in members)


def _edge_split(g: Graph, p: Partition):
    inside = [0] * p.k
    for u, v in g.edges:
        cu, cv = p.assignment[u], p.assignment[v]
        if cu == cv:
            inside[cu - 1] += 1
    return inside


def modularity(g: Graph, p: Partition) -> float:
    """Newman modularity of ``p`` on ``g`` (evaluated exactly, returned as float)."""
    p.check_covers(g)
    if g.m == 0:
        raise ValueError("modularity undefined for a graph without edges")
    inside = _edge_split(g, p)
    degs = [community_degree(g, c) for c in p.communities]
    m = g.m
    num = sum(4 * m * e - d * d for e, d in zip(inside, degs))
    return float(Fraction(num, 4 * m * m))


@dataclass(frozen=True)
class MergeRecord:
    a: Label
    b: Label
    delta_q: float
    q_after: float


@dataclass
class MergeTrace:
    """Merges taken by greedy detection; communities named by smallest member label."""

    initial_q: float
    records: List[MergeRecord] = field(default_factory=list)
    stop_rule: str = "best delta Q < 0"
    tie_rule: str = "max delta Q, then least smaller id, then least partner id"
    candidates: str = "connected pairs only"

    def to_dict(self) -> dict:
        return {
            "initial_q": self.initial_q,
            "stop_rule": self.stop_rule,
            "tie_rule": self.tie_rule,
            "candidates": self.candidates,
            "merges": [
                {"a": r.a, "b": r.b, "delta_q": r.delta_q, "q_after": r.q_after}
                for r in self.records
            ],
        }


def detect_communities(g: Graph, n_communities: Optional[int] = None
                       ) -> Tuple[Partition, MergeTrace]:
    """Greedy agglomeration from singletons by largest modularity gain.

    Only pairs joined by at least one edge are candidates.  Merges with zero
    gain are taken; the loop stops once the best gain is negative.  With
    ``n_communities`` set, merging instead continues (regardless of sign)
    until that many communities remain or no connected pair is left.
    """
    if g.m == 0:
        raise ValueError("community detection needs at least one edge")
    if n_communities is not None and n_communities < 1:
        raise ValueError("n_communities must be positive")
    m = g.m
    scale = 4 * m * m
    # gains are kept as integers scaled by 4m^2 so ties compare exactly
    members: Dict[Label, List[Label]] = {v: [v] for v in g.nodes}
    deg: Dict[Label, int] = {v: len(g.adjacency[v]) for v in g.nodes}
    links: Dict[Label, Dict[Label, int]] = {v: {} for v in g.nodes}
    for u, v in g.edges:
        links[u][v] = links[u].get(v, 0) + 1
        links[v][u] = links[v].get(u, 0) + 1
    qnum = -sum(d * d for d in deg.values())
    trace = MergeTrace(initial_q=qnum / scale)
    if n_communities is not None:
        trace.stop_rule = f"merge until {n_communities} communities remain"

    while len(members) > 1:
        if n_communities is not None and len(members) <= n_communities:
            break
        best = None
        for a in sorted(links):
            for b, l_ab in links[a].items():
                if b <= a:
                    continue
                gain = 4 * m * l_ab - 2 * deg[a] * deg[b]
                key = (-gain, a, b)
                if best is None or key < best:
                    best = key
        if best is None:
            break
        gain, a, b = -best[0], best[1], best[2]
        if n_communities is None and gain < 0:
            break
        # absorb b into a (a < b, so a stays the smallest member label)
        members[a].extend(members.pop(b))
        deg[a] += deg.pop(b)
        for c, l_bc in links.pop(b).items():
            del links[c][b]
            if c != a:
                links[a][c] = links[a].get(c, 0) + l_bc
                links[c][a] = links[c].get(a, 0) + l_bc
        qnum += gain
        trace.records.append(MergeRecord(a, b, gain / scale, qnum / scale))

    return Partition.from_communities(members.values()), trace


class GreedyModularity(ClusterMixin, BaseEstimator):
    """Estimator wrapper around :func:`detect_communities`.

    ``fit`` takes a :class:`~commvul.graph.Graph` (or anything accepted by
    :func:`commvul.validation.check_graph`).  ``labels_`` is aligned with
    ``graph.nodes``.
    """

    def __init__(self, n_communities=None):
        self.n_communities = n_communities

    def fit(self, X, y=None):
        from .validation import check_graph

        graph = check_graph(X)
        self.partition_, self.trace_ = detect_communities(graph, self.n_communities)
        self.modularity_ = modularity(graph, self.partition_)
        self.nodes_ = graph.nodes
        self.labels_ = self.partition_.labels(graph.nodes)
        self.n_communities_ = self.partition_.k
        return self
