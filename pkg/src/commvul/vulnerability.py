"""Community features, classical and entropy-based vulnerability, rankings."""
from __future__ import annotations

import logging
import math
from dataclasses import asdict, dataclass, field
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils.validation import check_is_fitted

from .community import Partition, detect_communities
from .entropy import SimilarityMatrix, q_index, similarity_matrix, tsallis_structure_entropy
from .graph import Graph, Label, betweenness

logger = logging.getLogger(__name__)

COLUMNS = ("S", "T", "Din", "Dout")
DEGREE_SCOPES = ("intra", "global")
AGGREGATES = ("divergence", "similarity")


@dataclass(frozen=True)
class Conventions:
    """Modelling choices that admit more than one reading.

    degree_scope
        ``"intra"``: complexity and degree profiles are computed inside each
        community (degrees, betweenness and its maximum taken on the induced
        subgraph).  ``"global"``: network-wide degrees and betweenness.
    ordered_pairs
        Count each (s, e) pair in both orientations for betweenness.
    aggregate
        ``"divergence"``: a community's external score is the sum of its
        symmetrised divergences to the others, scaled by the largest one.
        ``"similarity"``: the sum of the similarities ``1 - r/max r``.
    """

    degree_scope: str = "intra"
    ordered_pairs: bool = False
    aggregate: str = "divergence"

    def __post_init__(self):
        if self.degree_scope not in DEGREE_SCOPES:
            raise ValueError(f"degree_scope must be one of {DEGREE_SCOPES}")
        if self.aggregate not in AGGREGATES:
            raise ValueError(f"aggregate must be one of {AGGREGATES}")

    @property
    def intra(self) -> bool:
        return self.degree_scope == "intra"

    def to_dict(self) -> dict:
        return asdict(self)


@dataclass(frozen=True)
class WeightVector:
    alpha: float = 1.0
    beta: float = 1.0
    lambda_: float = 1.0
    eta: float = 1.0

    def __post_init__(self):
        for name, value in asdict(self).items():
            if not math.isfinite(value) or value < 0:
                raise ValueError(f"weight {name} must be a nonnegative finite number")

    def as_array(self) -> np.ndarray:
        return np.array([self.alpha, self.beta, self.lambda_, self.eta], dtype=float)

    def to_dict(self) -> dict:
        return asdict(self)


def internal_edges(g: Graph, members: Iterable[Label]) -> int:
    inside = set(members)
    return sum(1 for u, v in g.edges if u in inside and v in inside)


def external_edges(g: Graph, members: Iterable[Label]) -> int:
    inside = set(members)
    return sum(1 for u, v in g.edges if (u in inside) != (v in inside))


def complexity(g: Graph, p: Partition, conventions: Conventions = Conventions(),
               warnings: Optional[List[str]] = None) -> np.ndarray:
    """Raw Tsallis structure entropy of every community."""
    out = np.zeros(p.k)
    if not conventions.intra:
        q = q_index(betweenness(g, ordered_pairs=conventions.ordered_pairs))
        for c, members in enumerate(p.communities):
            out[c] = tsallis_structure_entropy(g, members, q)
        return out
    for c, members in enumerate(p.communities):
        sub = g.subgraph(members)
        if sub.m == 0:
            if warnings is not None:
                warnings.append(f"community {c + 1} has no internal edges; complexity set to 0")
            continue
        q = q_index(betweenness(sub, ordered_pairs=conventions.ordered_pairs))
        out[c] = tsallis_structure_entropy(sub, members, q)
    return out


@dataclass
class CommunityFeatures:
    """Raw and max-normalized (S, T, Din, Dout) per community.

    Row ``c - 1`` belongs to community ``c``.
    """

    raw: np.ndarray
    normalized: np.ndarray
    sizes: Tuple[int, ...] = ()
    aggregate: str = "divergence"

    @property
    def k(self) -> int:
        return self.raw.shape[0]

    def column(self, name: str, normalized: bool = True) -> np.ndarray:
        data = self.normalized if normalized else self.raw
        return data[:, COLUMNS.index(name)]

    @property
    def maxima(self) -> Dict[str, float]:
        return {name: float(v) for name, v in zip(COLUMNS, self.raw.max(axis=0))}

    def to_dict(self) -> dict:
        return {
            "columns": list(COLUMNS),
            "aggregate": self.aggregate,
            "raw": self.raw.tolist(),
            "normalized": self.normalized.tolist(),
            "raw_maxima": self.maxima,
            "sizes": list(self.sizes),
        }


def normalize_columns(raw: np.ndarray) -> np.ndarray:
    raw = np.asarray(raw, dtype=float)
    top = raw.max(axis=0)
    for name, value in zip(COLUMNS, top):
        if not value > 0:
            raise ValueError(f"feature column {name} has maximum {value}; cannot normalize")
    return raw / top


def external_score(sim: SimilarityMatrix, aggregate: str = "divergence") -> np.ndarray:
    """Per-community external score summed over the other communities."""
    k = sim.r.shape[0]
    off = ~np.eye(k, dtype=bool)
    if aggregate == "similarity":
        return np.where(off, sim.s, 0.0).sum(axis=1)
    top = sim.r[off].max()
    if top == 0:
        return np.zeros(k)
    return np.where(off, sim.r / top, 0.0).sum(axis=1)


def assemble_features(g: Graph, p: Partition, sim: SimilarityMatrix,
                      t_raw: Sequence[float], aggregate: str = "divergence") -> CommunityFeatures:
    if p.k < 2:
        raise ValueError("vulnerability needs at least two communities")
    comms = p.communities
    raw = np.column_stack([
        external_score(sim, aggregate),
        np.asarray(t_raw, dtype=float),
        [internal_edges(g, c) for c in comms],
        [external_edges(g, c) for c in comms],
    ])
    return CommunityFeatures(raw, normalize_columns(raw), tuple(len(c) for c in comms), aggregate)


def community_features(g: Graph, p: Partition, conventions: Conventions = Conventions(),
                       warnings: Optional[List[str]] = None) -> Tuple[CommunityFeatures, SimilarityMatrix]:
    sim = similarity_matrix(g, p, intra=conventions.intra)
    t_raw = complexity(g, p, conventions, warnings)
    return assemble_features(g, p, sim, t_raw, conventions.aggregate), sim


def vulnerability_scores(normalized: np.ndarray, weights: np.ndarray) -> np.ndarray:
    """``S**a / (Dout**b * Din**l * T**e)`` for every weight row and community.

    ``normalized`` is (k, 4) in (S, T, Din, Dout) order; ``weights`` is (4,)
    or (n, 4) in (alpha, beta, lambda, eta) order.  Returns (k,) or (n, k).
    """
    x = np.asarray(normalized, dtype=float)
    w = np.asarray(weights, dtype=float)
    single = w.ndim == 1
    w = np.atleast_2d(w)
    s, t, din, dout = (x[:, i][None, :] for i in range(4))
    a, b, l_, e = (w[:, i][:, None] for i in range(4))
    with np.errstate(divide="ignore", invalid="ignore"):
        num = np.power(s, a)
        den = np.power(dout, b) * np.power(din, l_) * np.power(t, e)
        out = np.where(den == 0, np.inf, num / np.where(den == 0, 1.0, den))
    return out[0] if single else out


@dataclass
class VulnerabilityReport:
    index: Tuple[int, ...]
    vul: np.ndarray
    rv: np.ndarray
    v: np.ndarray
    r: np.ndarray
    weights: WeightVector
    features: CommunityFeatures
    order: Tuple[int, ...] = ()
    ties: Tuple[Tuple[int, ...], ...] = ()
    warnings: List[str] = field(default_factory=list)

    @property
    def external_links(self) -> np.ndarray:
        return self.features.column("Dout", normalized=False)

    def rows(self) -> List[dict]:
        """One record per community: S, T, Din, Dout, V, Vul, RV, v, R."""
        out = []
        norm = self.features.normalized
        for i, c in enumerate(self.index):
            out.append({
                "community": c,
                "S": float(norm[i, 0]),
                "T": float(norm[i, 1]),
                "Din": float(norm[i, 2]),
                "Dout": float(norm[i, 3]),
                "V": int(self.external_links[i]),
                "Vul": float(self.vul[i]),
                "RV": float(self.rv[i]),
                "v": float(self.v[i]),
                "R": float(self.r[i]),
            })
        return out

    def to_dict(self) -> dict:
        return {
            "weights": self.weights.to_dict(),
            "features": self.features.to_dict(),
            "rows": self.rows(),
            "order_most_vulnerable_first": list(self.order),
            "ties": [list(t) for t in self.ties],
            "chain_proposed": vulnerability_chain(self.rv, self.index)[0],
            "chain_classical": vulnerability_chain(self.r, self.index)[0],
            "warnings": list(self.warnings),
        }


def classical_vulnerability(features: CommunityFeatures) -> Tuple[np.ndarray, np.ndarray]:
    """``v = 1 / external link count`` and its ratio to the minimum."""
    links = features.column("Dout", normalized=False)
    if np.any(links <= 0):
        bad = [i + 1 for i in np.flatnonzero(links <= 0)]
        raise ValueError(f"communities {bad} have no external links; classical vulnerability undefined")
    v = 1.0 / links
    return v, v / v.min()


def _relative(values: np.ndarray) -> np.ndarray:
    finite = values[np.isfinite(values)]
    positive = finite[finite > 0]
    if positive.size == 0:
        return np.full_like(values, np.nan)
    return values / positive.min()


def proposed_vulnerability(features: CommunityFeatures, w: WeightVector = WeightVector(),
                           index: Optional[Sequence[int]] = None) -> VulnerabilityReport:
    norm = features.normalized
    k = features.k
    index = tuple(index) if index is not None else tuple(range(1, k + 1))
    warnings: List[str] = []
    vul = vulnerability_scores(norm, w.as_array())
    weights = w.as_array()
    for i in range(k):
        den_cols = [(3, 1), (2, 2), (1, 3)]  # (column, weight position) of the denominator
        if any(norm[i, col] == 0 and weights[pos] > 0 for col, pos in den_cols):
            warnings.append(f"community {index[i]}: zero denominator feature, vulnerability unbounded")
            vul[i] = np.inf
        elif norm[i, 0] == 0 and weights[0] > 0:
            warnings.append(f"community {index[i]}: zero external score, vulnerability 0")
    rv = _relative(vul)
    v, r = classical_vulnerability(features)
    order, ties = rank_order(rv, index)
    return VulnerabilityReport(index, vul, rv, v, r, w, features, order, ties, warnings)


def _groups(values: Sequence[float], index: Sequence[int], rel_tol: float):
    """Ascending groups of (community) whose values agree within ``rel_tol``."""
    pairs = sorted(zip(values, index), key=lambda t: (t[0], t[1]))
    groups: List[List[Tuple[float, int]]] = []
    for value, c in pairs:
        if groups and (groups[-1][0][0] == value or math.isclose(groups[-1][0][0], value, rel_tol=rel_tol)):
            groups[-1].append((value, c))
        else:
            groups.append([(value, c)])
    return [[c for _, c in sorted(g, key=lambda t: t[1])] for g in groups]


def rank_order(values: Sequence[float], index: Sequence[int], rel_tol: float = 1e-9):
    """Most-vulnerable-first permutation; ties broken by ascending community index."""
    groups = _groups(values, index, rel_tol)
    order = tuple(c for g in reversed(groups) for c in g)
    ties = tuple(tuple(g) for g in groups if len(g) > 1)
    return order, ties


def vulnerability_chain(values: Sequence[float], index: Optional[Sequence[int]] = None,
                        rel_tol: float = 1e-9) -> Tuple[str, List[List[int]]]:
    """Ascending chain such as ``"5 < 9 < 2 = 4 = 6 < 10"`` plus its groups."""
    values = list(values)
    index = list(index) if index is not None else list(range(1, len(values) + 1))
    groups = _groups(values, index, rel_tol)
    chain = " < ".join(" = ".join(str(c) for c in g) for g in groups)
    return chain, groups


def rank_report(report: VulnerabilityReport) -> dict:
    chain, groups = vulnerability_chain(report.rv, report.index)
    classical, cgroups = vulnerability_chain(report.r, report.index)
    return {
        "proposed": chain,
        "proposed_groups": groups,
        "classical": classical,
        "classical_groups": cgroups,
        "order_most_vulnerable_first": list(report.order),
    }


def analyze(g: Graph, partition: Optional[Partition] = None, weights: WeightVector = WeightVector(),
            conventions: Conventions = Conventions()) -> VulnerabilityReport:
    """Full pipeline: detect (if needed), assemble features, score."""
    if partition is None:
        partition, _ = detect_communities(g)
    partition.check_covers(g)
    warnings: List[str] = []
    features, _ = community_features(g, partition, conventions, warnings)
    report = proposed_vulnerability(features, weights)
    report.warnings[:0] = warnings
    return report


class CommunityVulnerability(BaseEstimator):
    """Entropy-based vulnerability of the communities of one graph.

    ``fit(graph, partition=None)`` detects communities when no partition is
    given, assembles the four normalized features and scores them with the
    configured weights.  ``predict(weights)`` rescores the fitted features
    for other weight vectors without touching the graph again.
    """

    def __init__(self, alpha=1.0, beta=1.0, lambda_=1.0, eta=1.0, degree_scope="intra",
                 ordered_pairs=False, aggregate="divergence", n_communities=None):
        self.alpha = alpha
        self.beta = beta
        self.lambda_ = lambda_
        self.eta = eta
        self.degree_scope = degree_scope
        self.ordered_pairs = ordered_pairs
        self.aggregate = aggregate
        self.n_communities = n_communities

    @property
    def conventions_(self) -> Conventions:
        return Conventions(self.degree_scope, self.ordered_pairs, self.aggregate)

    def fit(self, X, y=None):
        from .validation import check_graph, check_partition

        graph = check_graph(X)
        partition = check_partition(y, graph)
        self.partition_source_ = "loaded" if partition is not None else "detected"
        if partition is None:
            partition, self.trace_ = detect_communities(graph, self.n_communities)
        weights = WeightVector(self.alpha, self.beta, self.lambda_, self.eta)
        warnings: List[str] = []
        self.features_, self.similarity_ = community_features(graph, partition, self.conventions_, warnings)
        self.report_ = proposed_vulnerability(self.features_, weights)
        self.report_.warnings[:0] = warnings
        self.graph_ = graph
        self.partition_ = partition
        return self

    def transform(self, X=None):
        """Normalized (S, T, Din, Dout) matrix of the fitted communities."""
        check_is_fitted(self, "features_")
        return self.features_.normalized.copy()

    def predict(self, X=None):
        """Vulnerability per community; ``X`` may hold (n, 4) weight rows."""
        check_is_fitted(self, "features_")
        if X is None:
            return self.report_.vul.copy()
        from .validation import check_weights

        return vulnerability_scores(self.features_.normalized, check_weights(X))
