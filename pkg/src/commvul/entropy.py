"""Betweenness-driven Tsallis complexity and relative-entropy community similarity."""
from __future__ import annotations

import itertools
import logging
import math
from dataclasses import dataclass
from typing import Dict, Iterable, Mapping, Sequence

import numpy as np

from .community import Partition
from .graph import Graph, Label, degree_distribution

logger = logging.getLogger(__name__)

SHANNON_TOL = 1e-9


def q_index(betw: Mapping[Label, float]) -> Dict[Label, float]:
    """Entropic index per node: ``1 + (max betweenness - own betweenness)``."""
    if not betw:
        raise ValueError("empty betweenness map")
    values = list(betw.values())
    if min(values) < 0:
        raise ValueError("betweenness must be nonnegative")
    top = max(values)
    return {v: 1.0 + (top - float(b)) for v, b in betw.items()}


def tsallis_term(p: float, q: float) -> float:
    """``(p**q - p) / (1 - q)``, replaced by ``-p ln p`` when q is within 1e-9 of 1."""
    if p == 0:
        return 0.0
    if abs(1.0 - q) < SHANNON_TOL:
        return -p * math.log(p)
    return (p ** q - p) / (1.0 - q)


def tsallis_structure_entropy(g: Graph, members: Iterable[Label],
                              q: Mapping[Label, float]) -> float:
    """Sum of Tsallis terms over ``members``.

    ``p`` is the degree distribution of the whole of ``g``; pass a community
    subgraph as ``g`` to get the within-community variant.
    """
    members = list(members)
    if not members:
        raise ValueError("community has no members")
    p = degree_distribution(g)
    zero = [v for v in members if p[v] == 0]
    if zero:
        logger.warning("isolated member(s) %s contribute 0 to the complexity", zero)
    return math.fsum(tsallis_term(p[v], q[v]) for v in members)


@dataclass(frozen=True)
class CommunityProfile:
    """Degree masses of one community, zero-padded to a common length."""

    values: np.ndarray
    sorted_values: np.ndarray
    size: int


def community_profile(g: Graph, members: Sequence[Label], s: int,
                      intra: bool = False) -> CommunityProfile:
    """Degree-proportional probability vector of length ``s``.

    ``intra=False`` uses each member's degree in the full network,
    ``intra=True`` its degree inside the community.
    """
    members = list(members)
    if not members:
        raise ValueError("community has no members")
    if s < len(members):
        raise ValueError(f"profile length {s} is shorter than community size {len(members)}")
    if intra:
        inside = set(members)
        degs = [sum(1 for w in g.neighbors(v) if w in inside) for v in members]
    else:
        degs = [len(g.neighbors(v)) for v in members]
    total = sum(degs)
    if total == 0:
        raise ValueError(f"community {members[:5]}... has zero total degree; profile undefined")
    values = np.zeros(s)
    values[: len(members)] = np.asarray(degs, dtype=float) / total
    return CommunityProfile(values, -np.sort(-values), len(members))


def relative_entropy(a: CommunityProfile, b: CommunityProfile) -> float:
    """Kullback-Leibler sum of the descending profiles over the shorter support."""
    n = min(a.size, b.size)
    pa, pb = a.sorted_values[:n], b.sorted_values[:n]
    if np.any(pa == 0) or np.any(pb == 0):
        raise ValueError("zero mass inside the compared support (zero-degree member)")
    return math.fsum(pa * np.log(pa / pb))


@dataclass(frozen=True)
class SimilarityMatrix:
    """Symmetrised divergence ``r`` and the derived similarity ``s``."""

    r: np.ndarray
    s: np.ndarray
    degenerate: bool = False

    def to_dict(self) -> dict:
        return {"r": self.r.tolist(), "s": self.s.tolist(), "degenerate": self.degenerate}


def divergence_matrix(profiles: Sequence[CommunityProfile]) -> np.ndarray:
    k = len(profiles)
    r = np.zeros((k, k))
    for i, j in itertools.combinations(range(k), 2):
        r[i, j] = r[j, i] = (relative_entropy(profiles[i], profiles[j])
                             + relative_entropy(profiles[j], profiles[i]))
    return r


def similarity_matrix(g: Graph, p: Partition, intra: bool = False) -> SimilarityMatrix:
    """Pairwise community similarity ``1 - r_ij / max r``.

    When every off-diagonal divergence is equal (always the case for two
    communities) the ratio carries no information and all similarities are 1.
    """
    if p.k < 2:
        raise ValueError("similarity needs at least two communities")
    comms = p.communities
    s_len = max(len(c) for c in comms)
    profiles = [community_profile(g, c, s_len, intra=intra) for c in comms]
    r = divergence_matrix(profiles)
    off = r[~np.eye(p.k, dtype=bool)]
    top = off.max()
    if np.allclose(off, off[0], rtol=1e-12, atol=1e-15):
        sim = np.ones_like(r)
        degenerate = True
    else:
        sim = 1.0 - r / top
        degenerate = False
    np.fill_diagonal(sim, 1.0)
    return SimilarityMatrix(r, sim, degenerate)
