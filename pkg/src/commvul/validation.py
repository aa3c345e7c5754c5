"""Input coercion shared by the estimators and the CLI."""
from __future__ import annotations

from pathlib import Path
from typing import Optional

import numpy as np

from .community import Partition, load_partition
from .graph import Graph, load_adjacency_csv, load_edge_list


def check_graph(X) -> Graph:
    """Coerce ``X`` to a :class:`Graph`.

    Accepts a Graph, a square 0/1 array (labels 1..n), an iterable of label
    pairs, or a path to an edge list (``.csv`` is read as an adjacency matrix).
    """
    if isinstance(X, Graph):
        return X
    if isinstance(X, (str, Path)):
        path = Path(X)
        text = path.read_text(encoding="utf-8")
        if path.suffix.lower() == ".csv":
            return load_adjacency_csv(text)
        return load_edge_list(text).graph
    if isinstance(X, np.ndarray):
        if X.ndim != 2 or X.shape[0] != X.shape[1]:
            raise ValueError(f"adjacency array must be square, got shape {X.shape}")
        text = "\n".join(",".join(str(int(v)) for v in row) for row in X)
        return load_adjacency_csv(text)
    try:
        pairs = [tuple(e) for e in X]
    except TypeError:
        raise TypeError(f"cannot interpret {type(X).__name__} as a graph") from None
    if not pairs or any(len(e) != 2 for e in pairs):
        raise ValueError("expected a non-empty iterable of (u, v) pairs")
    return Graph.from_edges(pairs)


def check_partition(p, graph: Graph) -> Optional[Partition]:
    """Coerce ``p`` (Partition, mapping, label array aligned with graph.nodes, or path)."""
    if p is None:
        return None
    if isinstance(p, Partition):
        partition = p
    elif isinstance(p, (str, Path)):
        partition = load_partition(Path(p).read_text(encoding="utf-8"))
    elif isinstance(p, dict):
        partition = Partition({int(k): int(v) for k, v in p.items()})
    else:
        labels = np.asarray(p)
        if labels.shape != (graph.n,):
            raise ValueError(f"label array must have shape ({graph.n},), got {labels.shape}")
        partition = Partition({v: int(c) for v, c in zip(graph.nodes, labels)})
    partition.check_covers(graph)
    return partition


def check_weights(weights, allow_zero: bool = True) -> np.ndarray:
    """Validate an (alpha, beta, lambda, eta) vector or an (n, 4) matrix of them."""
    w = np.asarray(weights, dtype=float)
    if w.shape[-1:] != (4,) or w.ndim > 2:
        raise ValueError(f"weights must have trailing dimension 4, got shape {w.shape}")
    if not np.all(np.isfinite(w)):
        raise ValueError("weights must be finite")
    if np.any(w < 0) or (not allow_zero and np.any(w == 0)):
        raise ValueError("weights must be positive (zeros only for the documented degenerations)")
    return w
