import itertools

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from commvul.community import (GreedyModularity, Partition, PartitionError, community_degree,
                               detect_communities, load_partition, modularity)
from commvul.datasets import load_bundled_partition
from commvul.graph import Graph
from oracles import matrix_modularity, random_connected_edges, set_partitions

TWO_TRIANGLES = [(1, 2), (2, 3), (1, 3), (4, 5), (5, 6), (4, 6), (3, 4)]


@st.composite
def small_graphs(draw, max_n=8):
    n = draw(st.integers(3, max_n))
    seed = draw(st.integers(0, 2 ** 32 - 1))
    return random_connected_edges(np.random.default_rng(seed), n)


def test_partition_rejects_gaps():
    with pytest.raises(PartitionError):
        Partition({1: 1, 2: 3})


def test_from_communities_canonical_order():
    p = Partition.from_communities([(5, 6), (1, 2)])
    assert p.communities == ((1, 2), (5, 6))
    assert p.is_canonical()


def test_text_round_trip():
    p = Partition.from_communities([(1, 4), (2, 3, 5)])
    assert load_partition(p.to_text()) == p


class TestModularity:
    def test_single_community_zero(self, karate):
        g, _ = karate
        assert modularity(g, Partition({v: 1 for v in g.nodes})) == pytest.approx(0, abs=1e-15)

    def test_example_network(self, example9):
        g, p = example9
        assert modularity(g, p) == pytest.approx(0.2857, abs=1e-4)

    @given(small_graphs(), st.data())
    def test_matches_matrix_formula(self, edges, data):
        g = Graph.from_edges(edges)
        labels = data.draw(st.lists(st.integers(1, 3), min_size=g.n, max_size=g.n))
        used = sorted(set(labels))
        relabel = {c: i for i, c in enumerate(used, start=1)}
        p = Partition({v: relabel[c] for v, c in zip(g.nodes, labels)})
        expected = matrix_modularity(edges, list(g.nodes), np.array(p.labels(g.nodes)))
        assert modularity(g, p) == pytest.approx(expected, abs=1e-12)

    @given(small_graphs(), st.randoms(use_true_random=False))
    def test_relabel_invariant(self, edges, rnd):
        g = Graph.from_edges(edges)
        p, _ = detect_communities(g)
        order = list(range(1, p.k + 1))
        rnd.shuffle(order)
        shuffled = Partition({v: order[c - 1] for v, c in p.assignment.items()})
        assert modularity(g, shuffled) == modularity(g, p) <= 1


class TestCommunityDegree:
    def test_example_a(self, example9):
        g, _ = example9
        assert community_degree(g, [1, 2]) == 4

    def test_handshake(self, karate):
        g, _ = karate
        assert community_degree(g, g.nodes) == 2 * g.m

    def test_empty(self, karate):
        assert community_degree(karate[0], []) == 0


class TestDetection:
    def test_two_triangles_match_exhaustive_optimum(self):
        g = Graph.from_edges(TWO_TRIANGLES)
        nodes = list(g.nodes)
        best = max(set_partitions(nodes),
                   key=lambda parts: matrix_modularity(
                       TWO_TRIANGLES, nodes,
                       np.array([next(i for i, c in enumerate(parts) if v in c) for v in nodes])))
        found, _ = detect_communities(g)
        assert found.communities == ((1, 2, 3), (4, 5, 6))
        assert sorted(map(sorted, best)) == [[1, 2, 3], [4, 5, 6]]

    def test_example_network_recovers_cliques(self, example9):
        g, p = example9
        found, trace = detect_communities(g)
        assert found == p
        assert modularity(g, found) == pytest.approx(0.2857, abs=1e-4)

    def test_karate_q_and_cut(self, karate):
        g, published = karate
        found, _ = detect_communities(g)
        assert 0.37 <= modularity(g, found) <= 0.39
        cut, trace = detect_communities(g, n_communities=2)
        assert cut.communities == published.canonical().communities
        assert "2 communities" in trace.stop_rule

    @given(small_graphs())
    def test_trace_invariants(self, edges):
        g = Graph.from_edges(edges)
        p, trace = detect_communities(g)
        assert len(trace.records) == g.n - p.k
        qs = [trace.initial_q] + [r.q_after for r in trace.records]
        assert modularity(g, p) == pytest.approx(max(qs), abs=1e-12)
        assert all(r.delta_q >= 0 for r in trace.records)
        assert all(r.a < r.b for r in trace.records)
        assert p.is_canonical()

    @given(small_graphs(), st.randoms(use_true_random=False))
    def test_edge_order_and_labels_invariant(self, edges, rnd):
        shuffled = [(v, u) if rnd.random() < 0.5 else (u, v) for u, v in edges]
        rnd.shuffle(shuffled)
        assert detect_communities(Graph.from_edges(edges))[0] == detect_communities(Graph.from_edges(shuffled))[0]

    @pytest.mark.parametrize("seed", range(25))
    def test_greedy_beats_most_partitions(self, seed):
        rng = np.random.default_rng(seed)
        n = int(rng.integers(4, 9))
        edges = random_connected_edges(rng, n, p_extra=0.25)
        g = Graph.from_edges(edges)
        nodes = list(g.nodes)
        greedy = modularity(g, detect_communities(g)[0])
        qs = []
        for parts in set_partitions(nodes):
            owner = {v: i for i, c in enumerate(parts) for v in c}
            qs.append(matrix_modularity(edges, nodes, np.array([owner[v] for v in nodes])))
        share = np.mean(np.array(qs) <= greedy + 1e-12)
        assert share >= 0.95

    def test_estimator(self, example9):
        g, p = example9
        est = GreedyModularity().fit(g)
        assert est.n_communities_ == 3
        assert list(est.labels_) == [1, 1, 2, 2, 2, 3, 3, 3, 3]
        assert est.get_params() == {"n_communities": None}


class TestLoadPartition:
    def test_karate(self, karate):
        g, _ = karate
        p = load_bundled_partition("karate", g)
        assert p.k == 2
        assert [len(c) for c in p.communities] == [17, 17]

    def test_manzi_table(self):
        p = load_bundled_partition("manzi")
        assert p.k == 7
        assert p.communities[3] == (19, 22, 26)
        assert sorted(p.assignment) == list(range(1, 53))

    def test_italian_table(self):
        p = load_bundled_partition("italian380")
        assert p.k == 10
        assert sorted(p.assignment) == list(range(1, 128))

    def test_duplicate_node(self):
        g = Graph.from_edges([(1, 2)])
        with pytest.raises(PartitionError, match=r"\[2\]"):
            load_partition("1: 1 2\n1: 2", g)

    def test_missing_node(self):
        g = Graph.from_edges([(1, 2), (2, 3)])
        with pytest.raises(PartitionError, match="missing.*3"):
            load_partition("1: 1\n2: 2", g)

    def test_unknown_label(self):
        g = Graph.from_edges([(1, 2)])
        with pytest.raises(PartitionError, match="not in graph"):
            load_partition("1: 1\n2: 2 9", g)

    def test_bad_line(self):
        with pytest.raises(PartitionError, match="line 1"):
            load_partition("one: 1 2")

    def test_published_numbering_kept(self):
        p = load_partition("1: 5 6\n2: 1 2")
        assert p.communities == ((5, 6), (1, 2))
        assert not p.is_canonical()
        assert p.canonical().communities == ((1, 2), (5, 6))

    def test_repeated_index_extends(self):
        assert load_partition("1: 1\n2: 3\n1: 2").communities == ((1, 2), (3,))


def test_exhaustive_partition_count():
    # Bell numbers, guards the oracle itself
    assert [sum(1 for _ in set_partitions(range(n))) for n in range(1, 7)] == [1, 2, 5, 15, 52, 203]
    assert len(list(itertools.islice(set_partitions(range(8)), 5000))) == 4140
