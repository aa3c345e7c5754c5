import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from commvul.community import Partition
from commvul.entropy import (community_profile, q_index, relative_entropy, similarity_matrix,
                             tsallis_structure_entropy, tsallis_term)
from commvul.graph import Graph, betweenness, degree_distribution
from commvul.vulnerability import Conventions, complexity, normalize_columns
from oracles import shannon


def _hand_kl(a, b):
    total = 0.0
    for x, y in zip(a, b):
        total += x * math.log(x / y)
    return total


class TestQIndex:
    def test_complete_graph(self):
        g = Graph.from_edges([(1, 2), (1, 3), (1, 4), (2, 3), (2, 4), (3, 4)])
        assert set(q_index(betweenness(g)).values()) == {1.0}

    def test_path(self):
        q = q_index(betweenness(Graph.from_edges([(1, 2), (2, 3)])))
        assert q == {1: 2.0, 2: 1.0, 3: 2.0}

    def test_karate_hub_is_one(self, karate):
        b = betweenness(karate[0])
        q = q_index(b)
        hub = max(b, key=b.get)
        assert q[hub] == 1.0
        assert min(q.values()) == 1.0

    def test_rejects_negative(self):
        with pytest.raises(ValueError):
            q_index({1: -1.0})


class TestTsallis:
    def test_shannon_limit_for_unit_q(self, example9):
        g, p = example9
        clique = g.subgraph(p.communities[2])
        q = {v: 1.0 for v in clique.nodes}
        probs = degree_distribution(clique).values()
        assert tsallis_structure_entropy(clique, clique.nodes, q) == pytest.approx(shannon(probs), abs=1e-12)

    @given(st.floats(1e-6, 1.0), st.floats(-1e-11, 1e-11))
    def test_continuity_at_one(self, p, dq):
        assert tsallis_term(p, 1.0 + dq) == pytest.approx(-p * math.log(p), abs=1e-8)

    @given(st.floats(1e-4, 1.0), st.floats(1e-7, 1e-5))
    def test_smooth_approach(self, p, dq):
        # just outside the Shannon switch the closed form is still close
        assert tsallis_term(p, 1.0 + dq) == pytest.approx(-p * math.log(p), abs=1e-3)

    def test_zero_mass(self):
        assert tsallis_term(0.0, 3.0) == 0.0

    @given(st.floats(1e-3, 1.0), st.floats(1.0, 30.0))
    def test_nonnegative(self, p, q):
        assert tsallis_term(p, q) >= -1e-15

    def test_example_network_column(self, example9):
        g, p = example9
        t = complexity(g, p, Conventions())
        assert normalize_columns(t[:, None])[:, 0] == pytest.approx([0.5, 0.7924, 1.0], abs=1e-4)


class TestProfiles:
    def test_two_equal_nodes(self):
        g = Graph.from_edges([(1, 2)])
        prof = community_profile(g, [1, 2], 4)
        assert list(prof.values) == [0.5, 0.5, 0, 0]

    def test_too_short(self):
        g = Graph.from_edges([(1, 2), (2, 3)])
        with pytest.raises(ValueError, match="shorter"):
            community_profile(g, [1, 2, 3], 2)

    def test_example_community_b(self, example9):
        g, p = example9
        prof = community_profile(g, p.communities[1], 4)
        assert prof.sorted_values.shape == (4,)
        assert np.count_nonzero(prof.sorted_values == 0) == 1
        assert np.all(np.diff(prof.sorted_values) <= 0)
        assert prof.sorted_values.sum() == pytest.approx(1)


class TestRelativeEntropy:
    def _pair(self):
        g = Graph.from_edges([(1, 2)])
        a = community_profile(g, [1, 2], 2)
        # hub of degree 3 next to a leaf: masses (3/4, 1/4)
        h = Graph.from_edges([(1, 2), (1, 3), (1, 4), (5, 6)])
        b = community_profile(h, [1, 2], 2)
        return a, b

    def test_profiles_are_the_intended_vectors(self):
        a, b = self._pair()
        assert list(a.sorted_values) == [0.5, 0.5]
        assert list(b.sorted_values) == [0.75, 0.25]

    def test_forward_value(self):
        a, b = self._pair()
        assert relative_entropy(a, b) == pytest.approx(_hand_kl([0.5, 0.5], [0.75, 0.25]), abs=1e-12)
        assert relative_entropy(a, b) == pytest.approx(0.1438, abs=1e-4)

    def test_asymmetry(self):
        a, b = self._pair()
        back = relative_entropy(b, a)
        assert back == pytest.approx(_hand_kl([0.75, 0.25], [0.5, 0.5]), abs=1e-12)
        assert back == pytest.approx(0.1308, abs=1e-4)
        assert back != relative_entropy(a, b)

    def test_identical_zero(self):
        a, _ = self._pair()
        assert relative_entropy(a, a) == 0.0


class TestSimilarity:
    def test_karate_degenerate(self, karate):
        g, p = karate
        for intra in (False, True):
            sim = similarity_matrix(g, p, intra=intra)
            assert sim.degenerate
            assert np.all(sim.s == 1.0)

    def test_max_pair_is_zero(self, five):
        g, p = five
        sim = similarity_matrix(g, p)
        i, j = np.unravel_index(np.argmax(sim.r), sim.r.shape)
        assert sim.s[i, j] == 0.0 and sim.s[j, i] == 0.0

    @pytest.mark.parametrize("intra", [False, True])
    def test_structure(self, five, intra):
        g, p = five
        sim = similarity_matrix(g, p, intra=intra)
        assert np.allclose(sim.r, sim.r.T)
        assert np.all(sim.r >= 0)
        assert np.all(np.diag(sim.s) == 1.0)
        assert np.all((sim.s >= 0) & (sim.s <= 1))

    def test_single_community_error(self, karate):
        g, _ = karate
        with pytest.raises(ValueError):
            similarity_matrix(g, Partition({v: 1 for v in g.nodes}))
