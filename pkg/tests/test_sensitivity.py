import numpy as np
import pytest
from sklearn.base import clone

from commvul.sensitivity import (DegenerateRangeError, SamplePlan, SobolAnalyzer,
                                 analytic_variance_check, sample_weights, sobol_indices)
from commvul.vulnerability import CommunityVulnerability, community_features

SMALL = SamplePlan(n_samples=2000, n_bootstrap=50)


@pytest.fixture(scope="module")
def five_report(five):
    feats, _ = community_features(*five)
    return feats, sobol_indices(feats, SamplePlan())


class TestSampling:
    def test_deterministic(self):
        a, b = sample_weights(SMALL), sample_weights(SMALL)
        assert np.array_equal(a.A, b.A) and np.array_equal(a.AB, b.AB)

    def test_seed_changes_draws(self):
        other = SamplePlan(n_samples=2000, seed=1)
        assert not np.array_equal(sample_weights(SMALL).A, sample_weights(other).A)

    def test_cross_matrices(self):
        m = sample_weights(SMALL)
        for i in range(4):
            keep = [j for j in range(4) if j != i]
            assert np.array_equal(m.AB[i][:, i], m.B[:, i])
            assert np.array_equal(m.AB[i][:, keep], m.A[:, keep])

    def test_range_and_evaluation_count(self):
        plan = SamplePlan()
        m = sample_weights(plan)
        assert m.A.shape == m.B.shape == (10000, 4)
        assert m.A.min() >= 0.2 and m.A.max() <= 5.0
        evaluations = m.A.shape[0] + m.B.shape[0] + m.AB.shape[0] * m.AB.shape[1]
        assert evaluations == 60000

    def test_quasi_random_option(self):
        m = sample_weights(SamplePlan(n_samples=1024, quasi_random=True))
        assert m.A.min() >= 0.2 and m.A.max() <= 5.0

    def test_unit_range_constant(self):
        m = sample_weights(SamplePlan.uniform(1.0, 1.0, n_samples=100))
        assert np.all(m.A == 1.0)

    @pytest.mark.parametrize("kwargs", [
        {"n_samples": 10}, {"ranges": ((0.0, 1.0),) * 4}, {"ranges": ((2.0, 1.0),) * 4},
        {"estimator": "sobol1993"}, {"seed": -1},
    ])
    def test_invalid_plans(self, kwargs):
        with pytest.raises(ValueError):
            SamplePlan(**kwargs)


class TestIndices:
    def test_degenerate_range_error(self, example9):
        feats, _ = community_features(*example9)
        with pytest.raises(DegenerateRangeError):
            sobol_indices(feats, SamplePlan.uniform(1.0, 1.0, n_samples=100))

    def test_bit_identical(self, example9):
        feats, _ = community_features(*example9)
        a, b = sobol_indices(feats, SMALL), sobol_indices(feats, SMALL)
        assert np.array_equal(a.si, b.si) and np.array_equal(a.st_halfwidth, b.st_halfwidth)

    def test_exact_zeros(self, five_report):
        feats, report = five_report
        ones = feats.normalized == 1.0
        # factor j acts on column (S, Dout, Din, T)[j]
        acting = ones[:, [0, 3, 2, 1]]
        assert acting.any()
        assert np.all(report.si[acting] == 0.0)
        assert np.all(report.st[acting] == 0.0)
        assert not np.any(np.signbit(report.si[acting]))

    def test_first_order_below_total(self, five_report):
        _, report = five_report
        assert np.all(report.si <= report.st + report.epsilon)

    def test_sum_below_one(self, five_report):
        _, report = five_report
        assert np.all(report.si.sum(axis=1) <= 1 + report.epsilon.max(axis=1))

    def test_clamped_but_raw_kept(self, five_report):
        _, report = five_report
        assert np.all(report.si >= -report.epsilon) and np.all(report.si <= 1 + report.epsilon)
        assert report.si_raw.shape == report.si.shape
        assert report.to_dict()["evaluations_per_community"] == 60000

    def test_all_ones_degenerate(self):
        report = sobol_indices(np.ones((1, 4)), SMALL)
        assert report.degenerate == (1,)
        assert np.all(report.si == 0) and np.all(report.st == 0)
        assert report.warnings

    def test_nonpositive_features_rejected(self):
        with pytest.raises(ValueError):
            sobol_indices(np.array([[1.0, 0.0, 1.0, 1.0]]), SMALL)

    @pytest.mark.parametrize("column,factor", [("S", 0), ("Din", 2), ("Dout", 1), ("T", 3)])
    def test_single_factor_model(self, column, factor):
        check = analytic_variance_check(0.5, column)
        assert check["exact"][factor] == 1.0
        assert check["si"][factor] == pytest.approx(1.0, abs=0.02)
        others = [j for j in range(4) if j != factor]
        assert np.all(np.abs(check["si"][others]) <= 0.02)
        assert check["max_abs_error"] <= 0.02

    def test_single_factor_all_ones(self):
        assert analytic_variance_check(1.0, "S", SMALL)["degenerate"]

    def test_alternative_estimator_agrees(self):
        a = analytic_variance_check(0.5, "S", SamplePlan(estimator="saltelli2010"))
        assert a["si"][0] == pytest.approx(1.0, abs=0.05)


class TestAnalyzer:
    def test_from_fitted_vulnerability(self, example9):
        vul = CommunityVulnerability().fit(*example9)
        an = SobolAnalyzer(n_samples=2000, n_bootstrap=50).fit(vul)
        assert an.transform().shape == (3, 8)
        assert np.array_equal(an.transform()[:, 0::2], an.first_order_)

    def test_clone(self):
        an = SobolAnalyzer(seed=4, low=0.5)
        assert clone(an).get_params() == an.get_params()
