import math

import numpy as np
import pytest

from infoexplain import (
    DimensionTooLarge,
    GaussianModel,
    InvalidFloor,
    analytic_moments,
    conditional_mi,
    conditional_variance,
    empirical_moments,
    mi_table,
    mi_table_rows,
    random_gaussian_model,
    sample,
)
from conftest import schur_conditional_variance

HALF_LN_2 = 0.34657359027997264  # frozen: 0.5 * ln(2)


class TestConditionalVariance:
    def test_empty_support_independent_summary(self, model_i3):
        # u = x3 carries nothing about yhat = x1 + x2
        assert conditional_variance(analytic_moments(model_i3), ()) == pytest.approx(2.0)

    def test_single_feature(self, model_i3):
        # oracle: explicit Schur complement on the 5x5 analytic matrix,
        # conditioning set (u, x1); frozen value 1.0
        moments = analytic_moments(model_i3)
        oracle = schur_conditional_variance(moments.sigma, target=3,
                                            conditioning=[4, 0])
        assert oracle == pytest.approx(1.0, abs=1e-12)
        assert conditional_variance(moments, (1,)) == pytest.approx(1.0, abs=1e-12)

    def test_summary_determines_prediction(self, model_redundant):
        moments = analytic_moments(model_redundant)
        for support in [(), (1,), (1, 2), (1, 2, 3)]:
            assert conditional_variance(moments, support) == pytest.approx(0.0, abs=1e-12)

    def test_matches_schur_oracle_on_random_models(self):
        for seed in range(10):
            moments = analytic_moments(random_gaussian_model(5, seed=seed))
            for support in [(), (2,), (1, 4), (1, 2, 5)]:
                cond = [6] + [i - 1 for i in support]
                oracle = schur_conditional_variance(moments.sigma, 5, cond)
                got = conditional_variance(moments, support)
                assert got == pytest.approx(oracle, abs=1e-9)

    def test_nonnegative_always(self):
        for seed in range(10):
            moments = analytic_moments(random_gaussian_model(4, seed=seed))
            for support in [(), (1,), (1, 2, 3, 4)]:
                assert conditional_variance(moments, support) >= 0.0


class TestConditionalMi:
    def test_empty_support_is_zero(self, model_i3):
        mi = conditional_mi(analytic_moments(model_i3), ())
        assert mi.nats == 0.0

    def test_single_feature_half_ln2(self, model_i3):
        # oracle: variance ratio 2.0 / 1.0 from the Schur examples above
        mi = conditional_mi(analytic_moments(model_i3), (1,))
        assert mi.nats == pytest.approx(HALF_LN_2, abs=1e-12)
        assert mi.numerator_var == pytest.approx(2.0)
        assert mi.denominator_var == pytest.approx(1.0)

    def test_deterministic_prediction_flags_infinity(self, model_i3):
        mi = conditional_mi(analytic_moments(model_i3), (1, 2))
        assert mi.is_infinite
        assert math.isinf(mi.nats)

    def test_summary_already_sufficient(self, model_redundant):
        mi = conditional_mi(analytic_moments(model_redundant), (1,))
        assert mi.nats == 0.0

    def test_invalid_floor(self, model_i3):
        moments = analytic_moments(model_i3)
        with pytest.raises(InvalidFloor):
            conditional_mi(moments, (1,), floor=0.0)
        with pytest.raises(InvalidFloor):
            conditional_mi(moments, (1,), floor=-1e-9)

    def test_scaling_w_leaves_nats_unchanged(self):
        for seed in range(5):
            model = random_gaussian_model(4, seed=seed)
            scaled = GaussianModel(model.cov_x, 3.7 * model.w, model.v)
            a = conditional_mi(analytic_moments(model), (1, 3))
            b = conditional_mi(analytic_moments(scaled), (1, 3))
            assert b.numerator_var == pytest.approx(3.7**2 * a.numerator_var, rel=1e-9)
            assert b.denominator_var == pytest.approx(3.7**2 * a.denominator_var, rel=1e-9)
            assert b.nats == pytest.approx(a.nats, abs=1e-9)

    def test_monotone_in_support(self):
        # chain rule: growing the support never loses information
        for seed in range(5):
            moments = analytic_moments(random_gaussian_model(5, seed=100 + seed))
            supports = [(), (2,), (2, 4), (2, 4, 5)]
            variances = [conditional_variance(moments, s) for s in supports]
            nats = [conditional_mi(moments, s).nats for s in supports]
            for a, b in zip(variances, variances[1:]):
                assert b <= a + 1e-9
            for a, b in zip(nats, nats[1:]):
                assert b >= a - 1e-9

    def test_empirical_close_to_analytic(self, model_i3):
        emp = empirical_moments(sample(model_i3, 100_000, seed=21))
        got = conditional_mi(emp, (1,))
        assert got.nats == pytest.approx(HALF_LN_2, abs=0.02)


class TestMiTable:
    def test_subset_count(self):
        model = GaussianModel(np.zeros((2, 2)), [1, 0], [0, 1])
        entries = mi_table(analytic_moments(model), s=1)
        assert len(entries) == 3  # {}, {1}, {2}
        assert [e[0].indices for e in entries] == [(), (1,), (2,)]
        assert all(e[1].nats == 0.0 for e in entries)

    def test_tie_broken_lexicographically(self, model_i3):
        entries = mi_table(analytic_moments(model_i3), s=1)
        top_support, top_mi = entries[0]
        assert top_support.indices == (1,)  # tied with {2}, lexicographic
        assert top_mi.nats == pytest.approx(HALF_LN_2, abs=1e-12)
        assert entries[1][0].indices == (2,)

    def test_ordering_is_by_decreasing_nats(self):
        moments = analytic_moments(random_gaussian_model(4, seed=3))
        entries = mi_table(moments, s=2)
        nats = [e[1].nats for e in entries]
        assert nats == sorted(nats, reverse=True)

    def test_dimension_cap(self):
        model = GaussianModel(np.eye(26), np.ones(26), np.zeros(26))
        with pytest.raises(DimensionTooLarge):
            mi_table(analytic_moments(model), s=1)

    def test_threads_do_not_change_result(self):
        moments = analytic_moments(random_gaussian_model(7, seed=9))
        a = mi_table(moments, s=3, threads=1)
        b = mi_table(moments, s=3, threads=8)
        assert [(e[0].indices, e[1].nats) for e in a] == \
               [(e[0].indices, e[1].nats) for e in b]

    def test_csv_rows(self, model_i3):
        entries = mi_table(analytic_moments(model_i3), s=2)
        rows = mi_table_rows(entries)
        assert rows[0] == ("support", "mi_nats", "cond_var")
        assert rows[1][0] == "1;2"
        assert rows[1][1] == "inf"
        empty_cells = [r for r in rows[1:] if r[0] == ""]
        assert len(empty_cells) == 1
