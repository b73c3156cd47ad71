import math

import numpy as np
import pytest

from suretune import (
    DegenerateDesignError,
    DomainError,
    GaussianModel,
    ShapeError,
    SubsetCollection,
    best_subset_lagrangian,
    cp_criterion,
    edf_two_model_exact,
    make_all_subsets,
    make_nested,
    mc_edf,
    oracle_tuning,
    tune_cp,
)

TWO_MODEL_NULL_EDF = 0.41510749742059466


def _phi(t):
    return math.exp(-0.5 * t * t) / math.sqrt(2.0 * math.pi)


class TestCpCriterion:
    def setup_method(self):
        self.coll = SubsetCollection(np.eye(2), make_all_subsets(2), 1.0)
        self.y = np.array([3.0, 0.1])

    def test_hand_enumeration(self):
        # identity design, y = (3, 0.1): residuals are read off directly
        vals = dict(zip(self.coll.subsets, cp_criterion(self.coll, self.y)))
        assert vals[()] == pytest.approx(9.01)
        assert vals[(0,)] == pytest.approx(2.01)
        assert vals[(1,)] == pytest.approx(11.0)
        assert vals[(0, 1)] == pytest.approx(4.0)

    def test_empty_subset_is_total_sum_of_squares(self):
        assert cp_criterion(self.coll, self.y)[0] == pytest.approx(float(self.y @ self.y))

    def test_full_invertible_square_design(self):
        sigma = 1.3
        coll = SubsetCollection(np.eye(4), [(0, 1, 2, 3)], sigma)
        y = np.array([0.4, -2.0, 1.1, 0.0])
        expected = 2.0 * sigma**2 * 4
        assert cp_criterion(coll, y)[0] == pytest.approx(expected)

    def test_minimizer_and_fit(self):
        fit = tune_cp(self.coll, self.y)
        assert fit.s_hat == (0,)
        assert np.allclose(fit.theta_hat, [3.0, 0.0])
        assert fit.sure_min == pytest.approx(2.01)
        assert fit.naive_df_at_shat == 1.0

    def test_unknown_subset_rejected(self):
        coll = SubsetCollection(np.eye(2), [(0,)], 1.0)
        with pytest.raises(DomainError):
            coll.estimate((1,), self.y)


def test_tie_break_prefers_smaller_rank_then_lexicographic():
    # Duplicate columns: every singleton fits y perfectly, so Cp ties at
    # 2 sigma^2 for all of them and the empty model loses.
    X = np.column_stack([np.ones(3), np.ones(3)])
    coll = SubsetCollection(X, [(), (1,), (0,), (0, 1)], 1.0)
    y = np.ones(3) * 5.0
    fit = tune_cp(coll, y)
    assert fit.s_hat == (0,)
    # rank beats size: the two-column subset has rank 1 as well, but the
    # lexicographically smaller label wins among equal ranks
    assert coll.naive_df((0, 1), y) == 1.0


def test_singleton_collection_returns_its_only_subset():
    coll = SubsetCollection(np.eye(3), [(0, 2)], 1.0)
    fit = tune_cp(coll, np.array([1.0, 2.0, 3.0]))
    assert fit.s_hat == (0, 2)


def test_batch_matches_scalar_tuning():
    rng = np.random.default_rng(7)
    X = rng.standard_normal((8, 3))
    coll = SubsetCollection(X, make_all_subsets(3), 1.0)
    Y = rng.standard_normal((40, 8))
    batch = coll.tune_batch(Y)
    for r in range(Y.shape[0]):
        fit = coll.tune(Y[r])
        assert coll.subsets[int(batch.s_hat[r])] == fit.s_hat
        assert batch.sure_min[r] == pytest.approx(fit.sure_min)
        assert np.allclose(batch.theta_hat[r], fit.theta_hat)


def test_rank_deficient_subset_uses_actual_rank():
    X = np.column_stack([np.ones(4), np.ones(4), np.eye(4)[:, 0]])
    coll = SubsetCollection(X, [(0, 1)], 2.0)
    y = np.array([1.0, 2.0, 3.0, 4.0])
    # both columns are the same direction, rank 1, so the penalty is 2 sigma^2
    fitted = np.full(4, y.mean())
    expected = float(np.sum((y - fitted) ** 2)) + 2.0 * 4.0 * 1
    assert cp_criterion(coll, y)[0] == pytest.approx(expected)
    assert coll.naive_df((0, 1), y) == 1.0


class TestMakeNested:
    def test_full_chain_p2(self):
        coll = make_nested(np.eye(2), 1.0)
        assert coll.subsets == ((), (0,), (0, 1))
        assert coll.is_nested

    def test_p1_chain(self):
        coll = make_nested(np.ones((3, 1)), 1.0)
        assert coll.subsets == ((), (0,))

    def test_two_model_sizes(self):
        X = np.eye(4)[:, :3]
        coll = make_nested(X, 1.0, sizes=(2, 3))
        assert coll.subsets == ((0, 1), (0, 1, 2))

    def test_order_permutes_columns(self):
        coll = make_nested(np.eye(3), 1.0, order=(2, 0, 1))
        assert coll.subsets == ((), (2,), (0, 2), (0, 1, 2))

    def test_bad_order_rejected(self):
        with pytest.raises(DomainError):
            make_nested(np.eye(3), 1.0, order=(0, 0, 1))

    def test_bad_size_rejected(self):
        with pytest.raises(DomainError):
            make_nested(np.eye(3), 1.0, sizes=(4,))

    def test_selects_supersets_of_true_support_at_tiny_noise(self):
        rng = np.random.default_rng(11)
        X = rng.standard_normal((30, 5))
        beta = np.array([2.0, -1.5, 0.0, 0.0, 0.0])
        theta0 = X @ beta
        coll = make_nested(X, 0.01)
        model = GaussianModel(theta0, sigma=0.01)
        Y = model.draw(np.random.default_rng(12), 50)
        picks = coll.tune_batch(Y).s_hat.astype(int)
        for k in picks:
            assert set(coll.subsets[k]) >= {0, 1}


class TestTwoModelExact:
    def test_null_frozen_value(self):
        value = edf_two_model_exact(np.eye(3)[:, :2], np.zeros(3), 1.0)
        expected = 2.0 * math.sqrt(2.0) * _phi(math.sqrt(2.0))
        assert value == pytest.approx(expected, abs=1e-15)
        assert value == pytest.approx(TWO_MODEL_NULL_EDF, abs=1e-14)

    def test_vanishes_for_far_mean(self):
        X = np.eye(2)
        theta0 = np.array([0.0, 50.0])
        assert edf_two_model_exact(X, theta0, 1.0) < 1e-100

    def test_max_over_offsets(self):
        # sweep the mean along the increment direction; the peak is ~0.575
        X = np.eye(2)
        grid = np.linspace(0.0, 6.0, 4001)
        vals = [edf_two_model_exact(X, np.array([0.0, m]), 1.0) for m in grid]
        assert max(vals) == pytest.approx(0.5753976713, abs=1e-6)

    def test_invariant_to_components_in_the_small_model(self):
        rng = np.random.default_rng(3)
        X = rng.standard_normal((10, 4))
        theta0 = X[:, 0] * 2.0 - X[:, 1]
        base = edf_two_model_exact(X, theta0, 1.0)
        Q, _ = np.linalg.qr(X[:, :3])
        shifted = theta0 + Q @ np.array([5.0, -3.0, 2.0])
        assert edf_two_model_exact(X, shifted, 1.0) == pytest.approx(base, rel=1e-12)

    def test_degenerate_last_column(self):
        X = np.column_stack([np.ones(4), 2.0 * np.ones(4)])
        with pytest.raises(DegenerateDesignError):
            edf_two_model_exact(X, np.zeros(4), 1.0)

    def test_mc_agrees_with_exact(self):
        X = np.eye(6)[:, :2]
        sigma = 1.0
        coll = make_nested(X, sigma, sizes=(1, 2))
        theta0 = np.zeros(6)
        theta0[1] = 1.0  # increment direction is the second column here
        model = GaussianModel(theta0, sigma=sigma)
        report = mc_edf(coll, model, reps=4000, seed=21)
        exact = edf_two_model_exact(X, theta0, sigma)
        assert abs(report.value - exact) <= 4.0 * report.std_error


def test_make_all_subsets_counts_and_guard():
    subs = make_all_subsets(4)
    assert len(subs) == 16
    assert len(set(subs)) == 16
    assert subs[0] == ()
    assert subs[-1] == (0, 1, 2, 3)
    with pytest.raises(DomainError):
        make_all_subsets(26)


def test_mc_edf_nonnegative_for_subset_selection():
    rng = np.random.default_rng(5)
    X = rng.standard_normal((12, 4))
    coll = SubsetCollection(X, make_all_subsets(4), 1.0)
    model = GaussianModel(np.zeros(12), sigma=1.0)
    report = mc_edf(coll, model, reps=2500, seed=6)
    assert report.value >= -4.0 * report.std_error


class TestBestSubsetLagrangian:
    def setup_method(self):
        rng = np.random.default_rng(9)
        self.X = rng.standard_normal((15, 4))
        self.y = rng.standard_normal(15) + self.X[:, 1]

    def test_zero_penalty_is_least_squares(self):
        fit = best_subset_lagrangian(self.X, self.y, 0.0)
        coef, *_ = np.linalg.lstsq(self.X, self.y, rcond=None)
        assert fit.support == (0, 1, 2, 3)
        assert np.allclose(fit.beta, coef)
        assert np.allclose(fit.fitted, self.X @ coef)

    def test_huge_penalty_selects_nothing(self):
        fit = best_subset_lagrangian(self.X, self.y, 1e9)
        assert fit.support == ()
        assert np.all(fit.beta == 0.0)
        assert np.all(fit.fitted == 0.0)

    def test_matches_cp_selection_at_lambda_two_sigma_sq(self):
        sigma = 0.8
        coll = SubsetCollection(self.X, make_all_subsets(4), sigma)
        cp_fit = tune_cp(coll, self.y)
        fit = best_subset_lagrangian(self.X, self.y, 2.0 * sigma**2)
        assert fit.support == cp_fit.s_hat
        assert np.allclose(fit.fitted, cp_fit.theta_hat, atol=1e-10)
        assert fit.criterion == pytest.approx(cp_fit.sure_min)

    def test_guard_and_validation(self):
        with pytest.raises(DomainError):
            best_subset_lagrangian(np.ones((2, 26)), np.ones(2), 1.0)
        with pytest.raises(DomainError):
            best_subset_lagrangian(self.X, self.y, -1.0)
        with pytest.raises(ShapeError):
            best_subset_lagrangian(self.X, self.y[:-1], 1.0)


def test_oracle_enumeration_matches_direct_risk():
    rng = np.random.default_rng(14)
    X = rng.standard_normal((10, 3))
    sigma = 0.7
    coll = SubsetCollection(X, make_all_subsets(3), sigma)
    theta0 = X[:, 0] * 1.5
    model = GaussianModel(theta0, sigma=sigma)
    oracle = oracle_tuning(coll, model)

    def exact_err(cols):
        Q, _ = np.linalg.qr(X[:, cols]) if cols else (np.zeros((10, 0)), None)
        proj = Q @ (Q.T @ theta0) if cols else np.zeros(10)
        rank = len(cols)
        return 10 * sigma**2 + float(np.sum((theta0 - proj) ** 2)) + rank * sigma**2

    errs = {cols: exact_err(cols) for cols in coll.subsets}
    assert oracle.err == pytest.approx(min(errs.values()))
    assert errs[oracle.s0] == pytest.approx(oracle.err)
