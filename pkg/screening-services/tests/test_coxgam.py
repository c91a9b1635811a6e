import numpy as np
import pytest

from rmst_screen.exceptions import (
    ConfigurationError, ConstantCovariateError, DegenerateBasisError, FoldAssignmentError
)
from rmst_screen.models.cox_gam_fit import CumulativeHazard, SplineSpec
from rmst_screen.services.coxgam_service import (
    CoxGamService, assign_folds, breslow_baseline, bspline_basis, cox_neg_log_pl, cvl_curve,
    cvl_select_theta, design_matrix, deviance_residuals, expand_features, feature_basis, fit_cox_lasso,
    full_bspline_basis, martingale_residuals, theta_grid, theta_max
)


@pytest.fixture
def cox_sample(rng):
    n = 80
    X = rng.standard_normal((n, 2))
    latent = rng.exponential(size=n) * np.exp(-(0.8 * X[:, 0] - 0.5 * X[:, 1]))
    censor = rng.exponential(2.0, size=n)
    return X, np.minimum(latent, censor), (latent <= censor).astype(float)


def newton_oracle(X, time, status, iterations=50):
    """Full-Hessian Newton for the Breslow partial likelihood (distinct times)"""
    beta = np.zeros(X.shape[1])
    for _ in range(iterations):
        w = np.exp(X @ beta)
        grad = np.zeros_like(beta)
        hess = np.zeros((len(beta), len(beta)))
        for i in np.flatnonzero(status == 1):
            risk = time >= time[i]
            s0 = w[risk].sum()
            s1 = (w[risk, None] * X[risk]).sum(axis=0)
            s2 = (w[risk, None, None] * X[risk, :, None] * X[risk, None, :]).sum(axis=0)
            grad += X[i] - s1 / s0
            hess += s2 / s0 - np.outer(s1, s1) / s0 ** 2
        beta = beta + np.linalg.solve(hess, grad)
    return beta


def test_bspline_basis_shape_and_centering(rng):
    x = rng.uniform(-2, 2, size=50)
    basis = bspline_basis(x, SplineSpec(degree=3, num_basis=3))

    assert basis.shape == (50, 3)
    np.testing.assert_allclose(basis.mean(axis=0), 0.0, atol=1e-12)


def test_full_basis_is_partition_of_unity(rng):
    x = rng.uniform(0, 1, size=40)
    full = full_bspline_basis(x, SplineSpec(degree=3, num_basis=5))

    assert full.shape == (40, 6)
    np.testing.assert_allclose(full.sum(axis=1), 1.0, atol=1e-12)


def test_constant_covariate_cannot_be_expanded():
    with pytest.raises(ConstantCovariateError):
        bspline_basis(np.ones(10))


def test_design_matrix_blocks(rng):
    X = rng.standard_normal((30, 5))
    assert design_matrix(X, [0, 3]).shape == (30, 6)
    assert design_matrix(X, []).shape == (30, 0)


def test_gradient_matches_finite_differences(cox_sample, rng):
    _, time, status = cox_sample
    eta = 0.3 * rng.standard_normal(len(time))
    _, grad = cox_neg_log_pl(eta, time, status)

    step = 1e-6
    for i in (0, 7, 33, 79):
        up, down = eta.copy(), eta.copy()
        up[i] += step
        down[i] -= step
        numeric = (cox_neg_log_pl(up, time, status)[0] - cox_neg_log_pl(down, time, status)[0]) / (2 * step)
        assert grad[i] == pytest.approx(numeric, rel=1e-6, abs=1e-9)


def test_gradient_with_tied_times():
    time = np.array([1.0, 2.0, 2.0, 3.0, 3.0, 4.0])
    status = np.array([1.0, 1.0, 0.0, 1.0, 1.0, 0.0])
    eta = np.array([0.1, -0.2, 0.3, 0.0, 0.5, -0.4])
    _, grad = cox_neg_log_pl(eta, time, status)

    step = 1e-6
    for i in range(6):
        up, down = eta.copy(), eta.copy()
        up[i] += step
        down[i] -= step
        numeric = (cox_neg_log_pl(up, time, status)[0] - cox_neg_log_pl(down, time, status)[0]) / (2 * step)
        assert grad[i] == pytest.approx(numeric, rel=1e-6, abs=1e-9)


def test_penalty_at_theta_max_gives_zero_fit(cox_sample):
    X, time, status = cox_sample
    basis = design_matrix(X, [0, 1])
    top = theta_max(basis, time, status)

    fit = fit_cox_lasso(basis, time, status, top)

    assert np.all(fit.alpha == 0)
    assert fit.selected_features() == []
    assert fit_cox_lasso(basis, time, status, 0.5 * top).selected_features() != []


def test_unpenalized_linear_fit_matches_newton(cox_sample):
    X, time, status = cox_sample
    fit = fit_cox_lasso(X, time, status, 0.0, tol=1e-10, max_iter=1000)

    assert fit.converged
    np.testing.assert_allclose(fit.alpha, newton_oracle(X, time, status), atol=1e-6)


def test_objective_never_increases(cox_sample):
    X, time, status = cox_sample
    basis = design_matrix(X, [0, 1])
    fit = fit_cox_lasso(basis, time, status, 0.1 * theta_max(basis, time, status))

    assert np.all(np.diff(fit.objective_path) <= 1e-12)


def test_feature_blocks_must_divide_columns(cox_sample):
    X, time, status = cox_sample
    with pytest.raises(ConfigurationError):
        fit_cox_lasso(design_matrix(X, [0, 1]), time, status, 1.0, features=[0, 1, 2, 3])


def test_selected_features_follow_blocks(cox_sample):
    X, time, status = cox_sample
    basis = design_matrix(X, [0, 1])
    fit = fit_cox_lasso(basis, time, status, 0.0, features=[4, 9])
    assert fit.features == [4, 9]
    assert set(fit.selected_features()) <= {4, 9}


def test_theta_grid_is_descending_log_grid():
    grid = theta_grid(10.0, 5)
    assert grid[0] == pytest.approx(10.0)
    assert grid[-1] == pytest.approx(0.1)
    assert np.all(np.diff(grid) < 0)


def test_folds_each_hold_an_event(cox_sample):
    _, _, status = cox_sample
    held_out = assign_folds(status, 5, np.random.default_rng(3))

    assert len(held_out) == 5
    assert sorted(np.concatenate(held_out).tolist()) == list(range(len(status)))
    assert all(np.any(status[fold] == 1) for fold in held_out)


def test_too_few_events_for_folds():
    status = np.array([1.0, 0.0, 0.0, 0.0, 0.0, 0.0])
    with pytest.raises(FoldAssignmentError):
        assign_folds(status, 3, np.random.default_rng(0))


def test_cvl_selection_is_on_the_grid_and_reproducible(cox_sample):
    X, time, status = cox_sample
    basis = design_matrix(X, [0, 1])

    grid, cvl = cvl_curve(basis, time, status, grid_size=6, folds=3, rng=np.random.default_rng(1))
    theta = cvl_select_theta(basis, time, status, grid_size=6, folds=3, rng=np.random.default_rng(1))

    assert len(grid) == len(cvl) == 6
    assert theta in grid
    assert theta == grid[int(np.argmax(cvl))]


def test_martingale_residuals_sum_to_zero(cox_sample):
    X, time, status = cox_sample
    fit = fit_cox_lasso(X, time, status, 0.0)
    assert martingale_residuals(fit, time, status).sum() == pytest.approx(0.0, abs=1e-9)


def test_breslow_baseline_is_nondecreasing(cox_sample):
    X, time, status = cox_sample
    baseline = breslow_baseline(np.zeros(len(time)), time, status)
    assert np.all(np.diff(baseline.values) >= 0)
    assert float(baseline(0.0)) == 0.0


def test_deviance_residual_signs_follow_martingale(cox_sample):
    X, time, status = cox_sample
    fit = fit_cox_lasso(X, time, status, 0.0)
    m = martingale_residuals(fit, time, status)
    r = deviance_residuals(fit, time, status)

    assert np.all(np.isfinite(r))
    assert np.all(np.sign(r[m != 0]) == np.sign(m[m != 0]))


def test_service_refit_on_selected_features(cox_sample):
    X, time, status = cox_sample
    service = CoxGamService({'cvl_grid_size': 4, 'cvl_folds': 3})

    refit = service.refit_unpenalized(X, [0, 1], time, status)
    lasso = service.fit_selected(X, [0, 1], time, status, np.random.default_rng(5))

    assert refit.theta == 0.0 and refit.features == [0, 1]
    assert lasso.alpha.shape == (6,)


def cox_de_boor(x, knots, degree):
    """Cox-de Boor recursion; x at the last knot belongs to the last non-empty span"""
    spans = len(knots) - 1
    basis = np.zeros((len(x), spans))
    for i in range(spans):
        basis[:, i] = (knots[i] <= x) & (x < knots[i + 1])
    last = max(i for i in range(spans) if knots[i] < knots[i + 1])
    basis[x == knots[-1], last] = 1.0

    for k in range(1, degree + 1):
        raised = np.zeros((len(x), spans - k))
        for i in range(spans - k):
            left = knots[i + k] - knots[i]
            right = knots[i + k + 1] - knots[i + 1]
            if left > 0:
                raised[:, i] += (x - knots[i]) / left * basis[:, i]
            if right > 0:
                raised[:, i] += (knots[i + k + 1] - x) / right * basis[:, i + 1]
        basis = raised
    return basis


def test_bspline_basis_matches_de_boor_recursion():
    x = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
    knots = np.array([0.0, 0.0, 0.0, 0.0, 1.0, 1.0, 1.0, 1.0])
    full = cox_de_boor(x, knots, 3)
    expected = full[:, 1:] - full[:, 1:].mean(axis=0)

    np.testing.assert_allclose(full_bspline_basis(x, SplineSpec(degree=3, num_basis=3)), full, atol=1e-12)
    np.testing.assert_allclose(bspline_basis(x, SplineSpec(degree=3, num_basis=3)), expected, atol=1e-12)


def test_partial_likelihood_hand_value():
    value, grad = cox_neg_log_pl([0.0, 0.0], [1.0, 2.0], [1.0, 1.0])

    assert value == pytest.approx(np.log(2.0), abs=1e-12)
    np.testing.assert_allclose(grad, [-0.5, 0.5], atol=1e-12)


def test_partial_likelihood_is_location_invariant(cox_sample, rng):
    _, time, status = cox_sample
    eta = rng.standard_normal(len(time))

    value, grad = cox_neg_log_pl(eta, time, status)
    shifted_value, shifted_grad = cox_neg_log_pl(eta + 3.7, time, status)

    assert shifted_value == pytest.approx(value, abs=1e-9)
    np.testing.assert_allclose(shifted_grad, grad, atol=1e-12)


def test_breslow_jumps_by_hand():
    baseline = breslow_baseline(np.zeros(3), [1.0, 2.0, 3.0], [1.0, 1.0, 1.0])

    np.testing.assert_allclose(baseline.times, [1.0, 2.0, 3.0])
    np.testing.assert_allclose(np.diff(baseline.values, prepend=0.0), [1 / 3, 1 / 2, 1.0], atol=1e-12)


def test_breslow_halves_when_risk_doubles(cox_sample, rng):
    _, time, status = cox_sample
    eta = rng.standard_normal(len(time))

    base = breslow_baseline(eta, time, status)
    doubled = breslow_baseline(eta + np.log(2.0), time, status)

    np.testing.assert_allclose(doubled.values, base.values / 2.0, rtol=1e-12)


def test_deviance_residual_hand_values():
    baseline = CumulativeHazard([1.0], [1.0])
    time = np.array([1.0, 2.0, 0.5])
    status = np.array([1.0, 0.0, 0.0])
    eta = np.array([0.0, np.log(0.5), 0.0])

    np.testing.assert_allclose(martingale_residuals(eta, time, status, baseline), [0.0, -0.5, 0.0], atol=1e-12)
    np.testing.assert_allclose(deviance_residuals(eta, time, status, baseline), [0.0, -1.0, 0.0], atol=1e-12)


def test_duplicated_columns_give_the_same_fit(cox_sample):
    X, time, status = cox_sample
    column = X[:, :1] - X[:, :1].mean()
    theta = 0.3 * theta_max(column, time, status)

    single = fit_cox_lasso(column, time, status, theta, tol=1e-10)
    doubled = fit_cox_lasso(np.hstack([column, column]), time, status, theta, tol=1e-10)

    assert doubled.objective_path[-1] == pytest.approx(single.objective_path[-1], rel=1e-10)
    np.testing.assert_allclose(doubled.linear_predictor, single.linear_predictor, atol=1e-8)
    assert doubled.alpha.sum() == pytest.approx(single.alpha[0], abs=1e-8)


def test_binary_feature_keeps_one_column(rng):
    x = rng.integers(0, 2, size=60).astype(float)
    basis = feature_basis(x)

    assert basis.shape == (60, 1)
    np.testing.assert_allclose(basis.mean(axis=0), 0.0, atol=1e-12)
    assert basis.std() > 0


def test_few_distinct_values_reduce_the_expansion():
    x = np.repeat([0.0, 1.0, 2.0], 20)

    assert feature_basis(x).shape == (60, 2)
    linear = feature_basis(x, SplineSpec(degree=3, num_basis=5))
    assert linear.shape == (60, 1)
    np.testing.assert_allclose(linear[:, 0], x - x.mean())


def test_constant_feature_gives_an_empty_block(rng):
    X = np.column_stack([rng.standard_normal(30), np.full(30, 2.0)])
    basis, blocks = expand_features(X, [0, 1])

    assert feature_basis(np.full(30, 2.0)).shape == (30, 0)
    assert basis.shape == (30, 3)
    assert blocks == [3, 0]


def test_fit_on_binary_feature_records_reduced_blocks(cox_sample):
    X, time, status = cox_sample
    covariates = np.column_stack([X[:, 0], (X[:, 1] > 0).astype(float)])
    service = CoxGamService({'cvl_grid_size': 4, 'cvl_folds': 3})

    fit = service.fit_selected(covariates, [0, 1], time, status, np.random.default_rng(5))
    refit = service.refit_unpenalized(covariates, [0, 1], time, status)

    assert fit.blocks == [3, 1] and refit.blocks == [3, 1]
    assert fit.alpha.shape == (4,)
    assert refit.coefficient_block(1).shape == (1,)
    assert set(refit.selected_features()) == {0, 1}
    assert refit.to_dict()['blocks'] == [3, 1]


def test_block_layout_must_cover_the_basis(cox_sample):
    X, time, status = cox_sample
    with pytest.raises(ConfigurationError):
        fit_cox_lasso(design_matrix(X, [0, 1]), time, status, 1.0, features=[0, 1], blocks=[1, 3])


def test_flat_basis_column_is_rejected(cox_sample):
    _, time, status = cox_sample
    basis = np.column_stack([np.linspace(-1, 1, len(time)), np.zeros(len(time))])
    with pytest.raises(DegenerateBasisError):
        fit_cox_lasso(basis, time, status, 0.1)


def test_cvl_tolerates_a_column_flat_on_a_training_fold(cox_sample):
    X, time, status = cox_sample
    rare = np.zeros(len(time))
    rare[int(np.flatnonzero(status == 1)[0])] = 1.0
    basis = np.column_stack([feature_basis(X[:, 0]), feature_basis(rare)])

    grid, cvl = cvl_curve(basis, time, status, grid_size=5, folds=3, rng=np.random.default_rng(2))

    assert len(grid) == 5
    assert np.all(np.isfinite(cvl))


def test_refit_carries_its_breslow_baseline(cox_sample):
    X, time, status = cox_sample
    refit = CoxGamService().refit_unpenalized(X, [0, 1], time, status)

    assert refit.baseline_cumhaz is not None
    expected = breslow_baseline(refit.linear_predictor, time, status)
    np.testing.assert_allclose(refit.baseline_cumhaz.values, expected.values)
    np.testing.assert_allclose(
        deviance_residuals(refit, time, status),
        deviance_residuals(refit.linear_predictor, time, status, expected)
    )


def cvl_trial(seed, signal):
    """Selected grid index and the fitted signal coefficient for one simulated sample"""
    rng = np.random.default_rng(seed)
    n = 200 if signal else 100
    X = rng.standard_normal((n, 3))
    latent = rng.exponential(size=n) * np.exp(-signal * X[:, 0])
    censor = rng.exponential(3.0, size=n)
    time, status = np.minimum(latent, censor), (latent <= censor).astype(float)
    basis = X - X.mean(axis=0)

    grid, cvl = cvl_curve(basis, time, status, grid_size=20, folds=5, rng=rng)
    best = int(np.argmax(cvl))
    fit = fit_cox_lasso(basis, time, status, grid[best])
    return best, fit.alpha[0]


@pytest.mark.slow
def test_cvl_prefers_heavy_penalty_on_noise():
    indices = [cvl_trial(seed, 0.0)[0] for seed in range(100)]
    assert sum(index < 5 for index in indices) >= 80


@pytest.mark.slow
def test_cvl_keeps_a_strong_linear_signal():
    coefficients = [cvl_trial(seed, 1.0)[1] for seed in range(100)]
    assert sum(coefficient != 0 for coefficient in coefficients) >= 95
