#!/usr/bin/env python3
"""
🧮 Spline Cox Service
L1-penalized additive Cox model on B-spline expansions.

This module provides:
- Clamped B-spline bases with quantile knots, centered per column
- Breslow negative log partial likelihood with its gradient
- IRLS + cyclic coordinate descent lasso fits with warm starts
- Cross-validated log partial likelihood (cvl) tuning
- Breslow baseline hazard, martingale and deviance residuals
"""

import logging
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
from joblib import Parallel, delayed
from scipy.interpolate import BSpline
from sklearn.model_selection import StratifiedKFold
from sklearn.preprocessing import StandardScaler

from ..config.app_config import resolve_workers
from ..exceptions import (
    ConfigurationError, ConstantCovariateError, DegenerateBasisError, FoldAssignmentError,
    NoEventsError, ResidualDomainError
)
from ..models.cox_gam_fit import CoxGamFit, CumulativeHazard, SplineSpec

logger = logging.getLogger(__name__)

MAX_LINE_SEARCH_HALVINGS = 30
MAX_FOLD_RETRIES = 10
CVL_MIN_RATIO = 0.01
VARIANCE_FLOOR = 1e-10


# ---------------------------------------------------------------- basis


def knot_vector(x: np.ndarray, spec: SplineSpec) -> np.ndarray:
    """Clamped knots: boundary knots at min/max, interior knots at equally spaced quantiles"""
    lo, hi = float(np.min(x)), float(np.max(x))
    interior = np.quantile(x, np.linspace(0.0, 1.0, spec.interior_knots + 2)[1:-1])
    if len(interior) and (np.any(interior <= lo) or np.any(interior >= hi) or np.any(np.diff(interior) <= 0)):
        raise DegenerateBasisError("interior knots collapse onto ties in the covariate")
    return np.concatenate((np.full(spec.degree + 1, lo), interior, np.full(spec.degree + 1, hi)))


def full_bspline_basis(x, spec: SplineSpec) -> np.ndarray:
    """
    All num_basis + 1 clamped B-splines evaluated at x (rows sum to 1)

    Raises:
        ConstantCovariateError: x has a single distinct value
    """
    x = np.asarray(x, dtype=float)
    if np.ptp(x) == 0:
        raise ConstantCovariateError("cannot expand a constant covariate")

    knots = knot_vector(x, spec)
    size = spec.num_basis + 1
    # extrapolate=True evaluates x == max on the last polynomial piece
    return BSpline(knots, np.eye(size), spec.degree, extrapolate=True)(x)


def bspline_basis(x, spec: Optional[SplineSpec] = None) -> np.ndarray:
    """n x num_basis centered basis: the first clamped B-spline is dropped"""
    spec = spec or SplineSpec()
    basis = full_bspline_basis(x, spec)[:, 1:]
    return basis - basis.mean(axis=0)


def _varying_columns(matrix: np.ndarray) -> np.ndarray:
    """Mask of columns whose standard deviation exceeds VARIANCE_FLOOR"""
    if matrix.shape[0] == 0:
        return np.zeros(matrix.shape[1], dtype=bool)
    return matrix.std(axis=0) > VARIANCE_FLOOR


def feature_basis(x, spec: Optional[SplineSpec] = None) -> np.ndarray:
    """
    Centered expansion of one feature as it enters the additive model

    The spline basis is reduced to columns that vary and add rank, so a 0/1
    covariate keeps a single column. When interior knots collapse onto ties
    the feature enters linearly; a constant feature gives no columns.
    """
    spec = spec or SplineSpec()
    x = np.asarray(x, dtype=float)
    if np.ptp(x) == 0:
        return np.empty((len(x), 0))

    try:
        basis = bspline_basis(x, spec)
    except DegenerateBasisError:
        logger.debug("Interior knots collapse on ties; expanding the feature linearly")
        basis = (x - x.mean())[:, None]

    basis = basis[:, _varying_columns(basis)]
    kept: List[int] = []
    for column in range(basis.shape[1]):
        if np.linalg.matrix_rank(basis[:, kept + [column]]) > len(kept):
            kept.append(column)
    return basis[:, kept]


def expand_features(
    covariates: np.ndarray,
    features: Sequence[int],
    spec: Optional[SplineSpec] = None
) -> Tuple[np.ndarray, List[int]]:
    """Side-by-side feature expansions and the column count of each block"""
    spec = spec or SplineSpec()
    covariates = np.asarray(covariates, dtype=float)
    parts = [feature_basis(covariates[:, j], spec) for j in features]
    if not parts:
        return np.empty((covariates.shape[0], 0)), []
    return np.hstack(parts), [part.shape[1] for part in parts]


def design_matrix(covariates: np.ndarray, features: Sequence[int], spec: Optional[SplineSpec] = None) -> np.ndarray:
    """Side-by-side expansions of the given columns (num_basis wide for continuous features)"""
    basis, _ = expand_features(covariates, features, spec)
    return basis


# ---------------------------------------------------- partial likelihood


def _check_survival(time: np.ndarray, status: np.ndarray, n: int):
    if len(time) != n or len(status) != n:
        raise ConfigurationError(f"lengths differ: eta {n}, time {len(time)}, status {len(status)}")
    if not np.any(status == 1):
        raise NoEventsError("no events")


def _partial_likelihood(eta: np.ndarray, time: np.ndarray, status: np.ndarray, hessian: bool = False):
    """
    Breslow negative log partial likelihood, gradient and diagonal Hessian

    Risk sums come from one reverse cumulative pass over ascending times;
    tied times share the risk sum of their first index and accumulate
    gradient terms up to their last index.
    """
    order = np.argsort(time, kind='stable')
    t = time[order]
    d = status[order]
    e = eta[order]

    shift = e.max()
    w = np.exp(e - shift)
    reverse = np.cumsum(w[::-1])[::-1]
    first = np.searchsorted(t, t, side='left')
    last = np.searchsorted(t, t, side='right') - 1
    risk = reverse[first]

    value = -np.sum(d * (e - shift - np.log(risk)))

    a = np.cumsum(d / risk)[last]
    grad_sorted = w * a - d
    grad = np.empty_like(grad_sorted)
    grad[order] = grad_sorted

    if not hessian:
        return float(value), grad

    b = np.cumsum(d / risk ** 2)[last]
    hess_sorted = np.maximum(w * a - w ** 2 * b, 0.0)
    hess = np.empty_like(hess_sorted)
    hess[order] = hess_sorted
    return float(value), grad, hess


def cox_neg_log_pl(eta, time, status) -> Tuple[float, np.ndarray]:
    """
    Negative log partial likelihood (Breslow ties) and its gradient in eta

    Raises:
        NoEventsError: no status equals 1
    """
    eta = np.asarray(eta, dtype=float)
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)
    _check_survival(time, status, len(eta))
    return _partial_likelihood(eta, time, status)


def log_partial_likelihood(eta, time, status) -> float:
    value, _ = cox_neg_log_pl(eta, time, status)
    return -value


# ----------------------------------------------------------------- lasso


def _standardize(basis: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    flat = ~_varying_columns(basis)
    if np.any(flat):
        column = int(np.flatnonzero(flat)[0])
        raise DegenerateBasisError(f"basis column {column} has zero variance")
    scaler = StandardScaler(with_mean=False).fit(basis)
    return scaler.transform(basis), scaler.scale_


def _soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def theta_max(basis, time, status) -> float:
    """Smallest penalty whose lasso solution is exactly zero (standardized scale)"""
    basis = np.asarray(basis, dtype=float)
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)
    _check_survival(time, status, basis.shape[0])
    if basis.shape[1] == 0:
        return 0.0
    z, _ = _standardize(basis)
    _, grad = _partial_likelihood(np.zeros(basis.shape[0]), time, status)
    return float(np.max(np.abs(z.T @ grad)))


def _coordinate_descent(
    z: np.ndarray,
    hr: np.ndarray,
    beta: np.ndarray,
    h: np.ndarray,
    theta: float,
    tol: float,
    max_sweeps: int
) -> np.ndarray:
    """
    Minimize ½ Σ h_i (working_i - z_i β)² + θ‖β‖₁ in place

    hr carries h * (working response - zβ). Full sweeps alternate with
    sweeps over the nonzero coordinates until both leave β unchanged.
    """
    col_weight = (z ** 2).T @ h
    p = z.shape[1]

    def sweep(columns) -> float:
        nonlocal hr
        change = 0.0
        for j in columns:
            if col_weight[j] <= 0:
                continue
            old = beta[j]
            new = _soft_threshold(z[:, j] @ hr + old * col_weight[j], theta) / col_weight[j]
            if new != old:
                hr -= h * z[:, j] * (new - old)
                beta[j] = new
                change = max(change, abs(new - old))
        return change

    sweeps = 0
    while sweeps < max_sweeps:
        sweeps += 1
        if sweep(range(p)) < tol:
            break
        while sweeps < max_sweeps:
            sweeps += 1
            if sweep(np.flatnonzero(beta)) < tol:
                break
    return beta


def _block_layout(
    m: int,
    features: Optional[Sequence[int]],
    blocks: Optional[Sequence[int]],
    spec: SplineSpec
) -> Tuple[List[int], List[int]]:
    """Feature list and per-feature column counts covering all m columns"""
    if features is None:
        if blocks is not None:
            features = list(range(len(blocks)))
        else:
            size = spec.num_basis if m % spec.num_basis == 0 else 1
            features = list(range(m // size))
    features = list(features)

    if blocks is None:
        if (features and m % len(features)) or (not features and m):
            raise ConfigurationError(f"{m} basis columns do not split into {len(features)} feature blocks")
        blocks = [m // len(features)] * len(features) if features else []
    blocks = [int(size) for size in blocks]

    if len(blocks) != len(features) or sum(blocks) != m or any(size < 0 for size in blocks):
        raise ConfigurationError(f"block layout {blocks} does not cover {m} columns for {len(features)} features")
    return features, blocks


def fit_cox_lasso(
    basis,
    time,
    status,
    theta: float,
    tol: float = 1e-7,
    max_iter: int = 1000,
    alpha_init=None,
    features: Optional[Sequence[int]] = None,
    spec: Optional[SplineSpec] = None,
    blocks: Optional[Sequence[int]] = None
) -> CoxGamFit:
    """
    Lasso-penalized Cox fit on a basis matrix

    Minimizes neg_log_pl(basis @ α) + θ‖β‖₁ where β are the coefficients of
    the unit-variance columns (α = β / scale). Each outer step solves the
    diagonal quadratic approximation by coordinate descent and backtracks
    until the penalized objective does not increase.

    Args:
        basis: n x M matrix (centered columns)
        theta: penalty level, >= 0
        tol: convergence threshold on the largest coefficient change
        max_iter: outer iteration cap; non-convergence is flagged, not raised
        alpha_init: warm start on the original column scale
        blocks: column count per feature; equal blocks when omitted

    Raises:
        DegenerateBasisError: a basis column has zero variance
    """
    basis = np.asarray(basis, dtype=float)
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)
    n, m = basis.shape
    _check_survival(time, status, n)
    if theta < 0:
        raise ConfigurationError(f"theta must be nonnegative, got {theta}")

    spec = spec or SplineSpec()
    features, blocks = _block_layout(m, features, blocks, spec)

    if m == 0:
        return CoxGamFit(features, spec, np.zeros(0), theta, np.zeros(n), True, 0, blocks=blocks)

    z, scale = _standardize(basis)
    beta = np.zeros(m) if alpha_init is None else np.asarray(alpha_init, dtype=float) * scale

    def objective(coef: np.ndarray, eta: np.ndarray) -> float:
        value, _ = _partial_likelihood(eta, time, status)
        return value + theta * np.sum(np.abs(coef))

    eta = z @ beta
    current = objective(beta, eta)
    path = [current]
    converged = False
    iterations = 0

    for iterations in range(1, max_iter + 1):
        _, grad, hess = _partial_likelihood(eta, time, status, hessian=True)
        hr = -grad.copy()
        candidate = _coordinate_descent(z, hr, beta.copy(), hess, theta, tol, max_iter)

        step = candidate - beta
        accepted = False
        for _ in range(MAX_LINE_SEARCH_HALVINGS + 1):
            trial = beta + step
            trial_eta = z @ trial
            trial_value = objective(trial, trial_eta)
            if trial_value <= current:
                accepted = True
                break
            step = step / 2.0

        if not accepted:
            converged = bool(np.max(np.abs(candidate - beta)) < tol)
            break

        change = float(np.max(np.abs(trial - beta)))
        beta, eta, current = trial, trial_eta, trial_value
        path.append(current)
        if change < tol:
            converged = True
            break

    if not converged:
        logger.warning(f"⚠️ Cox lasso did not converge in {iterations} iterations (theta={theta:.4g})")

    alpha = beta / scale
    return CoxGamFit(
        features=features,
        spec=spec,
        alpha=alpha,
        theta=theta,
        linear_predictor=basis @ alpha,
        converged=converged,
        iterations=iterations,
        objective_path=path,
        blocks=blocks
    )


# ------------------------------------------------------------------- cvl


def theta_grid(theta_top: float, grid_size: int) -> np.ndarray:
    """Log-spaced grid from theta_top down to 1% of it"""
    if grid_size < 1:
        raise ConfigurationError(f"grid_size must be positive, got {grid_size}")
    if grid_size == 1 or theta_top <= 0:
        return np.array([theta_top])
    return np.geomspace(theta_top, CVL_MIN_RATIO * theta_top, grid_size)


def assign_folds(status: np.ndarray, folds: int, rng: np.random.Generator) -> List[np.ndarray]:
    """
    Status-stratified held-out index sets, every one holding an event

    Raises:
        FoldAssignmentError: no event-bearing assignment after the retries
    """
    for attempt in range(MAX_FOLD_RETRIES + 1):
        splitter = StratifiedKFold(n_splits=folds, shuffle=True, random_state=int(rng.integers(2 ** 31 - 1)))
        try:
            held_out = [test for _, test in splitter.split(np.zeros(len(status)), status)]
        except ValueError as error:
            raise FoldAssignmentError(f"cannot split into {folds} folds: {error}") from error
        if all(np.any(status[test] == 1) for test in held_out):
            return held_out
        logger.debug(f"Fold assignment attempt {attempt + 1} left a fold without events")
    raise FoldAssignmentError(f"no {folds}-fold assignment gives every fold an event")


def _fold_path(
    basis: np.ndarray,
    time: np.ndarray,
    status: np.ndarray,
    held_out: np.ndarray,
    grid: np.ndarray,
    tol: float,
    max_iter: int
) -> np.ndarray:
    """Contribution l(α_-f; all) - l(α_-f; train) of one fold at every grid point"""
    train = np.setdiff1d(np.arange(len(time)), held_out)
    # columns flat on the training rows stay at zero
    keep = _varying_columns(basis[train])
    train_basis = basis[np.ix_(train, np.flatnonzero(keep))]
    contributions = np.empty(len(grid))
    alpha = np.zeros(basis.shape[1])
    warm = None
    for k, theta in enumerate(grid):
        fit = fit_cox_lasso(train_basis, time[train], status[train], theta, tol, max_iter, alpha_init=warm)
        warm = fit.alpha
        alpha[keep] = fit.alpha
        eta_all = basis @ alpha
        contributions[k] = (
            log_partial_likelihood(eta_all, time, status)
            - log_partial_likelihood(eta_all[train], time[train], status[train])
        )
    return contributions


def cvl_curve(
    basis,
    time,
    status,
    grid_size: int = 50,
    folds: int = 5,
    rng: Optional[np.random.Generator] = None,
    tol: float = 1e-7,
    max_iter: int = 1000,
    workers=1
) -> Tuple[np.ndarray, np.ndarray]:
    """
    Cross-validated log partial likelihood along the penalty grid

    Returns:
        (grid, cvl) with the grid in descending order
    """
    basis = np.asarray(basis, dtype=float)
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)
    if folds < 2:
        raise ConfigurationError(f"folds must be at least 2, got {folds}")
    rng = rng if rng is not None else np.random.default_rng()

    grid = theta_grid(theta_max(basis, time, status), grid_size)
    held_out = assign_folds(status, folds, rng)

    workers = resolve_workers(workers)
    parts = Parallel(n_jobs=min(workers, folds))(
        delayed(_fold_path)(basis, time, status, test, grid, tol, max_iter) for test in held_out
    )
    cvl = np.zeros(len(grid))
    for part in parts:
        cvl += part
    return grid, cvl


def cvl_select_theta(
    basis,
    time,
    status,
    grid_size: int = 50,
    folds: int = 5,
    rng: Optional[np.random.Generator] = None,
    tol: float = 1e-7,
    max_iter: int = 1000,
    workers=1
) -> float:
    """Penalty maximizing cvl; ties go to the larger penalty"""
    grid, cvl = cvl_curve(basis, time, status, grid_size, folds, rng, tol, max_iter, workers)
    scores = np.where(np.isfinite(cvl), cvl, -np.inf)
    # first maximum on a descending grid is the largest theta
    best = int(np.argmax(scores))
    logger.debug(f"cvl selected theta={grid[best]:.4g} (index {best} of {len(grid)})")
    return float(grid[best])


# --------------------------------------------------- baseline, residuals


def _linear_predictor(fit_or_eta: Union[CoxGamFit, np.ndarray]) -> np.ndarray:
    if isinstance(fit_or_eta, CoxGamFit):
        return fit_or_eta.linear_predictor
    return np.asarray(fit_or_eta, dtype=float)


def breslow_baseline(fit_or_eta, time, status) -> CumulativeHazard:
    """Λ̂0(t) = Σ_{event times s <= t} d_s / Σ_{Y_l >= s} exp(η_l)"""
    eta = _linear_predictor(fit_or_eta)
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)

    order = np.argsort(time, kind='stable')
    t = time[order]
    d = status[order]
    risk_terms = np.exp(eta[order])

    unique, first = np.unique(t, return_index=True)
    deaths = np.add.reduceat(d, first)
    risk = np.cumsum(risk_terms[::-1])[::-1][first]

    has_event = deaths > 0
    jumps = deaths[has_event] / risk[has_event]
    return CumulativeHazard(unique[has_event], np.cumsum(jumps))


def martingale_residuals(fit_or_eta, time, status, baseline: Optional[CumulativeHazard] = None) -> np.ndarray:
    """m_i = δ_i - Λ̂0(Y_i) exp(η_i)"""
    eta = _linear_predictor(fit_or_eta)
    status = np.asarray(status, dtype=float)
    if baseline is None:
        baseline = getattr(fit_or_eta, 'baseline_cumhaz', None) or breslow_baseline(eta, time, status)
    return status - baseline(np.asarray(time, dtype=float)) * np.exp(eta)


def deviance_residuals(fit_or_eta, time, status, baseline: Optional[CumulativeHazard] = None) -> np.ndarray:
    """
    sign(m) sqrt(-2 [m + δ log(δ - m)]), with δ log(δ - m) = 0 when δ = 0

    Raises:
        ResidualDomainError: δ - m <= 0 for an event observation
    """
    status = np.asarray(status, dtype=float)
    m = martingale_residuals(fit_or_eta, time, status, baseline)

    events = status == 1
    expected = status - m
    if np.any(expected[events] <= 0):
        row = int(np.flatnonzero(events & (expected <= 0))[0])
        raise ResidualDomainError(f"deviance residual undefined at row {row}: zero expected hazard at an event")

    log_term = np.zeros_like(m)
    log_term[events] = np.log(expected[events])
    inner = np.maximum(-2.0 * (m + status * log_term), 0.0)
    return np.sign(m) * np.sqrt(inner)


class CoxGamService:
    """
    Spline Cox Service

    Holds the spline specification and the cvl / lasso settings used by the
    iterative procedure.
    """

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or {}
        self.spec = self.config.get('spline', SplineSpec())
        self.grid_size = int(self.config.get('cvl_grid_size', 50))
        self.folds = int(self.config.get('cvl_folds', 5))
        self.tol = float(self.config.get('lasso_tol', 1e-7))
        self.max_iter = int(self.config.get('lasso_max_iter', 1000))
        self.workers = self.config.get('workers', 1)
        logger.debug("🔧 Spline Cox Service initialized")

    def fit_selected(
        self,
        covariates: np.ndarray,
        features: Sequence[int],
        time,
        status,
        rng: np.random.Generator
    ) -> CoxGamFit:
        """cvl-tuned lasso fit on the spline expansion of the given features"""
        basis, blocks = expand_features(covariates, features, self.spec)
        theta = cvl_select_theta(
            basis, time, status, self.grid_size, self.folds, rng, self.tol, self.max_iter, self.workers
        )
        fit = fit_cox_lasso(
            basis, time, status, theta, self.tol, self.max_iter, features=features, spec=self.spec, blocks=blocks
        )
        return fit.with_baseline(breslow_baseline(fit, time, status))

    def refit_unpenalized(
        self,
        covariates: np.ndarray,
        features: Sequence[int],
        time,
        status,
        max_iter: Optional[int] = None
    ) -> CoxGamFit:
        """Unpenalized fit on the same expansion, with its Breslow baseline"""
        basis, blocks = expand_features(covariates, features, self.spec)
        fit = fit_cox_lasso(
            basis, time, status, 0.0, self.tol, max_iter or self.max_iter,
            features=features, spec=self.spec, blocks=blocks
        )
        return fit.with_baseline(breslow_baseline(fit, time, status))
