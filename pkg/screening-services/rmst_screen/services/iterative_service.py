#!/usr/bin/env python3
"""
🔁 Iterative Screening Service
Alternates spline-Cox lasso selection with deviance-residual screening.

Round k:
1. cvl-tuned lasso on the spline expansion of the candidate set gives A
2. deviance residuals of an unpenalized refit on A are screened over the
   features outside A with the mean-based discrepancy, giving M
3. the next candidate set is A ∪ M

The loop starts from the marginal RMST screening set and stops when the set
reaches q features, stops changing, or max_iterations rounds have run.
"""

import logging
from typing import List, Optional, Tuple

import numpy as np

from ..exceptions import ComputationError, ConfigurationError, InputError
from ..models.dataset import Dataset
from ..models.iterative_trace import IterationRecord, IterativeConfig, IterativeTrace
from ..models.screening_result import ScreeningResult
from .coxgam_service import CoxGamService, deviance_residuals
from .screening_service import ScreeningService
from .simulation_service import replication_rng

logger = logging.getLogger(__name__)

MIN_ITERATIVE_N = 20
REFIT_MAX_ITER = 200

STOP_SIZE = 'size'
STOP_UNCHANGED = 'unchanged'
STOP_MAX_ITERATIONS = 'max_iterations'


class IterativeService:
    """
    Iterative Screening Service

    Features:
    - Marginal RMST screening initializer
    - Lasso + residual rounds with a full per-round trace
    - Deterministic given the config seed
    """

    def __init__(self, config: Optional[IterativeConfig] = None, workers=None):
        self.config = config or IterativeConfig()
        self.screening = ScreeningService(self.config.screening, workers)
        self.coxgam = CoxGamService({
            'spline': self.config.spline,
            'cvl_grid_size': self.config.cvl_grid_size,
            'cvl_folds': self.config.cvl_folds,
            'lasso_tol': self.config.lasso_tol,
            'lasso_max_iter': self.config.lasso_max_iter,
            'workers': self.screening.workers
        })
        logger.debug(f"🔧 Iterative Service initialized (max_iterations={self.config.max_iterations})")

    def _residuals(self, dataset: Dataset, lasso_fit, selected: List[int]) -> Tuple[np.ndarray, bool, str]:
        """Deviance residuals of the refit on the selected set, falling back to the penalized fit"""
        time, status = dataset.time, dataset.status
        refit_converged = False
        if selected:
            try:
                refit = self.coxgam.refit_unpenalized(
                    dataset.covariates, selected, time, status, min(REFIT_MAX_ITER, self.config.lasso_max_iter)
                )
                refit_converged = refit.converged
                if refit.converged:
                    residuals = deviance_residuals(refit, time, status)
                    if np.all(np.isfinite(residuals)):
                        return residuals, True, 'refit'
            except (ComputationError, InputError) as error:
                logger.warning(f"⚠️ Unpenalized refit failed: {error}")

        residuals = deviance_residuals(lasso_fit, time, status)
        return residuals, refit_converged, 'penalized'

    def _truncate(self, features: List[int], marginal: ScreeningResult, q: int) -> List[int]:
        """q features with the largest marginal d̂ (ranking order)"""
        position = marginal.rank_positions()
        return sorted(sorted(features, key=lambda j: position[j])[:q])

    def run(self, dataset: Dataset) -> Tuple[List[int], IterativeTrace]:
        """
        Iterative screening of a right-censored dataset

        Returns:
            (final feature indices, trace)

        Raises:
            ConfigurationError: n too small or q larger than p
        """
        n, p = dataset.n, dataset.p
        if n < MIN_ITERATIVE_N:
            raise ConfigurationError(f"iterative screening needs n >= {MIN_ITERATIVE_N}, got {n}")
        q = self.config.resolve_q(n)
        if q > p:
            raise ConfigurationError(f"q={q} exceeds the number of features p={p}")
        step_size = self.config.resolve_step_size(n)
        rng = replication_rng(self.config.seed)

        marginal = self.screening.screen(dataset)
        initial = sorted(marginal.ranking[:min(p, step_size)].tolist())
        trace = IterativeTrace(initial, q)

        current = list(initial)
        previous: List[int] = []
        iteration = 0
        while len(current) < q and current != previous and iteration < self.config.max_iterations:
            iteration += 1
            lasso_fit = self.coxgam.fit_selected(dataset.covariates, current, dataset.time, dataset.status, rng)
            selected = lasso_fit.selected_features()

            if not selected and iteration == 1:
                trace.append(IterationRecord(
                    iteration, current, [], [], [], lasso_fit.theta, lasso_fit.converged, False, 'none'
                ))
                trace.fallback = True
                trace.final = self._truncate(initial, marginal, q)
                trace.stopped_by = 'fallback'
                logger.warning("⚠️ Lasso selected no feature in the first round; returning the marginal set")
                return trace.final, trace

            residuals, refit_converged, source = self._residuals(dataset, lasso_fit, selected)
            residual_screen = self.screening.screen_uncensored(
                residuals, dataset.covariates, exclude=selected, selected_size=step_size
            )
            found = residual_screen.selected

            previous, current = current, sorted(set(selected) | set(found))
            trace.append(IterationRecord(
                iteration, previous, selected, found, current,
                lasso_fit.theta, lasso_fit.converged, refit_converged, source
            ))
            logger.info(
                f"🔁 Round {iteration}: |A|={len(selected)}, |M|={len(found)}, candidate set {len(current)}"
            )

        if len(current) >= q:
            trace.stopped_by = STOP_SIZE
        elif current == previous:
            trace.stopped_by = STOP_UNCHANGED
        else:
            trace.stopped_by = STOP_MAX_ITERATIONS

        if len(current) > q:
            trace.truncated = True
            current = self._truncate(current, marginal, q)
        trace.final = current
        return current, trace


def iterative_screen(dataset: Dataset, config: Optional[IterativeConfig] = None, workers=None) -> Tuple[List[int], IterativeTrace]:
    """Final selected set and the per-round trace"""
    return IterativeService(config, workers).run(dataset)
