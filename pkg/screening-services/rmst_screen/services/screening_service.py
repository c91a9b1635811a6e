#!/usr/bin/env python3
"""
🔎 Screening Service
Stratified RMST discrepancy per feature and marginal screening.

For every observation i a feature is split into the upper stratum
{X_j >= X_ji} and the lower stratum {X_j < X_ji}. Each stratum with enough
subjects and at least one event contributes
|RMST_stratum(τ̂) - RMST_overall(τ̂)|, τ̂ being the stratum's largest
uncensored time. Sums are divided by n whether or not terms were skipped.

Observations sharing a covariate value share a stratification, so terms are
computed once per distinct value and weighted by its multiplicity. Distinct
values are visited in ascending order, which makes d̂ depend on the column
only through its ordering.
"""

import logging
from typing import Iterable, List, Optional, Tuple

import numpy as np
from joblib import Parallel, delayed

from ..config.app_config import resolve_workers
from ..exceptions import ConfigurationError, InvalidFeatureIndexError
from ..models.dataset import Dataset
from ..models.screening_result import ScreeningConfig, ScreeningResult
from ..models.survival_curve import SurvivalCurve
from .estimator_service import km_from_sorted

logger = logging.getLogger(__name__)


def _stratum_term(
    time: np.ndarray,
    status: np.ndarray,
    mask: np.ndarray,
    size: int,
    overall: SurvivalCurve,
    min_size: int
) -> Optional[float]:
    """RMST gap of one stratum, or None when the term is skipped"""
    if size < min_size:
        return None
    stratum_status = status[mask]
    if not np.any(stratum_status == 1):
        return None
    stratum_time = time[mask]
    tau = stratum_time[stratum_status == 1].max()
    curve = km_from_sorted(stratum_time, stratum_status)
    return abs(curve.integral(tau) - overall.integral(tau))


def _feature_discrepancy(
    x: np.ndarray,
    time: np.ndarray,
    status: np.ndarray,
    overall: SurvivalCurve,
    min_size: int
) -> Tuple[float, float, int]:
    """(d1, d2, skipped) for one covariate column of a time-sorted sample"""
    n = len(x)
    values, counts = np.unique(x, return_counts=True)
    below = np.concatenate(([0], np.cumsum(counts)[:-1]))

    upper_sum = 0.0
    lower_sum = 0.0
    skipped = 0
    for value, count, n_below in zip(values, counts, below):
        upper = x >= value
        term = _stratum_term(time, status, upper, n - n_below, overall, min_size)
        if term is None:
            skipped += count
        else:
            upper_sum += count * term

        term = _stratum_term(time, status, ~upper, n_below, overall, min_size)
        if term is None:
            skipped += count
        else:
            lower_sum += count * term

    return upper_sum / n, lower_sum / n, int(skipped)


def _feature_block(
    covariates: np.ndarray,
    time: np.ndarray,
    status: np.ndarray,
    overall: SurvivalCurve,
    min_size: int
) -> np.ndarray:
    block = np.empty((covariates.shape[1], 3))
    for col in range(covariates.shape[1]):
        block[col] = _feature_discrepancy(covariates[:, col], time, status, overall, min_size)
    return block


def feature_blocks(p: int, workers: int) -> List[np.ndarray]:
    """Contiguous column blocks, a few per worker"""
    if p == 0:
        return []
    return [block for block in np.array_split(np.arange(p), min(p, max(1, workers * 4))) if len(block)]


def _uncensored_block(covariates: np.ndarray, y: np.ndarray, min_size: int) -> np.ndarray:
    block = np.empty((covariates.shape[1], 2))
    for col in range(covariates.shape[1]):
        block[col] = _uncensored_terms(y, covariates[:, col], min_size)
    return block


def _uncensored_terms(y: np.ndarray, x: np.ndarray, min_size: int) -> Tuple[float, float]:
    n = len(y)
    order = np.argsort(x, kind='stable')
    xs = x[order]
    cum = np.concatenate(([0.0], np.cumsum(y[order])))
    total = cum[-1]
    mean = total / n

    values, counts = np.unique(xs, return_counts=True)
    n_below = np.searchsorted(xs, values, side='left')
    n_above = n - n_below

    upper_ok = n_above >= min_size
    lower_ok = (n_below >= min_size) & (n_below > 0)

    upper_mean = np.divide(total - cum[n_below], n_above, out=np.zeros(len(values)), where=upper_ok)
    lower_mean = np.divide(cum[n_below], n_below, out=np.zeros(len(values)), where=lower_ok)

    d1 = np.sum(np.where(upper_ok, counts * np.abs(upper_mean - mean), 0.0)) / n
    d2 = np.sum(np.where(lower_ok, counts * np.abs(lower_mean - mean), 0.0)) / n
    return float(d1), float(d2)


class ScreeningService:
    """
    Screening Service

    Features:
    - RMST discrepancy d̂_j = d̂_j1 + d̂_j2 for right-censored data
    - Mean-based discrepancy for uncensored responses (residual screening)
    - Feature-parallel evaluation with worker-count independent results
    """

    def __init__(self, config: Optional[ScreeningConfig] = None, workers=None):
        self.config = config or ScreeningConfig()
        self.workers = resolve_workers(workers if workers is not None else self.config.parallel_workers)
        logger.debug(f"🔧 Screening Service initialized (workers={self.workers})")

    def _sorted_sample(self, dataset: Dataset):
        order = np.argsort(dataset.time, kind='stable')
        time = np.asarray(dataset.time)[order]
        status = np.asarray(dataset.status)[order]
        return order, time, status, km_from_sorted(time, status)

    def rmst_discrepancy(self, dataset: Dataset, j: int) -> Tuple[float, float, float, int]:
        """
        Discrepancy of a single feature

        Args:
            dataset: validated right-censored sample
            j: 0-based feature index

        Returns:
            (d, d1, d2, skipped_terms)
        """
        if not 0 <= j < dataset.p:
            raise InvalidFeatureIndexError(f"feature index {j} outside 0..{dataset.p - 1}")

        order, time, status, overall = self._sorted_sample(dataset)
        d1, d2, skipped = _feature_discrepancy(
            np.asarray(dataset.covariates[order, j]), time, status, overall, self.config.min_stratum_size
        )
        return d1 + d2, d1, d2, skipped

    def screen(self, dataset: Dataset) -> ScreeningResult:
        """Rank every feature by d̂ and keep the top selected_size"""
        order, time, status, overall = self._sorted_sample(dataset)
        covariates = np.asarray(dataset.covariates)[order]
        min_size = self.config.min_stratum_size

        blocks = feature_blocks(dataset.p, self.workers)
        parts = Parallel(n_jobs=self.workers)(
            delayed(_feature_block)(covariates[:, block], time, status, overall, min_size) for block in blocks
        )

        values = np.empty((dataset.p, 3))
        for block, part in zip(blocks, parts):
            values[block] = part

        d1, d2 = values[:, 0], values[:, 1]
        skipped = values[:, 2].astype(int)
        size = self.config.resolve_selected_size(dataset.n, dataset.p)
        result = ScreeningResult(d1 + d2, d1, d2, size, skipped, dataset.feature_names)

        logger.info(
            f"🔎 Screened {dataset.p} features on n={dataset.n}: "
            f"top {result.selected_size}, {int(skipped.sum())} skipped terms"
        )
        return result

    def uncensored_discrepancy(self, y, xj) -> Tuple[float, float, float]:
        """Mean-based discrepancy for a fully observed response; returns (d, d1, d2)"""
        y = np.asarray(y, dtype=float)
        xj = np.asarray(xj, dtype=float)
        if len(y) != len(xj):
            raise ConfigurationError(f"y and x lengths differ: {len(y)} vs {len(xj)}")
        if len(y) < 2:
            raise ConfigurationError("at least 2 observations required")
        d1, d2 = _uncensored_terms(y, xj, self.config.min_stratum_size)
        return d1 + d2, d1, d2

    def screen_uncensored(
        self,
        y,
        covariates,
        exclude: Iterable[int] = (),
        feature_names: Optional[List[str]] = None,
        selected_size: Optional[int] = None
    ) -> ScreeningResult:
        """Rank the non-excluded features by the mean-based discrepancy on y"""
        y = np.asarray(y, dtype=float)
        covariates = np.asarray(covariates, dtype=float)
        n, p = covariates.shape
        if len(y) != n:
            raise ConfigurationError(f"y has {len(y)} entries for {n} rows")

        excluded = sorted({int(j) for j in exclude})
        for j in excluded:
            if not 0 <= j < p:
                raise InvalidFeatureIndexError(f"feature index {j} outside 0..{p - 1}")
        keep = np.setdiff1d(np.arange(p), excluded)

        d1 = np.full(p, -np.inf)
        d2 = np.full(p, -np.inf)
        blocks = feature_blocks(len(keep), self.workers)
        parts = Parallel(n_jobs=self.workers)(
            delayed(_uncensored_block)(covariates[:, keep[block]], y, self.config.min_stratum_size)
            for block in blocks
        )
        for block, part in zip(blocks, parts):
            d1[keep[block]] = part[:, 0]
            d2[keep[block]] = part[:, 1]

        if selected_size is None:
            selected_size = self.config.resolve_selected_size(n, p)
        result = ScreeningResult(d1 + d2, d1, d2, selected_size, None, feature_names, excluded)
        logger.debug(f"Residual screening over {len(keep)} features selected {result.selected}")
        return result


def rmst_discrepancy(dataset: Dataset, j: int, config: Optional[ScreeningConfig] = None) -> Tuple[float, float, float, int]:
    """(d, d1, d2, skipped_terms) for feature j; see ScreeningService.rmst_discrepancy"""
    return ScreeningService(config, workers=1).rmst_discrepancy(dataset, j)


def screen(dataset: Dataset, config: Optional[ScreeningConfig] = None, workers=None) -> ScreeningResult:
    return ScreeningService(config, workers).screen(dataset)


def uncensored_discrepancy(y, xj, config: Optional[ScreeningConfig] = None) -> Tuple[float, float, float]:
    return ScreeningService(config, workers=1).uncensored_discrepancy(y, xj)


def screen_uncensored(
    y,
    covariates,
    exclude: Iterable[int] = (),
    config: Optional[ScreeningConfig] = None,
    workers=None,
    selected_size: Optional[int] = None
) -> ScreeningResult:
    return ScreeningService(config, workers).screen_uncensored(y, covariates, exclude, selected_size=selected_size)
