#!/usr/bin/env python3
"""
📈 Estimator Service
Kaplan-Meier product-limit curves, RMST queries and restriction times.

Ties between a death and a censoring at the same time are resolved
death-first: the risk set at t is every subject with Y >= t.
"""

import logging
from typing import Optional

import numpy as np

from ..exceptions import ConfigurationError, NoEventsError, InputError
from ..models.survival_curve import SurvivalCurve, STEP

logger = logging.getLogger(__name__)


def _check_lengths(time: np.ndarray, status: np.ndarray):
    if len(time) != len(status):
        raise ConfigurationError(f"time and status lengths differ: {len(time)} vs {len(status)}")
    if len(time) == 0:
        raise ConfigurationError("empty input")


def km_from_sorted(time: np.ndarray, status: np.ndarray) -> SurvivalCurve:
    """
    Product-limit curve for times already sorted ascending

    Screening slices strata out of a time-sorted sample with boolean masks,
    which keeps them sorted, so the per-threshold fits skip the sort.
    """
    n = len(time)
    boundary = np.empty(n, dtype=bool)
    boundary[0] = True
    boundary[1:] = time[1:] != time[:-1]
    first = np.flatnonzero(boundary)

    deaths = np.add.reduceat(status, first)
    at_risk = n - first
    has_event = deaths > 0

    factors = 1.0 - deaths[has_event] / at_risk[has_event]
    return SurvivalCurve(time[first][has_event], np.cumprod(factors), STEP)


def km_fit(time, status) -> SurvivalCurve:
    """
    Kaplan-Meier estimator Ŝ(t) = Π_{Y_i <= t} (1 - Δ_i / R_i)

    Args:
        time: observed times
        status: event indicators (1 = event)

    Returns:
        Step SurvivalCurve with jumps at the distinct uncensored times

    Raises:
        NoEventsError: when no status equals 1
    """
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)
    _check_lengths(time, status)
    if not np.any(status == 1):
        raise NoEventsError("no events")

    order = np.argsort(time, kind='stable')
    return km_from_sorted(time[order], status[order])


def rmst(curve: SurvivalCurve, tau: float) -> float:
    """Restricted mean survival time ∫_0^tau Ŝ(t) dt"""
    if tau < 0:
        raise InputError(f"negative tau: {tau}")
    return curve.integral(tau)


def restriction_time(time, status) -> Optional[float]:
    """Largest uncensored time, or None when the sample has no events"""
    time = np.asarray(time, dtype=float)
    status = np.asarray(status, dtype=float)
    events = time[status == 1]
    if len(events) == 0:
        return None
    return float(events.max())
