#!/usr/bin/env python3
"""
🧩 Turnbull Fit Model
Interval-censored NPMLE: Turnbull intervals, masses and the linearly
smoothed survival curve.
"""

from typing import Dict, Any, List, Optional

import numpy as np

from .survival_curve import SurvivalCurve


class TurnbullFit:
    """
    Turnbull Fit

    turnbull_intervals: (q_k, p_k] pairs, p_k may be +inf for the tail.
    masses: probability on each interval, summing to 1.
    curve: piecewise-linear survival, linear across each finite interval.
    """

    def __init__(
        self,
        turnbull_intervals: np.ndarray,
        masses: np.ndarray,
        curve: SurvivalCurve,
        iterations: int,
        converged: bool,
        loglik_path: Optional[List[float]] = None
    ):
        self.turnbull_intervals = np.asarray(turnbull_intervals, dtype=float).reshape(-1, 2)
        self.masses = np.asarray(masses, dtype=float)
        self.curve = curve
        self.iterations = int(iterations)
        self.converged = bool(converged)
        self.loglik_path = list(loglik_path or [])

    @property
    def restriction_time(self) -> Optional[float]:
        """Right endpoint of the last Turnbull interval with finite right end"""
        finite = self.turnbull_intervals[np.isfinite(self.turnbull_intervals[:, 1]), 1]
        if len(finite) == 0:
            return None
        return float(finite.max())

    def to_dict(self) -> Dict[str, Any]:
        return {
            'turnbull_intervals': self.turnbull_intervals.tolist(),
            'masses': self.masses.tolist(),
            'iterations': self.iterations,
            'converged': self.converged
        }

    def __str__(self) -> str:
        return f"TurnbullFit({len(self.masses)} intervals, iterations={self.iterations}, converged={self.converged})"

    def __repr__(self) -> str:
        return self.__str__()
