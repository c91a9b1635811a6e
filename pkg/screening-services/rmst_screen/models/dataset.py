#!/usr/bin/env python3
"""
📦 Survival Dataset Models
Immutable containers for right-censored and interval-censored samples.
"""

from typing import Dict, Any, List, Optional, Sequence

import numpy as np
import pandas as pd

from ..exceptions import ConfigurationError


def _frozen(values, dtype) -> np.ndarray:
    array = np.array(values, dtype=dtype, copy=True)
    array.setflags(write=False)
    return array


def _default_names(p: int) -> List[str]:
    return [f"x{j + 1}" for j in range(p)]


class Dataset:
    """
    Right-censored survival sample

    Holds the covariate matrix X (n x p), observed times Y = min(T, C),
    event indicators Δ = I(T <= C) and one name per covariate column.
    Arrays are read-only after construction so a Dataset can be shared
    across workers without copying.
    """

    def __init__(
        self,
        covariates,
        time,
        status,
        feature_names: Optional[Sequence[str]] = None
    ):
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates.reshape(-1, 1)
        if covariates.ndim != 2:
            raise ConfigurationError("covariates must be a 2-d matrix")

        self.covariates = _frozen(covariates, float)
        self.time = _frozen(np.ravel(time), float)
        self.status = _frozen(np.ravel(status), float)
        self.feature_names = list(feature_names) if feature_names is not None else _default_names(covariates.shape[1])

        n, p = self.covariates.shape
        if len(self.time) != n or len(self.status) != n:
            raise ConfigurationError(
                f"row counts differ: covariates {n}, time {len(self.time)}, status {len(self.status)}"
            )
        if n < 2:
            raise ConfigurationError(f"at least 2 observations required, got {n}")
        if p < 1:
            raise ConfigurationError("at least one covariate column required")
        if len(self.feature_names) != p:
            raise ConfigurationError(f"{len(self.feature_names)} feature names for {p} columns")

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]

    @property
    def event_count(self) -> int:
        return int(np.sum(self.status == 1))

    @property
    def censoring_rate(self) -> float:
        return 1.0 - self.event_count / self.n

    def column(self, j: int) -> np.ndarray:
        return self.covariates[:, j]

    def to_frame(self, time_col: str = 'time', status_col: str = 'status') -> pd.DataFrame:
        """Tabular form in the CSV column order: time, status, covariates"""
        frame = pd.DataFrame(np.asarray(self.covariates), columns=self.feature_names)
        frame.insert(0, status_col, self.status.astype(int))
        frame.insert(0, time_col, np.asarray(self.time))
        return frame

    def to_dict(self) -> Dict[str, Any]:
        """Summary (not the data itself)"""
        return {
            'n': self.n,
            'p': self.p,
            'events': self.event_count,
            'censoring_rate': self.censoring_rate,
            'feature_names': self.feature_names
        }

    def __str__(self) -> str:
        return f"Dataset(n={self.n}, p={self.p}, events={self.event_count})"

    def __repr__(self) -> str:
        return self.__str__()


class IntervalDataset:
    """
    Interval-censored survival sample

    Each event time is only known to lie in (left, right]; right = +inf
    encodes a right-censored observation.
    """

    def __init__(
        self,
        covariates,
        left,
        right,
        feature_names: Optional[Sequence[str]] = None
    ):
        covariates = np.asarray(covariates, dtype=float)
        if covariates.ndim == 1:
            covariates = covariates.reshape(-1, 1)
        if covariates.ndim != 2:
            raise ConfigurationError("covariates must be a 2-d matrix")

        self.covariates = _frozen(covariates, float)
        self.left = _frozen(np.ravel(left), float)
        self.right = _frozen(np.ravel(right), float)
        self.feature_names = list(feature_names) if feature_names is not None else _default_names(covariates.shape[1])

        n, p = self.covariates.shape
        if len(self.left) != n or len(self.right) != n:
            raise ConfigurationError(
                f"row counts differ: covariates {n}, left {len(self.left)}, right {len(self.right)}"
            )
        if n < 1 or p < 1:
            raise ConfigurationError("empty interval dataset")
        if len(self.feature_names) != p:
            raise ConfigurationError(f"{len(self.feature_names)} feature names for {p} columns")

    @property
    def n(self) -> int:
        return self.covariates.shape[0]

    @property
    def p(self) -> int:
        return self.covariates.shape[1]

    @property
    def finite_count(self) -> int:
        return int(np.sum(np.isfinite(self.right)))

    def column(self, j: int) -> np.ndarray:
        return self.covariates[:, j]

    def to_frame(self, left_col: str = 'left', right_col: str = 'right') -> pd.DataFrame:
        frame = pd.DataFrame(np.asarray(self.covariates), columns=self.feature_names)
        frame.insert(0, right_col, np.asarray(self.right))
        frame.insert(0, left_col, np.asarray(self.left))
        return frame

    def to_dict(self) -> Dict[str, Any]:
        return {
            'n': self.n,
            'p': self.p,
            'finite_intervals': self.finite_count,
            'right_censored': self.n - self.finite_count,
            'feature_names': self.feature_names
        }

    def __str__(self) -> str:
        return f"IntervalDataset(n={self.n}, p={self.p}, finite={self.finite_count})"

    def __repr__(self) -> str:
        return self.__str__()
