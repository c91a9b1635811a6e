#!/usr/bin/env python3
"""
✅ Validation Service
Invariant checks for survival datasets.

validate() reports every violation with its row (and column where one
applies); raise_for_violations() turns the first one into the matching
named error for ingestion.
"""

import logging
from typing import Dict, Any, List, Optional, Union

import numpy as np

from ..exceptions import (
    InputError, NegativeTimeError, InvalidStatusError, NoEventsError, MissingValueError,
    InvertedIntervalError, NoFiniteIntervalsError
)
from ..models.dataset import Dataset, IntervalDataset

logger = logging.getLogger(__name__)


class Violation:
    """One violated dataset invariant"""

    def __init__(self, code: str, message: str, row: Optional[int] = None, column: Optional[str] = None):
        self.code = code
        self.message = message
        self.row = row
        self.column = column

    def to_dict(self) -> Dict[str, Any]:
        return {'code': self.code, 'message': self.message, 'row': self.row, 'column': self.column}

    def __eq__(self, other) -> bool:
        return isinstance(other, Violation) and self.to_dict() == other.to_dict()

    def __str__(self) -> str:
        where = []
        if self.column is not None:
            where.append(f"column '{self.column}'")
        if self.row is not None:
            where.append(f"row {self.row}")
        suffix = f" at {', '.join(where)}" if where else ""
        return f"{self.message}{suffix}"

    def __repr__(self) -> str:
        return f"Violation({self.code}, {self})"


_ERRORS = {
    'negative_time': NegativeTimeError,
    'non_finite_time': InputError,
    'invalid_status': InvalidStatusError,
    'no_events': NoEventsError,
    'missing_value': MissingValueError,
    'non_finite_left': InputError,
    'negative_left': NegativeTimeError,
    'inverted_interval': InvertedIntervalError,
    'no_finite_intervals': NoFiniteIntervalsError
}


class ValidationService:
    """
    Validation Service

    Checks the dataset invariants:
    - finite, nonnegative times
    - status values literally 0 or 1, at least one event
    - complete (finite) covariates
    - interval endpoints ordered, at least one finite right endpoint
    """

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or {}
        self.max_reported = self.config.get('max_reported_violations', None)

    def validate(self, dataset: Union[Dataset, IntervalDataset]) -> List[Violation]:
        """Every violated invariant; an empty list means the dataset is valid"""
        if isinstance(dataset, IntervalDataset):
            violations = self._check_intervals(dataset)
        else:
            violations = self._check_times(dataset) + self._check_status(dataset)
        violations += self._check_covariates(dataset.covariates, dataset.feature_names)

        if violations:
            logger.debug(f"Dataset validation found {len(violations)} violations")
        if self.max_reported is not None:
            violations = violations[:self.max_reported]
        return violations

    def _check_times(self, dataset: Dataset) -> List[Violation]:
        violations = []
        time = dataset.time
        for row in np.flatnonzero(~np.isfinite(time)):
            violations.append(Violation('non_finite_time', 'time is not finite', int(row), 'time'))
        for row in np.flatnonzero(np.isfinite(time) & (time < 0)):
            violations.append(Violation('negative_time', 'negative time', int(row), 'time'))
        return violations

    def _check_status(self, dataset: Dataset) -> List[Violation]:
        violations = []
        status = dataset.status
        invalid = ~np.isin(status, (0.0, 1.0))
        for row in np.flatnonzero(invalid):
            violations.append(Violation('invalid_status', 'invalid status value', int(row), 'status'))
        if not np.any(status == 1):
            violations.append(Violation('no_events', 'no observed events'))
        return violations

    def _check_intervals(self, dataset: IntervalDataset) -> List[Violation]:
        violations = []
        left, right = dataset.left, dataset.right
        for row in np.flatnonzero(~np.isfinite(left)):
            violations.append(Violation('non_finite_left', 'left endpoint is not finite', int(row), 'left'))
        for row in np.flatnonzero(np.isfinite(left) & (left < 0)):
            violations.append(Violation('negative_left', 'negative time', int(row), 'left'))
        for row in np.flatnonzero(~(left < right)):
            violations.append(Violation('inverted_interval', 'inverted interval', int(row)))
        if not np.any(np.isfinite(right)):
            violations.append(Violation('no_finite_intervals', 'no finite intervals'))
        return violations

    def _check_covariates(self, covariates: np.ndarray, names: List[str]) -> List[Violation]:
        violations = []
        rows, cols = np.nonzero(~np.isfinite(covariates))
        for row, col in zip(rows, cols):
            violations.append(Violation('missing_value', 'missing or non-finite covariate', int(row), names[col]))
        return violations


_default_service = ValidationService()


def validate(dataset: Union[Dataset, IntervalDataset]) -> List[Violation]:
    """Every violated invariant of the dataset (empty list when valid)"""
    return _default_service.validate(dataset)


def raise_for_violations(violations: List[Violation]):
    """Raise the named error of the first violation, if any"""
    if not violations:
        return
    first = violations[0]
    error_class = _ERRORS.get(first.code, InputError)
    raise error_class(first.message, row=first.row, column=first.column)
