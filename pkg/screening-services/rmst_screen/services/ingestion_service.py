#!/usr/bin/env python3
"""
📥 Ingestion Service
CSV reading and writing for right- and interval-censored datasets.

Format: UTF-8, comma-delimited, header row required. Every column other
than the named time/status (or left/right) columns is a covariate, in file
order. Floats are written with 17 significant digits so a write/load cycle
reproduces the arrays bit for bit.
"""

import logging
import os
from typing import List, Tuple

import numpy as np
import pandas as pd

from ..exceptions import (
    MalformedFileError, MissingFileError, MissingColumnError, NonNumericCellError, MissingValueError,
    InvalidStatusError
)
from ..models.dataset import Dataset, IntervalDataset
from .validation_service import validate, raise_for_violations

logger = logging.getLogger(__name__)

FLOAT_FORMAT = '%.17g'
INF_SENTINEL = 'inf'


def _read_text_frame(path: str) -> pd.DataFrame:
    if not os.path.isfile(path):
        raise MissingFileError(f"input file not found: {path}")
    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, encoding='utf-8')
    except UnicodeDecodeError:
        raise MalformedFileError(f"input file is not valid UTF-8: {path}") from None
    except pd.errors.EmptyDataError:
        raise MalformedFileError(f"input file is empty: {path}") from None
    except pd.errors.ParserError as error:
        raise MalformedFileError(f"cannot parse CSV {path}: {error}") from None
    frame.columns = [str(name).strip() for name in frame.columns]
    return frame


def _require_columns(frame: pd.DataFrame, columns: List[str]):
    for name in columns:
        if name not in frame.columns:
            raise MissingColumnError("missing column", column=name)


def _parse_numeric(frame: pd.DataFrame, column: str) -> np.ndarray:
    """Exact float parse of one column, naming the first bad cell"""
    values = np.empty(len(frame))
    for row, cell in enumerate(frame[column].tolist()):
        text = cell.strip()
        if text == '':
            raise MissingValueError("missing value", row=row, column=column)
        try:
            values[row] = float(text)
        except ValueError:
            raise NonNumericCellError("non-numeric cell", row=row, column=column) from None
    return values


def _parse_status(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = np.empty(len(frame))
    for row, cell in enumerate(frame[column].tolist()):
        text = cell.strip()
        if text == '0' or text == '1':
            values[row] = float(text)
            continue
        try:
            float(text)
        except ValueError:
            raise NonNumericCellError("non-numeric cell", row=row, column=column) from None
        raise InvalidStatusError("invalid status value", row=row, column=column)
    return values


def _parse_right_endpoint(frame: pd.DataFrame, column: str) -> np.ndarray:
    values = np.empty(len(frame))
    for row, cell in enumerate(frame[column].tolist()):
        text = cell.strip()
        if text == '' or text.lower() == INF_SENTINEL:
            values[row] = np.inf
            continue
        try:
            values[row] = float(text)
        except ValueError:
            raise NonNumericCellError("non-numeric cell", row=row, column=column) from None
    return values


def _parse_covariates(frame: pd.DataFrame, reserved: Tuple[str, ...]) -> Tuple[np.ndarray, List[str]]:
    names = [name for name in frame.columns if name not in reserved]
    matrix = np.empty((len(frame), len(names)))
    for col, name in enumerate(names):
        matrix[:, col] = _parse_numeric(frame, name)
    return matrix, names


def load_right_censored_csv(path: str, time_col: str = 'time', status_col: str = 'status') -> Dataset:
    """Read a right-censored dataset; covariate column order is preserved"""
    frame = _read_text_frame(path)
    _require_columns(frame, [time_col, status_col])

    time = _parse_numeric(frame, time_col)
    status = _parse_status(frame, status_col)
    covariates, names = _parse_covariates(frame, (time_col, status_col))

    dataset = Dataset(covariates, time, status, names)
    raise_for_violations(validate(dataset))

    logger.info(f"📥 Loaded {dataset} from {path}")
    return dataset


def load_interval_censored_csv(path: str, left_col: str = 'left', right_col: str = 'right') -> IntervalDataset:
    """Read an interval-censored dataset; empty or 'inf' right endpoints mean +inf"""
    frame = _read_text_frame(path)
    _require_columns(frame, [left_col, right_col])

    left = _parse_numeric(frame, left_col)
    right = _parse_right_endpoint(frame, right_col)
    covariates, names = _parse_covariates(frame, (left_col, right_col))

    dataset = IntervalDataset(covariates, left, right, names)
    raise_for_violations(validate(dataset))

    logger.info(f"📥 Loaded {dataset} from {path}")
    return dataset


def write_right_censored_csv(dataset: Dataset, path: str, time_col: str = 'time', status_col: str = 'status'):
    """Write in the ingestion format (17 significant digits)"""
    dataset.to_frame(time_col, status_col).to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"Wrote {dataset} to {path}")


def write_interval_censored_csv(dataset: IntervalDataset, path: str, left_col: str = 'left', right_col: str = 'right'):
    frame = dataset.to_frame(left_col, right_col)
    frame[right_col] = [INF_SENTINEL if np.isinf(value) else FLOAT_FORMAT % value for value in dataset.right]
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.debug(f"Wrote {dataset} to {path}")
