#!/usr/bin/env python3
"""
📊 Screening Models
Configuration and result containers for marginal RMST screening.
"""

import json
import math
from typing import Dict, Any, List, Literal, Optional, Union

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import ConfigurationError

N_OVER_LOG_N = 'n_over_log_n'


def n_over_log_n(n: int) -> int:
    """floor(n / ln n), the conventional SIS model size"""
    if n < 2:
        return 1
    return max(1, int(math.floor(n / math.log(n))))


class ScreeningConfig(BaseModel):
    """
    Screening Configuration

    min_stratum_size: a stratum contributes only when it holds at least this
    many observations (6 reads "size greater than 5").
    """

    model_config = ConfigDict(frozen=True)

    min_stratum_size: int = Field(default=6, ge=1)
    selected_size: Union[int, Literal['n_over_log_n']] = N_OVER_LOG_N
    parallel_workers: Union[int, Literal['auto']] = 'auto'

    def resolve_selected_size(self, n: int, p: int) -> int:
        """Number of features to keep for a sample of n rows and p columns"""
        if self.selected_size == N_OVER_LOG_N:
            return min(p, n_over_log_n(n))
        size = int(self.selected_size)
        if size < 1:
            raise ConfigurationError(f"selected_size must be positive, got {size}")
        if size > p:
            raise ConfigurationError(f"selected_size {size} exceeds the number of features {p}")
        return size


class ScreeningResult:
    """
    Screening Result

    Per-feature discrepancies d = d1 + d2, the ranking by descending d (ties
    broken by ascending feature index) and the selected prefix of the ranking.
    """

    def __init__(
        self,
        d,
        d1,
        d2,
        selected_size: int,
        skipped_term_counts=None,
        feature_names: Optional[List[str]] = None,
        excluded=None
    ):
        self.d = np.asarray(d, dtype=float)
        self.d1 = np.asarray(d1, dtype=float)
        self.d2 = np.asarray(d2, dtype=float)
        p = len(self.d)
        self.skipped_term_counts = (
            np.zeros(p, dtype=int) if skipped_term_counts is None
            else np.asarray(skipped_term_counts, dtype=int)
        )
        self.feature_names = feature_names or [f"x{j + 1}" for j in range(p)]
        self.excluded = frozenset(int(j) for j in (excluded or ()))

        # lexsort: last key is primary
        self.ranking = np.lexsort((np.arange(p), -self.d))
        eligible = [int(j) for j in self.ranking if int(j) not in self.excluded]
        self.selected_size = min(int(selected_size), len(eligible))
        self.selected = eligible[:self.selected_size]

    @property
    def p(self) -> int:
        return len(self.d)

    def rank_positions(self) -> np.ndarray:
        """1-based rank of every feature"""
        positions = np.empty(self.p, dtype=int)
        positions[self.ranking] = np.arange(1, self.p + 1)
        return positions

    def to_rows(self) -> List[Dict[str, Any]]:
        """One record per feature in ranking order"""
        selected = set(self.selected)
        rows = []
        for position, j in enumerate(self.ranking, start=1):
            j = int(j)
            rows.append({
                'feature': self.feature_names[j],
                'd': float(self.d[j]),
                'd1': float(self.d1[j]),
                'd2': float(self.d2[j]),
                'rank': position,
                'selected': int(j in selected)
            })
        return rows

    def to_dict(self) -> Dict[str, Any]:
        return {
            'p': self.p,
            'selected_size': self.selected_size,
            'selected': [self.feature_names[j] for j in self.selected],
            'selected_indices': list(self.selected),
            'top_features': [self.feature_names[int(j)] for j in self.ranking[:10]],
            'skipped_terms_total': int(self.skipped_term_counts.sum()),
            'excluded': sorted(self.excluded)
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __str__(self) -> str:
        return f"ScreeningResult(p={self.p}, selected={self.selected_size})"

    def __repr__(self) -> str:
        return self.__str__()
