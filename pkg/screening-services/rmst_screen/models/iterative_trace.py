#!/usr/bin/env python3
"""
🔁 Iterative Screening Models
Run configuration and per-iteration trace for the iterative procedure.
"""

import json
from typing import Dict, Any, List, Literal, Optional, Union

from pydantic import BaseModel, ConfigDict, Field

from .cox_gam_fit import SplineSpec
from .screening_result import ScreeningConfig, N_OVER_LOG_N, n_over_log_n


class IterativeConfig(BaseModel):
    """
    Iterative Screening Configuration

    q defaults to floor(n/2) when left unset.
    """

    model_config = ConfigDict(frozen=True)

    q: Optional[int] = Field(default=None, ge=1)
    per_step_size: Union[int, Literal['n_over_log_n']] = N_OVER_LOG_N
    max_iterations: int = Field(default=20, ge=1)
    screening: ScreeningConfig = ScreeningConfig()
    spline: SplineSpec = SplineSpec()
    cvl_grid_size: int = Field(default=50, ge=1)
    cvl_folds: int = Field(default=5, ge=2)
    lasso_tol: float = Field(default=1e-7, gt=0)
    lasso_max_iter: int = Field(default=1000, ge=1)
    seed: int = 2024

    def resolve_q(self, n: int) -> int:
        return self.q if self.q is not None else max(1, n // 2)

    def resolve_step_size(self, n: int) -> int:
        if self.per_step_size == N_OVER_LOG_N:
            return n_over_log_n(n)
        return int(self.per_step_size)


class IterationRecord:
    """One lasso + residual-screening round"""

    def __init__(
        self,
        iteration: int,
        candidates: List[int],
        lasso_selected: List[int],
        residual_selected: List[int],
        union: List[int],
        theta: Optional[float],
        lasso_converged: bool,
        refit_converged: bool,
        residual_source: str = 'refit'
    ):
        self.iteration = iteration
        self.candidates = sorted(int(j) for j in candidates)
        self.lasso_selected = sorted(int(j) for j in lasso_selected)
        self.residual_selected = [int(j) for j in residual_selected]
        self.union = sorted(int(j) for j in union)
        self.theta = theta
        self.lasso_converged = lasso_converged
        self.refit_converged = refit_converged
        self.residual_source = residual_source

    def to_dict(self) -> Dict[str, Any]:
        return {
            'iteration': self.iteration,
            'candidates': self.candidates,
            'lasso_selected': self.lasso_selected,
            'residual_selected': self.residual_selected,
            'union': self.union,
            'theta': self.theta,
            'lasso_converged': self.lasso_converged,
            'refit_converged': self.refit_converged,
            'residual_source': self.residual_source
        }

    def __str__(self) -> str:
        return (
            f"IterationRecord({self.iteration}: |A|={len(self.lasso_selected)}, "
            f"|M|={len(self.residual_selected)}, |A^k|={len(self.union)})"
        )

    def __repr__(self) -> str:
        return self.__str__()


class IterativeTrace:
    """
    Iterative Screening Trace

    initial: the marginal-screening candidate set A^0.
    final:   the returned set (truncated to q when needed).
    """

    def __init__(self, initial: List[int], q: int):
        self.initial = [int(j) for j in initial]
        self.q = q
        self.records: List[IterationRecord] = []
        self.final: List[int] = []
        self.stopped_by = None
        self.fallback = False
        self.truncated = False

    def append(self, record: IterationRecord):
        self.records.append(record)

    def __len__(self) -> int:
        return len(self.records)

    def seen_features(self) -> set:
        seen = set()
        for record in self.records:
            seen.update(record.lasso_selected)
            seen.update(record.residual_selected)
        return seen

    def to_dict(self) -> Dict[str, Any]:
        return {
            'initial': self.initial,
            'q': self.q,
            'iterations': [record.to_dict() for record in self.records],
            'final': self.final,
            'stopped_by': self.stopped_by,
            'fallback': self.fallback,
            'truncated': self.truncated
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __str__(self) -> str:
        return f"IterativeTrace({len(self.records)} iterations, final={len(self.final)}, stopped_by={self.stopped_by})"

    def __repr__(self) -> str:
        return self.__str__()
