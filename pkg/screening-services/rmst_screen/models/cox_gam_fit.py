#!/usr/bin/env python3
"""
🧮 Spline Cox Model
Spline specification, Breslow cumulative hazard and the fitted additive
Cox model returned by the lasso engine.
"""

import json
from typing import Dict, Any, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator


class SplineSpec(BaseModel):
    """
    B-spline expansion per feature

    degree k and num_basis m_j retained columns; interior knots sit at
    equally spaced quantiles of the observed feature and the boundary knots
    are clamped at the observed min/max.
    """

    model_config = ConfigDict(frozen=True)

    degree: int = Field(default=3, ge=1)
    num_basis: int = Field(default=3, ge=1)

    @model_validator(mode='after')
    def _check_basis_count(self) -> 'SplineSpec':
        if self.num_basis < self.degree:
            raise ValueError(f"num_basis ({self.num_basis}) must be at least degree ({self.degree})")
        return self

    @property
    def interior_knots(self) -> int:
        return self.num_basis - self.degree


class CumulativeHazard:
    """Non-decreasing step function Λ̂0(t), zero before the first event time"""

    def __init__(self, times, values):
        self.times = np.asarray(times, dtype=float)
        self.values = np.asarray(values, dtype=float)

    def __call__(self, t) -> np.ndarray:
        t = np.asarray(t, dtype=float)
        k = np.searchsorted(self.times, t, side='right') - 1
        if len(self.times) == 0:
            return np.zeros_like(t)
        return np.where(k >= 0, self.values[np.clip(k, 0, None)], 0.0)

    def to_dict(self) -> Dict[str, Any]:
        return {'times': self.times.tolist(), 'values': self.values.tolist()}


class CoxGamFit:
    """
    Fitted spline-additive Cox model

    alpha is laid out in consecutive blocks, one per entry of `features`
    (the candidate set); blocks[i] is the column count of feature i. Blocks
    are spec.num_basis wide unless the expansion of a feature was reduced
    (few distinct values), and empty for a constant feature.
    linear_predictor is basis @ alpha on the fitting sample.
    """

    def __init__(
        self,
        features: List[int],
        spec: SplineSpec,
        alpha,
        theta: float,
        linear_predictor,
        converged: bool,
        iterations: int,
        baseline_cumhaz: Optional[CumulativeHazard] = None,
        objective_path: Optional[List[float]] = None,
        blocks: Optional[List[int]] = None
    ):
        self.features = [int(j) for j in features]
        self.spec = spec
        self.alpha = np.asarray(alpha, dtype=float)
        self.theta = float(theta)
        self.linear_predictor = np.asarray(linear_predictor, dtype=float)
        self.converged = bool(converged)
        self.iterations = int(iterations)
        self.baseline_cumhaz = baseline_cumhaz
        self.objective_path = list(objective_path or [])
        if blocks is None:
            blocks = [spec.num_basis] * len(self.features)
        self.blocks = [int(size) for size in blocks]
        if len(self.blocks) != len(self.features) or sum(self.blocks) != len(self.alpha):
            raise ValueError(
                f"block layout {self.blocks} does not fit {len(self.features)} features "
                f"and {len(self.alpha)} coefficients"
            )

    def coefficient_block(self, position: int) -> np.ndarray:
        start = sum(self.blocks[:position])
        return self.alpha[start:start + self.blocks[position]]

    def selected_features(self) -> List[int]:
        """Features with any nonzero spline coefficient"""
        return [
            j for position, j in enumerate(self.features)
            if np.any(self.coefficient_block(position) != 0)
        ]

    def with_baseline(self, baseline: CumulativeHazard) -> 'CoxGamFit':
        self.baseline_cumhaz = baseline
        return self

    def to_dict(self) -> Dict[str, Any]:
        return {
            'features': self.features,
            'spline': self.spec.model_dump(),
            'blocks': self.blocks,
            'alpha': self.alpha.tolist(),
            'theta': self.theta,
            'converged': self.converged,
            'iterations': self.iterations,
            'selected_features': self.selected_features()
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2)

    def __str__(self) -> str:
        return (
            f"CoxGamFit({len(self.features)} features, theta={self.theta:.4g}, "
            f"selected={len(self.selected_features())}, converged={self.converged})"
        )

    def __repr__(self) -> str:
        return self.__str__()
