#!/usr/bin/env python3
"""
📉 Survival Curve Model
Right-continuous step or piecewise-linear survival function with a cached
cumulative integral, so RMST queries cost one binary search.
"""

from typing import Dict, Any

import numpy as np

STEP = 'step'
PIECEWISE_LINEAR = 'piecewise-linear'


class SurvivalCurve:
    """
    Survival curve Ŝ(t)

    step:              Ŝ(t) = values[k] on [jump_times[k], jump_times[k+1])
    piecewise-linear:  Ŝ linear between consecutive knots (jump_times[k], values[k])

    In both kinds Ŝ(t) = 1 before the first knot and stays at its last value
    after the last knot. cum_integral[k] = ∫_0^{jump_times[k]} Ŝ(u) du.
    """

    def __init__(self, jump_times, values, kind: str = STEP):
        if kind not in (STEP, PIECEWISE_LINEAR):
            raise ValueError(f"unknown curve kind: {kind}")

        jump_times = np.asarray(jump_times, dtype=float)
        values = np.asarray(values, dtype=float)
        if jump_times.shape != values.shape or jump_times.ndim != 1:
            raise ValueError("jump_times and values must be 1-d arrays of equal length")
        if np.any(np.diff(jump_times) <= 0):
            raise ValueError("jump_times must be strictly increasing")
        if len(jump_times) and jump_times[0] < 0:
            raise ValueError("jump_times must be nonnegative")

        self.kind = kind
        self.jump_times = jump_times
        self.values = values
        self.cum_integral = self._integrate()

        for array in (self.jump_times, self.values, self.cum_integral):
            array.setflags(write=False)

    def _integrate(self) -> np.ndarray:
        times = self.jump_times
        if len(times) == 0:
            return np.zeros(0)

        widths = np.diff(times)
        if self.kind == STEP:
            pieces = self.values[:-1] * widths
        else:
            pieces = 0.5 * (self.values[:-1] + self.values[1:]) * widths

        cum = np.empty(len(times))
        # Ŝ = 1 on [0, first knot)
        cum[0] = times[0]
        cum[1:] = times[0] + np.cumsum(pieces)
        return cum

    @property
    def size(self) -> int:
        return len(self.jump_times)

    def evaluate(self, t) -> np.ndarray:
        """Ŝ(t) for scalar or array t"""
        t = np.asarray(t, dtype=float)
        if self.size == 0:
            return np.ones_like(t)

        k = np.searchsorted(self.jump_times, t, side='right') - 1
        inside = k >= 0
        safe_k = np.clip(k, 0, self.size - 1)
        result = np.where(inside, self.values[safe_k], 1.0)

        if self.kind == PIECEWISE_LINEAR and self.size > 1:
            interior = inside & (k < self.size - 1)
            nxt = np.clip(safe_k + 1, 0, self.size - 1)
            width = self.jump_times[nxt] - self.jump_times[safe_k]
            slope = np.divide(
                self.values[nxt] - self.values[safe_k],
                width,
                out=np.zeros_like(width),
                where=width > 0
            )
            linear = self.values[safe_k] + slope * (t - self.jump_times[safe_k])
            result = np.where(interior, linear, result)
        return result

    def integral(self, tau: float) -> float:
        """∫_0^tau Ŝ(u) du using the cached cumulative integral"""
        if self.size == 0 or tau <= self.jump_times[0]:
            return float(tau)

        k = int(np.searchsorted(self.jump_times, tau, side='right')) - 1
        base = self.cum_integral[k]
        dt = tau - self.jump_times[k]
        if dt == 0:
            return float(base)

        left_value = self.values[k]
        if self.kind == STEP or k == self.size - 1:
            return float(base + left_value * dt)

        width = self.jump_times[k + 1] - self.jump_times[k]
        right_value = left_value + (self.values[k + 1] - left_value) * dt / width
        return float(base + 0.5 * (left_value + right_value) * dt)

    def to_dict(self) -> Dict[str, Any]:
        return {
            'kind': self.kind,
            'jump_times': self.jump_times.tolist(),
            'values': self.values.tolist(),
            'cum_integral': self.cum_integral.tolist()
        }

    def __str__(self) -> str:
        return f"SurvivalCurve({self.kind}, {self.size} knots)"

    def __repr__(self) -> str:
        return self.__str__()
