#!/usr/bin/env python3
"""
🏁 Benchmark Report Model
Replication summary: minimum model sizes, Median / IQR / P_all.
"""

import json
from typing import Dict, Any, List, Optional

import numpy as np

from .scenario_spec import ScenarioSpec


class BenchmarkReport:
    """
    Benchmark Report

    per_rep_mms: minimum model size of every replication, in replication order.
    p_all: share of replications whose fixed-size selection holds every active
    feature (size floor(n/ln n), or the final set for the iterative method).
    """

    def __init__(
        self,
        spec: ScenarioSpec,
        reps: int,
        method: str,
        per_rep_mms: List[int],
        p_all: float,
        selection_size: int,
        runtime_seconds: float = 0.0,
        p_all_curve: Optional[Dict[int, float]] = None,
        experimental: bool = False
    ):
        self.spec = spec
        self.reps = int(reps)
        self.method = method
        self.per_rep_mms = [int(m) for m in per_rep_mms]
        self.p_all = float(p_all)
        self.selection_size = int(selection_size)
        self.runtime_seconds = float(runtime_seconds)
        self.p_all_curve = dict(p_all_curve or {})
        self.experimental = experimental

    @property
    def median_mms(self) -> float:
        return float(np.median(self.per_rep_mms))

    @property
    def iqr_mms(self) -> float:
        # numpy's default 'linear' method is the type-7 quantile
        q75, q25 = np.percentile(self.per_rep_mms, [75, 25])
        return float(q75 - q25)

    def to_dict(self, include_runtime: bool = True) -> Dict[str, Any]:
        result = {
            'spec': self.spec.model_dump(),
            'method': self.method,
            'reps': self.reps,
            'per_rep_mms': self.per_rep_mms,
            'median_mms': self.median_mms,
            'iqr_mms': self.iqr_mms,
            'p_all': self.p_all,
            'selection_size': self.selection_size,
            'p_all_curve': {str(size): value for size, value in sorted(self.p_all_curve.items())},
            'experimental': self.experimental
        }
        if include_runtime:
            result['runtime_seconds'] = self.runtime_seconds
        return result

    def to_json(self, include_runtime: bool = True) -> str:
        return json.dumps(self.to_dict(include_runtime), indent=2)

    def to_table(self) -> str:
        """Aligned text table with the Median / IQR / Pall columns"""
        header = f"{'Scenario':<10}{'Error':<10}{'CR':<6}{'Method':<12}{'n':>6}{'p':>7}{'Median':>9}{'IQR':>8}{'Pall':>8}"
        label = self.method + ('*' if self.experimental else '')
        row = (
            f"{self.spec.scenario:<10}{self.spec.error:<10}{self.spec.target_censoring:<6.0%}"
            f"{label:<12}{self.spec.n:>6}{self.spec.p:>7}"
            f"{self.median_mms:>9g}{self.iqr_mms:>8g}{self.p_all:>8.0%}"
        )
        lines = [header, row]
        if self.experimental:
            lines.append("* experimental (interval-censored path)")
        return "\n".join(lines)

    def __str__(self) -> str:
        return (
            f"BenchmarkReport({self.spec.scenario}, {self.method}, reps={self.reps}, "
            f"median={self.median_mms:g}, iqr={self.iqr_mms:g}, p_all={self.p_all:.2f})"
        )

    def __repr__(self) -> str:
        return self.__str__()
