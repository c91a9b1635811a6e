#!/usr/bin/env python3
"""
🏁 Benchmark Service
Replication harness for the simulation scenarios and the toy models.

Each replication draws its own data from the stream (seed, replication),
runs one method and reports its minimum model size. Settings are calibrated
once in the parent process so every replication shares the same censoring
bound and inspection horizon. A failed replication aborts the whole report.
"""

import logging
import time
from typing import Dict, Iterable, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd
from joblib import Parallel, delayed

from ..config.app_config import resolve_workers
from ..exceptions import ConfigurationError, ReplicationError
from ..models.benchmark_report import BenchmarkReport
from ..models.iterative_trace import IterativeConfig
from ..models.scenario_spec import ScenarioSpec, TOY_MODELS, is_toy, normalize_scenario_id
from ..models.screening_result import ScreeningConfig, n_over_log_n
from .interval_service import IntervalService, gen_interval_data, inspection_horizon
from .iterative_service import IterativeService
from .screening_service import ScreeningService
from .simulation_service import calibrate_censoring, generate, replication_rng

logger = logging.getLogger(__name__)

METHODS = ('marginal', 'iterative', 'interval')
MEASURES = ('d', 'd1', 'd2')
TOY_N = 200


def min_model_size(ranking: Sequence[int], active_set: Iterable[int]) -> int:
    """
    Smallest ranking prefix holding every active feature

    Args:
        ranking: feature indices, best first
        active_set: indices of the truly active features

    Returns:
        1-based position of the worst-ranked active feature
    """
    active = [int(j) for j in active_set]
    if not active:
        raise ConfigurationError("active set is empty")

    positions = np.empty(len(ranking), dtype=int)
    positions[np.asarray(ranking, dtype=int)] = np.arange(1, len(ranking) + 1)
    for j in active:
        if not 0 <= j < len(ranking):
            raise ConfigurationError(f"active feature {j} outside the ranking of {len(ranking)} features")
    return int(positions[active].max())


def p_all_curve(per_rep_mms: Sequence[int], sizes: Iterable[int]) -> Dict[int, float]:
    """Share of replications whose top-s set holds every active feature, per size s"""
    mms = np.asarray(per_rep_mms, dtype=int)
    if len(mms) == 0:
        return {int(size): 0.0 for size in sizes}
    return {int(size): float(np.mean(mms <= size)) for size in sizes}


def _iterative_ranking(final: List[int], marginal_ranking: np.ndarray) -> np.ndarray:
    """Final set first, each part ordered by marginal rank"""
    chosen = set(final)
    head = [int(j) for j in marginal_ranking if int(j) in chosen]
    tail = [int(j) for j in marginal_ranking if int(j) not in chosen]
    return np.asarray(head + tail, dtype=int)


def _replicate(
    spec: ScenarioSpec,
    replication: int,
    method: str,
    screening: ScreeningConfig,
    iterative: IterativeConfig,
    interval_config: Dict,
    horizon: Optional[float]
) -> Tuple[int, Optional[bool]]:
    """(minimum model size, final set covers the actives) for one replication"""
    try:
        rng = replication_rng(spec.seed, replication)

        if method == 'interval':
            dataset, active = gen_interval_data(spec, rng, horizon=horizon)
            result = IntervalService(interval_config, screening, workers=1).screen_interval(dataset)
            return min_model_size(result.ranking, active), None

        data = generate(spec, rng)
        marginal = ScreeningService(screening, workers=1).screen(data.dataset)
        if method == 'marginal':
            return min_model_size(marginal.ranking, data.active_set), None

        run_config = iterative.model_copy(update={'seed': int(rng.integers(2 ** 31))})
        final, _ = IterativeService(run_config, workers=1).run(data.dataset)
        ranking = _iterative_ranking(final, marginal.ranking)
        return min_model_size(ranking, data.active_set), set(data.active_set) <= set(final)
    except Exception as error:
        raise ReplicationError(replication, error) from error


def _toy_replicate(spec: ScenarioSpec, replication: int, screening: ScreeningConfig, measure: str) -> Tuple[float, float]:
    try:
        data = generate(spec, replication_rng(spec.seed, replication))
        result = ScreeningService(screening, workers=1).screen(data.dataset)
        values = getattr(result, measure)
        return float(values[0]), float(values[1])
    except Exception as error:
        raise ReplicationError(replication, error) from error


def _toy_spec(model: str, c: Optional[float], seed: int, n: int, target_censoring: float) -> ScenarioSpec:
    scenario = normalize_scenario_id(model)
    if not is_toy(scenario):
        raise ConfigurationError(f"toy model expected (one of {TOY_MODELS}), got '{model}'")
    return ScenarioSpec(scenario=scenario, n=n, p=2, c=c, seed=seed, target_censoring=target_censoring)


class BenchmarkService:
    """
    Benchmark Service

    Features:
    - Replicated marginal, iterative and interval screening runs
    - Median / IQR / P_all summaries of the minimum model size
    - Toy-model signal-versus-noise exceedance and coefficient sweeps
    """

    def __init__(self, config: Optional[Dict] = None, workers=None):
        self.config = config or {}
        self.screening = self.config.get('screening') or ScreeningConfig()
        self.iterative = self.config.get('iterative') or IterativeConfig()
        self.interval_config = {
            'turnbull_tol': float(self.config.get('turnbull_tol', 1e-8)),
            'turnbull_max_iter': int(self.config.get('turnbull_max_iter', 5000))
        }
        self.pilot_size = int(self.config.get('calibration_pilot', 20000))
        self.tolerance = float(self.config.get('calibration_tolerance', 0.01))
        self.workers = resolve_workers(workers if workers is not None else self.config.get('workers', 'auto'))
        logger.debug(f"🔧 Benchmark Service initialized (workers={self.workers})")

    def _calibrated(self, spec: ScenarioSpec) -> ScenarioSpec:
        if spec.censoring_bound is not None:
            return spec
        bound = calibrate_censoring(spec, tolerance=self.tolerance, pilot_size=self.pilot_size)
        if not np.isfinite(bound):
            return spec
        return spec.model_copy(update={'censoring_bound': bound})

    def run_replications(self, spec: ScenarioSpec, reps: int, method: str = 'marginal') -> BenchmarkReport:
        """
        Run one method over reps independent datasets

        Raises:
            ConfigurationError: reps < 1, unknown method or toy scenario
            ReplicationError: the first failing replication, in replication order
        """
        if reps < 1:
            raise ConfigurationError(f"reps must be at least 1, got {reps}")
        if method not in METHODS:
            raise ConfigurationError(f"unknown method '{method}', expected one of {METHODS}")
        if is_toy(spec.scenario):
            raise ConfigurationError("toy models are benchmarked with toy_exceedance")

        started = time.perf_counter()
        horizon = None
        if method == 'interval':
            horizon = inspection_horizon(spec, self.pilot_size)
            run_spec = spec
        else:
            run_spec = self._calibrated(spec)

        logger.info(f"🏁 Running {reps} {method} replications of {spec.scenario} (n={spec.n}, p={spec.p})")
        outcomes = Parallel(n_jobs=min(self.workers, reps))(
            delayed(_replicate)(
                run_spec, replication, method, self.screening, self.iterative, self.interval_config, horizon
            )
            for replication in range(reps)
        )

        per_rep_mms = [mms for mms, _ in outcomes]
        if method == 'iterative':
            selection_size = self.iterative.resolve_q(spec.n)
            p_all = float(np.mean([bool(covered) for _, covered in outcomes]))
        else:
            selection_size = min(spec.p, n_over_log_n(spec.n))
            p_all = p_all_curve(per_rep_mms, [selection_size])[selection_size]

        report = BenchmarkReport(
            spec,
            reps,
            method,
            per_rep_mms,
            p_all,
            selection_size,
            runtime_seconds=time.perf_counter() - started,
            p_all_curve=p_all_curve(per_rep_mms, range(1, min(spec.p, n_over_log_n(spec.n)) + 1)),
            experimental=(method == 'interval')
        )
        logger.info(f"✅ {report}")
        return report

    def _toy_values(self, spec: ScenarioSpec, reps: int, measure: str) -> np.ndarray:
        if measure not in MEASURES:
            raise ConfigurationError(f"unknown measure '{measure}', expected one of {MEASURES}")
        run_spec = self._calibrated(spec)
        values = Parallel(n_jobs=min(self.workers, reps))(
            delayed(_toy_replicate)(run_spec, replication, self.screening, measure)
            for replication in range(reps)
        )
        return np.asarray(values, dtype=float).reshape(-1, 2)

    def toy_exceedance(
        self,
        model: str,
        c: Optional[float] = None,
        reps: int = 100,
        seed: int = 2024,
        n: int = TOY_N,
        measure: str = 'd',
        target_censoring: float = 0.2
    ) -> float:
        """Share of replications where the signal's measure strictly exceeds the noise's"""
        if reps < 1:
            raise ConfigurationError(f"reps must be at least 1, got {reps}")
        spec = _toy_spec(model, c, seed, n, target_censoring)
        values = self._toy_values(spec, reps, measure)
        proportion = float(np.mean(values[:, 0] > values[:, 1]))
        logger.info(f"🧸 {spec.scenario} c={spec.coefficient:g} {measure}: signal > noise in {proportion:.0%} of {reps}")
        return proportion

    def toy_coefficient_sweep(
        self,
        model: str,
        c_values: Sequence[float],
        reps: int = 100,
        seed: int = 2024,
        n: int = TOY_N,
        measure: str = 'd',
        target_censoring: float = 0.2
    ) -> pd.DataFrame:
        """Signal and noise measures per replication for each coefficient c"""
        if reps < 1:
            raise ConfigurationError(f"reps must be at least 1, got {reps}")
        frames = []
        for c in c_values:
            spec = _toy_spec(model, float(c), seed, n, target_censoring)
            values = self._toy_values(spec, reps, measure)
            frames.append(pd.DataFrame({
                'c': float(c),
                'replication': np.arange(reps),
                'd_signal': values[:, 0],
                'd_noise': values[:, 1]
            }))
        return pd.concat(frames, ignore_index=True)


def run_replications(
    spec: ScenarioSpec,
    reps: int,
    method: str = 'marginal',
    config: Optional[Dict] = None,
    workers=None
) -> BenchmarkReport:
    return BenchmarkService(config, workers).run_replications(spec, reps, method)


def toy_exceedance(
    model: str,
    c: Optional[float] = None,
    reps: int = 100,
    seed: int = 2024,
    measure: str = 'd',
    n: int = TOY_N,
    workers=None,
    config: Optional[Dict] = None
) -> float:
    """Proportion of replications with d̂(signal) > d̂(noise); ties count as non-exceedance"""
    return BenchmarkService(config, workers).toy_exceedance(model, c, reps, seed, n, measure)


def toy_coefficient_sweep(
    model: str,
    c_values: Sequence[float],
    reps: int = 100,
    seed: int = 2024,
    measure: str = 'd',
    n: int = TOY_N,
    workers=None,
    config: Optional[Dict] = None
) -> pd.DataFrame:
    return BenchmarkService(config, workers).toy_coefficient_sweep(model, c_values, reps, seed, n, measure)
