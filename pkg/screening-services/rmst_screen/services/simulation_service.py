#!/usr/bin/env python3
"""
🎲 Simulation Service
Seeded generators for the transformation-model scenarios and toy models.

Event times follow H(T) = z with H(t) = log{(e^{2t} - 1) / 2}, z being a
scenario-specific predictor plus an error draw. Censoring times are
U[0, u] with u calibrated once per setting on a pilot sample.

Random streams are numpy PCG64 generators seeded through SeedSequence with
spawn keys, so (seed, replication) pairs reproduce byte-identical data on
any platform with the pinned numpy.
"""

import logging
from functools import lru_cache
from typing import Dict, Optional

import numpy as np
from scipy.optimize import brentq
from scipy.signal import lfilter

from ..exceptions import CalibrationError, ConfigurationError, UnknownScenarioError
from ..models.dataset import Dataset
from ..models.scenario_spec import GeneratedData, ScenarioSpec, is_toy

logger = logging.getLogger(__name__)

LOG_HALF = np.log(0.5)
LOG_TWO = np.log(2.0)

BOUND_BRACKET = (1e-6, 1e6)
TOY_ERROR_SCALE = 0.6
CONTAMINATION_WEIGHT = 0.1
CONTAMINATION_AR = 0.5

# Spawn keys of the auxiliary streams; replication r uses spawn key (r,)
PILOT_STREAM = 2 ** 20
CALIBRATION_SEED = 20240101

SCENARIO_1_BETA = np.array([1.0, 0.9, 0, 0, 0, 0, 0, 0, -0.8, -1.0])
SCENARIO_5_BETA = np.array([2.0, 1.8, 0, 0, 0, 0, 0, 0, -1.6, -2.0])


def replication_rng(seed: int, replication: int = 0) -> np.random.Generator:
    """Independent PCG64 stream for one replication of a master seed"""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence(seed, spawn_key=(replication,))))


# ------------------------------------------------------------ covariates


def ar1_normal(n: int, p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """N(0, Σ) rows with Σ_ij = rho^|i-j|, built column by column"""
    noise = rng.standard_normal((n, p))
    innovation = np.sqrt(1.0 - rho ** 2)
    if innovation == 0:
        return np.repeat(noise[:, :1], p, axis=1)
    noise[:, 0] /= innovation
    # X_k = rho X_{k-1} + sqrt(1 - rho²) e_k
    return lfilter([innovation], [1.0, -rho], noise, axis=1)


def equicorrelated_normal(n: int, p: int, rho: float, rng: np.random.Generator) -> np.ndarray:
    """N(0, Σ) rows with unit variances and Σ_ij = rho off the diagonal"""
    if rho < 0:
        raise ConfigurationError(f"equicorrelated design needs rho >= 0, got {rho}")
    shared = rng.standard_normal((n, 1))
    own = rng.standard_normal((n, p))
    return np.sqrt(rho) * shared + np.sqrt(1.0 - rho) * own


def multivariate_t2(n: int, p: int, rng: np.random.Generator, rho: float = CONTAMINATION_AR) -> np.ndarray:
    """Multivariate t with 2 degrees of freedom and AR(1) scale matrix"""
    gaussian = ar1_normal(n, p, rho, rng)
    return gaussian / np.sqrt(rng.chisquare(2, size=(n, 1)) / 2.0)


def gen_covariates(spec: ScenarioSpec, rng: np.random.Generator, p: Optional[int] = None) -> np.ndarray:
    """
    Covariate matrix for a scenario

    S1, S2, S4: AR(1) Gaussian. S3: 0.9 AR(1) Gaussian + 0.1 iid t(2).
    S5: 0.9 equicorrelated Gaussian + 0.1 multivariate t(2).
    Toy models: independent standard normals (column 0 is the signal).
    """
    n = spec.n
    p = p or spec.p
    scenario = spec.scenario

    if scenario in ('S1', 'S2', 'S4'):
        return ar1_normal(n, p, spec.rho, rng)
    if scenario == 'S3':
        base = ar1_normal(n, p, spec.rho, rng)
        return (1 - CONTAMINATION_WEIGHT) * base + CONTAMINATION_WEIGHT * rng.standard_t(2, size=(n, p))
    if scenario == 'S5':
        base = equicorrelated_normal(n, p, spec.rho, rng)
        return (1 - CONTAMINATION_WEIGHT) * base + CONTAMINATION_WEIGHT * multivariate_t2(n, p, rng)
    if is_toy(scenario):
        return rng.standard_normal((n, p))
    raise UnknownScenarioError(f"unknown scenario id '{scenario}'")


# ------------------------------------------------------ transformation H


def H(t):
    """H(t) = log{(e^{2t} - 1) / 2}"""
    t = np.asarray(t, dtype=float)
    return LOG_HALF + np.log(np.expm1(2.0 * t))


def invert_H(z):
    """T = ½ log(1 + 2 e^z), evaluated without overflow"""
    z = np.asarray(z, dtype=float)
    result = 0.5 * np.logaddexp(0.0, z + LOG_TWO)
    return float(result) if result.ndim == 0 else result


def draw_errors(kind: str, size, rng: np.random.Generator, scale: float = 1.0) -> np.ndarray:
    """
    Standard error draws

    normal:   N(0, 1)
    extreme:  minimum extreme value, CDF 1 - exp(-e^z) (proportional hazards)
    logistic: standard logistic (proportional odds)
    """
    if kind == 'normal':
        draws = rng.standard_normal(size)
    elif kind == 'extreme':
        draws = np.log(rng.standard_exponential(size))
    elif kind == 'logistic':
        draws = rng.logistic(size=size)
    else:
        raise ConfigurationError(f"unknown error distribution '{kind}'")
    return scale * draws


# ------------------------------------------------------------ predictors


def change_point_h1(x):
    x = np.asarray(x, dtype=float)
    return np.where((x <= -0.8) | (x > 0.8), 0.6 * x ** 2, 0.0)


def change_point_h2(x):
    x = np.asarray(x, dtype=float)
    return np.where(x < -1, 1.2 * x, 0.0)


def change_point_h3(x):
    x = np.asarray(x, dtype=float)
    return np.where((x > -1) & (x < 0), 1.8, 0.2)


def change_point_h4(x):
    x = np.asarray(x, dtype=float)
    return np.where((x >= -1) & (x <= 0.5), 1.8, 0.0)


def toy_signal(model: str, x, c: float) -> np.ndarray:
    """c-scaled signal term of toy models (i)-(vi)"""
    x = np.asarray(x, dtype=float)
    if model == 'toy-i':
        shape = ((x <= -1) | (x >= 1)).astype(float)
    elif model == 'toy-ii':
        shape = (x <= -1).astype(float)
    elif model == 'toy-iii':
        shape = (x >= 1).astype(float)
    elif model == 'toy-iv':
        shape = (x / 2) ** 3 + x ** 2 + x / 3 - 0.5
    elif model == 'toy-v':
        shape = np.cos(3 * x + 0.5)
    elif model == 'toy-vi':
        shape = x
    else:
        raise UnknownScenarioError(f"unknown toy model '{model}'")
    return c * shape


def scenario_predictor(X: np.ndarray, spec: ScenarioSpec) -> np.ndarray:
    """Deterministic part of H(T) for every row of X"""
    X = np.asarray(X, dtype=float)
    scenario = spec.scenario

    if scenario == 'S1':
        return -X[:, :10] @ SCENARIO_1_BETA
    if scenario == 'S5':
        return -X[:, :10] @ SCENARIO_5_BETA
    if scenario in ('S2', 'S3'):
        return (
            -4.0 * np.cos(2 * X[:, 0])
            + 2.2 * X[:, 1] ** 2
            - 2.4 * X[:, 2]
            + 0.9 * (X[:, 7] - 1) ** 2
            + 2.2 * np.sin(X[:, 8] - 3)
        )
    if scenario == 'S4':
        return (
            change_point_h1(X[:, 0])
            + change_point_h2(X[:, 1])
            + change_point_h3(X[:, 7])
            + change_point_h4(X[:, 8])
        )
    if is_toy(scenario):
        return toy_signal(scenario, X[:, 0], spec.coefficient)
    raise UnknownScenarioError(f"unknown scenario id '{scenario}'")


def gen_event_times(X, spec: ScenarioSpec, rng: np.random.Generator) -> np.ndarray:
    """T = H^{-1}(predictor + ε)"""
    X = np.asarray(X, dtype=float)
    if is_toy(spec.scenario):
        errors = draw_errors('normal', X.shape[0], rng, TOY_ERROR_SCALE)
    else:
        errors = draw_errors(spec.error, X.shape[0], rng)
    return invert_H(scenario_predictor(X, spec) + errors)


# ----------------------------------------------------------- censoring


def censoring_rate(event_times: np.ndarray, bound: float) -> float:
    """P(C < T) for C ~ U[0, bound], averaged over the given event times"""
    return float(np.mean(np.minimum(event_times, bound)) / bound)


def calibrate_bound(event_times, target_rate: float, tolerance: float = 0.01) -> float:
    """
    Censoring bound u with P(C < T) = target_rate on a pilot sample

    The rate is decreasing in u; the root is searched on log u over
    [1e-6, 1e6].

    Raises:
        CalibrationError: target not attainable within the bracket
    """
    event_times = np.asarray(event_times, dtype=float)
    if not 0 < target_rate < 1:
        raise ConfigurationError(f"target censoring must lie in (0, 1), got {target_rate}")

    def gap(log_bound: float) -> float:
        return censoring_rate(event_times, np.exp(log_bound)) - target_rate

    lo, hi = np.log(BOUND_BRACKET[0]), np.log(BOUND_BRACKET[1])
    if gap(lo) < 0 or gap(hi) > 0:
        raise CalibrationError(
            f"censoring target {target_rate:.3f} unattainable for u in [{BOUND_BRACKET[0]:g}, {BOUND_BRACKET[1]:g}]"
        )

    bound = float(np.exp(brentq(gap, lo, hi, xtol=1e-12)))
    realized = censoring_rate(event_times, bound)
    if abs(realized - target_rate) > tolerance:
        raise CalibrationError(f"calibration reached {realized:.4f} for target {target_rate:.4f}")
    return bound


def pilot_event_times(spec: ScenarioSpec, pilot_size: int) -> np.ndarray:
    """Latent event times of a large pilot sample (only the active columns are drawn)"""
    p_pilot = max(spec.active_set) + 1
    if is_toy(spec.scenario):
        p_pilot = max(p_pilot, 2)
    pilot_spec = spec.model_copy(update={'n': pilot_size, 'p': p_pilot})
    rng = np.random.Generator(
        np.random.PCG64(np.random.SeedSequence(CALIBRATION_SEED, spawn_key=(PILOT_STREAM,)))
    )
    X = gen_covariates(pilot_spec, rng)
    return gen_event_times(X, pilot_spec, rng)


@lru_cache(maxsize=256)
def _cached_bound(setting: tuple, target_rate: float, tolerance: float, pilot_size: int) -> float:
    spec = ScenarioSpec(**dict(setting))
    bound = calibrate_bound(pilot_event_times(spec, pilot_size), target_rate, tolerance)
    logger.info(f"🎯 Calibrated u={bound:.4f} for {spec.scenario}/{spec.error} at {target_rate:.0%} censoring")
    return bound


def _setting_key(spec: ScenarioSpec) -> tuple:
    return (
        ('scenario', spec.scenario),
        ('error', spec.error),
        ('rho', spec.rho),
        ('c', spec.c),
        ('p', max(spec.active_set) + 1 if not is_toy(spec.scenario) else 2)
    )


def calibrate_censoring(
    spec: ScenarioSpec,
    target_rate: Optional[float] = None,
    tolerance: float = 0.01,
    pilot_size: int = 20000
) -> float:
    """
    Censoring bound u for a setting; target 0 means no censoring (u = inf)

    Cached per (scenario, error, rho, c, target) so all replications of a
    setting share one u.
    """
    target = spec.target_censoring if target_rate is None else target_rate
    if target == 0:
        return float('inf')
    return _cached_bound(_setting_key(spec), float(target), float(tolerance), int(pilot_size))


# ------------------------------------------------------------ generation


def generate(
    spec: ScenarioSpec,
    rng: Optional[np.random.Generator] = None,
    tolerance: float = 0.01,
    pilot_size: int = 20000
) -> GeneratedData:
    """Simulated right-censored dataset with its truth"""
    rng = rng if rng is not None else replication_rng(spec.seed)
    if spec.censoring_bound is not None:
        bound = spec.censoring_bound
    else:
        bound = calibrate_censoring(spec, tolerance=tolerance, pilot_size=pilot_size)

    X = gen_covariates(spec, rng)
    latent = gen_event_times(X, spec, rng)
    if np.isfinite(bound):
        censoring = rng.uniform(0.0, bound, size=spec.n)
    else:
        censoring = np.full(spec.n, np.inf)

    time = np.minimum(latent, censoring)
    status = (latent <= censoring).astype(float)
    return GeneratedData(Dataset(X, time, status), spec.active_set, latent, bound, spec)


class SimulationService:
    """
    Simulation Service

    Features:
    - Scenario and toy-model generators
    - Per-setting censoring calibration (cached)
    - Replication streams derived from one master seed
    """

    def __init__(self, config: Optional[Dict] = None):
        self.config = config or {}
        self.pilot_size = int(self.config.get('calibration_pilot', 20000))
        self.tolerance = float(self.config.get('calibration_tolerance', 0.01))
        logger.debug(f"🔧 Simulation Service initialized (pilot={self.pilot_size})")

    def generate(self, spec: ScenarioSpec, replication: Optional[int] = None) -> GeneratedData:
        rng = replication_rng(spec.seed, replication if replication is not None else 0)
        data = generate(spec, rng, self.tolerance, self.pilot_size)
        logger.info(f"🎲 Generated {data}")
        return data

    def calibrate(self, spec: ScenarioSpec, target_rate: Optional[float] = None) -> float:
        return calibrate_censoring(spec, target_rate, self.tolerance, self.pilot_size)
