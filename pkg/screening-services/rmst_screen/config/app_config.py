#!/usr/bin/env python3
"""
⚙️ Application Configuration
Environment-driven defaults for screening, model fitting and benchmarking.

This module provides:
- Environment-specific configurations
- Parallelism and seeding defaults
- Screening and cvl tuning defaults
- Benchmark scale settings
"""

import os
from typing import Any, Optional

from dotenv import load_dotenv

load_dotenv()


def _env_int(name: str, default: int) -> int:
    return int(os.getenv(name, default))


class BaseConfig:
    """Base configuration with common settings"""

    # Logging
    LOG_LEVEL = os.getenv('RMST_LOG_LEVEL', 'INFO')
    LOG_FORMAT = os.getenv('RMST_LOG_FORMAT', '%(asctime)s - %(name)s - %(levelname)s - %(message)s')

    # Parallelism and reproducibility
    WORKERS = os.getenv('RMST_WORKERS', 'auto')
    SEED = _env_int('RMST_SEED', 2024)

    # Marginal screening
    MIN_STRATUM_SIZE = _env_int('RMST_MIN_STRATUM_SIZE', 6)

    # Spline Cox lasso
    SPLINE_DEGREE = _env_int('RMST_SPLINE_DEGREE', 3)
    SPLINE_NUM_BASIS = _env_int('RMST_SPLINE_NUM_BASIS', 3)
    CVL_GRID_SIZE = _env_int('RMST_CVL_GRID_SIZE', 50)
    CVL_FOLDS = _env_int('RMST_CVL_FOLDS', 5)
    LASSO_TOL = float(os.getenv('RMST_LASSO_TOL', 1e-7))
    LASSO_MAX_ITER = _env_int('RMST_LASSO_MAX_ITER', 1000)

    # Iterative screening
    MAX_ITERATIONS = _env_int('RMST_MAX_ITERATIONS', 20)

    # Simulation
    CALIBRATION_PILOT = _env_int('RMST_CALIBRATION_PILOT', 20000)
    CALIBRATION_TOLERANCE = float(os.getenv('RMST_CALIBRATION_TOLERANCE', 0.01))

    # Benchmarks (desk scale)
    BENCH_REPS = _env_int('RMST_BENCH_REPS', 50)
    BENCH_N = _env_int('RMST_BENCH_N', 200)
    BENCH_P = _env_int('RMST_BENCH_P', 500)

    # Turnbull EM
    TURNBULL_TOL = float(os.getenv('RMST_TURNBULL_TOL', 1e-8))
    TURNBULL_MAX_ITER = _env_int('RMST_TURNBULL_MAX_ITER', 5000)


class DevelopmentConfig(BaseConfig):
    """Development environment configuration"""

    LOG_LEVEL = os.getenv('RMST_LOG_LEVEL', 'DEBUG')


class TestingConfig(BaseConfig):
    """Testing environment configuration"""

    LOG_LEVEL = 'WARNING'

    # Sequential and small so the suite stays fast
    WORKERS = '1'
    CALIBRATION_PILOT = 5000
    BENCH_REPS = 5
    BENCH_P = 50
    CVL_GRID_SIZE = 10
    CVL_FOLDS = 3


class FullScaleConfig(BaseConfig):
    """Full-scale reproduction settings (p=2000, 100 replications)"""

    LOG_LEVEL = 'INFO'
    BENCH_REPS = 100
    BENCH_P = 2000


class Config:
    """Configuration factory"""

    _configs = {
        'development': DevelopmentConfig,
        'production': BaseConfig,
        'testing': TestingConfig,
        'full-scale': FullScaleConfig
    }

    def __new__(cls, config_name: Optional[str] = None):
        """
        Pick the configuration class for an environment

        Args:
            config_name: Configuration environment name

        Returns:
            Configuration class
        """
        if config_name is None:
            config_name = os.getenv('RMST_ENV', 'production')

        if config_name not in cls._configs:
            raise ValueError(f"Unknown configuration: {config_name}. Available: {list(cls._configs.keys())}")

        return cls._configs[config_name]

    @classmethod
    def get_available_configs(cls) -> list:
        """Get list of available configuration names"""
        return list(cls._configs.keys())


def resolve_workers(workers: Any) -> int:
    """Turn 'auto' or an integer-like value into a positive worker count"""
    if workers is None or str(workers).lower() == 'auto':
        return max(1, os.cpu_count() or 1)
    count = int(workers)
    if count < 1:
        raise ValueError(f"workers must be positive, got {workers}")
    return count
