#!/usr/bin/env python3
"""
🔧 Service Registry
Lazy construction and configuration of the screening services.

This registry provides:
- Service lifecycle management
- Dependency injection (shared screening settings)
- Configuration from the environment config class
- Per-command configuration overrides
"""

import logging
from threading import Lock
from typing import Any, Dict

from ..config.app_config import Config
from ..models.cox_gam_fit import SplineSpec
from ..models.iterative_trace import IterativeConfig
from ..models.screening_result import ScreeningConfig
from .benchmark_service import BenchmarkService
from .interval_service import IntervalService
from .iterative_service import IterativeService
from .screening_service import ScreeningService
from .simulation_service import SimulationService

logger = logging.getLogger(__name__)


class ServiceRegistry:
    """
    Service Registry

    Features:
    - Singleton service instances per registry
    - Lazy initialization
    - Config overrides that reset the affected service
    """

    def __init__(self, config_class=None):
        self._config = config_class or Config()
        self._services: Dict[str, Any] = {}
        self._service_configs: Dict[str, Dict] = {}
        self._lock = Lock()

        self._init_service_configs()

        logger.debug("🔧 Service Registry initialized")

    @property
    def app_config(self):
        """Environment configuration class the registry was built from"""
        return self._config

    def _init_service_configs(self):
        """Initialize service configurations from the config class"""
        cfg = self._config

        self._service_configs['screening_service'] = {
            'min_stratum_size': cfg.MIN_STRATUM_SIZE,
            'selected_size': 'n_over_log_n',
            'workers': cfg.WORKERS
        }

        self._service_configs['iterative_service'] = {
            'q': None,
            'per_step_size': 'n_over_log_n',
            'max_iterations': cfg.MAX_ITERATIONS,
            'cvl_grid_size': cfg.CVL_GRID_SIZE,
            'cvl_folds': cfg.CVL_FOLDS,
            'lasso_tol': cfg.LASSO_TOL,
            'lasso_max_iter': cfg.LASSO_MAX_ITER,
            'spline_degree': cfg.SPLINE_DEGREE,
            'spline_num_basis': cfg.SPLINE_NUM_BASIS,
            'seed': cfg.SEED
        }

        self._service_configs['simulation_service'] = {
            'calibration_pilot': cfg.CALIBRATION_PILOT,
            'calibration_tolerance': cfg.CALIBRATION_TOLERANCE
        }

        self._service_configs['interval_service'] = {
            'turnbull_tol': cfg.TURNBULL_TOL,
            'turnbull_max_iter': cfg.TURNBULL_MAX_ITER,
            'calibration_pilot': cfg.CALIBRATION_PILOT
        }

        self._service_configs['benchmark_service'] = {
            'turnbull_tol': cfg.TURNBULL_TOL,
            'turnbull_max_iter': cfg.TURNBULL_MAX_ITER,
            'calibration_pilot': cfg.CALIBRATION_PILOT,
            'calibration_tolerance': cfg.CALIBRATION_TOLERANCE
        }

        logger.debug("📋 Service configurations initialized")

    def get_service(self, service_name: str) -> Any:
        """
        Get or create service instance

        Raises:
            ValueError: If service name is not recognized
        """
        if service_name in self._services:
            return self._services[service_name]

        with self._lock:
            if service_name in self._services:
                return self._services[service_name]

            service_instance = self._create_service(service_name)
            self._services[service_name] = service_instance
            logger.debug(f"✅ Service '{service_name}' created and registered")
            return service_instance

    def screening_config(self) -> ScreeningConfig:
        config = self._service_configs['screening_service']
        return ScreeningConfig(
            min_stratum_size=config['min_stratum_size'],
            selected_size=config['selected_size'],
            parallel_workers=config['workers'] if str(config['workers']) == 'auto' else int(config['workers'])
        )

    def iterative_config(self) -> IterativeConfig:
        config = self._service_configs['iterative_service']
        return IterativeConfig(
            q=config['q'],
            per_step_size=config['per_step_size'],
            max_iterations=config['max_iterations'],
            screening=self.screening_config(),
            spline=SplineSpec(degree=config['spline_degree'], num_basis=config['spline_num_basis']),
            cvl_grid_size=config['cvl_grid_size'],
            cvl_folds=config['cvl_folds'],
            lasso_tol=config['lasso_tol'],
            lasso_max_iter=config['lasso_max_iter'],
            seed=config['seed']
        )

    def _create_service(self, service_name: str) -> Any:
        config = self._service_configs.get(service_name, {})

        if service_name == 'screening_service':
            return ScreeningService(self.screening_config())

        elif service_name == 'iterative_service':
            return IterativeService(self.iterative_config())

        elif service_name == 'simulation_service':
            return SimulationService(config)

        elif service_name == 'interval_service':
            return IntervalService(config, self.screening_config())

        elif service_name == 'benchmark_service':
            bench_config = dict(config, screening=self.screening_config(), iterative=self.iterative_config())
            return BenchmarkService(bench_config, self.screening_config().parallel_workers)

        else:
            raise ValueError(f"Unknown service: {service_name}")

    def list_services(self) -> Dict[str, str]:
        """Available services and whether they have been created"""
        return {
            name: ('active' if name in self._services else 'not_initialized')
            for name in self._service_configs
        }

    def get_service_config(self, service_name: str) -> Dict:
        return self._service_configs.get(service_name, {})

    def update_service_config(self, service_name: str, config_updates: Dict):
        """
        Update a service configuration

        Screening settings feed the iterative, interval and benchmark
        services too, so changing them resets those as well.
        """
        if service_name not in self._service_configs:
            raise ValueError(f"Unknown service: {service_name}")

        updates = {key: value for key, value in config_updates.items() if value is not None}
        if not updates:
            return
        self._service_configs[service_name].update(updates)

        dependents = [service_name]
        if service_name == 'screening_service':
            dependents += ['iterative_service', 'interval_service', 'benchmark_service']
        elif service_name == 'iterative_service':
            dependents.append('benchmark_service')

        with self._lock:
            for name in dependents:
                self._services.pop(name, None)
        logger.debug(f"🔄 Service '{service_name}' configuration updated: {updates}")
