#!/usr/bin/env python3
"""
🗂️ Run Configuration
Command parameters read from a JSON or YAML file, with CLI flags on top.

Keys are the long flag names with dashes turned into underscores, e.g.

    {"input": "data.csv", "top": 37, "min_stratum_size": 6, "workers": 4}

Unknown keys are rejected so a misspelt setting never goes unnoticed.
"""

import json
import logging
import os
from typing import Any, Dict, List, Literal, Optional, Union

import yaml
from pydantic import BaseModel, ConfigDict, Field

from ..exceptions import ConfigurationError, MissingFileError

logger = logging.getLogger(__name__)

YAML_SUFFIXES = ('.yaml', '.yml')


class RunConfig(BaseModel):
    """
    Run Configuration

    Every field is optional; unset fields fall back to the command defaults.
    """

    model_config = ConfigDict(extra='forbid', frozen=True)

    # Paths and columns
    input: Optional[str] = None
    output: Optional[str] = None
    summary: Optional[str] = None
    trace: Optional[str] = None
    time: Optional[str] = None
    status: Optional[str] = None
    left: Optional[str] = None
    right: Optional[str] = None

    # Execution
    seed: Optional[int] = None
    workers: Optional[Union[int, Literal['auto']]] = None

    # Screening
    top: Optional[int] = Field(default=None, ge=1)
    min_stratum_size: Optional[int] = Field(default=None, ge=1)

    # Iterative screening
    q: Optional[int] = Field(default=None, ge=1)
    step_size: Optional[int] = Field(default=None, ge=1)
    max_iterations: Optional[int] = Field(default=None, ge=1)
    cvl_grid_size: Optional[int] = Field(default=None, ge=1)
    cvl_folds: Optional[int] = Field(default=None, ge=2)
    spline_degree: Optional[int] = Field(default=None, ge=1)
    spline_num_basis: Optional[int] = Field(default=None, ge=1)

    # Simulation and benchmarks
    scenario: Optional[str] = None
    n: Optional[int] = None
    p: Optional[int] = None
    error: Optional[Literal['normal', 'extreme', 'logistic']] = None
    censoring: Optional[float] = None
    rho: Optional[float] = None
    c: Optional[float] = None
    interval: Optional[bool] = None
    reps: Optional[int] = Field(default=None, ge=1)
    method: Optional[Literal['marginal', 'iterative', 'interval']] = None
    measure: Optional[Literal['d', 'd1', 'd2']] = None
    c_grid: Optional[Union[str, List[float]]] = None

    @classmethod
    def load(cls, path: str) -> 'RunConfig':
        """Read a JSON file, or YAML when the name ends in .yaml / .yml"""
        if not os.path.exists(path):
            raise MissingFileError(f"config file not found: {path}")

        with open(path, 'r', encoding='utf-8') as handle:
            try:
                if path.lower().endswith(YAML_SUFFIXES):
                    raw = yaml.safe_load(handle)
                else:
                    raw = json.load(handle)
            except (json.JSONDecodeError, yaml.YAMLError) as e:
                raise ConfigurationError(f"cannot parse config file {path}: {e}")

        if raw is None:
            raw = {}
        if not isinstance(raw, dict):
            raise ConfigurationError(f"config file {path} must hold a mapping of settings")

        config = cls(**{str(key).replace('-', '_'): value for key, value in raw.items()})
        logger.debug(f"📄 Loaded run config {path}: {config.settings()}")
        return config

    def settings(self) -> Dict[str, Any]:
        """Only the fields that were set"""
        return self.model_dump(exclude_none=True)

    def merge_flags(self, flags: Dict[str, Any]) -> 'RunConfig':
        """Copy with the given (explicitly passed) flags overriding file values"""
        updates = {key: value for key, value in flags.items() if value is not None and key in type(self).model_fields}
        merged = {**self.settings(), **updates}
        return type(self)(**merged)
