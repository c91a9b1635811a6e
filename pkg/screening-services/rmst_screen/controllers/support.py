#!/usr/bin/env python3
"""
🧰 Controller Support
Parameter resolution and deterministic file output shared by the commands.
"""

import json
import logging
import os
from typing import Any, Dict, Optional

import click
import pandas as pd
from click.core import ParameterSource

from ..config.run_config import RunConfig
from ..services.ingestion_service import FLOAT_FORMAT
from ..services.service_registry import ServiceRegistry

logger = logging.getLogger(__name__)

DEFAULT_SOURCES = (ParameterSource.DEFAULT, ParameterSource.DEFAULT_MAP)


def get_registry(ctx: click.Context) -> ServiceRegistry:
    """Registry created by the CLI group"""
    return ctx.find_root().obj['registry']


def resolve_params(ctx: click.Context, config_path: Optional[str]) -> Dict[str, Any]:
    """
    Command parameters: defaults, then the config file, then explicit flags

    Raises:
        MissingFileError, ConfigurationError: unreadable config file
        pydantic.ValidationError: unknown or invalid settings
    """
    params = dict(ctx.params)
    params.pop('config', None)
    if not config_path:
        return params

    explicit = {
        name: value for name, value in params.items()
        if ctx.get_parameter_source(name) not in DEFAULT_SOURCES
    }
    merged = RunConfig.load(config_path).merge_flags(explicit)
    params.update({key: value for key, value in merged.settings().items() if key in params})
    return params


def sibling_path(path: str, suffix: str) -> str:
    """'out/ranking.csv' + '.json' -> 'out/ranking.json'"""
    stem, _ = os.path.splitext(path)
    return f"{stem}{suffix}"


def ensure_parent(path: str):
    parent = os.path.dirname(os.path.abspath(path))
    os.makedirs(parent, exist_ok=True)


def write_json(path: str, payload: Dict[str, Any]):
    ensure_parent(path)
    with open(path, 'w', encoding='utf-8') as handle:
        json.dump(payload, handle, indent=2)
        handle.write("\n")
    logger.info(f"💾 Wrote {path}")


def write_frame(path: str, frame: pd.DataFrame):
    ensure_parent(path)
    frame.to_csv(path, index=False, float_format=FLOAT_FORMAT)
    logger.info(f"💾 Wrote {path} ({len(frame)} rows)")
