from .app_config import Config, BaseConfig, resolve_workers
from .run_config import RunConfig

__all__ = ['Config', 'BaseConfig', 'resolve_workers', 'RunConfig']
