#!/usr/bin/env python3
"""
🚀 RMST Screening CLI Application Factory
Command-line front end over the screening services.

Commands:
- screen:   marginal RMST screening of a CSV dataset
- iterate:  iterative screening with spline-Cox lasso rounds
- simulate: datasets from the simulation scenarios
- bench:    replicated benchmarks and toy-model studies
"""

import logging
import os
from typing import Optional

import click

from .config.app_config import Config
from .controllers import bench_command, iterate_command, screen_command, simulate_command
from .services.service_registry import ServiceRegistry

LOG_LEVELS = ['DEBUG', 'INFO', 'WARNING', 'ERROR']


def configure_logging(level: str, log_format: str):
    """Configure application logging (stderr)"""
    logging.basicConfig(level=getattr(logging, level.upper(), logging.INFO), format=log_format, force=True)
    logging.getLogger(__name__).debug("📝 Logging configured")


def register_commands(cli: click.Group):
    """Register the command controllers"""
    for command in (screen_command, iterate_command, simulate_command, bench_command):
        cli.add_command(command)


def create_cli(config_name: Optional[str] = None) -> click.Group:
    """
    CLI Application Factory

    Args:
        config_name: environment config ('development', 'production',
            'testing', 'full-scale'); defaults to RMST_ENV
    """

    @click.group(context_settings={'help_option_names': ['-h', '--help']})
    @click.option('--log-level', type=click.Choice(LOG_LEVELS, case_sensitive=False), default=None,
                  show_default='RMST_LOG_LEVEL or INFO', help='Logging verbosity.')
    @click.option('--env', 'env', type=click.Choice(Config.get_available_configs()), default=None,
                  show_default='RMST_ENV or production',
                  help='Configuration environment.')
    @click.pass_context
    def cli(ctx, log_level, env):
        """RMST-based feature screening for survival data."""
        config = Config(env or config_name or os.getenv('RMST_ENV', 'production'))
        configure_logging(log_level or config.LOG_LEVEL, config.LOG_FORMAT)

        ctx.ensure_object(dict)
        ctx.obj['config'] = config
        ctx.obj['registry'] = ServiceRegistry(config)
        logging.getLogger(__name__).debug(f"🚀 CLI initialized with {config.__name__}")

    register_commands(cli)
    return cli


def main():
    create_cli()(prog_name='rmst-screen')


if __name__ == '__main__':
    main()
