#!/usr/bin/env python3
"""
🔁 Iterate Controller
`iterate` command: iterative screening with spline-Cox lasso rounds.
"""

import logging

import click
import pandas as pd

from ..decorators.handle_cli_errors import handle_cli_errors
from ..decorators.monitor_performance import monitor_performance
from ..models.screening_result import N_OVER_LOG_N
from ..services.ingestion_service import load_right_censored_csv
from .support import get_registry, resolve_params, write_frame, write_json

logger = logging.getLogger(__name__)


@click.command('iterate')
@click.option('--input', 'input', type=click.Path(dir_okay=False), default=None, help='Right-censored dataset CSV.')
@click.option('--time', default='time', show_default=True, help='Observed time column.')
@click.option('--status', default='status', show_default=True, help='Event indicator column.')
@click.option('--q', type=int, default=None, show_default='floor(n/2)', help='Target size of the final set.')
@click.option('--step-size', type=int, default=None, show_default='floor(n/ln n)',
              help='Initial set size and residual features added per round.')
@click.option('--max-iterations', type=int, default=20, show_default=True, help='Round limit.')
@click.option('--cvl-grid-size', type=int, default=50, show_default=True, help='Penalty grid points for cvl.')
@click.option('--cvl-folds', type=int, default=5, show_default=True, help='Cross-validation folds.')
@click.option('--spline-degree', type=int, default=3, show_default=True, help='B-spline degree.')
@click.option('--spline-num-basis', type=int, default=3, show_default=True, help='Basis columns per feature.')
@click.option('--min-stratum-size', type=int, default=6, show_default=True,
              help='Smallest stratum that contributes a term.')
@click.option('--output', default='selected.csv', show_default=True, help='Selected-features CSV.')
@click.option('--trace', default='trace.json', show_default=True, help='Per-round trace JSON.')
@click.option('--workers', default='auto', show_default=True, help="Parallel workers, or 'auto'.")
@click.option('--seed', type=int, default=2024, show_default=True, help='Seed for the cvl fold assignment.')
@click.option('--config', 'config', type=click.Path(dir_okay=False), default=None, help='JSON or YAML run config.')
@click.pass_context
@handle_cli_errors
@monitor_performance
def iterate_command(ctx, **_):
    """Iterative RMST screening with lasso and residual rounds."""
    params = resolve_params(ctx, ctx.params.get('config'))
    if not params['input']:
        raise click.UsageError("--input is required (flag or config file)")

    registry = get_registry(ctx)
    registry.update_service_config('screening_service', {
        'min_stratum_size': params['min_stratum_size'],
        'workers': params['workers']
    })
    registry.update_service_config('iterative_service', {
        'q': params['q'],
        'per_step_size': params['step_size'] if params['step_size'] is not None else N_OVER_LOG_N,
        'max_iterations': params['max_iterations'],
        'cvl_grid_size': params['cvl_grid_size'],
        'cvl_folds': params['cvl_folds'],
        'spline_degree': params['spline_degree'],
        'spline_num_basis': params['spline_num_basis'],
        'seed': params['seed']
    })

    dataset = load_right_censored_csv(params['input'], params['time'], params['status'])
    final, trace = registry.get_service('iterative_service').run(dataset)

    names = [dataset.feature_names[j] for j in final]
    write_frame(params['output'], pd.DataFrame({'feature': names, 'column': [j + 1 for j in final]}))

    payload = trace.to_dict()
    payload['final_features'] = names
    payload['seed'] = params['seed']
    write_json(params['trace'], payload)

    click.echo(f"Selected {len(final)} features after {len(trace)} rounds ({trace.stopped_by})")
