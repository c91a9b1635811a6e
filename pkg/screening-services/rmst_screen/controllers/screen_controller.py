#!/usr/bin/env python3
"""
🔎 Screen Controller
`screen` command: marginal RMST screening of a CSV dataset.

This controller handles:
- Right-censored input (--time/--status)
- Interval-censored input (--left/--right, experimental)
- Ranked-features CSV and JSON summary output
"""

import logging

import click
import pandas as pd

from ..decorators.handle_cli_errors import handle_cli_errors
from ..decorators.monitor_performance import monitor_performance
from ..models.screening_result import N_OVER_LOG_N
from ..services.ingestion_service import load_interval_censored_csv, load_right_censored_csv
from .support import get_registry, resolve_params, sibling_path, write_frame, write_json

logger = logging.getLogger(__name__)


@click.command('screen')
@click.option('--input', 'input', type=click.Path(dir_okay=False), default=None, help='Dataset CSV.')
@click.option('--time', default='time', show_default=True, help='Observed time column.')
@click.option('--status', default='status', show_default=True, help='Event indicator column (1 event, 0 censored).')
@click.option('--left', default=None, help='Left endpoint column; with --right switches to interval-censored screening.')
@click.option('--right', default=None, help='Right endpoint column (empty or "inf" for right-censored rows).')
@click.option('--top', type=int, default=None, show_default='floor(n/ln n)', help='Number of features to select.')
@click.option('--min-stratum-size', type=int, default=6, show_default=True,
              help='Smallest stratum that contributes a term.')
@click.option('--output', default='ranking.csv', show_default=True, help='Ranked-features CSV.')
@click.option('--summary', default=None, show_default='<output>.json', help='JSON summary path.')
@click.option('--workers', default='auto', show_default=True, help="Parallel workers, or 'auto'.")
@click.option('--seed', type=int, default=2024, show_default=True, help='Master seed (recorded in the summary).')
@click.option('--config', 'config', type=click.Path(dir_okay=False), default=None, help='JSON or YAML run config.')
@click.pass_context
@handle_cli_errors
@monitor_performance
def screen_command(ctx, **_):
    """Rank features by the stratified RMST discrepancy."""
    params = resolve_params(ctx, ctx.params.get('config'))
    if not params['input']:
        raise click.UsageError("--input is required (flag or config file)")

    interval = params['left'] is not None or params['right'] is not None
    if interval and (params['left'] is None or params['right'] is None):
        raise click.UsageError("--left and --right must be given together")

    registry = get_registry(ctx)
    registry.update_service_config('screening_service', {
        'min_stratum_size': params['min_stratum_size'],
        'selected_size': params['top'] if params['top'] is not None else N_OVER_LOG_N,
        'workers': params['workers']
    })

    if interval:
        dataset = load_interval_censored_csv(params['input'], params['left'], params['right'])
        result = registry.get_service('interval_service').screen_interval(dataset)
    else:
        dataset = load_right_censored_csv(params['input'], params['time'], params['status'])
        result = registry.get_service('screening_service').screen(dataset)

    write_frame(params['output'], pd.DataFrame(result.to_rows(), columns=['feature', 'd', 'd1', 'd2', 'rank', 'selected']))

    summary = {
        'input': params['input'],
        'n': dataset.n,
        'p': dataset.p,
        'censoring': 'interval' if interval else 'right',
        'min_stratum_size': params['min_stratum_size'],
        'seed': params['seed'],
        'experimental': interval,
        **result.to_dict()
    }
    if not interval:
        summary['censoring_rate'] = dataset.censoring_rate
    write_json(params['summary'] or sibling_path(params['output'], '.json'), summary)

    click.echo(f"Selected {result.selected_size} of {dataset.p} features: "
               + ", ".join(summary['selected'][:10]) + (" ..." if result.selected_size > 10 else ""))
