#!/usr/bin/env python3
"""
🏁 Bench Controller
`bench` command: replicated scenario benchmarks and toy-model studies.

Scenario runs write the BenchmarkReport JSON and print the Median / IQR /
Pall table. Toy models print the signal-over-noise exceedance proportion;
with --c-grid the per-replication values are written as CSV as well.
"""

import logging
from typing import List

import click

from ..decorators.handle_cli_errors import handle_cli_errors
from ..decorators.monitor_performance import monitor_performance
from ..exceptions import ConfigurationError
from ..models.scenario_spec import is_toy, normalize_scenario_id
from .simulate_controller import build_spec, scenario_options
from .support import get_registry, resolve_params, sibling_path, write_frame, write_json

logger = logging.getLogger(__name__)


def parse_c_grid(raw) -> List[float]:
    """'0,0.5,1' or a list of numbers"""
    if isinstance(raw, (list, tuple)):
        return [float(value) for value in raw]
    try:
        values = [float(part) for part in str(raw).split(',') if part.strip()]
    except ValueError:
        raise ConfigurationError(f"--c-grid must be comma-separated numbers, got '{raw}'")
    if not values:
        raise ConfigurationError("--c-grid is empty")
    return values


def _run_toy(registry, params, reps: int):
    service = registry.get_service('benchmark_service')
    spec = build_spec(dict(params, p=2), 2)
    measure = params['measure']

    if params['c_grid'] is not None:
        sweep = service.toy_coefficient_sweep(
            spec.scenario, parse_c_grid(params['c_grid']), reps, spec.seed, spec.n, measure, spec.target_censoring
        )
        write_frame(sibling_path(params['output'], '.csv'), sweep)
        results = [
            {'c': float(c), 'exceedance': float((group['d_signal'] > group['d_noise']).mean())}
            for c, group in sweep.groupby('c', sort=False)
        ]
    else:
        proportion = service.toy_exceedance(
            spec.scenario, spec.c, reps, spec.seed, spec.n, measure, spec.target_censoring
        )
        results = [{'c': spec.coefficient, 'exceedance': proportion}]

    write_json(params['output'], {
        'scenario': spec.scenario,
        'measure': measure,
        'reps': reps,
        'n': spec.n,
        'seed': spec.seed,
        'censoring': spec.target_censoring,
        'results': results
    })

    click.echo(f"{'Model':<10}{'Measure':<9}{'c':>8}{'Exceedance':>12}")
    for row in results:
        click.echo(f"{spec.scenario:<10}{measure:<9}{row['c']:>8g}{row['exceedance']:>12.2f}")


@click.command('bench')
@scenario_options
@click.option('--reps', type=int, default=None, show_default='50 (RMST_BENCH_REPS)', help='Replications.')
@click.option('--method', type=click.Choice(['marginal', 'iterative', 'interval']), default='marginal',
              show_default=True, help='Screening method (interval is experimental).')
@click.option('--q', type=int, default=None, show_default='floor(n/2)', help='Final set size for --method iterative.')
@click.option('--measure', type=click.Choice(['d', 'd1', 'd2']), default='d', show_default=True,
              help='Toy models: which discrepancy to compare.')
@click.option('--c-grid', default=None, help='Toy models: comma-separated coefficients to sweep.')
@click.option('--min-stratum-size', type=int, default=6, show_default=True,
              help='Smallest stratum that contributes a term.')
@click.option('--workers', default='auto', show_default=True, help="Parallel workers, or 'auto'.")
@click.option('--include-runtime', is_flag=True, default=False,
              help='Record runtime in the JSON report (makes it run-dependent).')
@click.option('--output', default='bench.json', show_default=True, help='Report JSON.')
@click.option('--config', 'config', type=click.Path(dir_okay=False), default=None, help='JSON or YAML run config.')
@click.pass_context
@handle_cli_errors
@monitor_performance
def bench_command(ctx, **_):
    """Replicated benchmark of a scenario or a toy model."""
    params = resolve_params(ctx, ctx.params.get('config'))
    registry = get_registry(ctx)
    reps = params['reps'] if params['reps'] is not None else registry.app_config.BENCH_REPS
    if reps < 1:
        raise ConfigurationError(f"--reps must be at least 1, got {reps}")

    registry.update_service_config('screening_service', {
        'min_stratum_size': params['min_stratum_size'],
        'workers': params['workers']
    })
    registry.update_service_config('iterative_service', {'q': params['q'], 'seed': params['seed']})

    if not params['scenario']:
        raise click.UsageError("--scenario is required (flag or config file)")
    if is_toy(normalize_scenario_id(params['scenario'])):
        _run_toy(registry, params, reps)
        return

    spec = build_spec(params, registry.app_config.BENCH_P)
    report = registry.get_service('benchmark_service').run_replications(spec, reps, params['method'])
    write_json(params['output'], report.to_dict(include_runtime=params['include_runtime']))
    click.echo(report.to_table())
    click.echo(f"runtime: {report.runtime_seconds:.1f}s")
