#!/usr/bin/env python3
"""
🎲 Simulate Controller
`simulate` command: one simulated dataset plus a JSON sidecar with its truth.
"""

import logging

import click

from ..decorators.handle_cli_errors import handle_cli_errors
from ..decorators.monitor_performance import monitor_performance
from ..models.scenario_spec import ScenarioSpec, normalize_scenario_id
from ..services.ingestion_service import write_interval_censored_csv, write_right_censored_csv
from ..services.interval_service import inspection_horizon
from ..services.simulation_service import replication_rng
from .support import ensure_parent, get_registry, resolve_params, sibling_path, write_json

logger = logging.getLogger(__name__)


def scenario_options(f):
    """Options shared by simulate and bench"""
    options = [
        click.option('--scenario', default=None, help='S1..S5 or toy-i..toy-vi.'),
        click.option('--n', type=int, default=200, show_default=True, help='Sample size.'),
        click.option('--p', type=int, default=None, show_default='500 (RMST_BENCH_P)', help='Number of features.'),
        click.option('--error', type=click.Choice(['normal', 'extreme', 'logistic']), default='normal',
                     show_default=True, help='Error distribution of the transformation model.'),
        click.option('--censoring', type=float, default=0.2, show_default=True, help='Target censoring rate.'),
        click.option('--rho', type=float, default=0.5, show_default=True, help='Covariate correlation.'),
        click.option('--c', type=float, default=None, show_default='per toy model', help='Toy-model coefficient.'),
        click.option('--seed', type=int, default=2024, show_default=True, help='Master seed.'),
    ]
    for option in reversed(options):
        f = option(f)
    return f


def build_spec(params, default_p: int) -> ScenarioSpec:
    if not params['scenario']:
        raise click.UsageError("--scenario is required (flag or config file)")
    return ScenarioSpec(
        scenario=normalize_scenario_id(params['scenario']),
        n=params['n'],
        p=params['p'] if params['p'] is not None else default_p,
        error=params['error'],
        target_censoring=params['censoring'],
        rho=params['rho'],
        c=params['c'],
        seed=params['seed']
    )


@click.command('simulate')
@scenario_options
@click.option('--interval', is_flag=True, default=False, help='Emit interval-censored data on the unit grid.')
@click.option('--output', default='simulated.csv', show_default=True, help='Dataset CSV; the sidecar gets .json.')
@click.option('--config', 'config', type=click.Path(dir_okay=False), default=None, help='JSON or YAML run config.')
@click.pass_context
@handle_cli_errors
@monitor_performance
def simulate_command(ctx, **_):
    """Generate a dataset from a simulation scenario."""
    params = resolve_params(ctx, ctx.params.get('config'))
    registry = get_registry(ctx)
    spec = build_spec(params, registry.app_config.BENCH_P)

    output = params['output']
    ensure_parent(output)

    if params['interval']:
        pilot = registry.get_service_config('interval_service')['calibration_pilot']
        dataset, active = registry.get_service('interval_service').gen_interval_data(spec, replication_rng(spec.seed))
        write_interval_censored_csv(dataset, output)
        sidecar = {
            'spec': spec.model_dump(),
            'active_set': [dataset.feature_names[j] for j in active],
            'active_indices': list(active),
            'horizon': inspection_horizon(spec, pilot),
            'finite_intervals': dataset.finite_count
        }
    else:
        data = registry.get_service('simulation_service').generate(spec)
        write_right_censored_csv(data.dataset, output)
        sidecar = data.to_sidecar()

    write_json(sibling_path(output, '.json'), sidecar)
    click.echo(f"Wrote {spec.scenario} sample (n={spec.n}, p={spec.p}) to {output}")
