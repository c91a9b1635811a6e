import click
import pytest
from click.testing import CliRunner
from pydantic import ValidationError

from rmst_screen.config import Config, RunConfig, resolve_workers
from rmst_screen.decorators import handle_cli_errors
from rmst_screen.exceptions import ConfigurationError, MissingFileError, NoEventsError
from rmst_screen.services import ServiceRegistry


def test_run_config_from_json(write_text):
    path = write_text('run.json', '{"input": "data.csv", "top": 5, "min-stratum-size": 8, "workers": "auto"}')
    config = RunConfig.load(path)

    assert config.settings() == {'input': 'data.csv', 'top': 5, 'min_stratum_size': 8, 'workers': 'auto'}


def test_run_config_from_yaml(write_text):
    path = write_text('run.yml', "scenario: S2\nreps: 10\nc_grid: [0.0, 0.5]\n")
    config = RunConfig.load(path)

    assert config.scenario == 'S2'
    assert config.reps == 10
    assert config.c_grid == [0.0, 0.5]


def test_empty_yaml_is_an_empty_config(write_text):
    assert RunConfig.load(write_text('empty.yaml', "")).settings() == {}


def test_run_config_rejects_unknown_keys(write_text):
    with pytest.raises(ValidationError):
        RunConfig.load(write_text('run.json', '{"topp": 3}'))


def test_run_config_rejects_bad_values(write_text):
    with pytest.raises(ValidationError):
        RunConfig.load(write_text('run.json', '{"cvl_folds": 1}'))


def test_run_config_file_errors(tmp_path, write_text):
    with pytest.raises(MissingFileError):
        RunConfig.load(str(tmp_path / 'absent.json'))
    with pytest.raises(ConfigurationError):
        RunConfig.load(write_text('broken.json', '{"top": '))
    with pytest.raises(ConfigurationError):
        RunConfig.load(write_text('list.yaml', "- 1\n- 2\n"))


def test_flags_override_file_values():
    merged = RunConfig(top=3, seed=1).merge_flags({'top': 4, 'seed': None, 'unrelated': 'x'})
    assert merged.settings() == {'top': 4, 'seed': 1}


def test_config_factory():
    assert Config('testing').WORKERS == '1'
    assert Config('full-scale').BENCH_P == 2000
    assert 'production' in Config.get_available_configs()
    with pytest.raises(ValueError):
        Config('staging')


def test_resolve_workers():
    assert resolve_workers('3') == 3
    assert resolve_workers('auto') >= 1
    with pytest.raises(ValueError):
        resolve_workers(0)


def test_registry_reuses_instances():
    registry = ServiceRegistry(Config('testing'))
    assert registry.get_service('screening_service') is registry.get_service('screening_service')
    assert registry.list_services()['screening_service'] == 'active'
    assert registry.list_services()['benchmark_service'] == 'not_initialized'


def test_screening_update_resets_dependents():
    registry = ServiceRegistry(Config('testing'))
    screening = registry.get_service('screening_service')
    iterative = registry.get_service('iterative_service')

    registry.update_service_config('screening_service', {'min_stratum_size': 10, 'workers': None})

    assert registry.get_service('screening_service') is not screening
    assert registry.get_service('iterative_service') is not iterative
    assert registry.screening_config().min_stratum_size == 10
    assert registry.iterative_config().screening.min_stratum_size == 10


def test_empty_update_keeps_instances():
    registry = ServiceRegistry(Config('testing'))
    screening = registry.get_service('screening_service')
    registry.update_service_config('screening_service', {'min_stratum_size': None})
    assert registry.get_service('screening_service') is screening


def test_registry_unknown_service():
    registry = ServiceRegistry(Config('testing'))
    with pytest.raises(ValueError):
        registry.get_service('model_service')
    with pytest.raises(ValueError):
        registry.update_service_config('model_service', {'x': 1})


def _command(exception):
    @click.command()
    @handle_cli_errors
    def failing():
        raise exception
    return failing


@pytest.mark.parametrize('exception, code', [
    (NoEventsError("no events"), 2),
    (ConfigurationError("q=9 exceeds the number of features p=4"), 2),
    (RuntimeError("boom"), 1)
])
def test_exit_codes(exception, code):
    result = CliRunner().invoke(_command(exception))
    assert result.exit_code == code
    assert 'Error: ' in result.output


def test_validation_error_exit_code():
    def raise_validation():
        RunConfig(top=0)

    @click.command()
    @handle_cli_errors
    def failing():
        raise_validation()

    result = CliRunner().invoke(failing)
    assert result.exit_code == 2
    assert 'invalid parameters' in result.output
