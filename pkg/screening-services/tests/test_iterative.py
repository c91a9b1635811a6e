import numpy as np
import pytest

from rmst_screen.exceptions import ConfigurationError
from rmst_screen.models.cox_gam_fit import CoxGamFit, SplineSpec
from rmst_screen.models.dataset import Dataset
from rmst_screen.models.iterative_trace import IterativeConfig
from rmst_screen.services.iterative_service import IterativeService, iterative_screen


def small_config(**overrides):
    settings = dict(q=8, per_step_size=3, max_iterations=3, cvl_grid_size=5, cvl_folds=3, seed=7)
    settings.update(overrides)
    return IterativeConfig(**settings)


@pytest.fixture
def small_dataset(signal_factory):
    return signal_factory(np.random.default_rng(99), n=60, p=15)


def test_final_set_respects_q(small_dataset):
    final, trace = iterative_screen(small_dataset, small_config(), workers=1)

    assert 0 < len(final) <= 8
    assert final == sorted(final)
    assert trace.final == final
    assert trace.stopped_by in ('size', 'unchanged', 'max_iterations')
    assert len(trace) <= 3


def test_rounds_are_consistent(small_dataset):
    _, trace = iterative_screen(small_dataset, small_config(), workers=1)

    assert len(trace.initial) == 3
    for record in trace.records:
        assert record.union == sorted(set(record.lasso_selected) | set(record.residual_selected))
        assert not set(record.lasso_selected) & set(record.residual_selected)
        assert set(record.lasso_selected) <= set(record.candidates)


def test_same_seed_same_trace(small_dataset):
    first = iterative_screen(small_dataset, small_config(), workers=1)
    second = iterative_screen(small_dataset, small_config(), workers=1)

    assert first[0] == second[0]
    assert first[1].to_dict() == second[1].to_dict()


def test_q_larger_than_p(small_dataset):
    with pytest.raises(ConfigurationError):
        iterative_screen(small_dataset, small_config(q=16), workers=1)


def test_default_q_can_exceed_p(small_dataset):
    # floor(60 / 2) = 30 > 15
    with pytest.raises(ConfigurationError):
        iterative_screen(small_dataset, small_config(q=None), workers=1)


def test_sample_too_small(signal_factory):
    dataset = signal_factory(np.random.default_rng(1), n=15, p=6)
    with pytest.raises(ConfigurationError):
        iterative_screen(dataset, small_config(q=3), workers=1)


def test_initial_set_already_at_q(small_dataset):
    final, trace = iterative_screen(small_dataset, small_config(q=3), workers=1)

    assert trace.stopped_by == 'size'
    assert len(trace) == 0
    assert final == trace.initial


def test_empty_first_lasso_falls_back_to_marginal_set(small_dataset, monkeypatch):
    service = IterativeService(small_config(), workers=1)

    def empty_fit(covariates, features, time, status, rng):
        return CoxGamFit(
            features, SplineSpec(), np.zeros(3 * len(features)), 1.0, np.zeros(len(time)), True, 1
        )

    monkeypatch.setattr(service.coxgam, 'fit_selected', empty_fit)
    final, trace = service.run(small_dataset)

    assert trace.fallback
    assert trace.stopped_by == 'fallback'
    assert final == trace.initial
    assert trace.records[0].residual_source == 'none'


def test_trace_serializes(small_dataset):
    _, trace = iterative_screen(small_dataset, small_config(), workers=1)
    payload = trace.to_dict()

    assert payload['q'] == 8
    assert len(payload['iterations']) == len(trace)
    assert '"stopped_by"' in trace.to_json()


def test_signal_survives_to_final_set(small_dataset):
    final, _ = iterative_screen(small_dataset, small_config(), workers=1)
    assert 0 in final


def test_config_rejects_single_fold():
    with pytest.raises(ValueError):
        IterativeConfig(cvl_folds=1)


def test_resolved_sizes():
    config = IterativeConfig()
    assert config.resolve_q(61) == 30
    assert config.resolve_step_size(200) == 37
    assert IterativeConfig(per_step_size=5).resolve_step_size(200) == 5


def test_final_set_comes_from_the_rounds(small_dataset):
    final, trace = iterative_screen(small_dataset, small_config(), workers=1)

    assert len(trace) > 0 and not trace.fallback
    assert set(final) <= trace.seen_features()
    assert set(final) <= set(trace.records[-1].union)


def test_binary_signal_column():
    rng = np.random.default_rng(2024)
    X = rng.standard_normal((100, 30))
    X[:, 0] = rng.integers(0, 2, size=100)
    latent = np.exp(-1.5 * X[:, 0] + 0.5 * rng.standard_normal(100))
    censor = rng.uniform(0.0, 4.0 * np.median(latent), size=100)
    dataset = Dataset(X, np.minimum(latent, censor), (latent <= censor).astype(float))

    final, trace = iterative_screen(dataset, IterativeConfig(q=25, cvl_grid_size=5, cvl_folds=3), workers=1)

    assert 0 < len(final) <= 25
    assert 0 in final
    assert trace.stopped_by in ('size', 'unchanged', 'max_iterations', 'fallback')
