import numpy as np
import pytest
from scipy import stats

from rmst_screen.exceptions import CalibrationError, ConfigurationError, UnknownScenarioError
from rmst_screen.models.scenario_spec import ScenarioSpec, normalize_scenario_id
from rmst_screen.services.simulation_service import (
    H, SimulationService, ar1_normal, calibrate_bound, calibrate_censoring, censoring_rate,
    change_point_h1, change_point_h3, draw_errors, equicorrelated_normal, gen_event_times, generate, invert_H,
    replication_rng, toy_signal
)


def test_transformation_inverts(rng):
    t = rng.uniform(0.01, 5.0, size=50)
    np.testing.assert_allclose(invert_H(H(t)), t, rtol=1e-10)


def test_inverse_is_stable_for_large_arguments():
    assert invert_H(800.0) == pytest.approx(0.5 * (800.0 + np.log(2.0)))
    assert invert_H(-800.0) == pytest.approx(0.0, abs=1e-12)


def test_toy_event_time_without_signal_or_noise():
    # x = 0 in toy (vi) with a zero error gives T = H^{-1}(0)
    assert invert_H(toy_signal('toy-vi', 0.0, 0.5)) == pytest.approx(0.5 * np.log(3.0))


def test_calibrated_bound_for_unit_times():
    # P(C < 1) = 1/u for u >= 1
    assert calibrate_bound(np.ones(1000), 0.5) == pytest.approx(2.0, rel=1e-6)
    assert censoring_rate(np.ones(10), 4.0) == pytest.approx(0.25)


def test_calibration_target_out_of_range():
    with pytest.raises(ConfigurationError):
        calibrate_bound(np.ones(10), 1.2)


def test_unattainable_target():
    # event times this large cannot be censored at 99% with u <= 1e6
    with pytest.raises(CalibrationError):
        calibrate_bound(np.full(10, 1e12), 0.01)


def test_zero_target_means_no_censoring():
    spec = ScenarioSpec(scenario='S1', n=50, p=12, target_censoring=0.0)
    assert calibrate_censoring(spec) == float('inf')

    data = generate(spec, replication_rng(3))
    assert np.all(data.dataset.status == 1)
    np.testing.assert_array_equal(data.dataset.time, data.latent_time)


def test_replication_streams_reproduce():
    first = replication_rng(2024, 5).standard_normal(4)
    np.testing.assert_array_equal(first, replication_rng(2024, 5).standard_normal(4))
    assert not np.array_equal(first, replication_rng(2024, 6).standard_normal(4))


def test_generated_shapes_and_truth():
    spec = ScenarioSpec(scenario='S1', n=80, p=20, censoring_bound=3.0)
    data = generate(spec, replication_rng(1))

    assert data.dataset.covariates.shape == (80, 20)
    assert data.active_set == [0, 1, 8, 9]
    assert data.censoring_bound == 3.0
    assert np.all(data.dataset.time <= data.latent_time)
    assert np.all(data.dataset.time[data.dataset.status == 1] == data.latent_time[data.dataset.status == 1])


@pytest.mark.parametrize('scenario, active', [
    ('S2', [0, 1, 2, 7, 8]),
    ('S4', [0, 1, 7, 8]),
    ('toy-iii', [0])
])
def test_active_sets(scenario, active):
    assert ScenarioSpec(scenario=scenario, p=20).active_set == active


def test_scenario_aliases():
    assert normalize_scenario_id('s3') == 'S3'
    assert normalize_scenario_id('toy(vi)') == 'toy-vi'
    assert normalize_scenario_id('iv') == 'toy-iv'
    with pytest.raises(UnknownScenarioError):
        normalize_scenario_id('S9')


def test_unknown_scenario_fails_on_generation():
    spec = ScenarioSpec(scenario='S9', n=20, p=5, censoring_bound=1.0)
    with pytest.raises(UnknownScenarioError):
        generate(spec, replication_rng(0))


def test_scenario_needs_enough_columns():
    with pytest.raises(ValueError):
        ScenarioSpec(scenario='S1', p=5)


def test_ar1_correlation():
    X = ar1_normal(20000, 4, 0.5, np.random.default_rng(0))
    corr = np.corrcoef(X, rowvar=False)

    assert corr[0, 1] == pytest.approx(0.5, abs=0.03)
    assert corr[0, 2] == pytest.approx(0.25, abs=0.03)
    np.testing.assert_allclose(X.var(axis=0), 1.0, atol=0.05)


def test_change_point_shapes():
    np.testing.assert_allclose(change_point_h1([-1.0, 0.0, 0.8, 1.0]), [0.6, 0.0, 0.0, 0.6])
    np.testing.assert_allclose(change_point_h3([-0.5, 0.0, -1.0]), [1.8, 0.2, 0.2])


def test_error_distributions(rng):
    assert draw_errors('logistic', 5, rng).shape == (5,)
    with pytest.raises(ConfigurationError):
        draw_errors('cauchy', 5, rng)


def test_toy_signal_is_scaled():
    x = np.array([-2.0, 0.0, 2.0])
    np.testing.assert_allclose(toy_signal('toy-i', x, -0.5), [-0.5, 0.0, -0.5])
    np.testing.assert_allclose(toy_signal('toy-vi', x, 2.0), [-4.0, 0.0, 4.0])


def test_event_times_are_positive(rng):
    spec = ScenarioSpec(scenario='S2', n=100, p=10)
    X = rng.standard_normal((100, 10))
    assert np.all(gen_event_times(X, spec, rng) > 0)


def test_service_generates_calibrated_censoring():
    service = SimulationService({'calibration_pilot': 5000, 'calibration_tolerance': 0.01})
    spec = ScenarioSpec(scenario='S1', n=2000, p=12, target_censoring=0.3)

    data = service.generate(spec, replication=0)

    assert data.realized_censoring == pytest.approx(0.3, abs=0.05)
    assert service.calibrate(spec) == data.censoring_bound
    assert data.to_sidecar()['active_set'] == ['x1', 'x2', 'x9', 'x10']


@pytest.mark.parametrize('kind, reference', [
    ('normal', stats.norm.cdf),
    ('extreme', stats.gumbel_l.cdf),
    ('logistic', stats.logistic.cdf)
])
def test_error_draws_follow_their_distribution(kind, reference):
    draws = draw_errors(kind, 20000, np.random.default_rng(11))
    assert stats.kstest(draws, reference).statistic < 0.02


def test_event_times_follow_the_transformation_model(rng):
    # zero coefficient: H(T) is the error itself
    spec = ScenarioSpec(scenario='toy-vi', n=20000, p=2, c=0.0)
    latent = gen_event_times(np.zeros((20000, 2)), spec, rng)
    assert stats.kstest(H(latent), stats.norm(scale=0.6).cdf).statistic < 0.02


def test_equicorrelation():
    X = equicorrelated_normal(10000, 8, 0.9, np.random.default_rng(4))
    corr = np.corrcoef(X, rowvar=False)

    assert corr[0, 6] == pytest.approx(0.9, abs=0.03)
    assert corr[2, 5] == pytest.approx(0.9, abs=0.03)


def test_fresh_sample_hits_the_censoring_target():
    spec = ScenarioSpec(scenario='S1', n=20000, p=10, error='normal', target_censoring=0.2)
    data = generate(spec, replication_rng(777))
    assert 0.18 <= 1.0 - data.dataset.status.mean() <= 0.22


@pytest.mark.parametrize('model', ['toy-i', 'toy-ii', 'toy-iii', 'toy-iv', 'toy-v', 'toy-vi'])
def test_toy_signal_vanishes_without_coefficient(model):
    x = np.linspace(-3.0, 3.0, 25)
    np.testing.assert_array_equal(toy_signal(model, x, 0.0), np.zeros(25))
