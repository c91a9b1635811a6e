import numpy as np
import pytest

from rmst_screen.exceptions import InputError, NoEventsError
from rmst_screen.models.survival_curve import PIECEWISE_LINEAR, SurvivalCurve
from rmst_screen.services.estimator_service import km_fit, restriction_time, rmst


def test_hand_oracle(hand_sample):
    time, status = hand_sample
    curve = km_fit(time, status)

    np.testing.assert_allclose(curve.jump_times, [1.0, 3.0, 4.0])
    np.testing.assert_allclose(curve.values, [0.75, 0.375, 0.0])
    assert rmst(curve, 4.0) == pytest.approx(2.875, abs=1e-12)
    assert rmst(curve, 2.0) == pytest.approx(1.75, abs=1e-12)


def test_uncensored_km_is_empirical_survival(rng):
    time = rng.exponential(2.0, size=40)
    curve = km_fit(time, np.ones(40))

    empirical = np.array([np.mean(time > t) for t in curve.jump_times])
    np.testing.assert_allclose(curve.values, empirical, atol=1e-12)
    assert rmst(curve, time.max()) == pytest.approx(time.mean(), abs=1e-12)


def test_death_before_censoring_at_tied_time():
    curve = km_fit([2.0, 2.0, 3.0], [1.0, 0.0, 1.0])
    np.testing.assert_allclose(curve.values, [2.0 / 3.0, 0.0])


def test_curve_is_monotone_and_bounded(rng):
    time = rng.exponential(size=100)
    status = (rng.uniform(size=100) < 0.6).astype(float)
    status[0] = 1.0
    values = km_fit(time, status).values

    assert np.all(np.diff(values) <= 0)
    assert np.all((values >= 0) & (values <= 1))


def test_rmst_at_zero_and_before_first_event(hand_sample):
    curve = km_fit(*hand_sample)
    assert rmst(curve, 0.0) == 0.0
    assert rmst(curve, 0.5) == 0.5


def test_rmst_rejects_negative_tau(hand_sample):
    with pytest.raises(InputError):
        rmst(km_fit(*hand_sample), -1.0)


def test_no_events():
    with pytest.raises(NoEventsError):
        km_fit([1.0, 2.0], [0.0, 0.0])


def test_restriction_time(hand_sample):
    assert restriction_time(*hand_sample) == 4.0
    assert restriction_time([1.0, 5.0, 3.0], [1.0, 0.0, 1.0]) == 3.0
    assert restriction_time([1.0], [0.0]) is None


def test_piecewise_linear_curve():
    curve = SurvivalCurve([1.0, 3.0], [1.0, 0.0], PIECEWISE_LINEAR)

    assert float(curve.evaluate(2.0)) == pytest.approx(0.5)
    assert curve.integral(3.0) == pytest.approx(2.0)
    assert curve.integral(2.0) == pytest.approx(1.0 + 0.75)


def test_step_curve_evaluate_is_right_continuous(hand_sample):
    curve = km_fit(*hand_sample)
    np.testing.assert_allclose(curve.evaluate([0.5, 1.0, 2.9, 3.0, 10.0]), [1.0, 0.75, 0.75, 0.375, 0.0])


def test_censoring_after_the_last_event_adds_no_step(hand_sample):
    time, status = hand_sample
    extended = km_fit(np.append(time, 6.0), np.append(status, 0.0))
    original = km_fit(time, status)

    # one more subject at risk at every event time: 4/5, then x 2/3, then x 1/2
    np.testing.assert_allclose(extended.jump_times, original.jump_times)
    np.testing.assert_allclose(extended.values, [0.8, 0.8 * 2 / 3, 0.8 / 3])
    np.testing.assert_allclose(extended.evaluate([4.0, 5.0, 6.0, 7.0]), 0.8 / 3)
