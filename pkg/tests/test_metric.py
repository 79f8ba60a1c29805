"""
Tests for the q_a metric and its assessment procedure
"""

import logging

import pytest
from hypothesis import given, settings, strategies as st

from dq.corruption import ErrorType, inject_missing
from dq.dataset import load_csv, make_blobs, split_random, write_csv
from dq.error_constants import ConfigError, DatasetError, ModelError
from dq.metric import (
    AssessConfig, QualityLevel, QualityScore, Thresholds, assess, combine_alpha, combine_max, delta1, delta2,
    delta_accuracy, interpret, mean_accuracy, q_a1, q_a2
)
from dq.suite import AccuracyVector

# Configure logging
logging.basicConfig(level=logging.DEBUG)
logger = logging.getLogger(__name__)

unit = st.floats(min_value=0.0, max_value=1.0, allow_nan=False)


def direct_quality(accuracies, deltas, c, p, factor=10.0):
    """Straight transcription of the q_a formulas"""
    a = sum(accuracies) / len(accuracies)
    gate1 = 1 if a > 1 / c else 0
    q1 = 1 - ((c * a - 1) / (c - 1)) * gate1
    gated = [delta if delta > p else 0.0 for delta in deltas]
    q2 = min(factor / len(deltas) * sum(gated), 1.0)
    return q1, q2, max(q1, q2)


@settings(max_examples=1000, deadline=None)
@given(
    accuracies=st.lists(unit, min_size=1, max_size=12),
    deltas=st.lists(unit, min_size=1, max_size=3),
    c=st.integers(min_value=2, max_value=10),
    p=st.sampled_from([0.01, 0.05, 0.1]),
)
def test_matches_direct_formulas(accuracies, deltas, c, p):
    expected_q1, expected_q2, expected_q = direct_quality(accuracies, deltas, c, p)
    errors = dict(zip(ErrorType, deltas))

    q1 = q_a1(mean_accuracy(accuracies), c)
    q2 = q_a2(errors, p)
    assert abs(q1 - expected_q1) <= 1e-12
    assert abs(q2 - expected_q2) <= 1e-12
    assert abs(combine_max(q1, q2) - expected_q) <= 1e-12
    assert 0.0 <= q1 <= 1.0 and 0.0 <= q2 <= 1.0


@settings(max_examples=200, deadline=None)
@given(deltas=st.lists(unit, min_size=3, max_size=3), p=st.sampled_from([0.01, 0.05, 0.1]))
def test_sensitivity_ignores_error_order(deltas, p):
    forward = dict(zip(ErrorType, deltas))
    backward = dict(reversed(list(forward.items())))
    assert q_a2(forward, p) == q_a2(backward, p)


@settings(max_examples=10_000, deadline=None)
@given(q1=unit, q2=unit, alpha=unit)
def test_max_dominates_blends(q1, q2, alpha):
    blend = combine_alpha(q1, q2, alpha)
    assert combine_max(q1, q2) >= blend - 1e-12
    if abs(q1 - q2) > 1e-6 and 1e-6 < alpha < 1 - 1e-6:
        assert combine_max(q1, q2) > blend


def test_blend_edges():
    assert combine_alpha(0.9, 0.0, 0.5) == pytest.approx(0.45, abs=1e-12)
    assert combine_max(0.9, 0.0) == 0.9
    assert combine_alpha(0.7, 0.2, 1.0) == 0.7
    assert combine_alpha(0.7, 0.2, 0.0) == 0.2
    with pytest.raises(ConfigError):
        combine_alpha(0.1, 0.2, 1.5)


def test_published_identities():
    assert abs(q_a1(0.84, 2) - 0.32) <= 1e-12
    for c in range(2, 11):
        assert q_a1(1.0, c) == 0.0
        assert q_a1(1 / c, c) == 1.0
        assert q_a1(0.0, c) == 1.0
        assert delta1(1 / c, c) == 0


@pytest.mark.parametrize("value, level", [
    (0.0, QualityLevel.GOOD),
    (0.29, QualityLevel.GOOD),
    (0.3, QualityLevel.GOOD),
    (0.32, QualityLevel.MEDIUM),
    (0.42, QualityLevel.MEDIUM),
    (0.6, QualityLevel.MEDIUM),
    (0.61, QualityLevel.BAD),
    (1.0, QualityLevel.BAD),
])
def test_interpret(value, level):
    assert interpret(value) == level


def test_custom_thresholds():
    assert interpret(0.25, Thresholds(0.2, 0.5)) == QualityLevel.MEDIUM
    with pytest.raises(ConfigError):
        Thresholds(0.6, 0.3)


def test_sensitivity_gate_is_strict():
    assert delta2(0.05, 0.05) == 0
    assert delta2(0.0500001, 0.05) == 1
    assert q_a2({ErrorType.MISSING: 0.05}, 0.05) == 0.0
    assert q_a2({ErrorType.MISSING: 0.5, ErrorType.OUTLIER: 0.5}, 0.05) == 1.0
    assert q_a2({ErrorType.MISSING: 0.06, ErrorType.OUTLIER: 0.0}, 0.05) == pytest.approx(0.3, abs=1e-12)
    with pytest.raises(ConfigError):
        q_a2({}, 0.05)


def test_delta_accuracy():
    base = AccuracyVector((('knn', 0.9), ('gaussian_nb', 0.8)))
    corrupted = AccuracyVector((('knn', 0.7), ('gaussian_nb', 0.9)))
    assert delta_accuracy(base, corrupted) == pytest.approx(0.15, abs=1e-12)

    other = AccuracyVector((('knn', 0.7), ('decision_tree', 0.9)))
    with pytest.raises(ModelError) as error:
        delta_accuracy(base, other)
    assert error.value.code == 'suite-mismatch'


def test_accuracy_vector_range():
    with pytest.raises(ModelError):
        AccuracyVector((('knn', 1.2),))


@pytest.fixture
def quick_config(fast_suite):
    def _config(**overrides) -> AssessConfig:
        values = {'suite': fast_suite, 'resamples': 3, 'master_seed': 7}
        values.update(overrides)
        return AssessConfig(**values)
    return _config


def test_clean_blobs_are_good(blobs, quick_config):
    score = assess(blobs, quick_config())
    logger.info(f"Clean blobs: {score.summary()}")

    assert score.q_a <= 0.3
    assert score.level == QualityLevel.GOOD
    assert score.q_a == max(score.q_a1, score.q_a2)
    assert score.resample_count == 3
    assert set(score.per_error_delta) == set(ErrorType)
    assert [model for model, _ in score.per_model_quality] == score.per_model.models


def test_mostly_missing_blobs_are_bad(blobs, quick_config):
    """With 95% of cells blank most rows carry no feature at all"""
    score = assess(inject_missing(blobs, 0.95, seed=3), quick_config(error_set=[ErrorType.MISSING]))
    logger.info(f"95% missing: {score.summary()}")
    assert score.q_a > 0.6
    assert score.level == QualityLevel.BAD


def test_trusted_test_skips_resampling(blobs, quick_config):
    split = split_random(blobs, 0.8, seed=0)
    score = assess(split.train, quick_config(trusted_test=split.test))
    assert score.resample_count == 1
    assert score.resample_seeds == (7,)


def test_assess_is_deterministic(blobs, quick_config):
    config = quick_config()
    first = assess(blobs, config).to_report(config)
    assert assess(blobs, config).to_report(config) == first
    assert assess(blobs, config, jobs=3).to_report(config) == first

    other = quick_config(master_seed=8)
    assert assess(blobs, other).to_report(other)['derived_seeds'] != first['derived_seeds']


def test_report_contents(small_blobs, quick_config):
    config = quick_config(resamples=2, error_set=['missing', 'fuzzing'])
    report = assess(small_blobs, config).to_report(config)

    assert set(report) >= {'qa', 'qa1', 'qa2', 'level', 'mean_accuracy', 'per_model', 'per_error_delta',
                           'resample_count', 'p', 'config', 'seed', 'derived_seeds'}
    assert list(report['per_error_delta']) == ['missing', 'fuzzing']
    assert len(report['derived_seeds']['resamples']) == 2
    assert report['config']['suite'][0]['kind'] == 'logistic_regression'
    assert report['p'] == 0.05


@pytest.mark.parametrize("overrides", [
    {'p': 0.0},
    {'p': 1.0},
    {'resamples': 0},
    {'error_set': []},
    {'error_set': ['missing', 'missing']},
    {'suite': []},
    {'train_fraction': 1.0},
])
def test_invalid_assess_config(quick_config, overrides):
    with pytest.raises(ConfigError):
        quick_config(**overrides)


@settings(max_examples=500, deadline=None)
@given(c=st.integers(min_value=2, max_value=10), fraction=unit)
def test_accuracy_term_is_one_up_to_chance(c, fraction):
    assert q_a1(fraction / c, c) == 1.0


@settings(max_examples=500, deadline=None)
@given(c=st.integers(min_value=2, max_value=10), low=unit, high=unit)
def test_accuracy_term_decreases_above_chance(c, low, high):
    low, high = sorted((low, high))
    if low <= 1 / c + 1e-9 or high - low <= 1e-9:
        return
    assert q_a1(low, c) > q_a1(high, c)


@settings(max_examples=500, deadline=None)
@given(a=unit)
def test_accuracy_term_for_two_classes(a):
    expected = 2 * (1 - a) if a > 0.5 else 1.0
    assert abs(q_a1(a, 2) - expected) <= 1e-12


def test_score_invariant_code():
    with pytest.raises(ModelError) as error:
        QualityScore(0.2, 0.3, 0.1, 0.9, AccuracyVector((('knn', 0.9),)), {}, 1, 0.05, QualityLevel.GOOD)
    assert error.value.code == 'invalid-score'


def test_fuzzing_does_not_move_clean_blobs(blobs, quick_config):
    score = assess(blobs, quick_config(error_set=[ErrorType.FUZZING]))
    assert score.per_error_delta[ErrorType.FUZZING] <= 0.05
    assert score.q_a2 == 0.0


def test_separately_loaded_trusted_test(tmp_path, quick_config):
    """A test file loaded on its own is re-encoded with the training schema"""
    train_path, test_path = str(tmp_path / "train.csv"), str(tmp_path / "test.csv")
    write_csv(make_blobs(n=200, d=3, seed=1), train_path)
    write_csv(make_blobs(n=50, d=3, seed=2), test_path)
    train, test = load_csv(train_path, 'y'), load_csv(test_path, 'y')

    score = assess(train, quick_config(trusted_test=test))
    assert score.resample_count == 1
    assert score.mean_accuracy >= 0.9
    assert 0.0 <= score.q_a <= 1.0

    write_csv(make_blobs(n=50, d=2, seed=2), test_path)
    with pytest.raises(DatasetError) as error:
        assess(train, quick_config(trusted_test=load_csv(test_path, 'y')))
    assert error.value.code == 'schema-mismatch'
