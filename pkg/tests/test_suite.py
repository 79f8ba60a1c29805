"""
Tests for the classifiers and suite evaluation
"""

import logging

import numpy as np
import pandas as pd
import pytest

from dq.base import ClassifierKind, ClassifierSpec
from dq.dataset import Dataset, TrainTestSplit, make_blobs, split_random
from dq.error_constants import ConfigError, ModelError, get_readable_error
from dq.suite import CLASSIFIERS, AccuracyVector, accuracy, default_suite, evaluate_suite, parse_suite, predict, train

# Configure logging
logging.basicConfig(level=logging.DEBUG)
logger = logging.getLogger(__name__)

ALL_KINDS = list(ClassifierKind)


def _frame_dataset(x, y, reference=None) -> Dataset:
    frame = pd.DataFrame(np.asarray(x, dtype=float).reshape(len(y), -1))
    frame.columns = [f'x{j}' for j in range(frame.shape[1])]
    frame['y'] = y
    return Dataset.from_frame(frame, 'y', reference=reference)


def _shuffled(d: Dataset, seed: int) -> Dataset:
    labels = np.random.default_rng(seed).permutation(d.labels)
    return d.with_rows(d.features, labels)


def test_default_suite():
    suite = default_suite(seed=0)
    assert [spec.kind for spec in suite] == ALL_KINDS
    assert suite[2].hyper_parameters['k'] == 5
    assert suite[4].hyper_parameters['n_trees'] == 25
    assert len({spec.seed for spec in suite}) == len(suite), "members get distinct derived seeds"
    assert [spec.seed for spec in default_suite(seed=0)] == [spec.seed for spec in suite]


def test_parse_suite_string():
    suite = parse_suite('knn:k=3,decision_tree:max_depth=8;min_leaf=1', seed=1)
    assert [spec.identity for spec in suite] == ['knn(k=3)', 'decision_tree(max_depth=8, min_leaf=1)']
    assert [spec.kind for spec in parse_suite('fast')] == [
        ClassifierKind.LOGISTIC_REGRESSION, ClassifierKind.GAUSSIAN_NB, ClassifierKind.KNN
    ]


def test_parse_suite_json(tmp_path):
    path = tmp_path / "suite.json"
    path.write_text('[{"kind": "knn", "hyper_parameters": {"k": 1}, "seed": 9}, "gaussian_nb"]')
    suite = parse_suite(str(path))
    assert suite[0].seed == 9
    assert suite[1].kind == ClassifierKind.GAUSSIAN_NB


@pytest.mark.parametrize("selection", [
    'knn:k=0',
    'random_forest:n_trees=-1',
    'logistic_regression:learning_rate=0',
    'logistic_regression:epochs=1.5',
    'knn:depth=3',
    'svm',
    '',
])
def test_invalid_suites(selection):
    with pytest.raises(ConfigError):
        parse_suite(selection)


def test_knn_one_memorizes_training_rows():
    d = make_blobs(n=50, d=3, seed=8)
    model = train(ClassifierSpec(ClassifierKind.KNN, {'k': 1}), d)
    assert accuracy(model, d) == 1.0
    for row in range(0, 50, 7):
        assert predict(model, d.features[row]) == d.labels[row]


def test_gaussian_nb_variance_floor():
    # feature 0 is constant inside each class
    d = _frame_dataset([[1.0, 0.0], [1.0, 1.0], [2.0, 0.0], [2.0, 1.0]], ['a', 'a', 'b', 'b'])
    model = train(ClassifierSpec(ClassifierKind.GAUSSIAN_NB), d)
    assert model.variances[:, 0].tolist() == [1e-9, 1e-9]
    assert predict(model, [1.0, 0.5]) == 0
    assert predict(model, [2.0, 0.5]) == 1


def test_decision_tree_threshold():
    x = np.arange(10.0)
    d = _frame_dataset(x, ['low'] * 5 + ['high'] * 5)
    model = train(ClassifierSpec(ClassifierKind.DECISION_TREE), d)
    assert predict(model, [100.0]) == 1
    assert predict(model, [-100.0]) == 0
    assert model.depth() == 1


def test_zero_weights_predict_lowest_class():
    """A constant feature with balanced labels leaves logistic regression at zero"""
    d = _frame_dataset(np.zeros(4), ['a', 'b', 'a', 'b'])
    model = train(ClassifierSpec(ClassifierKind.LOGISTIC_REGRESSION), d)
    assert np.all(model.weights == 0)
    assert predict(model, [0.0]) == 0
    assert predict(model, [5.0]) == 0


def test_three_of_four_correct():
    train_set = _frame_dataset([0.0, 10.0], ['a', 'b'])
    test_set = _frame_dataset([1.0, 9.0, 2.0, 8.0], ['a', 'b', 'a', 'a'], reference=train_set)
    model = train(ClassifierSpec(ClassifierKind.KNN, {'k': 1}), train_set)
    assert accuracy(model, test_set) == 0.75


@pytest.mark.parametrize("kind", ALL_KINDS, ids=[kind.value for kind in ALL_KINDS])
def test_dimension_mismatch(kind, small_blobs):
    model = train(ClassifierSpec(kind, seed=1), small_blobs)
    with pytest.raises(ModelError) as error:
        predict(model, np.zeros(small_blobs.n_features + 1))
    assert error.value.code == 'dimension-mismatch'


def test_training_rejects_missing_cells(small_blobs):
    features = small_blobs.features.copy()
    features[0, 0] = np.nan
    with pytest.raises(ModelError) as error:
        train(ClassifierSpec(ClassifierKind.KNN), small_blobs.with_features(features))
    assert error.value.code == 'missing-cells'


def test_untrained_model_reports_not_trained():
    model = CLASSIFIERS[ClassifierKind.KNN](ClassifierSpec(ClassifierKind.KNN))
    with pytest.raises(ModelError) as error:
        model.predict([0.0])
    assert error.value.code == 'not-trained'
    assert get_readable_error(error.value).startswith("Model is not trained")


def test_empty_training_set_code():
    model = CLASSIFIERS[ClassifierKind.GAUSSIAN_NB](ClassifierSpec(ClassifierKind.GAUSSIAN_NB))
    with pytest.raises(ModelError) as error:
        model.fit(np.zeros((0, 2)), np.zeros(0, dtype=np.int64), 2)
    assert error.value.code == 'empty-train'


def test_out_of_range_accuracy_code():
    with pytest.raises(ModelError) as error:
        AccuracyVector((('knn', -0.1),))
    assert error.value.code == 'invalid-accuracy'
    assert "Accuracy outside [0, 1]" in get_readable_error(error.value)


@pytest.mark.parametrize("kind", ALL_KINDS, ids=[kind.value for kind in ALL_KINDS])
def test_training_is_deterministic(kind, small_blobs):
    split = split_random(small_blobs, 0.8, seed=2)
    spec = ClassifierSpec(kind, seed=11)
    first = train(spec, split.train).predict_many(split.test.features)
    second = train(spec, split.train).predict_many(split.test.features)
    assert np.array_equal(first, second)


@pytest.mark.parametrize("kind", ALL_KINDS, ids=[kind.value for kind in ALL_KINDS])
def test_absent_class_is_never_predicted(kind):
    d = make_blobs(n=60, d=2, class_count=3, seed=5)
    present = d.take(np.flatnonzero(d.labels != 2))
    model = train(ClassifierSpec(kind, seed=3), present)
    assert 2 not in set(model.predict_many(d.features).tolist())


def test_suite_on_separable_blobs():
    """All members reach a nearest-centroid oracle's level on well separated blobs"""
    d = make_blobs(n=500, d=2, separation=6.0, seed=0)
    split = split_random(d, 0.8, seed=1)

    centroids = np.array([split.train.features[split.train.labels == label].mean(axis=0) for label in range(2)])
    distances = ((split.test.features[:, None, :] - centroids[None, :, :]) ** 2).sum(axis=2)
    oracle = np.mean(np.argmin(distances, axis=1) == split.test.labels)
    assert oracle >= 0.95, f"Oracle accuracy {oracle}"

    scores = evaluate_suite(default_suite(seed=0), split)
    assert len(scores) == 5
    for model, value in scores.entries:
        assert value >= 0.95, f"{model} accuracy {value:.3f} on separable blobs"


def test_shuffled_labels_are_near_chance():
    d = make_blobs(n=1000, d=5, seed=0)
    for repetition in range(5):
        split = split_random(_shuffled(d, repetition), 0.8, seed=repetition)
        scores = evaluate_suite(default_suite(seed=repetition), split)
        for model, value in scores.entries:
            assert 0.35 <= value <= 0.65, f"{model} accuracy {value:.3f} with shuffled labels"


def test_suite_of_one(small_blobs):
    split = split_random(small_blobs, 0.8, seed=0)
    scores = evaluate_suite(parse_suite('gaussian_nb'), split)
    assert scores.models == ['gaussian_nb']


def test_evaluate_suite_jobs_do_not_change_results(small_blobs):
    split = split_random(small_blobs, 0.8, seed=3)
    suite = default_suite(seed=4)
    assert evaluate_suite(suite, split, jobs=1) == evaluate_suite(suite, split, jobs=4)


def test_test_row_order_does_not_matter(small_blobs, fast_suite):
    split = split_random(small_blobs, 0.8, seed=3)
    order = np.random.default_rng(0).permutation(split.test.n_rows)
    permuted = TrainTestSplit(split.train, split.test.take(order), split.train_fraction, split.seed)
    assert evaluate_suite(fast_suite, split) == evaluate_suite(fast_suite, permuted)


@pytest.mark.parametrize("kind", [ClassifierKind.KNN, ClassifierKind.DECISION_TREE])
def test_shifted_column_keeps_accuracy(kind, blobs):
    split = split_random(blobs, 0.8, seed=6)
    shift = np.zeros(blobs.n_features)
    shift[1] = 3.0
    shifted = TrainTestSplit(
        split.train.with_features(split.train.features + shift),
        split.test.with_features(split.test.features + shift),
        split.train_fraction, split.seed
    )
    spec = ClassifierSpec(kind, seed=0)
    assert accuracy(train(spec, split.train), split.test) == accuracy(train(spec, shifted.train), shifted.test)


def test_empty_suite(small_blobs):
    with pytest.raises(ConfigError):
        evaluate_suite([], split_random(small_blobs, 0.8, seed=0))
