"""
The model set: classifier registry, suite parsing, training and accuracy evaluation.
"""

import json
import logging
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Any, Dict, Iterable, List, Sequence, Tuple, Type, Union

import numpy as np

from .base import BaseClassifier, ClassifierKind, ClassifierSpec, get_kind
from .bayes import GaussianNB
from .config import bundled_suites, derive_seed, load_suite
from .dataset import Dataset, TrainTestSplit, impute_train_mean
from .error_constants import ConfigError, DatasetError, ModelError
from .linear import LogisticRegression
from .neighbors import KNearestNeighbors
from .tree import DecisionTree, RandomForest

logger = logging.getLogger(__name__)

# A trained model is a fitted classifier; it is not modified after training
TrainedModel = BaseClassifier

# Mapping of classifier kinds to implementations
CLASSIFIERS: Dict[ClassifierKind, Type[BaseClassifier]] = {
    ClassifierKind.LOGISTIC_REGRESSION: LogisticRegression,
    ClassifierKind.GAUSSIAN_NB: GaussianNB,
    ClassifierKind.KNN: KNearestNeighbors,
    ClassifierKind.DECISION_TREE: DecisionTree,
    ClassifierKind.RANDOM_FOREST: RandomForest,
}


@dataclass(frozen=True)
class AccuracyVector:
    """One (model identity, accuracy) entry per suite member, in suite order"""
    entries: Tuple[Tuple[str, float], ...]

    def __post_init__(self):
        entries = tuple((str(model), float(value)) for model, value in self.entries)
        for model, value in entries:
            if not 0.0 <= value <= 1.0:
                raise ModelError(f"Accuracy of {model} is {value}, outside [0, 1]", code="invalid-accuracy")
        object.__setattr__(self, 'entries', entries)

    def __len__(self) -> int:
        return len(self.entries)

    @property
    def models(self) -> List[str]:
        return [model for model, _ in self.entries]

    @property
    def values(self) -> np.ndarray:
        return np.array([value for _, value in self.entries], dtype=np.float64)

    def to_list(self) -> List[Dict[str, Any]]:
        return [{'model': model, 'accuracy': value} for model, value in self.entries]


def _parse_overrides(text: str) -> Dict[str, Any]:
    overrides = {}
    for item in filter(None, (part.strip() for part in text.split(';'))):
        if '=' not in item:
            raise ConfigError(f"Hyper-parameter override {item!r} is not key=value", code="invalid-hyper-parameter")
        name, value = (part.strip() for part in item.split('=', 1))
        overrides[name] = None if value.lower() == 'none' else json.loads(value)
    return overrides


def parse_suite(selection: Union[str, Sequence[Any]], seed: int = 0) -> List[ClassifierSpec]:
    """
    Build a suite from a selection.

    Args:
        selection: Bundled suite name ('default', 'fast'), JSON file path,
            comma-separated kinds with optional overrides ('knn:k=3;...,decision_tree'),
            or a list of specs / dicts / kind names
        seed: Master seed; member i gets a seed derived from (seed, i) unless it sets its own

    Returns:
        List of validated classifier specs
    """
    if isinstance(selection, str):
        text = selection.strip()
        if text in bundled_suites():
            entries: List[Any] = load_suite(text)
        elif text.endswith('.json'):
            if not os.path.isfile(text):
                raise ConfigError(f"Suite file {text} does not exist")
            with open(text) as f:
                entries = json.load(f)
        else:
            entries = []
            for item in filter(None, (part.strip() for part in text.split(','))):
                kind, _, overrides = item.partition(':')
                entries.append({'kind': kind, 'hyper_parameters': _parse_overrides(overrides)})
    else:
        entries = list(selection)

    if not entries:
        raise ConfigError("Suite is empty")

    suite = []
    for index, entry in enumerate(entries):
        if isinstance(entry, ClassifierSpec):
            suite.append(entry)
            continue
        if isinstance(entry, (str, ClassifierKind)):
            entry = {'kind': get_kind(entry)}
        entry = dict(entry)
        entry.setdefault('seed', derive_seed(seed, 'model', index))
        suite.append(ClassifierSpec.from_dict(entry))
    return suite


def default_suite(seed: int = 0) -> List[ClassifierSpec]:
    return parse_suite('default', seed)


def train(spec: ClassifierSpec, train_set: Dataset) -> TrainedModel:
    """Train one suite member; deterministic for (spec, train_set)"""
    classifier = CLASSIFIERS[spec.kind](spec)
    return classifier.fit(train_set.features, train_set.labels, train_set.class_count)


def predict(model: TrainedModel, features: Union[np.ndarray, Sequence[float]]) -> int:
    """Class index for one row of d finite values"""
    return model.predict(np.asarray(features, dtype=np.float64))


def accuracy(model: TrainedModel, test: Dataset) -> float:
    """Fraction of test rows predicted correctly"""
    if test.n_rows == 0:
        raise DatasetError("Test set is empty", code="empty-test")
    predictions = model.predict_many(test.features)
    return float(np.mean(predictions == test.labels))


def _evaluate_member(spec: ClassifierSpec, split: TrainTestSplit) -> float:
    model = train(spec, split.train)
    score = accuracy(model, split.test)
    logger.debug(f"{spec.identity}: accuracy {score:.4f} on {split.test.n_rows} test rows")
    return score


def evaluate_suite(suite: Iterable[ClassifierSpec], split: TrainTestSplit, jobs: int = 1) -> AccuracyVector:
    """
    Train every member on the (imputed) training partition and score it on the test partition.

    Members are independent; with jobs > 1 they run on a thread pool and results keep suite order.
    """
    suite = list(suite)
    if not suite:
        raise ConfigError("Suite is empty")

    split = impute_train_mean(split)
    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            scores = list(pool.map(lambda spec: _evaluate_member(spec, split), suite))
    else:
        scores = [_evaluate_member(spec, split) for spec in suite]

    return AccuracyVector(tuple(zip((spec.identity for spec in suite), scores)))
