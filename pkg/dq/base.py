"""
Base classifier implementation.
"""

import logging
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Tuple, Union

import numpy as np

from .config import NB_VARIANCE_FLOOR
from .error_constants import ConfigError, ModelError

logger = logging.getLogger(__name__)


class ClassifierKind(Enum):
    """Built-in classifier families"""
    LOGISTIC_REGRESSION = 'logistic_regression'
    GAUSSIAN_NB = 'gaussian_nb'
    KNN = 'knn'
    DECISION_TREE = 'decision_tree'
    RANDOM_FOREST = 'random_forest'


# Fixed defaults per kind; overrides are validated against these names
DEFAULT_HYPER_PARAMETERS: Dict[ClassifierKind, Dict[str, Any]] = {
    ClassifierKind.LOGISTIC_REGRESSION: {'learning_rate': 0.1, 'epochs': 300},
    ClassifierKind.GAUSSIAN_NB: {'variance_floor': NB_VARIANCE_FLOOR},
    ClassifierKind.KNN: {'k': 5},
    ClassifierKind.DECISION_TREE: {'max_depth': 12, 'min_leaf': 2, 'max_features': None},
    ClassifierKind.RANDOM_FOREST: {'n_trees': 25, 'max_depth': 12, 'min_leaf': 2, 'max_features': None},
}

POSITIVE_INTEGERS = ('k', 'max_depth', 'min_leaf', 'n_trees', 'epochs', 'max_features')
POSITIVE_REALS = ('learning_rate', 'variance_floor')


def _validate_hyper_parameter(kind: ClassifierKind, name: str, value: Any) -> Any:
    if name == 'max_features' and value is None:
        return None
    try:
        number = None if isinstance(value, bool) else float(value)
    except (TypeError, ValueError):
        number = None

    if name in POSITIVE_INTEGERS:
        if number is None or not number.is_integer() or number < 1:
            raise ConfigError(f"{kind.value}: {name} must be an integer >= 1, got {value!r}",
                              code="invalid-hyper-parameter")
        return int(number)
    if name in POSITIVE_REALS:
        if number is None or not number > 0:
            raise ConfigError(f"{kind.value}: {name} must be > 0, got {value!r}", code="invalid-hyper-parameter")
        return number
    raise ConfigError(f"{kind.value}: unknown hyper-parameter {name!r}", code="invalid-hyper-parameter")


def get_kind(kind: Union[str, ClassifierKind]) -> ClassifierKind:
    """Convert a kind name or enum to ClassifierKind"""
    if isinstance(kind, ClassifierKind):
        return kind
    try:
        return ClassifierKind(str(kind).strip().lower())
    except ValueError:
        supported = ', '.join(k.value for k in ClassifierKind)
        raise ConfigError(f"Unsupported classifier kind {kind!r} (supported: {supported})",
                          code="invalid-hyper-parameter")


@dataclass(frozen=True)
class ClassifierSpec:
    """One member of the model set: kind, validated hyper-parameters and seed"""
    kind: ClassifierKind
    hyper_parameters: Mapping[str, Any] = field(default_factory=dict)
    seed: int = 0

    def __post_init__(self):
        kind = get_kind(self.kind)
        merged = dict(DEFAULT_HYPER_PARAMETERS[kind])
        for name, value in dict(self.hyper_parameters).items():
            if name not in merged:
                raise ConfigError(f"{kind.value}: unknown hyper-parameter {name!r}", code="invalid-hyper-parameter")
            merged[name] = value
        validated = {name: _validate_hyper_parameter(kind, name, value) for name, value in merged.items()}
        object.__setattr__(self, 'kind', kind)
        object.__setattr__(self, 'hyper_parameters', validated)
        object.__setattr__(self, 'seed', int(self.seed))

    @property
    def identity(self) -> str:
        """Kind name plus any non-default hyper-parameters, e.g. knn(k=3)"""
        defaults = DEFAULT_HYPER_PARAMETERS[self.kind]
        overrides = [f"{name}={value}" for name, value in sorted(self.hyper_parameters.items())
                     if value != defaults[name]]
        return f"{self.kind.value}({', '.join(overrides)})" if overrides else self.kind.value

    def with_seed(self, seed: int) -> 'ClassifierSpec':
        return ClassifierSpec(self.kind, self.hyper_parameters, seed)

    def to_dict(self) -> Dict[str, Any]:
        return {'kind': self.kind.value, 'hyper_parameters': dict(self.hyper_parameters), 'seed': self.seed}

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> 'ClassifierSpec':
        if 'kind' not in data:
            raise ConfigError(f"Suite entry {dict(data)} has no kind", code="invalid-hyper-parameter")
        return cls(get_kind(data['kind']), data.get('hyper_parameters') or {}, data.get('seed', 0))


def fit_standardizer(features: np.ndarray) -> Tuple[np.ndarray, np.ndarray]:
    """Train mean and scale; zero-variance columns keep scale 1"""
    mean = features.mean(axis=0)
    scale = features.std(axis=0)
    scale = np.where(scale > 0, scale, 1.0)
    return mean, scale


class BaseClassifier:
    """Base classifier implementation"""

    def __init__(self, spec: ClassifierSpec):
        """Initialize base classifier"""
        self.spec = spec
        self.hyper_parameters = spec.hyper_parameters
        self.class_count: Optional[int] = None
        self.n_features: Optional[int] = None
        self.seen_classes: Optional[np.ndarray] = None

    def _fit(self, features: np.ndarray, labels: np.ndarray):
        raise NotImplementedError

    def _scores(self, features: np.ndarray) -> np.ndarray:
        """Per-class scores (m x c), larger is better"""
        raise NotImplementedError

    @property
    def is_fitted(self) -> bool:
        return self.seen_classes is not None

    def fit(self, features: np.ndarray, labels: np.ndarray, class_count: int) -> 'BaseClassifier':
        """Fit on a complete (imputed) feature matrix"""
        features = np.asarray(features, dtype=np.float64)
        labels = np.asarray(labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] < 1:
            raise ModelError(f"{self.spec.identity}: training needs at least one row", code="empty-train")
        if not np.isfinite(features).all():
            raise ModelError(f"{self.spec.identity}: training features contain missing cells",
                             code="missing-cells")

        self.class_count = class_count
        self.n_features = features.shape[1]
        self.seen_classes = np.bincount(labels, minlength=class_count) > 0
        if not self.seen_classes.all():
            absent = np.flatnonzero(~self.seen_classes).tolist()
            logger.debug(f"{self.spec.identity}: classes {absent} absent from training data")

        self._fit(features, labels)
        return self

    def predict_many(self, features: np.ndarray) -> np.ndarray:
        """Class index per row; ties go to the lowest index, unseen classes are never predicted"""
        if not self.is_fitted:
            raise ModelError(f"{self.spec.identity}: model is not trained", code="not-trained")
        features = np.asarray(features, dtype=np.float64)
        if features.ndim != 2 or features.shape[1] != self.n_features:
            raise ModelError(f"{self.spec.identity}: expected {self.n_features} features, got shape {features.shape}",
                             code="dimension-mismatch")
        if not np.isfinite(features).all():
            raise ModelError(f"{self.spec.identity}: query features contain missing cells", code="missing-cells")

        scores = self._scores(features)
        scores = np.where(self.seen_classes, scores, -np.inf)
        return np.argmax(scores, axis=1)

    def predict(self, row: np.ndarray) -> int:
        row = np.asarray(row, dtype=np.float64)
        if row.ndim != 1:
            raise ModelError(f"{self.spec.identity}: expected a single row, got shape {row.shape}",
                             code="dimension-mismatch")
        return int(self.predict_many(row[None, :])[0])
