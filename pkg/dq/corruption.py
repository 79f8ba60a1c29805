"""
Controlled error injection: missing values, outliers and fuzzing.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Any, Callable, Dict, Union

import numpy as np

from .config import FUZZING_NOISE, OUTLIER_BAND, derive_seed
from .dataset import MISSING, Dataset, TrainTestSplit
from .error_constants import ConfigError, DatasetError

logger = logging.getLogger(__name__)


class ErrorType(Enum):
    """Error types injected into feature data"""
    MISSING = 'missing'
    OUTLIER = 'outlier'
    FUZZING = 'fuzzing'


class InjectionTarget(Enum):
    """Which part of the data an injection plan deteriorates"""
    TRAIN_ONLY = 'train-only'
    WHOLE_DATASET = 'whole-dataset'


ERROR_ALIASES = {
    'missing': ErrorType.MISSING,
    'missing_values': ErrorType.MISSING,
    'missing-values': ErrorType.MISSING,
    'outlier': ErrorType.OUTLIER,
    'outliers': ErrorType.OUTLIER,
    'fuzzing': ErrorType.FUZZING,
    'duplicates': ErrorType.FUZZING,
}


def get_error_type(error: Union[str, ErrorType]) -> ErrorType:
    """Convert an error name or enum to ErrorType"""
    if isinstance(error, ErrorType):
        return error
    try:
        return ERROR_ALIASES[str(error).strip().lower()]
    except KeyError:
        raise ConfigError(f"Unsupported error type {error!r} (supported: missing, outlier, fuzzing)")


def get_target(target: Union[str, InjectionTarget]) -> InjectionTarget:
    if isinstance(target, InjectionTarget):
        return target
    try:
        return InjectionTarget(str(target).strip().lower().replace('_', '-'))
    except ValueError:
        raise ConfigError(f"Unsupported injection target {target!r} (supported: train-only, whole-dataset)")


def _check_rate(rate: float):
    if not 0.0 <= rate <= 1.0:
        raise ConfigError(f"Injection rate must be in [0, 1], got {rate}")


def injection_count(rate: float, total: int) -> int:
    """floor(rate * total), robust to representation error of decimal rates"""
    return int(np.floor(rate * total + 1e-9))


@dataclass(frozen=True)
class InjectionPlan:
    """Error type, rate (fraction), seed and target of one injection"""
    error: ErrorType
    rate: float
    seed: int
    target: InjectionTarget = InjectionTarget.WHOLE_DATASET

    def __post_init__(self):
        object.__setattr__(self, 'error', get_error_type(self.error))
        object.__setattr__(self, 'target', get_target(self.target))
        _check_rate(self.rate)

    def to_dict(self) -> Dict[str, Any]:
        return {'error': self.error.value, 'rate': self.rate, 'seed': self.seed, 'target': self.target.value}


def inject_missing(d: Dataset, rate: float, seed: int) -> Dataset:
    """Blank floor(rate * n * d) distinct feature cells chosen uniformly over the grid"""
    _check_rate(rate)
    total = d.n_rows * d.n_features
    count = injection_count(rate, total)
    if count == 0:
        return d

    cells = np.random.default_rng(seed).choice(total, size=count, replace=False)
    features = d.features.copy()
    features.flat[cells] = MISSING
    logger.debug(f"Injected {count} missing cells (rate {rate}, seed {seed})")
    return d.with_features(features)


def inject_outliers(d: Dataset, rate: float, seed: int) -> Dataset:
    """
    Replace floor(rate * n * d_numeric) distinct numeric cells by values outside the clean range.

    A replacement for column j is uniform in [min_j - 3R_j, min_j - R_j] or [max_j + R_j, max_j + 3R_j]
    (band picked by a fair coin), R_j being the clean observed range, or max(1, |max_j|) when it is 0.
    """
    _check_rate(rate)
    numeric = np.array(d.numeric_columns, dtype=np.int64)
    if numeric.size == 0:
        raise DatasetError("Dataset has no numeric feature cells", code="no-numeric-cells")

    total = d.n_rows * numeric.size
    count = injection_count(rate, total)
    if count == 0:
        return d

    rng = np.random.default_rng(seed)
    cells = rng.choice(total, size=count, replace=False)
    rows, columns = cells // numeric.size, numeric[cells % numeric.size]

    schema = d.feature_schema
    low = np.array([schema[j].observed_min for j in columns])
    high = np.array([schema[j].observed_max for j in columns])
    spread = high - low
    spread = np.where(spread > 0, spread, np.maximum(1.0, np.abs(high)))

    below = rng.random(count) < 0.5
    distance = rng.uniform(OUTLIER_BAND[0], OUTLIER_BAND[1], size=count) * spread
    values = np.where(below, low - distance, high + distance)

    features = d.features.copy()
    features[rows, columns] = values
    logger.debug(f"Injected {count} outlier cells (rate {rate}, seed {seed})")
    return d.with_features(features)


def inject_fuzzing(d: Dataset, rate: float, seed: int) -> Dataset:
    """
    Replace floor(rate * n) distinct rows by partial duplicates of other rows.

    Row i takes the features and label of a uniformly chosen row k != i, and every numeric
    feature gets uniform noise in [-0.01 R_j, +0.01 R_j].
    """
    _check_rate(rate)
    if rate > 0 and d.n_rows < 2:
        raise DatasetError(f"Fuzzing needs at least 2 rows, dataset has {d.n_rows}", code="too-few-rows-fuzzing")

    count = injection_count(rate, d.n_rows)
    if count == 0:
        return d

    rng = np.random.default_rng(seed)
    rows = rng.choice(d.n_rows, size=count, replace=False)
    sources = rng.integers(0, d.n_rows - 1, size=count)
    sources = sources + (sources >= rows)

    features = d.features.copy()
    labels = d.labels.copy()
    features[rows] = d.features[sources]
    labels[rows] = d.labels[sources]

    numeric = np.array(d.numeric_columns, dtype=np.int64)
    if numeric.size:
        spread = np.array([d.feature_schema[j].observed_range for j in numeric])
        noise = rng.uniform(-1.0, 1.0, size=(count, numeric.size)) * FUZZING_NOISE * spread
        features[rows[:, None], numeric[None, :]] += noise

    logger.debug(f"Replaced {count} rows by partial duplicates (rate {rate}, seed {seed})")
    return d.with_rows(features, labels)


# Mapping of error types to injectors
INJECTORS: Dict[ErrorType, Callable[[Dataset, float, int], Dataset]] = {
    ErrorType.MISSING: inject_missing,
    ErrorType.OUTLIER: inject_outliers,
    ErrorType.FUZZING: inject_fuzzing,
}


def inject(data: Union[Dataset, TrainTestSplit], plan: InjectionPlan) -> Union[Dataset, TrainTestSplit]:
    """
    Apply an injection plan.

    A Dataset is deteriorated as a whole. For a TrainTestSplit, a train-only plan deteriorates
    the training partition only; a whole-dataset plan deteriorates both partitions, the test
    side with a seed derived from the plan seed.
    """
    injector = INJECTORS[plan.error]
    if isinstance(data, Dataset):
        return injector(data, plan.rate, plan.seed)

    train = injector(data.train, plan.rate, plan.seed)
    test = data.test
    if plan.target == InjectionTarget.WHOLE_DATASET:
        test = injector(data.test, plan.rate, derive_seed(plan.seed, 'test'))
    return replace(data, train=train, test=test)
