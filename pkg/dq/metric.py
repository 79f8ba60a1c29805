"""
The q_a data quality metric: accuracy term, sensitivity term, combination and interpretation.
"""

import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Mapping, Optional, Sequence, Tuple, Union

import numpy as np

from .base import ClassifierSpec
from .config import (
    DEFAULT_P, DEFAULT_RESAMPLES, DEFAULT_SENSITIVITY_FACTOR, DEFAULT_TRAIN_FRACTION,
    GOOD_UPPER, MASTER_SEED, MEDIUM_UPPER, derive_seed
)
from .corruption import ErrorType, InjectionPlan, InjectionTarget, get_error_type, inject
from .dataset import Dataset, TrainTestSplit, split_random, split_stratified
from .error_constants import ConfigError, ModelError
from .suite import AccuracyVector, evaluate_suite

logger = logging.getLogger(__name__)


class QualityLevel(Enum):
    """Interpretation of a q_a value"""
    GOOD = 'good'
    MEDIUM = 'medium'
    BAD = 'bad'


@dataclass(frozen=True)
class Thresholds:
    """Upper bounds of the good and medium quality zones"""
    good_upper: float = GOOD_UPPER
    medium_upper: float = MEDIUM_UPPER

    def __post_init__(self):
        if not 0 < self.good_upper < self.medium_upper < 1:
            raise ConfigError(f"Thresholds need 0 < good_upper < medium_upper < 1, "
                              f"got {self.good_upper}, {self.medium_upper}")


@dataclass(frozen=True, eq=False)
class AssessConfig:
    """Everything assess needs besides the dataset"""
    suite: Tuple[ClassifierSpec, ...]
    error_set: Tuple[ErrorType, ...] = (ErrorType.MISSING, ErrorType.OUTLIER, ErrorType.FUZZING)
    p: float = DEFAULT_P
    resamples: int = DEFAULT_RESAMPLES
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    trusted_test: Optional[Dataset] = None
    master_seed: int = MASTER_SEED
    sensitivity_factor: float = DEFAULT_SENSITIVITY_FACTOR
    thresholds: Thresholds = field(default_factory=Thresholds)
    stratify: bool = False

    def __post_init__(self):
        object.__setattr__(self, 'suite', tuple(self.suite))
        object.__setattr__(self, 'error_set', tuple(get_error_type(error) for error in self.error_set))
        if not self.suite:
            raise ConfigError("Suite is empty")
        if not self.error_set:
            raise ConfigError("error_set must not be empty")
        if len(set(self.error_set)) != len(self.error_set):
            raise ConfigError(f"error_set has duplicates: {[error.value for error in self.error_set]}")
        if not 0 < self.p < 1:
            raise ConfigError(f"p must be in (0, 1), got {self.p}")
        if self.resamples < 1:
            raise ConfigError(f"resamples must be >= 1, got {self.resamples}")
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not self.sensitivity_factor > 0:
            raise ConfigError(f"sensitivity_factor must be > 0, got {self.sensitivity_factor}")

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': [spec.to_dict() for spec in self.suite],
            'error_set': [error.value for error in self.error_set],
            'p': self.p,
            'resamples': self.resamples,
            'train_fraction': self.train_fraction,
            'trusted_test': self.trusted_test is not None,
            'master_seed': self.master_seed,
            'sensitivity_factor': self.sensitivity_factor,
            'thresholds': {'good_upper': self.thresholds.good_upper, 'medium_upper': self.thresholds.medium_upper},
            'stratify': self.stratify,
        }


@dataclass(frozen=True, eq=False)
class QualityScore:
    """Result of assess"""
    q_a: float
    q_a1: float
    q_a2: float
    mean_accuracy: float
    per_model: AccuracyVector
    per_error_delta: Dict[ErrorType, float]
    resample_count: int
    p: float
    level: QualityLevel
    per_model_quality: Tuple[Tuple[str, float], ...] = ()
    resample_seeds: Tuple[int, ...] = ()
    injection_seeds: Dict[ErrorType, Tuple[int, ...]] = field(default_factory=dict)

    def __post_init__(self):
        for name in ('q_a', 'q_a1', 'q_a2'):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ModelError(f"{name} = {value} outside [0, 1]", code="invalid-score")
        if self.q_a != max(self.q_a1, self.q_a2):
            raise ModelError(f"q_a = {self.q_a} is not max({self.q_a1}, {self.q_a2})", code="invalid-score")

    def summary(self) -> str:
        return f"qa={self.q_a:.4f} qa1={self.q_a1:.4f} qa2={self.q_a2:.4f} level={self.level.value}"

    def to_report(self, config: Optional[AssessConfig] = None) -> Dict[str, Any]:
        """JSON-ready report with the effective configuration and derived seeds"""
        quality = dict(self.per_model_quality)
        report = {
            'qa': self.q_a,
            'qa1': self.q_a1,
            'qa2': self.q_a2,
            'level': self.level.value,
            'mean_accuracy': self.mean_accuracy,
            'per_model': [
                {'model': model, 'accuracy': value, 'qa': quality.get(model)}
                for model, value in self.per_model.entries
            ],
            'per_error_delta': {error.value: delta for error, delta in self.per_error_delta.items()},
            'resample_count': self.resample_count,
            'p': self.p,
            'derived_seeds': {
                'resamples': list(self.resample_seeds),
                'injections': {error.value: list(seeds) for error, seeds in self.injection_seeds.items()},
            },
        }
        if config is not None:
            report['config'] = config.to_dict()
            report['seed'] = config.master_seed
        return report


def mean_accuracy(acc: Union[AccuracyVector, Sequence[float]]) -> float:
    """A_M(D): arithmetic mean of the suite accuracies"""
    values = acc.values if isinstance(acc, AccuracyVector) else np.asarray(acc, dtype=np.float64)
    if values.size == 0:
        raise ConfigError("Accuracy vector is empty")
    return float(np.mean(values))


def _check_class_count(c: int):
    if c < 2:
        raise ConfigError(f"class count must be >= 2, got {c}")


def delta1(a_m: float, c: int) -> int:
    """1 when the mean accuracy beats random guessing (strictly), else 0"""
    _check_class_count(c)
    return 1 if a_m > 1.0 / c else 0


def q_a1(a_m: float, c: int) -> float:
    """Class-count-normalized complement of the mean accuracy; 0 is best"""
    _check_class_count(c)
    value = 1.0 - ((c * a_m - 1.0) / (c - 1.0)) * delta1(a_m, c)
    return min(max(value, 0.0), 1.0)


def delta_accuracy(base: AccuracyVector, corrupted: AccuracyVector) -> float:
    """Mean absolute accuracy change between clean and corrupted training"""
    if base.models != corrupted.models:
        raise ModelError(f"Suites differ: {base.models} vs {corrupted.models}", code="suite-mismatch")
    if len(base) == 0:
        raise ConfigError("Accuracy vector is empty")
    return float(np.mean(np.abs(base.values - corrupted.values)))


def delta2(delta_a: float, p: float) -> int:
    """1 when the accuracy variation exceeds p (both fractions, strict)"""
    return 1 if delta_a > p else 0


def q_a2(deltas: Mapping[Any, float], p: float, factor: float = DEFAULT_SENSITIVITY_FACTOR) -> float:
    """Scaled mean of the abnormal accuracy variations, clamped to 1"""
    if not deltas:
        raise ConfigError("No accuracy variations given")
    if not factor > 0:
        raise ConfigError(f"sensitivity factor must be > 0, got {factor}")
    gated = math.fsum(delta * delta2(delta, p) for delta in deltas.values())
    return min(factor / len(deltas) * gated, 1.0)


def combine_max(q1: float, q2: float) -> float:
    return max(q1, q2)


def combine_alpha(q1: float, q2: float, alpha: float) -> float:
    """Convex blend alpha * q1 + (1 - alpha) * q2, kept for combiner comparisons"""
    if not 0.0 <= alpha <= 1.0:
        raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    return alpha * q1 + (1.0 - alpha) * q2


def interpret(q_a: float, t: Optional[Thresholds] = None) -> QualityLevel:
    t = t or Thresholds()
    if q_a <= t.good_upper:
        return QualityLevel.GOOD
    if q_a <= t.medium_upper:
        return QualityLevel.MEDIUM
    return QualityLevel.BAD


@dataclass(frozen=True)
class _ResampleOutcome:
    base: AccuracyVector
    corrupted: Dict[ErrorType, AccuracyVector]


def _run_resample(split: TrainTestSplit, config: AssessConfig, injection_seeds: Dict[ErrorType, int]) -> _ResampleOutcome:
    base = evaluate_suite(config.suite, split)
    corrupted = {}
    for error in config.error_set:
        plan = InjectionPlan(error, config.p, injection_seeds[error], InjectionTarget.TRAIN_ONLY)
        corrupted[error] = evaluate_suite(config.suite, inject(split, plan))
    return _ResampleOutcome(base, corrupted)


def assess(d: Dataset, config: AssessConfig, jobs: int = 1) -> QualityScore:
    """
    Compute q_a(D).

    With a trusted test set (re-encoded with the schema of D) the suite is trained once on D and
    scored on it; otherwise D is resampled `resamples` times and q_a1, q_a2 are the means of
    their per-resample values.
    Each resample injects p of every error type into its training partition only.

    Args:
        d: Dataset under evaluation
        config: Assessment configuration
        jobs: Worker threads for resamples; the result does not depend on it

    Returns:
        Quality score with per-model and per-error details
    """
    if config.trusted_test is not None:
        test = config.trusted_test.encode_like(d)
        fraction = d.n_rows / (d.n_rows + test.n_rows)
        splits = [TrainTestSplit(d, test, fraction, config.master_seed)]
        resample_seeds: Tuple[int, ...] = (config.master_seed,)
    else:
        resample_seeds = tuple(derive_seed(config.master_seed, 'resample', i) for i in range(config.resamples))
        splitter = split_stratified if config.stratify else split_random
        splits = [splitter(d, config.train_fraction, seed) for seed in resample_seeds]

    injection_seeds = {
        error: tuple(derive_seed(config.master_seed, 'inject', i, error.value) for i in range(len(splits)))
        for error in config.error_set
    }

    def run(index: int) -> _ResampleOutcome:
        logger.info(f"Resample {index + 1}/{len(splits)}")
        return _run_resample(splits[index], config, {error: seeds[index] for error, seeds in injection_seeds.items()})

    if jobs > 1 and len(splits) > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(run, range(len(splits))))
    else:
        outcomes = [run(index) for index in range(len(splits))]

    c = d.class_count
    models = outcomes[0].base.models
    q1_values, q2_values, accuracies = [], [], []
    deltas: Dict[ErrorType, List[float]] = {error: [] for error in config.error_set}
    model_quality: List[List[float]] = []

    # reduce in resample order
    for outcome in outcomes:
        resample_deltas = {error: delta_accuracy(outcome.base, outcome.corrupted[error]) for error in config.error_set}
        q1_values.append(q_a1(mean_accuracy(outcome.base), c))
        q2_values.append(q_a2(resample_deltas, config.p, config.sensitivity_factor))
        accuracies.append(outcome.base.values)
        for error, delta in resample_deltas.items():
            deltas[error].append(delta)

        per_model = []
        for m, value in enumerate(outcome.base.values):
            model_deltas = {error: abs(value - outcome.corrupted[error].values[m]) for error in config.error_set}
            per_model.append((q_a1(value, c), q_a2(model_deltas, config.p, config.sensitivity_factor)))
        model_quality.append(per_model)

    q1 = min(max(float(np.mean(q1_values)), 0.0), 1.0)
    q2 = min(max(float(np.mean(q2_values)), 0.0), 1.0)
    q = combine_max(q1, q2)
    model_means = np.mean(np.array(accuracies), axis=0)
    quality = np.mean(np.array(model_quality), axis=0)  # resamples x models x 2 -> models x 2

    score = QualityScore(
        q_a=q,
        q_a1=q1,
        q_a2=q2,
        mean_accuracy=float(np.mean([np.mean(values) for values in accuracies])),
        per_model=AccuracyVector(tuple(zip(models, model_means))),
        per_error_delta={error: float(np.mean(values)) for error, values in deltas.items()},
        resample_count=len(splits),
        p=config.p,
        level=interpret(q, config.thresholds),
        per_model_quality=tuple((model, float(max(pair))) for model, pair in zip(models, quality)),
        resample_seeds=resample_seeds,
        injection_seeds=injection_seeds,
    )
    logger.info(f"Assessment done: {score.summary()}")
    return score
