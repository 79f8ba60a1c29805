"""
Degradation sweeps and combiner comparisons over grids of injection levels.
"""

import json
import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Any, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .base import ClassifierSpec
from .config import (
    DEFAULT_ITERATIONS, DEFAULT_LEVEL_MAX, DEFAULT_LEVEL_STEP, DEFAULT_P, DEFAULT_RESAMPLES,
    DEFAULT_SENSITIVITY_FACTOR, DEFAULT_TRAIN_FRACTION, MASTER_SEED, NAMED_GRIDS, derive_seed
)
from .corruption import ErrorType, InjectionPlan, InjectionTarget, get_error_type, get_target, inject
from .dataset import Dataset, split_random
from .error_constants import ConfigError, DatasetError
from .metric import AssessConfig, QualityScore, Thresholds, assess, combine_alpha, combine_max, mean_accuracy
from .suite import AccuracyVector, evaluate_suite

logger = logging.getLogger(__name__)

CURVE_COLUMNS = ['row_type', 'error', 'level', 'iteration', 'model', 'accuracy', 'qa', 'qa1', 'qa2']
CURVE_FORMATS = ('csv', 'json')


def level_grid(start: float = 0.0, stop: float = DEFAULT_LEVEL_MAX, step: float = DEFAULT_LEVEL_STEP) -> List[float]:
    """Levels start, start + step, ... up to stop inclusive, rounded to 10 decimals"""
    if not step > 0:
        raise ConfigError(f"Level step must be > 0, got {step}", code="invalid-grid")
    if not 0.0 <= start <= stop < 1.0:
        raise ConfigError(f"Level range needs 0 <= from <= to < 1, got {start}..{stop}", code="invalid-grid")
    count = int(np.floor((stop - start) / step + 1e-9)) + 1
    return [round(start + i * step, 10) for i in range(count)]


def named_grid(name: str) -> List[float]:
    """Named level grid ('sweep', 'good-medium', 'bad', 'evaluation')"""
    try:
        return level_grid(*NAMED_GRIDS[name])
    except KeyError:
        raise ConfigError(f"Unknown grid {name!r} (supported: {', '.join(NAMED_GRIDS)})", code="invalid-grid")


@dataclass(frozen=True, eq=False)
class SweepConfig:
    """Grid and pipeline settings of a degradation sweep"""
    suite: Tuple[ClassifierSpec, ...]
    error_types: Tuple[ErrorType, ...] = (ErrorType.MISSING, ErrorType.OUTLIER, ErrorType.FUZZING)
    levels: Tuple[float, ...] = field(default_factory=lambda: tuple(level_grid()))
    iterations: int = DEFAULT_ITERATIONS
    scope: InjectionTarget = InjectionTarget.TRAIN_ONLY
    master_seed: int = MASTER_SEED
    train_fraction: float = DEFAULT_TRAIN_FRACTION
    # used by the assess runs of quality sweeps
    p: float = DEFAULT_P
    resamples: int = DEFAULT_RESAMPLES
    sensitivity_factor: float = DEFAULT_SENSITIVITY_FACTOR
    quality_errors: Tuple[ErrorType, ...] = (ErrorType.MISSING, ErrorType.OUTLIER, ErrorType.FUZZING)
    thresholds: Thresholds = field(default_factory=Thresholds)

    def __post_init__(self):
        object.__setattr__(self, 'suite', tuple(self.suite))
        object.__setattr__(self, 'error_types', tuple(get_error_type(error) for error in self.error_types))
        object.__setattr__(self, 'quality_errors', tuple(get_error_type(error) for error in self.quality_errors))
        object.__setattr__(self, 'levels', tuple(float(level) for level in self.levels))
        object.__setattr__(self, 'scope', get_target(self.scope))
        if not self.suite:
            raise ConfigError("Suite is empty")
        if not self.error_types:
            raise ConfigError("No error types to sweep", code="invalid-grid")
        if not self.levels:
            raise ConfigError("Level grid is empty", code="invalid-grid")
        if any(not 0.0 <= level < 1.0 for level in self.levels):
            raise ConfigError(f"Levels must be in [0, 1): {list(self.levels)}", code="invalid-grid")
        if list(self.levels) != sorted(set(self.levels)):
            raise ConfigError(f"Levels must be strictly ascending: {list(self.levels)}", code="invalid-grid")
        if self.iterations < 1:
            raise ConfigError(f"iterations must be >= 1, got {self.iterations}", code="invalid-grid")
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")

    def assess_config(self, seed: int, trusted_test: Optional[Dataset] = None) -> AssessConfig:
        return AssessConfig(
            suite=self.suite,
            error_set=self.quality_errors,
            p=self.p,
            resamples=self.resamples,
            train_fraction=self.train_fraction,
            trusted_test=trusted_test,
            master_seed=seed,
            sensitivity_factor=self.sensitivity_factor,
            thresholds=self.thresholds,
        )

    def to_dict(self) -> Dict[str, Any]:
        return {
            'suite': [spec.to_dict() for spec in self.suite],
            'error_types': [error.value for error in self.error_types],
            'levels': list(self.levels),
            'iterations': self.iterations,
            'scope': self.scope.value,
            'master_seed': self.master_seed,
            'train_fraction': self.train_fraction,
            'p': self.p,
            'resamples': self.resamples,
            'sensitivity_factor': self.sensitivity_factor,
            'quality_errors': [error.value for error in self.quality_errors],
            'thresholds': {'good_upper': self.thresholds.good_upper, 'medium_upper': self.thresholds.medium_upper},
        }


@dataclass(frozen=True, eq=False)
class SweepCell:
    """Outcome of one (error, level, iteration) grid point"""
    error: ErrorType
    level: float
    iteration: int
    seed: int
    accuracy: AccuracyVector
    quality: Optional[QualityScore] = None


@dataclass(frozen=True)
class SweepAggregate:
    """Means over the iterations of one (error, level)"""
    error: ErrorType
    level: float
    mean_accuracy: float
    mean_qa: Optional[float] = None
    mean_qa1: Optional[float] = None
    mean_qa2: Optional[float] = None


@dataclass(frozen=True, eq=False)
class SweepResult:
    config: SweepConfig
    cells: Tuple[SweepCell, ...]

    @property
    def has_quality(self) -> bool:
        return bool(self.cells) and self.cells[0].quality is not None

    def cells_at(self, error: ErrorType, level: float) -> List[SweepCell]:
        return [cell for cell in self.cells if cell.error == error and cell.level == level]

    @property
    def aggregates(self) -> List[SweepAggregate]:
        aggregates = []
        for error in self.config.error_types:
            for level in self.config.levels:
                cells = self.cells_at(error, level)
                if not cells:
                    continue
                quality = {}
                if self.has_quality:
                    quality = {
                        'mean_qa': float(np.mean([cell.quality.q_a for cell in cells])),
                        'mean_qa1': float(np.mean([cell.quality.q_a1 for cell in cells])),
                        'mean_qa2': float(np.mean([cell.quality.q_a2 for cell in cells])),
                    }
                accuracy = float(np.mean([mean_accuracy(cell.accuracy) for cell in cells]))
                aggregates.append(SweepAggregate(error, level, accuracy, **quality))
        return aggregates

    def aggregate(self, error: ErrorType, level: float) -> SweepAggregate:
        for aggregate in self.aggregates:
            if aggregate.error == error and aggregate.level == level:
                return aggregate
        raise KeyError((error, level))

    def run_record(self) -> Dict[str, Any]:
        """Effective configuration plus the seeds every cell derived"""
        cells = []
        for cell in self.cells:
            record = {
                'error': cell.error.value,
                'level': cell.level,
                'iteration': cell.iteration,
                'seed': cell.seed,
                'split_seed': derive_seed(cell.seed, 'split'),
            }
            if cell.quality is not None:
                record['resample_seeds'] = list(cell.quality.resample_seeds)
                record['injection_seeds'] = {
                    error.value: list(seeds) for error, seeds in cell.quality.injection_seeds.items()
                }
            cells.append(record)
        return {
            'config': self.config.to_dict(),
            'seed': self.config.master_seed,
            'quality': self.has_quality,
            'derived_seeds': {'cells': cells},
        }

    def to_frame(self) -> pd.DataFrame:
        """Long-format curve rows: one per (cell, model), then one aggregate row per (error, level)"""
        rows = []
        for cell in self.cells:
            quality = cell.quality
            for model, value in cell.accuracy.entries:
                rows.append({
                    'row_type': 'cell',
                    'error': cell.error.value,
                    'level': cell.level,
                    'iteration': cell.iteration,
                    'model': model,
                    'accuracy': value,
                    'qa': quality.q_a if quality else None,
                    'qa1': quality.q_a1 if quality else None,
                    'qa2': quality.q_a2 if quality else None,
                })
        for aggregate in self.aggregates:
            rows.append({
                'row_type': 'aggregate',
                'error': aggregate.error.value,
                'level': aggregate.level,
                'iteration': None,
                'model': None,
                'accuracy': aggregate.mean_accuracy,
                'qa': aggregate.mean_qa,
                'qa1': aggregate.mean_qa1,
                'qa2': aggregate.mean_qa2,
            })
        frame = pd.DataFrame(rows, columns=CURVE_COLUMNS)
        frame['iteration'] = frame['iteration'].astype('Int64')
        return frame


def _cell_seed(master_seed: int, error: ErrorType, level: float, iteration: int) -> int:
    return derive_seed(master_seed, 'sweep', error.value, f'{level:.10f}', iteration)


def _run_cell(d: Dataset, config: SweepConfig, error: ErrorType, level: float, iteration: int,
              with_quality: bool) -> SweepCell:
    seed = _cell_seed(config.master_seed, error, level, iteration)
    split_seed = derive_seed(seed, 'split')

    if config.scope == InjectionTarget.WHOLE_DATASET:
        corrupted = inject(d, InjectionPlan(error, level, seed))
        split = split_random(corrupted, config.train_fraction, split_seed)
    else:
        split = split_random(d, config.train_fraction, split_seed)
        split = inject(split, InjectionPlan(error, level, seed, InjectionTarget.TRAIN_ONLY))

    accuracy = evaluate_suite(config.suite, split)
    quality = None
    if with_quality:
        if config.scope == InjectionTarget.WHOLE_DATASET:
            quality = assess(corrupted, config.assess_config(seed))
        else:
            quality = assess(split.train, config.assess_config(seed, trusted_test=split.test))

    logger.debug(f"{error.value} at {level:.2f}, iteration {iteration}: mean accuracy {mean_accuracy(accuracy):.4f}")
    return SweepCell(error, level, iteration, seed, accuracy, quality)


def _sweep(d: Dataset, config: SweepConfig, with_quality: bool, jobs: int) -> SweepResult:
    grid = [
        (error, level, iteration)
        for error in config.error_types
        for level in config.levels
        for iteration in range(config.iterations)
    ]
    logger.info(f"Sweeping {len(config.error_types)} error types x {len(config.levels)} levels x "
                f"{config.iterations} iterations ({config.scope.value})")

    def run(point: Tuple[ErrorType, float, int]) -> SweepCell:
        return _run_cell(d, config, *point, with_quality=with_quality)

    if jobs > 1:
        with ThreadPoolExecutor(max_workers=jobs) as pool:
            cells = tuple(pool.map(run, grid))
    else:
        cells = tuple(run(point) for point in grid)

    result = SweepResult(config, cells)
    for aggregate in result.aggregates:
        qa = f", mean qa {aggregate.mean_qa:.4f}" if aggregate.mean_qa is not None else ""
        logger.info(f"{aggregate.error.value} at {aggregate.level:.2f}: mean accuracy {aggregate.mean_accuracy:.4f}{qa}")
    return result


def sweep_accuracy(d: Dataset, config: SweepConfig, jobs: int = 1) -> SweepResult:
    """
    Suite accuracy over the grid.

    Whole-dataset scope corrupts d and then resamples train/test; train-only scope splits first
    and corrupts the training partition. Each cell uses seeds derived from
    (master_seed, error, level, iteration), so the result does not depend on `jobs`.
    """
    return _sweep(d, config, with_quality=False, jobs=jobs)


def sweep_quality(d: Dataset, config: SweepConfig, jobs: int = 1) -> SweepResult:
    """
    sweep_accuracy plus an assess run per cell.

    Whole-dataset scope assesses the corrupted dataset by resampling; train-only scope assesses
    the corrupted training partition against the clean test partition as trusted test.
    """
    return _sweep(d, config, with_quality=True, jobs=jobs)


def check_alphas(alphas: Sequence[float]) -> List[float]:
    alphas = [float(alpha) for alpha in alphas]
    if not alphas:
        raise ConfigError("No alphas given")
    for alpha in alphas:
        if not 0.0 <= alpha <= 1.0:
            raise ConfigError(f"alpha must be in [0, 1], got {alpha}")
    return alphas


def combiner_table(result: SweepResult, alphas: Sequence[float]) -> pd.DataFrame:
    """
    Per (error, level): mean q_a1 and q_a2, their max, and one convex blend per alpha.

    Column names are 'qa1', 'qa2', 'max' and 'alpha=<a>'.
    """
    alphas = check_alphas(alphas)
    if not result.has_quality:
        raise ConfigError("Combiner comparison needs a quality sweep")

    rows = []
    for aggregate in result.aggregates:
        row = {
            'error': aggregate.error.value,
            'level': aggregate.level,
            'qa1': aggregate.mean_qa1,
            'qa2': aggregate.mean_qa2,
            'max': combine_max(aggregate.mean_qa1, aggregate.mean_qa2),
        }
        for alpha in alphas:
            row[f'alpha={alpha:g}'] = combine_alpha(aggregate.mean_qa1, aggregate.mean_qa2, alpha)
        rows.append(row)
    return pd.DataFrame(rows)


def compare_combiners(d: Dataset, config: SweepConfig, alphas: Sequence[float], jobs: int = 1) -> pd.DataFrame:
    check_alphas(alphas)
    return combiner_table(sweep_quality(d, config, jobs), alphas)


def _json_value(value: Any) -> Any:
    if isinstance(value, np.generic):
        return value.item()
    raise TypeError(f"Cannot serialize {type(value).__name__}")


def emit_curves(result: SweepResult, path: str, format: str = 'csv') -> None:
    """
    Write the long-format curve rows of a sweep.

    CSV leaves absent values empty; JSON is a list of row objects with nulls.
    """
    if format not in CURVE_FORMATS:
        raise ConfigError(f"Unsupported curve format {format!r} (supported: {', '.join(CURVE_FORMATS)})")
    if not result.cells:
        raise ConfigError("Sweep result is empty, nothing to write", code="invalid-grid")

    frame = result.to_frame()
    try:
        if format == 'csv':
            frame.to_csv(path, index=False)
        else:
            records = frame.astype(object).where(frame.notna(), None).to_dict(orient='records')
            with open(path, 'w') as f:
                json.dump(records, f, indent=2, default=_json_value)
    except OSError as e:
        raise DatasetError(f"Cannot write {path}: {e}", code="unwritable-path") from e
    logger.info(f"Wrote {len(frame)} curve rows to {path}")
