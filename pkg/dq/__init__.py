"""
Dataset quality assessment for tabular classification.
"""

__version__ = "0.1.0"

from .dataset import Dataset, TrainTestSplit, load_csv, write_csv, split_random, make_blobs
from .suite import AccuracyVector, parse_suite, default_suite, evaluate_suite
from .corruption import ErrorType, InjectionPlan, InjectionTarget, inject
from .metric import AssessConfig, QualityLevel, QualityScore, Thresholds, assess, interpret
from .harness import SweepConfig, SweepResult, sweep_accuracy, sweep_quality, compare_combiners, emit_curves

__all__ = [
    'Dataset', 'TrainTestSplit', 'load_csv', 'write_csv', 'split_random', 'make_blobs',
    'AccuracyVector', 'parse_suite', 'default_suite', 'evaluate_suite',
    'ErrorType', 'InjectionPlan', 'InjectionTarget', 'inject',
    'AssessConfig', 'QualityLevel', 'QualityScore', 'Thresholds', 'assess', 'interpret',
    'SweepConfig', 'SweepResult', 'sweep_accuracy', 'sweep_quality', 'compare_combiners', 'emit_curves',
]
