"""
Command-line interface: assess, inject, sweep, compare and synth.

Settings resolve as command-line flag, then --config file (dotenv key=value format,
keys are upper-cased flag names such as P, RESAMPLES, GOOD_UPPER), then environment
(DQ_MASTER_SEED, DQ_JOBS, DQ_LOG_LEVEL, DQ_SUITE), then built-in defaults.

inject, sweep and compare write their effective configuration and derived seeds to
<output>.config.json; assess puts them in its report.

Exit status: 0 success, 2 invalid input or configuration, 1 internal error.
"""

import argparse
import json
import logging
import sys
from typing import Any, Callable, Dict, List, Optional

from dotenv import dotenv_values

from . import __version__
from .config import (
    DEFAULT_ITERATIONS, DEFAULT_LEVEL_MAX, DEFAULT_LEVEL_STEP, DEFAULT_P, DEFAULT_RESAMPLES,
    DEFAULT_SENSITIVITY_FACTOR, DEFAULT_TRAIN_FRACTION, GOOD_UPPER, JOBS, LOG_LEVEL, MASTER_SEED,
    MEDIUM_UPPER, SUITE
)
from .corruption import ErrorType, InjectionPlan, get_error_type, inject
from .dataset import load_csv, make_blobs, write_csv
from .error_constants import ConfigError, DataQualityError, DatasetError, get_readable_error
from .harness import (
    SweepConfig, check_alphas, combiner_table, emit_curves, level_grid, named_grid, sweep_accuracy, sweep_quality
)
from .metric import AssessConfig, Thresholds, assess
from .suite import parse_suite

logger = logging.getLogger(__name__)

# Keys a --config file may set
CONFIG_KEYS = (
    'DATA', 'LABEL', 'TEST', 'P', 'RESAMPLES', 'SEED', 'SUITE', 'GOOD_UPPER', 'MEDIUM_UPPER',
    'OUTPUT', 'FORMAT', 'ERRORS', 'ERROR', 'RATE', 'FROM', 'TO', 'STEP', 'GRID', 'ITERATIONS',
    'SCOPE', 'ALPHAS', 'STRATIFY', 'TRAIN_FRACTION', 'SENSITIVITY_FACTOR', 'QUALITY', 'JOBS',
    'ROWS', 'FEATURES', 'SEPARATION', 'CLASSES', 'LOG_LEVEL',
)

# Run records sit next to the output file
RECORD_SUFFIX = '.config.json'

TRUE_WORDS = ('1', 'true', 'yes', 'on')


def _to_bool(value: Any) -> bool:
    if isinstance(value, bool):
        return value
    return str(value).strip().lower() in TRUE_WORDS


def _to_list(value: Any) -> List[str]:
    if isinstance(value, (list, tuple)):
        return [str(item) for item in value]
    return [item.strip() for item in str(value).split(',') if item.strip()]


def _read_config_file(path: Optional[str]) -> Dict[str, str]:
    if not path:
        return {}
    try:
        with open(path) as f:
            values = dotenv_values(stream=f)
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    unknown = sorted(set(values) - set(CONFIG_KEYS))
    if unknown:
        raise ConfigError(f"Unknown keys in {path}: {', '.join(unknown)}")
    return {key: value for key, value in values.items() if value is not None}


class Settings:
    """Flag > config file > default lookup for one invocation"""

    def __init__(self, options: argparse.Namespace):
        self.options = options
        self.file = _read_config_file(options.config)

    def get(self, name: str, cast: Callable[[Any], Any] = str, default: Any = None, required: bool = False) -> Any:
        value = getattr(self.options, name, None)
        if value is None:
            value = self.file.get(name.upper())
        if value is None:
            if required:
                raise ConfigError(f"--{name.replace('_', '-')} is required (flag or {name.upper()} in --config)")
            return default
        try:
            return cast(value)
        except (TypeError, ValueError) as e:
            raise ConfigError(f"Invalid value {value!r} for {name}: {e}") from e


def _write_json(data: Any, path: Optional[str]):
    text = json.dumps(data, indent=2) + '\n'
    if not path:
        return
    try:
        with open(path, 'w') as f:
            f.write(text)
    except OSError as e:
        raise DatasetError(f"Cannot write {path}: {e}", code="unwritable-path") from e
    logger.info(f"Wrote {path}")


def _write_record(record: Dict[str, Any], output: str, data: str, label: str):
    record = {**record, 'data': data, 'label': label}
    _write_json(record, output + RECORD_SUFFIX)


def _load_data(settings: Settings):
    return load_csv(settings.get('data', required=True), settings.get('label', required=True))


def _thresholds(settings: Settings) -> Thresholds:
    return Thresholds(
        settings.get('good_upper', float, GOOD_UPPER),
        settings.get('medium_upper', float, MEDIUM_UPPER),
    )


def run_assess(options: argparse.Namespace) -> int:
    settings = Settings(options)
    data = _load_data(settings)
    test_path = settings.get('test')
    trusted_test = load_csv(test_path, settings.get('label'), reference=data) if test_path else None

    seed = settings.get('seed', int, MASTER_SEED)
    config = AssessConfig(
        suite=parse_suite(settings.get('suite', default=SUITE), seed),
        error_set=[get_error_type(error) for error in settings.get('errors', _to_list, [e.value for e in ErrorType])],
        p=settings.get('p', float, DEFAULT_P),
        resamples=settings.get('resamples', int, DEFAULT_RESAMPLES),
        train_fraction=settings.get('train_fraction', float, DEFAULT_TRAIN_FRACTION),
        trusted_test=trusted_test,
        master_seed=seed,
        sensitivity_factor=settings.get('sensitivity_factor', float, DEFAULT_SENSITIVITY_FACTOR),
        thresholds=_thresholds(settings),
        stratify=settings.get('stratify', _to_bool, False),
    )

    score = assess(data, config, jobs=settings.get('jobs', int, JOBS))
    _write_json(score.to_report(config), settings.get('output'))
    print(score.summary())
    return 0


def run_inject(options: argparse.Namespace) -> int:
    settings = Settings(options)
    data = _load_data(settings)
    plan = InjectionPlan(
        settings.get('error', get_error_type, required=True),
        settings.get('rate', float, required=True),
        settings.get('seed', int, MASTER_SEED),
    )
    corrupted = inject(data, plan)
    output = settings.get('output', required=True)
    write_csv(corrupted, output)
    _write_record({'config': plan.to_dict(), 'seed': plan.seed}, output, settings.get('data'), settings.get('label'))
    print(f"error={plan.error.value} rate={plan.rate} seed={plan.seed} missing_cells={corrupted.missing_count}")
    return 0


def _sweep_config(settings: Settings) -> SweepConfig:
    seed = settings.get('seed', int, MASTER_SEED)
    grid = settings.get('grid')
    if grid:
        levels = named_grid(grid)
    else:
        levels = level_grid(
            settings.get('from', float, 0.0),
            settings.get('to', float, DEFAULT_LEVEL_MAX),
            settings.get('step', float, DEFAULT_LEVEL_STEP),
        )
    return SweepConfig(
        suite=parse_suite(settings.get('suite', default=SUITE), seed),
        error_types=settings.get('errors', _to_list, [e.value for e in ErrorType]),
        levels=levels,
        iterations=settings.get('iterations', int, DEFAULT_ITERATIONS),
        scope=settings.get('scope', default='train-only'),
        master_seed=seed,
        train_fraction=settings.get('train_fraction', float, DEFAULT_TRAIN_FRACTION),
        p=settings.get('p', float, DEFAULT_P),
        resamples=settings.get('resamples', int, DEFAULT_RESAMPLES),
        sensitivity_factor=settings.get('sensitivity_factor', float, DEFAULT_SENSITIVITY_FACTOR),
        thresholds=_thresholds(settings),
    )


def run_sweep(options: argparse.Namespace) -> int:
    settings = Settings(options)
    config = _sweep_config(settings)
    output = settings.get('output', required=True)
    curve_format = settings.get('format', default='csv')
    data = _load_data(settings)

    sweep = sweep_quality if settings.get('quality', _to_bool, False) else sweep_accuracy
    result = sweep(data, config, jobs=settings.get('jobs', int, JOBS))
    emit_curves(result, output, curve_format)
    _write_record(result.run_record(), output, settings.get('data'), settings.get('label'))
    print(f"levels={len(config.levels)} cells={len(result.cells)} output={output}")
    return 0


def run_compare(options: argparse.Namespace) -> int:
    settings = Settings(options)
    config = _sweep_config(settings)
    alphas = [float(alpha) for alpha in settings.get('alphas', _to_list, ['0.5'])]
    output = settings.get('output')
    curve_format = settings.get('format', default='csv')
    data = _load_data(settings)

    check_alphas(alphas)
    result = sweep_quality(data, config, jobs=settings.get('jobs', int, JOBS))
    table = combiner_table(result, alphas)
    if output:
        try:
            if curve_format == 'json':
                table.to_json(output, orient='records', indent=2)
            else:
                table.to_csv(output, index=False)
        except OSError as e:
            raise DatasetError(f"Cannot write {output}: {e}", code="unwritable-path") from e
        _write_record({**result.run_record(), 'alphas': alphas}, output, settings.get('data'), settings.get('label'))
    print(table.to_string(index=False))
    return 0


def run_synth(options: argparse.Namespace) -> int:
    settings = Settings(options)
    data = make_blobs(
        n=settings.get('rows', int, 500),
        d=settings.get('features', int, 5),
        separation=settings.get('separation', float, 6.0),
        class_count=settings.get('classes', int, 2),
        seed=settings.get('seed', int, MASTER_SEED),
    )
    output = settings.get('output', required=True)
    write_csv(data, output)
    print(f"rows={data.n_rows} features={data.n_features} classes={data.class_count} output={output}")
    return 0


def _add_data_arguments(p: argparse.ArgumentParser):
    p.add_argument('--data', help='dataset CSV file with a header row')
    p.add_argument('--label', help='label column name or zero-based index')
    p.add_argument('--seed', type=int, help='master seed (default: DQ_MASTER_SEED or 0)')


def _add_quality_arguments(p: argparse.ArgumentParser):
    p.add_argument('--suite', help='bundled suite name, JSON file or kind list like knn:k=3,decision_tree')
    p.add_argument('--p', type=float, help=f'injection rate for the sensitivity term (default {DEFAULT_P})')
    p.add_argument('--resamples', type=int, help=f'resamples without trusted test (default {DEFAULT_RESAMPLES})')
    p.add_argument('--train-fraction', type=float, help=f'train share of a split (default {DEFAULT_TRAIN_FRACTION})')
    p.add_argument('--sensitivity-factor', type=float,
                   help=f'scale of the sensitivity term (default {DEFAULT_SENSITIVITY_FACTOR:g})')
    p.add_argument('--good-upper', type=float, help=f'upper bound of the good zone (default {GOOD_UPPER})')
    p.add_argument('--medium-upper', type=float, help=f'upper bound of the medium zone (default {MEDIUM_UPPER})')


def _add_grid_arguments(p: argparse.ArgumentParser):
    p.add_argument('--errors', help='comma-separated error types (default: missing,outlier,fuzzing)')
    p.add_argument('--from', dest='from', type=float, help='first level (default 0)')
    p.add_argument('--to', type=float, help=f'last level, inclusive (default {DEFAULT_LEVEL_MAX})')
    p.add_argument('--step', type=float, help=f'level increment (default {DEFAULT_LEVEL_STEP})')
    p.add_argument('--grid', help='named grid: sweep, good-medium, bad or evaluation (overrides --from/--to/--step)')
    p.add_argument('--iterations', type=int, help=f'iterations per level (default {DEFAULT_ITERATIONS})')
    p.add_argument('--scope', choices=['train-only', 'whole-dataset'], help='what the injection deteriorates')
    p.add_argument('--output', help='output file')
    p.add_argument('--format', choices=['csv', 'json'], help='output format (default csv)')


def make_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog='dq', description='Dataset quality assessment with the q_a metric')
    parser.add_argument('--version', '-V', action='version', version=__version__)
    parser.add_argument('--config', help='key=value file setting any flag (flags take precedence)')
    parser.add_argument('--jobs', type=int, help='worker threads; results do not depend on it')
    parser.add_argument('--log-level', help='DEBUG, INFO, WARNING or ERROR')
    parser.set_defaults(command=None)

    subparsers = parser.add_subparsers(title='commands')

    p = subparsers.add_parser('assess', help='compute q_a of a dataset')
    _add_data_arguments(p)
    _add_quality_arguments(p)
    p.add_argument('--test', help='trusted test CSV; disables resampling')
    p.add_argument('--errors', help='error types injected for the sensitivity term')
    p.add_argument('--stratify', action='store_const', const=True, help='stratified resampling')
    p.add_argument('--output', help='JSON report path')
    p.set_defaults(command=run_assess)

    p = subparsers.add_parser('inject', help='write a corrupted copy of a dataset')
    _add_data_arguments(p)
    p.add_argument('--error', help='missing, outlier or fuzzing')
    p.add_argument('--rate', type=float, help='fraction of cells (rows for fuzzing) to corrupt')
    p.add_argument('--output', help='output CSV path')
    p.set_defaults(command=run_inject)

    p = subparsers.add_parser('sweep', help='accuracy or q_a curves over injection levels')
    _add_data_arguments(p)
    _add_quality_arguments(p)
    _add_grid_arguments(p)
    p.add_argument('--quality', action='store_const', const=True, help='also assess q_a in every cell')
    p.set_defaults(command=run_sweep)

    p = subparsers.add_parser('compare', help='max combiner against convex blends')
    _add_data_arguments(p)
    _add_quality_arguments(p)
    _add_grid_arguments(p)
    p.add_argument('--alphas', help='comma-separated blend weights in [0, 1] (default 0.5)')
    p.set_defaults(command=run_compare)

    p = subparsers.add_parser('synth', help='write seeded Gaussian blobs to CSV')
    p.add_argument('--rows', type=int, help='number of rows (default 500)')
    p.add_argument('--features', type=int, help='number of features (default 5)')
    p.add_argument('--separation', type=float, help='distance between class centres in std units (default 6)')
    p.add_argument('--classes', type=int, help='number of classes (default 2)')
    p.add_argument('--seed', type=int, help='random seed')
    p.add_argument('--output', help='output CSV path')
    p.set_defaults(command=run_synth)

    return parser


def main(args: Optional[List[str]] = None) -> int:
    parser = make_parser()
    options = parser.parse_args(args)

    try:
        name = options.log_level or _read_config_file(options.config).get('LOG_LEVEL') or LOG_LEVEL
    except ConfigError as e:
        print(get_readable_error(e), file=sys.stderr)
        return 2
    level = getattr(logging, name.upper(), None)
    if not isinstance(level, int):
        print(f"Unknown log level {name!r}", file=sys.stderr)
        return 2
    logging.basicConfig(
        level=level,
        format='%(asctime)s %(levelname)s %(name)s: %(message)s',
        stream=sys.stderr,
    )
    if options.command is None:
        parser.print_help(sys.stderr)
        return 2

    try:
        return options.command(options)
    except (DatasetError, ConfigError, FileNotFoundError, PermissionError) as e:
        print(get_readable_error(e), file=sys.stderr)
        return 2
    except DataQualityError as e:
        print(get_readable_error(e), file=sys.stderr)
        return 1
    except Exception as e:
        logger.debug("Unhandled error", exc_info=True)
        print(get_readable_error(e), file=sys.stderr)
        return 1


if __name__ == '__main__':
    sys.exit(main())
