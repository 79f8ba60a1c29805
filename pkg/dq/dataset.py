"""
Tabular classification datasets: loading, encoding, splitting and imputation.
"""

import os
import logging
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Dict, List, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from .error_constants import ConfigError, DatasetError

logger = logging.getLogger(__name__)

# Missing cells are NaN; finite values are the only legal cell values
MISSING = np.nan


class ColumnKind(Enum):
    """Role of a column in the dataset"""
    NUMERIC = 'numeric'
    CATEGORICAL = 'categorical'
    LABEL = 'label'


@dataclass(frozen=True)
class ColumnSchema:
    """Schema entry for one CSV column"""
    name: str
    kind: ColumnKind
    observed_min: float = 0.0
    observed_max: float = 0.0
    categories: Tuple[str, ...] = ()  # position is the integer code

    def __post_init__(self):
        if self.kind == ColumnKind.NUMERIC and self.observed_min > self.observed_max:
            raise DatasetError(
                f"Column {self.name}: observed_min {self.observed_min} > observed_max {self.observed_max}",
                code="invalid-schema"
            )

    @property
    def category_map(self) -> Dict[str, int]:
        return {text: code for code, text in enumerate(self.categories)}

    @property
    def observed_range(self) -> float:
        return self.observed_max - self.observed_min

    def decode(self, code: float) -> str:
        """Category text for an integer code, empty for a missing cell"""
        if np.isnan(code):
            return ''
        return self.categories[int(code)]


@dataclass(frozen=True)
class CsvOptions:
    """Parse options for load_csv"""
    delimiter: str = ','
    encoding: str = 'utf-8'
    categorical_fallback: bool = True


@dataclass(frozen=True, eq=False)
class Dataset:
    """Numeric feature matrix (NaN = missing), encoded labels and schema"""
    features: np.ndarray
    labels: np.ndarray
    schema: Tuple[ColumnSchema, ...]
    class_count: int

    def __post_init__(self):
        features = np.array(self.features, dtype=np.float64)
        labels = np.array(self.labels, dtype=np.int64)
        if features.ndim != 2 or features.shape[0] < 1 or features.shape[1] < 1:
            raise DatasetError(f"Feature matrix must be n x d with n, d >= 1, got shape {features.shape}",
                               code="too-few-rows")
        if labels.shape != (features.shape[0],):
            raise DatasetError(f"Expected {features.shape[0]} labels, got {labels.shape}", code="dimension-mismatch")
        if self.class_count < 2:
            raise DatasetError(f"class count is {self.class_count}, need at least 2", code="single-class")
        if labels.min() < 0 or labels.max() >= self.class_count:
            raise DatasetError(f"Label index outside [0, {self.class_count})", code="invalid-label")
        if np.isinf(features).any():
            raise DatasetError("Features contain non-finite values", code="unparseable-cell")

        label_columns = [column for column in self.schema if column.kind == ColumnKind.LABEL]
        if len(label_columns) != 1:
            raise DatasetError(f"Schema needs exactly one label column, found {len(label_columns)}",
                               code="invalid-schema")
        if len(self.schema) - 1 != features.shape[1]:
            raise DatasetError(f"Schema has {len(self.schema) - 1} feature columns, matrix has {features.shape[1]}",
                               code="dimension-mismatch")

        features.setflags(write=False)
        labels.setflags(write=False)
        object.__setattr__(self, 'features', features)
        object.__setattr__(self, 'labels', labels)
        object.__setattr__(self, 'schema', tuple(self.schema))

    @property
    def n_rows(self) -> int:
        return self.features.shape[0]

    @property
    def n_features(self) -> int:
        return self.features.shape[1]

    @property
    def feature_schema(self) -> List[ColumnSchema]:
        return [column for column in self.schema if column.kind != ColumnKind.LABEL]

    @property
    def label_schema(self) -> ColumnSchema:
        return next(column for column in self.schema if column.kind == ColumnKind.LABEL)

    @property
    def numeric_columns(self) -> List[int]:
        """Indices (into features) of numeric feature columns"""
        return [j for j, column in enumerate(self.feature_schema) if column.kind == ColumnKind.NUMERIC]

    @property
    def missing_mask(self) -> np.ndarray:
        return np.isnan(self.features)

    @property
    def missing_count(self) -> int:
        return int(self.missing_mask.sum())

    def with_features(self, features: np.ndarray) -> 'Dataset':
        return Dataset(features, self.labels, self.schema, self.class_count)

    def with_rows(self, features: np.ndarray, labels: np.ndarray) -> 'Dataset':
        return Dataset(features, labels, self.schema, self.class_count)

    def take(self, rows: Sequence[int]) -> 'Dataset':
        rows = np.asarray(rows, dtype=np.int64)
        return Dataset(self.features[rows], self.labels[rows], self.schema, self.class_count)

    def same_layout(self, other: 'Dataset') -> bool:
        """Same column names, kinds, category encodings and class count; observed ranges may differ"""
        return (
            self.class_count == other.class_count
            and [(c.name, c.kind, c.categories) for c in self.schema]
            == [(c.name, c.kind, c.categories) for c in other.schema]
        )

    def encode_like(self, reference: 'Dataset') -> 'Dataset':
        """Re-encode this dataset with the reference's schema (category codes, label codes)"""
        if self.schema == reference.schema and self.class_count == reference.class_count:
            return self
        return Dataset.from_frame(self.to_frame(), self.label_schema.name, reference=reference)

    def same_values(self, other: 'Dataset') -> bool:
        """Cell-by-cell equality, missing cells compare equal"""
        return (
            self.schema == other.schema
            and self.class_count == other.class_count
            and np.array_equal(self.labels, other.labels)
            and np.array_equal(self.features, other.features, equal_nan=True)
        )

    @classmethod
    def from_frame(
        cls,
        frame: pd.DataFrame,
        label_column: Union[str, int],
        options: Optional[CsvOptions] = None,
        reference: Optional['Dataset'] = None
    ) -> 'Dataset':
        """
        Build a dataset from a DataFrame of text cells (or numeric columns).

        Args:
            frame: Raw table, header already applied
            label_column: Label column name, or zero-based index
            options: Parse options
            reference: Dataset whose schema (encodings, observed ranges) must be reused

        Returns:
            Encoded dataset
        """
        options = options or CsvOptions()
        label_name = _resolve_label_column(frame, label_column)

        if reference is None and len(frame) < 2:
            raise DatasetError(f"Dataset has {len(frame)} rows", code="too-few-rows")
        if len(frame) < 1:
            raise DatasetError("Dataset has no rows", code="too-few-rows")

        reference_columns = {}
        if reference is not None:
            reference_columns = {column.name: column for column in reference.schema}
            names = [str(name) for name in frame.columns]
            if names != [column.name for column in reference.schema]:
                raise DatasetError(f"Header {names} differs from the reference header", code="schema-mismatch")

        label_reference = reference_columns.get(str(label_name))
        labels, label_schema = _encode_labels(frame[label_name], str(label_name), label_reference)

        schema: List[ColumnSchema] = []
        columns: List[np.ndarray] = []
        for name in frame.columns:
            if name == label_name:
                schema.append(label_schema)
                continue
            values, column_schema = _encode_feature(
                frame[name], str(name), options, reference_columns.get(str(name))
            )
            schema.append(column_schema)
            columns.append(values)

        if not columns:
            raise DatasetError("Dataset has no feature columns", code="dimension-mismatch")

        class_count = reference.class_count if reference is not None else len(label_schema.categories)
        return cls(np.column_stack(columns), labels, tuple(schema), class_count)

    def to_frame(self) -> pd.DataFrame:
        """Decode back to text cells in the original column order"""
        data = {}
        feature_index = 0
        for column in self.schema:
            if column.kind == ColumnKind.LABEL:
                data[column.name] = [column.categories[label] for label in self.labels]
                continue
            values = self.features[:, feature_index]
            feature_index += 1
            if column.kind == ColumnKind.CATEGORICAL:
                data[column.name] = [column.decode(value) for value in values]
            else:
                data[column.name] = ['' if np.isnan(value) else repr(float(value)) for value in values]
        return pd.DataFrame(data, columns=[column.name for column in self.schema])


@dataclass(frozen=True, eq=False)
class TrainTestSplit:
    """Disjoint train/test partitions of one source dataset"""
    train: Dataset
    test: Dataset
    train_fraction: float
    seed: int
    train_rows: Optional[np.ndarray] = field(default=None, repr=False)
    test_rows: Optional[np.ndarray] = field(default=None, repr=False)

    def __post_init__(self):
        if not 0 < self.train_fraction < 1:
            raise ConfigError(f"train_fraction must be in (0, 1), got {self.train_fraction}")
        if not self.train.same_layout(self.test):
            raise DatasetError("Train and test partitions do not share a schema", code="schema-mismatch")


def _resolve_label_column(frame: pd.DataFrame, label_column: Union[str, int]):
    if label_column in frame.columns:
        return label_column
    if isinstance(label_column, int) or str(label_column).isdigit():
        index = int(label_column)
        if 0 <= index < len(frame.columns):
            return frame.columns[index]
    raise DatasetError(f"Label column {label_column!r} not in {list(frame.columns)}", code="unknown-column")


def _is_empty(series: pd.Series) -> np.ndarray:
    if pd.api.types.is_numeric_dtype(series):
        return series.isna().to_numpy()
    return (series.isna() | (series.astype(str).str.strip() == '')).to_numpy()


def _encode_labels(series: pd.Series, name: str, reference: Optional[ColumnSchema]) -> Tuple[np.ndarray, ColumnSchema]:
    empty = _is_empty(series)
    if empty.any():
        rows = np.flatnonzero(empty)[:5].tolist()
        raise DatasetError(f"Label column {name} has {int(empty.sum())} empty cells (rows {rows})",
                           code="missing-label")

    text = series.astype(str).to_numpy()
    if reference is not None:
        mapping = reference.category_map
        unknown = sorted(set(text) - set(mapping))
        if unknown:
            raise DatasetError(f"Labels {unknown} not present in the training labels", code="unknown-category")
        return np.array([mapping[value] for value in text], dtype=np.int64), reference

    # Codes follow first appearance
    categories = tuple(pd.unique(text))
    if len(categories) < 2:
        raise DatasetError(f"Label column {name} has {len(categories)} distinct value, class count must be >= 2",
                           code="single-class")
    mapping = {value: code for code, value in enumerate(categories)}
    labels = np.array([mapping[value] for value in text], dtype=np.int64)
    logger.debug(f"Encoded label column {name} into {len(categories)} classes: {categories}")
    return labels, ColumnSchema(name, ColumnKind.LABEL, categories=categories)


def _parse_numeric(series: pd.Series, empty: np.ndarray) -> Optional[np.ndarray]:
    """Parsed reals with NaN for empty cells, or None if any cell is not a finite real"""
    if pd.api.types.is_numeric_dtype(series):
        values = series.to_numpy(dtype=np.float64)
        return values if np.isfinite(values[~empty]).all() else None
    values = np.full(len(series), MISSING)
    try:
        parsed = series[~empty].astype(str).str.strip().astype(np.float64).to_numpy()
    except ValueError:
        return None
    if not np.isfinite(parsed).all():
        return None
    values[~empty] = parsed
    return values


def _encode_feature(
    series: pd.Series,
    name: str,
    options: CsvOptions,
    reference: Optional[ColumnSchema]
) -> Tuple[np.ndarray, ColumnSchema]:
    empty = _is_empty(series)

    if reference is not None and reference.kind == ColumnKind.CATEGORICAL:
        return _encode_categories(series, empty, name, reference.categories, strict=True), reference

    values = _parse_numeric(series, empty)
    if values is not None:
        if reference is not None:
            return values, reference
        observed = values[~empty]
        if observed.size == 0:
            logger.warning(f"Column {name} is entirely missing, observed range set to [0, 0]")
            return values, ColumnSchema(name, ColumnKind.NUMERIC, 0.0, 0.0)
        return values, ColumnSchema(name, ColumnKind.NUMERIC, float(observed.min()), float(observed.max()))

    if reference is not None or not options.categorical_fallback:
        bad = series[~empty].astype(str)
        sample = bad[pd.to_numeric(bad, errors='coerce').isna()].head(3).tolist()
        raise DatasetError(f"Column {name} has unparseable cells {sample}", code="unparseable-cell")

    categories = tuple(pd.unique(series[~empty].astype(str).to_numpy()))
    codes = _encode_categories(series, empty, name, categories, strict=False)
    logger.debug(f"Column {name} encoded as categorical with {len(categories)} categories")
    return codes, ColumnSchema(name, ColumnKind.CATEGORICAL, 0.0, float(max(len(categories) - 1, 0)), categories)


def _encode_categories(series: pd.Series, empty: np.ndarray, name: str, categories: Tuple[str, ...],
                       strict: bool) -> np.ndarray:
    mapping = {text: code for code, text in enumerate(categories)}
    codes = np.full(len(series), MISSING)
    text = series.astype(str).to_numpy()
    for row in np.flatnonzero(~empty):
        code = mapping.get(text[row])
        if code is None:
            raise DatasetError(f"Column {name}: category {text[row]!r} unknown to the reference encoding",
                               code="unknown-category" if strict else "unparseable-cell")
        codes[row] = code
    return codes


def load_csv(
    path: str,
    label_column: Union[str, int],
    options: Optional[CsvOptions] = None,
    reference: Optional[Dataset] = None
) -> Dataset:
    """
    Load a CSV file with a header row into an encoded Dataset.

    Empty cells become missing markers, non-numeric feature columns are integer-encoded
    and labels are encoded to [0, c) in order of first appearance.

    Args:
        path: CSV file path
        label_column: Label column name or zero-based index
        options: Parse options
        reference: Training dataset whose encodings a test file must share

    Returns:
        Encoded dataset
    """
    options = options or CsvOptions()
    if not os.path.isfile(path):
        raise DatasetError(f"{path} does not exist", code="file-not-found")

    try:
        frame = pd.read_csv(path, dtype=str, keep_default_na=False, sep=options.delimiter,
                            encoding=options.encoding)
    except (pd.errors.EmptyDataError, pd.errors.ParserError, UnicodeDecodeError) as e:
        raise DatasetError(f"{path}: {e}", code="unparseable-cell") from e

    dataset = Dataset.from_frame(frame, label_column, options, reference)
    logger.info(f"Loaded {path}: {dataset.n_rows} rows, {dataset.n_features} features, "
                f"{dataset.class_count} classes, {dataset.missing_count} missing cells")
    return dataset


def write_csv(d: Dataset, path: str) -> None:
    """Write a dataset back to CSV, missing cells as empty fields"""
    try:
        d.to_frame().to_csv(path, index=False)
    except OSError as e:
        raise DatasetError(f"Cannot write {path}: {e}", code="unwritable-path") from e
    logger.info(f"Wrote {d.n_rows} rows to {path}")


def _check_split_sizes(n_train: int, n_test: int, train_fraction: float) -> None:
    if not 0 < train_fraction < 1:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")
    if n_train < 1 or n_test < 1:
        raise DatasetError(f"Split of {n_train + n_test} rows at {train_fraction} gives {n_train} train "
                           f"and {n_test} test rows", code="degenerate-split")


def split_random(d: Dataset, train_fraction: float, seed: int) -> TrainTestSplit:
    """Seeded uniform shuffle, first floor(n * train_fraction) rows go to train"""
    n_train = int(np.floor(d.n_rows * train_fraction))
    _check_split_sizes(n_train, d.n_rows - n_train, train_fraction)

    permutation = np.random.default_rng(seed).permutation(d.n_rows)
    train_rows, test_rows = permutation[:n_train], permutation[n_train:]
    return TrainTestSplit(d.take(train_rows), d.take(test_rows), train_fraction, seed, train_rows, test_rows)


def split_stratified(d: Dataset, train_fraction: float, seed: int) -> TrainTestSplit:
    """Per-class seeded shuffle, each class keeps its share on both sides"""
    if not 0 < train_fraction < 1:
        raise ConfigError(f"train_fraction must be in (0, 1), got {train_fraction}")

    rng = np.random.default_rng(seed)
    train_parts, test_parts = [], []
    for label in range(d.class_count):
        rows = np.flatnonzero(d.labels == label)
        if rows.size == 0:
            continue
        rows = rng.permutation(rows)
        n_train = int(np.floor(rows.size * train_fraction))
        if rows.size >= 2:
            n_train = min(max(n_train, 1), rows.size - 1)
        train_parts.append(rows[:n_train])
        test_parts.append(rows[n_train:])

    train_rows = rng.permutation(np.concatenate(train_parts))
    test_rows = rng.permutation(np.concatenate(test_parts))
    _check_split_sizes(train_rows.size, test_rows.size, train_fraction)
    return TrainTestSplit(d.take(train_rows), d.take(test_rows), train_fraction, seed, train_rows, test_rows)


def impute_train_mean(split: TrainTestSplit) -> TrainTestSplit:
    """
    Replace missing cells in both partitions with per-column means of observed train cells.

    A train column with no observed cell is filled with 0.
    """
    train_missing = split.train.missing_mask
    test_missing = split.test.missing_mask
    if not train_missing.any() and not test_missing.any():
        return split

    observed = ~train_missing
    counts = observed.sum(axis=0)
    sums = np.where(observed, split.train.features, 0.0).sum(axis=0)
    means = np.divide(sums, counts, out=np.zeros_like(sums), where=counts > 0)
    if (counts == 0).any():
        empty = [split.train.feature_schema[j].name for j in np.flatnonzero(counts == 0)]
        logger.warning(f"Train columns {empty} are entirely missing, filled with 0")

    train = np.where(train_missing, means, split.train.features)
    test = np.where(test_missing, means, split.test.features)
    return replace(split, train=split.train.with_features(train), test=split.test.with_features(test))


def class_count(d: Dataset) -> int:
    """Number of classes fixed at load time"""
    return d.class_count


def make_blobs(n: int = 500, d: int = 5, separation: float = 6.0, class_count: int = 2, seed: int = 0) -> Dataset:
    """
    Seeded Gaussian blobs with unit variance.

    Consecutive class centres are `separation` standard deviations apart (Euclidean),
    the offset spread equally over the d features.
    """
    if n < 2 or d < 1 or class_count < 2:
        raise ConfigError(f"make_blobs needs n >= 2, d >= 1, class_count >= 2; got {n}, {d}, {class_count}")

    rng = np.random.default_rng(seed)
    labels = rng.permutation(np.arange(n) % class_count)
    offset = separation / np.sqrt(d)
    features = rng.standard_normal((n, d)) + labels[:, None] * offset

    frame = pd.DataFrame(features, columns=[f'x{j}' for j in range(d)])
    frame['y'] = [f'class_{label}' for label in labels]
    return Dataset.from_frame(frame, 'y')
