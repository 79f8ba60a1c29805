"""
Data quality error codes and messages.
"""

from typing import Dict, Optional

# Error codes and their human-readable messages
ERROR_MESSAGES: Dict[str, str] = {
    "file-not-found": "Dataset file not found",
    "unparseable-cell": "Cell could not be parsed as a number and category fallback is disabled",
    "single-class": "Dataset needs at least 2 distinct classes",
    "missing-label": "Label column contains empty cells",
    "unknown-column": "Label column not found in header",
    "too-few-rows": "Dataset needs at least 2 rows",
    "unknown-category": "Value not present in the reference dataset encoding",
    "degenerate-split": "Split leaves the training or test side empty",
    "dimension-mismatch": "Feature row length does not match the model",
    "missing-cells": "Features still contain missing cells, impute before training",
    "empty-test": "Accuracy needs a non-empty test set",
    "no-numeric-cells": "Outlier injection needs at least one numeric feature cell",
    "too-few-rows-fuzzing": "Fuzzing needs at least 2 rows",
    "suite-mismatch": "Accuracy vectors come from different suites",
    "invalid-hyper-parameter": "Invalid classifier hyper-parameter",
    "invalid-config": "Invalid configuration",
    "invalid-grid": "Invalid sweep grid",
    "unwritable-path": "Output path cannot be written",
    "invalid-dataset": "Invalid dataset",
    "invalid-label": "Label index outside the class range",
    "invalid-schema": "Dataset schema is inconsistent",
    "schema-mismatch": "Datasets do not share a schema",
    "empty-train": "Training needs a non-empty training set",
    "not-trained": "Model is not trained",
    "invalid-accuracy": "Accuracy outside [0, 1]",
    "invalid-score": "Quality score violates its invariants",
    "model-failure": "Model training or prediction failed",
}


class DataQualityError(Exception):
    """Base error for dataset quality assessment"""

    code = "invalid-config"

    def __init__(self, message: str, code: Optional[str] = None):
        super().__init__(message)
        if code is not None:
            self.code = code


class DatasetError(DataQualityError, ValueError):
    """Invalid input data"""

    code = "invalid-dataset"


class ConfigError(DataQualityError, ValueError):
    """Invalid configuration, hyper-parameters or grids"""

    code = "invalid-config"


class ModelError(DataQualityError):
    """Training or prediction failure"""

    code = "model-failure"


def get_readable_error(error: Exception) -> str:
    """
    Convert an exception into a human-readable message.

    Args:
        error: Exception raised by the library or the runtime

    Returns:
        Human-readable error message
    """
    if isinstance(error, DataQualityError):
        summary = ERROR_MESSAGES.get(error.code, "Error")
        return f"{summary}: {error}"

    if isinstance(error, FileNotFoundError):
        return f"{ERROR_MESSAGES['file-not-found']}: {error.filename}"

    if isinstance(error, PermissionError):
        return f"{ERROR_MESSAGES['unwritable-path']}: {error.filename}"

    return f"Internal error: {type(error).__name__}: {error}"
