"""
Configuration for data quality assessment
"""

from dotenv import load_dotenv
import os
import json
import logging
from typing import Any, Dict, List

import mmh3

load_dotenv()

logger = logging.getLogger(__name__)

# Runtime settings (overridable through the environment or a .env file)
MASTER_SEED = int(os.getenv('DQ_MASTER_SEED', '0'))
JOBS = int(os.getenv('DQ_JOBS', '1'))
LOG_LEVEL = os.getenv('DQ_LOG_LEVEL', 'INFO')
SUITE = os.getenv('DQ_SUITE', 'default')

# Metric parameters
DEFAULT_P = 0.05  # 5% of each error type injected into training data
DEFAULT_RESAMPLES = 30
DEFAULT_TRAIN_FRACTION = 0.8
DEFAULT_SENSITIVITY_FACTOR = 10.0

# Interpretation thresholds
GOOD_UPPER = 0.3
MEDIUM_UPPER = 0.6

# Sweep grid
DEFAULT_ITERATIONS = 30
DEFAULT_LEVEL_STEP = 0.05
DEFAULT_LEVEL_MAX = 0.95

# Corruption
OUTLIER_BAND = (1.0, 3.0)  # multiples of the clean column range beyond min/max
FUZZING_NOISE = 0.01  # fraction of the clean column range

# Models
NB_VARIANCE_FLOOR = 1e-9

# Level grids used in the original experiments
NAMED_GRIDS = {
    'sweep': (0.0, 0.95, 0.05),
    'good-medium': (0.05, 0.10, 0.05),
    'bad': (0.30, 0.50, 0.05),
    'evaluation': (0.0, 0.50, 0.05),
}


# Load bundled suites
def load_suite(name: str) -> List[Dict[str, Any]]:
    suite_path = os.path.join(os.path.dirname(__file__), 'suites', f'{name}.json')
    with open(suite_path) as f:
        return json.load(f)


def bundled_suites() -> List[str]:
    suites_dir = os.path.join(os.path.dirname(__file__), 'suites')
    return sorted(name[:-5] for name in os.listdir(suites_dir) if name.endswith('.json'))


def derive_seed(master_seed: int, *parts: Any) -> int:
    """Derive an unsigned 32-bit seed from the master seed and a coordinate tuple"""
    key = ':'.join(str(part) for part in (master_seed,) + parts)
    seed = mmh3.hash(key, signed=False)
    logger.debug(f"Derived seed {seed} for {key}")
    return seed
