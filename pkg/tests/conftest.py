import numpy as np
import pandas as pd
import pytest

from dq.dataset import Dataset, load_csv, make_blobs, write_csv
from dq.suite import parse_suite


def pytest_configure(config):
    config.addinivalue_line("markers", "slow: long-running sweep reproductions")


@pytest.fixture(scope="session")
def blobs() -> Dataset:
    """Seeded 2-class Gaussian blobs, 500 x 5, centres 6 standard deviations apart"""
    return make_blobs(n=500, d=5, separation=6.0, class_count=2, seed=0)


@pytest.fixture
def small_blobs() -> Dataset:
    return make_blobs(n=100, d=4, separation=6.0, class_count=2, seed=1)


@pytest.fixture
def fast_suite():
    """Three cheap models"""
    return parse_suite('fast', seed=0)


@pytest.fixture
def blobs_csv(tmp_path, blobs) -> str:
    """Blobs written to CSV with the label in column 'y'"""
    path = str(tmp_path / "blobs.csv")
    write_csv(blobs, path)
    return path


@pytest.fixture
def mixed_csv(tmp_path) -> str:
    """Numeric, categorical and missing cells, text labels"""
    path = tmp_path / "mixed.csv"
    path.write_text(
        "age,colour,height,label\n"
        "31,red,1.80,yes\n"
        ",blue,1.65,no\n"
        "45,red,,yes\n"
        "27,,1.72,no\n"
        "52,green,1.90,yes\n"
        "38,blue,1.60,no\n"
    )
    return str(path)


@pytest.fixture
def single_class_csv(tmp_path) -> str:
    path = tmp_path / "single_class.csv"
    path.write_text("x,y\n1,a\n2,a\n3,a\n")
    return str(path)


@pytest.fixture
def grid_dataset() -> Dataset:
    """100 rows x 10 numeric features, two classes"""
    rng = np.random.default_rng(3)
    frame = pd.DataFrame(rng.normal(size=(100, 10)), columns=[f'f{j}' for j in range(10)])
    frame['y'] = np.where(np.arange(100) % 2 == 0, 'even', 'odd')
    return Dataset.from_frame(frame, 'y')


@pytest.fixture
def load(tmp_path):
    """Load a CSV written from text"""
    def _load(text: str, label: str = 'y', **kwargs) -> Dataset:
        path = tmp_path / "data.csv"
        path.write_text(text)
        return load_csv(str(path), label, **kwargs)
    return _load
