import pytest

from lib.survdata import compute_counts, parse_dataset
from tests.helpers import DATA, EXAMPLE_CSV


@pytest.fixture
def example_dataset():
    return parse_dataset(EXAMPLE_CSV)


@pytest.fixture
def example_counts(example_dataset):
    return compute_counts(example_dataset)


@pytest.fixture
def data_dir():
    return DATA
