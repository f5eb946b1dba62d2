import numpy as np
import pytest

from sisexplorer import clean, parse_csv

from datagen import FIXTURE_CSV, random_affiliates_csv


@pytest.fixture
def fixture_csv_bytes() -> bytes:
    return FIXTURE_CSV


@pytest.fixture
def fixture_dataset(fixture_csv_bytes):
    parsed, _ = parse_csv(fixture_csv_bytes)
    cleaned, _ = clean(parsed)
    return cleaned


@pytest.fixture
def make_affiliates_csv():
    return random_affiliates_csv


@pytest.fixture
def make_affiliates_dataset():
    def build(rng: np.random.Generator, n_rows: int):
        parsed, _ = parse_csv(random_affiliates_csv(rng, n_rows))
        cleaned, _ = clean(parsed)
        return cleaned

    return build
