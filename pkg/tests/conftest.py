import json

import pytest
from click.testing import CliRunner

# Small enough that every suite finishes in seconds; the shipped configs are for real runs.
SMALL_CONFIG = {
    "p": 101,
    "sets": {"A": "rand:12,3", "ap": "interval:1,8"},
    "function": "1/0,1",
    "trials": 2,
    "seed": 7,
    "primes": [13, 101],
    "fields": [2, 3, 4, 5, 8, 9],
    "m_override": 4.0,
}


@pytest.fixture(scope="class")
def small_config():
    return dict(SMALL_CONFIG)


@pytest.fixture(scope="class")
def small_config_path(tmp_path_factory, small_config):
    path = tmp_path_factory.mktemp("configs") / "small.json"
    path.write_text(json.dumps(small_config), encoding="utf-8")
    return str(path)


@pytest.fixture(scope="class")
def runner():
    return CliRunner()
