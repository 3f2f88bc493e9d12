import json
import random
from pathlib import Path

import pytest

from msic import create_app
from msic.models import build_graphs, parse_instance, random_instance, simplify

INSTANCES = Path(__file__).resolve().parent.parent / "instances"


def load_example(name):
    return parse_instance(json.loads((INSTANCES / f"{name}.json").read_text()))


def graphs_of(inst):
    return build_graphs(simplify(inst)[0])


def seeded_instance(seed, m, **kwargs):
    return random_instance(random.Random(seed), m, **kwargs)


@pytest.fixture
def app():
    """Flask app for pytest-flask's client fixture"""
    return create_app(TESTING=True)


@pytest.fixture
def ex_a():
    return load_example("ex_a")


@pytest.fixture
def ex_b():
    return load_example("ex_b")


@pytest.fixture
def ex_c():
    return load_example("ex_c")


@pytest.fixture
def instance_path():
    return lambda name: str(INSTANCES / f"{name}.json")
