from functools import lru_cache

import pytest

from kpdixmier.model import build_model
from kpdixmier.orbits import validate
from kpdixmier.weyl import WeylModel

DESK = [
    ("GL", 2, (2,)),
    ("GL", 3, (2, 1)),
    ("GL", 3, (3,)),
    ("Sp", 2, (2,)),
    ("O", 3, (3,)),
    ("Sp", 4, (2, 2)),
    ("O", 4, (2, 2)),
]

SMALL = [DESK[0], DESK[3], DESK[4]]


@lru_cache(maxsize=None)
def model_of(group, n, partition):
    return build_model(validate(group, n, partition))


@lru_cache(maxsize=None)
def weyl_of(group, n, partition):
    return WeylModel(model_of(group, n, partition))


def spec_id(t):
    g, n, p = t
    return f"{g}{n}-{'.'.join(map(str, p))}"


@pytest.fixture(scope="session")
def gl2():
    return model_of("GL", 2, (2,))


@pytest.fixture(scope="session")
def sp2():
    return model_of("Sp", 2, (2,))


@pytest.fixture(scope="session")
def o3():
    return model_of("O", 3, (3,))
