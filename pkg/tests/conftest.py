import random
from fractions import Fraction

import pytest

from kplab.config import gen_random_config
from kplab.field import Field


@pytest.fixture(scope="session")
def f2():
    return Field(2)


@pytest.fixture(scope="session")
def f3():
    return Field(3)


@pytest.fixture(scope="session")
def f5():
    return Field(5)


def random_corpus(n, k, p, count, num_directions=None, density=Fraction(1, 2), start_seed=0):
    """Seeded configuration stream shared by the property tests and the
    acceptance suite."""
    from kplab.flats import gaussian_binomial

    fld = Field(p)
    if num_directions is None:
        num_directions = min(8, gaussian_binomial(n, k, p))
    for seed in range(start_seed, start_seed + count):
        yield seed, gen_random_config(n, k, num_directions, density, fld, seed)


def random_vectors(n, p, count, rng: random.Random):
    return [tuple(rng.randrange(p) for _ in range(n)) for _ in range(count)]
