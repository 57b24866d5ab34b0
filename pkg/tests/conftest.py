import random
from fractions import Fraction
from importlib import resources

import pytest

from tropical_transient.family import MatrixFamily
from tropical_transient.io import load_expected, load_family, load_sequence
from tropical_transient.matrix import TropicalMatrix
from tropical_transient.products import fold
from tropical_transient.trellis import (
    best_avoiding_full_weight,
    best_through_one_weight,
    build_trellis,
    final_weights_all,
    initial_weights_all,
    optimal_full_walk,
)


def fixture_path(name: str) -> str:
    return str(resources.files("tropical_transient").joinpath(f"fixtures/{name}"))


@pytest.fixture(scope="session")
def family5_loaded():
    return load_family(fixture_path("five_node_family.json"))


@pytest.fixture
def family5(family5_loaded) -> MatrixFamily:
    return family5_loaded[0]


@pytest.fixture
def names5(family5_loaded):
    return family5_loaded[1]


@pytest.fixture(scope="session")
def seq44():
    return load_sequence(fixture_path("product_len44.json"))


@pytest.fixture(scope="session")
def expected5():
    return load_expected(fixture_path("expected_five_node.json"))


@pytest.fixture(scope="session", autouse=True)
def warm_kernels():
    """Trigger JIT compilation of every kernel before anything is timed."""
    rows = [
        [Fraction(0), Fraction(-1)],
        [Fraction(-1), Fraction(-2)],
    ]
    family = MatrixFamily([TropicalMatrix.from_rows(rows)] * 2)
    assert family.validate().passed
    seq = [1, 2, 1]
    fold(family, seq)
    trellis = build_trellis(family, seq)
    optimal_full_walk(trellis, 1, 2)
    initial_weights_all(trellis)
    final_weights_all(trellis)
    best_avoiding_full_weight(trellis, 2, 2)
    best_through_one_weight(trellis, 2, 2)
    family.boundaries()


def random_valid_family(rng: random.Random, n: int | None = None,
                        m: int | None = None) -> MatrixFamily:
    """A random admissible family: cycle backbone through node 1 plus a few
    strictly negative extra edges, integer weights in [-6, 0].

    Every cycle avoiding node 1 must use an extra edge, so side-cycle means
    are automatically strictly negative and validation passes by
    construction (still asserted, cheaply).
    """
    if n is None:
        n = rng.randint(2, 4)
    if m is None:
        m = rng.randint(1, 3)
    backbone = {(0, 0)} | {(i, (i + 1) % n) for i in range(n)}
    extras = set()
    for _ in range(rng.randint(0, 3)):
        edge = (rng.randrange(n), rng.randrange(n))
        if edge not in backbone:
            extras.add(edge)

    def member() -> TropicalMatrix:
        rows = [[None] * n for _ in range(n)]
        for i, j in backbone:
            rows[i][j] = Fraction(0 if (i, j) == (0, 0) else rng.randint(-6, 0))
        # every non-loop cycle must be strictly negative, including the
        # backbone cycle through node 1: make its re-entry edge negative
        rows[n - 1][0] = Fraction(rng.randint(-6, -1))
        for i, j in extras:
            rows[i][j] = Fraction(rng.randint(-6, -1))
        return TropicalMatrix.from_rows(rows)

    family = MatrixFamily([member() for _ in range(m)])
    assert family.validate().passed
    return family


@pytest.fixture
def make_family():
    return random_valid_family
