from pathlib import Path

import numpy as np
import pytest

from markov_ktree.ktree import CreationOrder, build_from_order
from markov_ktree.model import fit
from markov_ktree.tables import JointTable, random_joint

FIXTURES = Path(__file__).parent / "fixtures"


@pytest.fixture
def fixtures_dir() -> Path:
    return FIXTURES


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(20240611)


@pytest.fixture
def xor_joint() -> JointTable:
    """X, Y fair coins and Z = X xor Y."""
    probs = np.zeros((2, 2, 2))
    for x in range(2):
        for y in range(2):
            probs[x, y, x ^ y] = 0.25
    return JointTable((1, 2, 3), probs)


@pytest.fixture
def triangle_order() -> CreationOrder:
    return CreationOrder(2, (1, 2), (((1, 2), 3),))


@pytest.fixture
def xor_model(xor_joint, triangle_order):
    return fit(build_from_order(triangle_order), triangle_order, xor_joint)


@pytest.fixture
def binary_joint():
    """Factory: a strictly positive random joint over n binary variables."""
    def make(n: int, rng: np.random.Generator) -> JointTable:
        return random_joint(range(1, n + 1), {v: 2 for v in range(1, n + 1)}, rng)
    return make
