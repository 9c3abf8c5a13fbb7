import numpy as np
import pytest

from ergokit import StochasticMatrix, validate_stochastic
from ergokit import generators as gen


def labels(n):
    return [f"s{i}" for i in range(n)]


def from_array(a) -> StochasticMatrix:
    a = np.asarray(a, dtype=float)
    return validate_stochastic(a, labels(a.shape[0]))


def random_positive(rng, n, floor=0.05) -> StochasticMatrix:
    a = rng.random((n, n)) + floor
    return from_array(a / a.sum(axis=1, keepdims=True))


def random_irreducible(rng, n, extra_edges=None) -> StochasticMatrix:
    """Sparse irreducible chain: a random permutation cycle guarantees strong
    connectivity, extra random edges vary the period and degree profile.
    Kept sparse so exhaustive tree enumeration stays cheap."""
    perm = rng.permutation(n)
    a = np.zeros((n, n))
    for i in range(n):
        a[perm[i], perm[(i + 1) % n]] = 0.2 + rng.random()
    if extra_edges is None:
        extra_edges = int(rng.integers(0, n + 1))
    for _ in range(extra_edges):
        i, j = rng.integers(0, n, size=2)
        a[i, j] = 0.2 + rng.random()
    return from_array(a / a.sum(axis=1, keepdims=True))


def random_ergodic(rng, n) -> StochasticMatrix:
    """Sparse irreducible chain made aperiodic by one self-loop."""
    P = random_irreducible(rng, n)
    a = P.entries.copy()
    i = int(rng.integers(0, n))
    a[i, i] += 0.5
    return from_array(a / a.sum(axis=1, keepdims=True))


@pytest.fixture
def two_state_chain():
    return gen.two_state(0.2, 0.3)


@pytest.fixture
def flip_chain():
    return gen.flip()


@pytest.fixture
def identity3():
    return from_array(np.eye(3))
