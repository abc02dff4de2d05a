"""
Shared fixtures for the QWalk Lattice test suite
"""

import math

import numpy as np
import pytest

from qwalk.sim.coin import (
    CoinParams,
    evolve_pure,
    hadamard_params,
    init_pure_walker,
    make_coin,
    position_distribution,
)


@pytest.fixture
def hadamard():
    return make_coin(hadamard_params())


@pytest.fixture
def walk_distribution():
    """Distribution of a single walker launched at the origin"""

    def _walk(theta=math.pi / 4, steps=10, xi=0.0, zeta=0.0, coin_state=None):
        coin = make_coin(CoinParams(xi=xi, theta=theta, zeta=zeta))
        if coin_state is None:
            walker = init_pure_walker(0, radius=steps, steps=steps)
        else:
            walker = init_pure_walker(0, coin_state, radius=steps, steps=steps)
        return position_distribution(evolve_pure(walker, coin, steps))

    return _walk


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)
