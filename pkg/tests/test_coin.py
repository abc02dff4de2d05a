"""
Tests for the coin operator and pure-state walk
"""

import math

import numpy as np
import pytest
from pydantic import ValidationError

from qwalk.core.exceptions import CapacityError, InvalidParameterError
from qwalk.sim.coin import (
    SYMMETRIC_COIN_STATE,
    CoinMatrix,
    CoinParams,
    PureWalkerState,
    coin_populations,
    evolve_pure,
    hadamard_params,
    init_delocalized_walker,
    init_pure_walker,
    make_coin,
    position_distribution,
    required_radius,
    step_pure,
)


def test_hadamard_coin_matches_closed_form(hadamard):
    expected = np.array([[1, 1], [1, -1]]) / math.sqrt(2)
    np.testing.assert_allclose(hadamard.entries, expected, atol=1e-15)
    assert hadamard.entries.dtype == np.complex128


def test_coin_is_unitary_for_random_angles(rng):
    for xi, theta, zeta in rng.uniform(-10.0, 10.0, size=(50, 3)):
        coin = make_coin(CoinParams(xi=xi, theta=theta, zeta=zeta))
        product = coin.entries.conj().T @ coin.entries
        np.testing.assert_allclose(product, np.eye(2), atol=1e-12)


def test_coin_entries_follow_phase_convention():
    xi, theta, zeta = 0.3, 0.7, 1.1
    coin = make_coin(CoinParams(xi=xi, theta=theta, zeta=zeta)).entries
    assert coin[0, 0] == pytest.approx(np.exp(1j * xi) * math.cos(theta))
    assert coin[0, 1] == pytest.approx(np.exp(1j * zeta) * math.sin(theta))
    assert coin[1, 0] == pytest.approx(np.exp(-1j * zeta) * math.sin(theta))
    assert coin[1, 1] == pytest.approx(-np.exp(-1j * xi) * math.cos(theta))


def test_angles_are_reduced_mod_two_pi():
    params = CoinParams(xi=2 * math.pi + 0.5, theta=-math.pi / 4, zeta=0.0)
    assert params.xi == pytest.approx(0.5)
    assert params.theta == pytest.approx(7 * math.pi / 4)


def test_non_finite_angle_is_rejected():
    with pytest.raises(ValidationError) as info:
        CoinParams(xi=float("nan"))
    assert isinstance(info.value.raw_errors[0].exc, InvalidParameterError)
    with pytest.raises(ValueError):
        CoinParams(theta=float("nan"))
    with pytest.raises(InvalidParameterError):
        make_coin(CoinParams.construct(xi=0.0, theta=float("inf"), zeta=0.0))


def test_non_unitary_matrix_is_rejected():
    with pytest.raises(ValueError):
        CoinMatrix(entries=np.array([[1, 1], [0, 1]], dtype=complex))


def test_hadamard_params():
    params = hadamard_params()
    assert (params.xi, params.theta, params.zeta) == (0.0, pytest.approx(math.pi / 4), 0.0)


def test_init_pure_walker_places_coin_state_on_site():
    walker = init_pure_walker(2, radius=5, steps=3)
    assert walker.amplitudes.shape == (2, 11)
    assert walker.amplitude(0, 2) == pytest.approx(SYMMETRIC_COIN_STATE[0])
    assert walker.amplitude(1, 2) == pytest.approx(SYMMETRIC_COIN_STATE[1])
    assert walker.norm() == pytest.approx(1.0)


def test_init_pure_walker_capacity_precondition():
    with pytest.raises(CapacityError):
        init_pure_walker(0, radius=1, steps=2)
    with pytest.raises(CapacityError):
        init_pure_walker(-4, radius=3)


def test_coin_state_is_normalized_within_tolerance():
    walker = init_pure_walker(0, (1.0 + 1e-8, 0.0), radius=1)
    assert walker.norm() == pytest.approx(1.0, abs=1e-15)
    with pytest.raises(InvalidParameterError):
        init_pure_walker(0, (1.0, 1.0), radius=1)
    with pytest.raises(InvalidParameterError):
        init_pure_walker(0, (1.0, 0.0, 0.0), radius=1)


def test_negative_steps_are_rejected(hadamard):
    walker = init_pure_walker(0, radius=3)
    with pytest.raises(InvalidParameterError):
        evolve_pure(walker, hadamard, -1)


def test_zero_steps_returns_initial_state(hadamard):
    walker = init_pure_walker(0, radius=3)
    assert evolve_pure(walker, hadamard, 0) is walker


def test_one_hadamard_step(hadamard):
    walker = init_pure_walker(0, radius=1, steps=1)
    dist = position_distribution(step_pure(walker, hadamard))
    np.testing.assert_allclose(dist.probs, [0.5, 0.0, 0.5], atol=1e-15)


def test_two_hadamard_steps(walk_distribution):
    dist = walk_distribution(steps=2)
    np.testing.assert_allclose(dist.probs, [0.25, 0.0, 0.5, 0.0, 0.25], atol=1e-15)


def test_shift_direction_follows_coin():
    # theta = 0 never mixes the coin
    coin = make_coin(CoinParams(theta=0.0))
    left = evolve_pure(init_pure_walker(0, (1, 0), radius=3, steps=3), coin, 3)
    right = evolve_pure(init_pure_walker(0, (0, 1), radius=3, steps=3), coin, 3)
    assert position_distribution(left).probability(-3) == pytest.approx(1.0)
    assert position_distribution(right).probability(3) == pytest.approx(1.0)


def test_coin_flip_walk_oscillates():
    coin = make_coin(CoinParams(theta=math.pi / 2))
    walker = init_pure_walker(0, radius=6, steps=6)
    even = position_distribution(evolve_pure(walker, coin, 6))
    odd = position_distribution(evolve_pure(walker, coin, 5))
    assert even.probability(0) == pytest.approx(1.0)
    assert odd.probability(-1) == pytest.approx(0.5)
    assert odd.probability(1) == pytest.approx(0.5)


def test_norm_is_conserved(rng):
    for xi, theta, zeta in rng.uniform(0.0, 2 * math.pi, size=(5, 3)):
        coin = make_coin(CoinParams(xi=xi, theta=theta, zeta=zeta))
        walker = evolve_pure(init_pure_walker(0, radius=60, steps=60), coin, 60)
        assert walker.norm() == pytest.approx(1.0, abs=1e-12)


def test_parity_sites_stay_empty(walk_distribution):
    dist = walk_distribution(theta=0.4, steps=15)
    even_sites = dist.sites % 2 == 0
    assert np.all(dist.probs[even_sites] == 0.0)


def test_stepping_past_the_boundary_raises(hadamard):
    walker = init_pure_walker(0, radius=2)
    with pytest.raises(CapacityError):
        evolve_pure(walker, hadamard, 3)


def test_evolution_is_deterministic(hadamard):
    walker = init_pure_walker(0, radius=30, steps=30)
    first = evolve_pure(walker, hadamard, 30).amplitudes
    second = evolve_pure(walker, hadamard, 30).amplitudes
    assert np.array_equal(first, second)


def test_coin_populations_sum_to_distribution(walk_distribution, hadamard):
    walker = evolve_pure(init_pure_walker(0, radius=8, steps=8), hadamard, 8)
    populations = coin_populations(walker)
    assert populations.shape == (2, 17)
    np.testing.assert_allclose(populations.sum(axis=0), position_distribution(walker).probs)


def test_delocalized_walker_spreads_amplitude_evenly():
    walker = init_delocalized_walker([-1, 0, 1, 2], radius=5, steps=3)
    dist = position_distribution(walker)
    for site in (-1, 0, 1, 2):
        assert dist.probability(site) == pytest.approx(0.25)
    assert walker.norm() == pytest.approx(1.0)


def test_delocalized_walker_rejects_bad_sites():
    with pytest.raises(InvalidParameterError):
        init_delocalized_walker([], radius=3)
    with pytest.raises(InvalidParameterError):
        init_delocalized_walker([0, 0], radius=3)
    with pytest.raises(CapacityError):
        init_delocalized_walker([-2, 2], radius=3, steps=2)


def test_required_radius():
    assert required_radius([-19, 20], 40) == 60
    assert required_radius([0], 0) == 0


def test_state_shape_must_match_radius():
    with pytest.raises(ValueError):
        PureWalkerState(radius=2, amplitudes=np.zeros((2, 3), dtype=complex))


def test_distribution_lookup_outside_radius(walk_distribution):
    dist = walk_distribution(steps=3)
    assert dist.probability(10) == 0.0
    assert set(dist.as_dict()) == {-3, -1, 1, 3}
    assert len(dist.as_dict(include_zeros=True)) == 7
