"""
Coin-core: coin operator, conditional shift and pure-state walk evolution

A walker lives on the sites j = -R..R of a line and carries a two-level
internal state (the coin). Amplitudes are stored as a complex array of
shape (2, 2R+1): row 0 is coin |0>, row 1 is coin |1>, column k is site
k - R. One step is W = S (B x 1): the coin B mixes the two rows of every
column, then the shift S moves row 0 one site left and row 1 one site right.
"""

import logging
import math
from typing import Iterable, Sequence, Union

import numpy as np
from pydantic import BaseModel, validator

from ..core.config import settings
from ..core.exceptions import CapacityError, InvalidParameterError, InvariantViolationError

logger = logging.getLogger(__name__)

TWO_PI = 2.0 * math.pi

# (|0> + i|1>) / sqrt(2), the coin state every atom starts in
SYMMETRIC_COIN_STATE = (1.0 / math.sqrt(2.0), 1j / math.sqrt(2.0))

CoinStateLike = Union[Sequence[complex], np.ndarray]


class ArrayModel(BaseModel):
    """Immutable record holding numpy arrays"""

    class Config:
        arbitrary_types_allowed = True
        allow_mutation = False


class CoinParams(BaseModel):
    """
    Angles (radians) of the SU(2) coin B(xi, theta, zeta).

    Non-finite angles are rejected with pydantic.ValidationError, which wraps
    the InvalidParameterError raised by the validator.
    """

    xi: float = 0.0
    theta: float = math.pi / 4
    zeta: float = 0.0

    @validator("xi", "theta", "zeta")
    def _normalize_angle(cls, value: float) -> float:
        if not math.isfinite(value):
            raise InvalidParameterError("coin angles must be finite")
        return value % TWO_PI

    class Config:
        allow_mutation = False


class CoinMatrix(ArrayModel):
    """2x2 unitary coin operator"""

    entries: np.ndarray

    @validator("entries")
    def _unitary(cls, value: np.ndarray) -> np.ndarray:
        value = np.asarray(value, dtype=np.complex128)
        if value.shape != (2, 2):
            raise InvalidParameterError(f"coin must be 2x2, got shape {value.shape}")
        deviation = np.max(np.abs(value.conj().T @ value - np.eye(2)))
        if deviation > settings.UNITARITY_TOLERANCE:
            raise InvalidParameterError(f"coin is not unitary (max deviation {deviation:.3e})")
        return value


class PureWalkerState(ArrayModel):
    """Complex amplitudes over coin x position for one walker"""

    radius: int
    amplitudes: np.ndarray

    @validator("radius")
    def _radius_non_negative(cls, value: int) -> int:
        if value < 0:
            raise InvalidParameterError("radius must be non-negative")
        return value

    @validator("amplitudes")
    def _shape_matches_radius(cls, value: np.ndarray, values: dict) -> np.ndarray:
        radius = values.get("radius")
        if radius is not None and value.shape != (2, 2 * radius + 1):
            raise InvalidParameterError(
                f"amplitudes must have shape (2, {2 * radius + 1}), got {value.shape}"
            )
        return value

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.radius, self.radius + 1)

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def amplitude(self, coin: int, site: int) -> complex:
        return complex(self.amplitudes[coin, site + self.radius])


class PositionDistribution(ArrayModel):
    """Probability of finding the walker on each site j = -R..R"""

    radius: int
    probs: np.ndarray

    @validator("probs")
    def _normalized(cls, value: np.ndarray, values: dict) -> np.ndarray:
        radius = values.get("radius")
        if radius is not None and value.shape != (2 * radius + 1,):
            raise InvalidParameterError(
                f"probs must have shape ({2 * radius + 1},), got {value.shape}"
            )
        if np.any(value < 0):
            raise InvariantViolationError("probabilities must be non-negative")
        total = float(np.sum(value))
        if abs(total - 1.0) > 1e-10:
            raise InvariantViolationError(f"probabilities sum to {total!r}, expected 1")
        return value

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.radius, self.radius + 1)

    def probability(self, site: int) -> float:
        if abs(site) > self.radius:
            return 0.0
        return float(self.probs[site + self.radius])

    def as_dict(self, include_zeros: bool = False) -> dict:
        return {
            int(j): float(p)
            for j, p in zip(self.sites, self.probs)
            if include_zeros or p != 0.0
        }


def hadamard_params() -> CoinParams:
    """The unbiased Hadamard coin B(0, 45deg, 0)"""
    return CoinParams(xi=0.0, theta=math.pi / 4, zeta=0.0)


def make_coin(params: CoinParams) -> CoinMatrix:
    """
    Build B(xi, theta, zeta) = [[e^{i xi} cos, e^{i zeta} sin],
                                [e^{-i zeta} sin, -e^{-i xi} cos]]
    """
    angles = (params.xi, params.theta, params.zeta)
    if not all(math.isfinite(angle) for angle in angles):
        raise InvalidParameterError(f"coin angles must be finite, got {angles}")

    cos_t, sin_t = math.cos(params.theta), math.sin(params.theta)
    entries = np.array(
        [
            [np.exp(1j * params.xi) * cos_t, np.exp(1j * params.zeta) * sin_t],
            [np.exp(-1j * params.zeta) * sin_t, -np.exp(-1j * params.xi) * cos_t],
        ],
        dtype=np.complex128,
    )
    return CoinMatrix(entries=entries)


def required_radius(sites: Iterable[int], steps: int) -> int:
    """Smallest radius that holds a walker launched from `sites` for `steps` steps"""
    return max(abs(int(site)) for site in sites) + int(steps)


def _coin_vector(coin_state: CoinStateLike) -> np.ndarray:
    vector = np.asarray(coin_state, dtype=np.complex128).reshape(-1)
    if vector.shape != (2,):
        raise InvalidParameterError(f"coin state must have two components, got {vector.shape[0]}")
    norm = float(np.linalg.norm(vector))
    if abs(norm - 1.0) > settings.COIN_STATE_TOLERANCE:
        raise InvalidParameterError(f"coin state is not normalized (norm {norm:.9f})")
    if norm != 1.0:
        vector = vector / norm
    return vector


def _validate_steps(steps: int) -> int:
    if int(steps) != steps or steps < 0:
        raise InvalidParameterError(f"steps must be a non-negative integer, got {steps!r}")
    return int(steps)


def init_pure_walker(
    j0: int,
    coin_state: CoinStateLike = SYMMETRIC_COIN_STATE,
    radius: int = 0,
    steps: int = 0,
) -> PureWalkerState:
    """Walker localized on site j0 with the given coin state"""
    steps = _validate_steps(steps)
    if abs(j0) + steps > radius:
        raise CapacityError(
            f"radius {radius} cannot hold a walker at j0={j0} for {steps} steps "
            f"(needs {abs(j0) + steps})"
        )

    amplitudes = np.zeros((2, 2 * radius + 1), dtype=np.complex128)
    amplitudes[:, j0 + radius] = _coin_vector(coin_state)
    return PureWalkerState(radius=radius, amplitudes=amplitudes)


def init_delocalized_walker(
    sites: Sequence[int],
    coin_state: CoinStateLike = SYMMETRIC_COIN_STATE,
    radius: int = 0,
    steps: int = 0,
) -> PureWalkerState:
    """Walker spread with equal amplitude and zero relative phase over `sites`"""
    steps = _validate_steps(steps)
    sites = [int(site) for site in sites]
    if not sites:
        raise InvalidParameterError("a delocalized walker needs at least one site")
    if len(set(sites)) != len(sites):
        raise InvalidParameterError("sites of a delocalized walker must be distinct")
    needed = required_radius(sites, steps)
    if needed > radius:
        raise CapacityError(f"radius {radius} too small for sites and {steps} steps (needs {needed})")

    coin = _coin_vector(coin_state) / math.sqrt(len(sites))
    amplitudes = np.zeros((2, 2 * radius + 1), dtype=np.complex128)
    for site in sites:
        amplitudes[:, site + radius] = coin
    return PureWalkerState(radius=radius, amplitudes=amplitudes)


def shift(block: np.ndarray) -> np.ndarray:
    """
    Conditional shift on the leading (coin, position) axes of `block`.

    Coin |0> moves from j to j-1, coin |1> from j to j+1. Trailing axes are
    carried along untouched, so the same routine shifts the row index of a
    density matrix reshaped to (2, n, 2, n).
    """
    shifted = np.zeros_like(block)
    shifted[0, :-1] = block[0, 1:]
    shifted[1, 1:] = block[1, :-1]
    return shifted


def check_capacity(block: np.ndarray) -> None:
    """Raise unless the boundary sites of the leading position axis are empty"""
    if np.any(block[:, 0]) or np.any(block[:, -1]):
        radius = (block.shape[1] - 1) // 2
        raise CapacityError(
            f"walker support reaches the lattice boundary |j| = {radius}; "
            "allocate a larger radius (no wraparound)"
        )


def _walk_step(amplitudes: np.ndarray, coin: np.ndarray) -> np.ndarray:
    check_capacity(amplitudes)
    return shift(coin @ amplitudes)


def step_pure(state: PureWalkerState, coin: CoinMatrix) -> PureWalkerState:
    """One application of W = S (B x 1)"""
    amplitudes = _walk_step(state.amplitudes, coin.entries)
    return PureWalkerState(radius=state.radius, amplitudes=amplitudes)


def evolve_pure(state: PureWalkerState, coin: CoinMatrix, steps: int) -> PureWalkerState:
    """N successive walk steps without intermediate measurement"""
    steps = _validate_steps(steps)
    if steps == 0:
        return state

    logger.debug(f"Evolving pure walker for {steps} steps at radius {state.radius}")
    amplitudes = state.amplitudes
    for _ in range(steps):
        amplitudes = _walk_step(amplitudes, coin.entries)
    return PureWalkerState(radius=state.radius, amplitudes=amplitudes)


def coin_populations(state: PureWalkerState) -> np.ndarray:
    """|amplitude|^2 per (coin, site), shape (2, 2R+1)"""
    return np.abs(state.amplitudes) ** 2


def position_distribution(state: PureWalkerState) -> PositionDistribution:
    """Marginal over the coin: P(j) = sum_c |amplitude[c, j]|^2"""
    return PositionDistribution(radius=state.radius, probs=coin_populations(state).sum(axis=0))
