"""
Noise channels: density-matrix walk evolution with coin decoherence

The density matrix of a walker on sites -R..R has dimension d = 2(2R+1),
indexed by (coin, position) pairs in the same order as the flattened pure
amplitudes. Internally it is handled as a tensor of shape (2, n, 2, n) so
that coin operators and the conditional shift act on single axes.

Noise strength p is the per-step flip/damp probability: p = 0 is the
noiseless walk, flip channels decohere most at p = 0.5 and amplitude
damping at p = 1.
"""

import logging
import math
from enum import Enum
from typing import List

import numpy as np
from pydantic import BaseModel, Field, validator

from ..core.config import settings
from ..core.exceptions import InvalidParameterError, InvariantViolationError
from .coin import (
    ArrayModel,
    CoinMatrix,
    PositionDistribution,
    PureWalkerState,
    _validate_steps,
    check_capacity,
    shift,
)

logger = logging.getLogger(__name__)

IDENTITY = np.eye(2, dtype=np.complex128)
PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)


class NoiseKind(str, Enum):
    NONE = "None"
    BIT_FLIP = "BitFlip"
    PHASE_FLIP = "PhaseFlip"
    AMPLITUDE_DAMPING = "AmplitudeDamping"


class NoiseOrder(str, Enum):
    """Where the channel sits relative to the unitary step W"""

    AFTER = "after"
    BEFORE = "before"


class NoiseModel(BaseModel):
    """
    Channel identity and per-step strength.

    p outside [0, 1] raises pydantic.ValidationError at construction;
    kraus_for raises InvalidParameterError for models built without validation.
    """

    kind: NoiseKind = NoiseKind.NONE
    p: float = 0.0
    order: NoiseOrder = Field(default_factory=lambda: NoiseOrder(settings.NOISE_ORDER))

    @validator("p")
    def _probability(cls, value: float) -> float:
        if not math.isfinite(value) or not 0.0 <= value <= 1.0:
            raise InvalidParameterError(f"noise strength p must lie in [0, 1], got {value}")
        return value

    @property
    def is_noiseless(self) -> bool:
        return self.kind == NoiseKind.NONE or self.p == 0.0

    class Config:
        allow_mutation = False
        extra = "forbid"


class KrausSet(ArrayModel):
    """Kraus operators of a coin channel; sum_k K^dagger K = I"""

    operators: List[np.ndarray]

    @validator("operators")
    def _complete(cls, value: List[np.ndarray]) -> List[np.ndarray]:
        if not value:
            raise InvalidParameterError("a Kraus set needs at least one operator")
        total = np.zeros((2, 2), dtype=np.complex128)
        for operator in value:
            if operator.shape != (2, 2):
                raise InvalidParameterError(f"Kraus operators act on the coin, got shape {operator.shape}")
            total += operator.conj().T @ operator
        deviation = np.max(np.abs(total - IDENTITY))
        if deviation > settings.KRAUS_TOLERANCE:
            raise InvalidParameterError(f"Kraus set is not complete (max deviation {deviation:.3e})")
        return value


class DensityWalkerState(ArrayModel):
    """Density matrix over coin x position, dimension 2(2R+1)"""

    radius: int
    rho: np.ndarray

    @validator("rho")
    def _shape_matches_radius(cls, value: np.ndarray, values: dict) -> np.ndarray:
        radius = values.get("radius")
        if radius is not None:
            dim = 2 * (2 * radius + 1)
            if value.shape != (dim, dim):
                raise InvalidParameterError(f"rho must have shape ({dim}, {dim}), got {value.shape}")
        return value

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.radius, self.radius + 1)

    def tensor(self) -> np.ndarray:
        n = 2 * self.radius + 1
        return self.rho.reshape(2, n, 2, n)

    def trace(self) -> float:
        return float(np.real(np.trace(self.rho)))


def kraus_for(model: NoiseModel) -> KrausSet:
    """Kraus operators of the coin channel; zero-weight operators are dropped"""
    p = model.p
    if not math.isfinite(p) or not 0.0 <= p <= 1.0:
        raise InvalidParameterError(f"noise strength p must lie in [0, 1], got {p}")

    if model.kind == NoiseKind.NONE:
        operators = [IDENTITY.copy()]
    elif model.kind in (NoiseKind.BIT_FLIP, NoiseKind.PHASE_FLIP):
        flip = PAULI_X if model.kind == NoiseKind.BIT_FLIP else PAULI_Z
        operators = [
            math.sqrt(weight) * matrix
            for weight, matrix in ((1.0 - p, IDENTITY), (p, flip))
            if weight > 0.0
        ]
    elif model.kind == NoiseKind.AMPLITUDE_DAMPING:
        operators = [np.array([[1, 0], [0, math.sqrt(1.0 - p)]], dtype=np.complex128)]
        if p > 0.0:
            operators.append(np.array([[0, math.sqrt(p)], [0, 0]], dtype=np.complex128))
    else:
        raise InvalidParameterError(f"Unknown noise kind: {model.kind}")

    return KrausSet(operators=operators)


def init_density_walker(pure: PureWalkerState) -> DensityWalkerState:
    """rho = |psi><psi|"""
    psi = pure.amplitudes.reshape(-1)
    return DensityWalkerState(radius=pure.radius, rho=np.outer(psi, psi.conj()))


def _conjugate_coin(operator: np.ndarray, rho4: np.ndarray) -> np.ndarray:
    """operator . rho . operator^dagger on the coin indices of a (2, n, 2, n) tensor"""
    left = np.einsum("ab,bjcl->ajcl", operator, rho4)
    return np.einsum("ajcl,dc->ajdl", left, operator.conj())


def _unitary_step(rho4: np.ndarray, coin: np.ndarray) -> np.ndarray:
    check_capacity(rho4)
    mixed = _conjugate_coin(coin, rho4)
    rows_shifted = shift(mixed)
    return shift(rows_shifted.transpose(2, 3, 0, 1)).transpose(2, 3, 0, 1)


def _apply_channel(rho4: np.ndarray, operators: List[np.ndarray]) -> np.ndarray:
    out = np.zeros_like(rho4)
    for operator in operators:
        out += _conjugate_coin(operator, rho4)
    return out


def _density_step(
    rho4: np.ndarray, coin: np.ndarray, operators: List[np.ndarray], order: NoiseOrder
) -> np.ndarray:
    if order == NoiseOrder.BEFORE:
        return _unitary_step(_apply_channel(rho4, operators), coin)
    return _apply_channel(_unitary_step(rho4, coin), operators)


def check_physical(state: DensityWalkerState) -> None:
    """Trace, Hermiticity and non-negative diagonal within tolerance"""
    rho = state.rho
    trace = np.trace(rho)
    if abs(trace - 1.0) > settings.TRACE_TOLERANCE:
        raise InvariantViolationError(f"trace drifted to {trace!r}")
    asymmetry = np.max(np.abs(rho - rho.conj().T))
    if asymmetry > settings.TRACE_TOLERANCE:
        raise InvariantViolationError(f"density matrix lost Hermiticity ({asymmetry:.3e})")
    smallest = float(np.min(np.real(np.diagonal(rho))))
    if smallest < -1e-10:
        raise InvariantViolationError(f"negative population {smallest:.3e} on the diagonal")


def step_density(
    state: DensityWalkerState,
    coin: CoinMatrix,
    kraus: KrausSet,
    order: NoiseOrder = NoiseOrder.AFTER,
) -> DensityWalkerState:
    """One noisy step: rho -> sum_k (K_k W) rho (K_k W)^dagger, K_k on the coin only"""
    n = 2 * state.radius + 1
    rho4 = _density_step(state.tensor(), coin.entries, kraus.operators, order)
    return DensityWalkerState(radius=state.radius, rho=rho4.reshape(2 * n, 2 * n))


def evolve_density(
    state: DensityWalkerState,
    coin: CoinMatrix,
    model: NoiseModel,
    steps: int,
) -> DensityWalkerState:
    """N noisy steps; the channel is applied once per step"""
    steps = _validate_steps(steps)
    if steps == 0:
        return state

    kraus = kraus_for(model)
    logger.debug(
        f"Evolving density walker: {model.kind.value} p={model.p} ({model.order.value}), "
        f"{steps} steps, radius {state.radius}"
    )
    n = 2 * state.radius + 1
    rho4 = state.tensor()
    for _ in range(steps):
        rho4 = _density_step(rho4, coin.entries, kraus.operators, model.order)
        check_physical(DensityWalkerState(radius=state.radius, rho=rho4.reshape(2 * n, 2 * n)))
    return DensityWalkerState(radius=state.radius, rho=rho4.reshape(2 * n, 2 * n))


def purity(state: DensityWalkerState) -> float:
    """tr(rho^2)"""
    return float(np.real(np.vdot(state.rho, state.rho)))


def coin_populations_density(state: DensityWalkerState) -> np.ndarray:
    """Diagonal populations per (coin, site), shape (2, 2R+1)"""
    n = 2 * state.radius + 1
    diagonal = np.diagonal(state.rho)
    if np.max(np.abs(np.imag(diagonal))) > 1e-12:
        raise InvariantViolationError("density matrix diagonal is not real")
    populations = np.real(diagonal).reshape(2, n)
    if np.min(populations) < -1e-10:
        raise InvariantViolationError(f"negative population {np.min(populations):.3e}")
    return np.clip(populations, 0.0, None)


def position_distribution_density(state: DensityWalkerState) -> PositionDistribution:
    """P(j) = sum_c rho[(c, j), (c, j)]"""
    return PositionDistribution(
        radius=state.radius, probs=coin_populations_density(state).sum(axis=0)
    )
