"""
Lattice ensembles: Mott-insulator and superfluid starting profiles of M
atoms, their walk evolution and the resulting density profile n_j.

Atoms do not interact while walking, so the profile is the sum of the
single-atom position distributions, both internal states included.
"""

import logging
import math
from concurrent.futures import Executor
from enum import Enum
from typing import List, Optional, Sequence, Tuple

import numpy as np
from pydantic import BaseModel, validator

from ..core.exceptions import InvalidParameterError, InvariantViolationError, UndefinedQuantityError
from .coin import (
    SYMMETRIC_COIN_STATE,
    ArrayModel,
    CoinMatrix,
    CoinParams,
    CoinStateLike,
    PositionDistribution,
    PureWalkerState,
    _validate_steps,
    coin_populations,
    evolve_pure,
    init_delocalized_walker,
    init_pure_walker,
    make_coin,
)
from .noise import NoiseModel, coin_populations_density, evolve_density, init_density_walker

logger = logging.getLogger(__name__)


class ProfileKind(str, Enum):
    MOTT_INSULATOR = "MottInsulator"
    SUPERFLUID = "Superfluid"

    @classmethod
    def _missing_(cls, value):
        aliases = {"mi": cls.MOTT_INSULATOR, "sf": cls.SUPERFLUID}
        if isinstance(value, str):
            lowered = value.lower()
            if lowered in aliases:
                return aliases[lowered]
            for member in cls:
                if member.value.lower() == lowered:
                    return member
        return None


class EnsembleSpec(BaseModel):
    """M atoms on M consecutive sites centred at 0"""

    atom_count: int
    initial_profile: ProfileKind

    @validator("atom_count")
    def _at_least_one_atom(cls, value: int) -> int:
        if value < 1:
            raise InvalidParameterError(f"an ensemble needs at least one atom, got {value}")
        return value

    @property
    def occupied_sites(self) -> Tuple[int, int]:
        """Inclusive site interval -ceil(M/2)+1 .. floor(M/2)"""
        return -math.ceil(self.atom_count / 2) + 1, self.atom_count // 2

    @property
    def sites(self) -> List[int]:
        low, high = self.occupied_sites
        return list(range(low, high + 1))

    class Config:
        allow_mutation = False


class DensityProfile(ArrayModel):
    """Expected atom number n_j on sites j = -R..R"""

    radius: int
    n: np.ndarray
    by_internal_state: Optional[np.ndarray] = None

    @validator("n")
    def _non_negative(cls, value: np.ndarray, values: dict) -> np.ndarray:
        radius = values.get("radius")
        if radius is not None and value.shape != (2 * radius + 1,):
            raise InvalidParameterError(f"n must have shape ({2 * radius + 1},), got {value.shape}")
        if np.any(value < 0):
            raise InvariantViolationError("atom numbers must be non-negative")
        return value

    @property
    def sites(self) -> np.ndarray:
        return np.arange(-self.radius, self.radius + 1)

    def total(self) -> float:
        return float(np.sum(self.n))

    def atoms_at(self, site: int) -> float:
        if abs(site) > self.radius:
            return 0.0
        return float(self.n[site + self.radius])

    def as_distribution(self) -> PositionDistribution:
        """n_j / M as a position distribution"""
        total = self.total()
        if total <= 0.0:
            raise UndefinedQuantityError("an empty profile has no distribution")
        return PositionDistribution(radius=self.radius, probs=self.n / total)


def init_ensemble(atom_count: int, profile) -> EnsembleSpec:
    """MI: one atom per site; SF: every atom delocalized over the same sites"""
    if atom_count < 1:
        raise InvalidParameterError(f"an ensemble needs at least one atom, got {atom_count}")
    return EnsembleSpec(atom_count=atom_count, initial_profile=ProfileKind(profile))


def _evolved_populations(
    walker: PureWalkerState, coin: CoinMatrix, noise: NoiseModel, steps: int
) -> np.ndarray:
    if noise.is_noiseless:
        return coin_populations(evolve_pure(walker, coin, steps))
    evolved = evolve_density(init_density_walker(walker), coin, noise, steps)
    return coin_populations_density(evolved)


def _per_atom_populations(
    spec: EnsembleSpec,
    coin: CoinMatrix,
    noise: NoiseModel,
    steps: int,
    radius: int,
    coin_state: CoinStateLike,
    executor: Optional[Executor],
) -> np.ndarray:
    """Naive path: one walk per atom, summed in atom order"""
    if spec.initial_profile == ProfileKind.MOTT_INSULATOR:
        def walk(site: int) -> np.ndarray:
            walker = init_pure_walker(site, coin_state, radius, steps)
            return _evolved_populations(walker, coin, noise, steps)
        jobs = spec.sites
    else:
        def walk(_: int) -> np.ndarray:
            walker = init_delocalized_walker(spec.sites, coin_state, radius, steps)
            return _evolved_populations(walker, coin, noise, steps)
        jobs = range(spec.atom_count)

    results = executor.map(walk, jobs) if executor is not None else map(walk, jobs)
    total = np.zeros((2, 2 * radius + 1))
    for populations in results:
        total += populations
    return total


def _shared_populations(
    spec: EnsembleSpec,
    coin: CoinMatrix,
    noise: NoiseModel,
    steps: int,
    radius: int,
    coin_state: CoinStateLike,
) -> np.ndarray:
    """Fast path: evolve one walker and reuse it for every atom"""
    total = np.zeros((2, 2 * radius + 1))
    if spec.initial_profile == ProfileKind.MOTT_INSULATOR:
        # every atom is the origin walk translated to its start site
        base = _evolved_populations(init_pure_walker(0, coin_state, steps, steps), coin, noise, steps)
        for site in spec.sites:
            start = site - steps + radius
            total[:, start:start + 2 * steps + 1] += base
        return total

    walker = init_delocalized_walker(spec.sites, coin_state, radius, steps)
    total += spec.atom_count * _evolved_populations(walker, coin, noise, steps)
    return total


def ensemble_profile(
    spec: EnsembleSpec,
    coin: CoinParams,
    noise: NoiseModel,
    steps: int,
    naive: bool = False,
    executor: Optional[Executor] = None,
    resolve_internal: bool = False,
    coin_state: CoinStateLike = SYMMETRIC_COIN_STATE,
) -> DensityProfile:
    """Density profile n_j of the ensemble after N walk steps"""
    steps = _validate_steps(steps)
    low, high = spec.occupied_sites
    radius = max(abs(low), abs(high)) + steps
    coin_matrix = make_coin(coin)

    logger.debug(
        f"Ensemble profile: M={spec.atom_count} {spec.initial_profile.value}, N={steps}, "
        f"noise={noise.kind.value} p={noise.p}, naive={naive}"
    )
    if naive:
        populations = _per_atom_populations(
            spec, coin_matrix, noise, steps, radius, coin_state, executor
        )
    else:
        populations = _shared_populations(spec, coin_matrix, noise, steps, radius, coin_state)

    return DensityProfile(
        radius=radius,
        n=populations.sum(axis=0),
        by_internal_state=populations if resolve_internal else None,
    )


def _check_theta(theta: float) -> float:
    if not math.isfinite(theta) or theta < 0.0 or theta > math.pi / 2:
        raise InvalidParameterError(f"theta must lie in [0, pi/2), got {theta}")
    cos_theta = math.cos(theta)
    if cos_theta <= 1e-12:
        raise UndefinedQuantityError("cos(theta) = 0: the walk never spreads, overlap is undefined")
    return cos_theta


def min_steps_full_overlap(atom_count: int, theta: float) -> int:
    """Smallest N with N >= (M/2) / cos(theta)"""
    if atom_count < 0:
        raise InvalidParameterError(f"atom count must be non-negative, got {atom_count}")
    cos_theta = _check_theta(theta)
    return int(math.ceil((atom_count / 2) / cos_theta - 1e-9))


def predicted_spread(atom_count: int, steps: int, theta: float) -> float:
    """Half-width M/2 + N cos(theta) the profile spreads over"""
    return atom_count / 2 + steps * math.cos(theta)


def overlap_window(atom_count: int, theta: float) -> float:
    """Half-width M cos(theta) / 2 of the full-overlap region at N = M"""
    return atom_count * math.cos(theta) / 2


def profile_support(profile: DensityProfile, epsilon: float) -> Tuple[int, int]:
    """
    Narrowest site interval holding (1 - epsilon) of the atoms.

    Ties go to the most centred interval, then to the leftmost one.
    """
    if not 0.0 < epsilon < 1.0:
        raise InvalidParameterError(f"epsilon must lie in (0, 1), got {epsilon}")
    total = profile.total()
    if total <= 0.0:
        raise UndefinedQuantityError("an empty profile has no support")

    prefix = np.concatenate(([0.0], np.cumsum(profile.n)))
    target = (1.0 - epsilon) * total - 1e-12 * total
    starts = np.arange(len(profile.n))
    ends = np.searchsorted(prefix, prefix[:-1] + target, side="left") - 1
    valid = (ends < len(profile.n)) & (ends >= starts)
    starts, ends = starts[valid], ends[valid]

    low = starts - profile.radius
    high = ends - profile.radius
    order = np.lexsort((low, np.abs(low + high), high - low))
    best = order[0]
    return int(low[best]), int(high[best])


def uniformity(profile: DensityProfile, window: Sequence[int]) -> float:
    """Coefficient of variation (population std / mean) of n_j over the window"""
    low, high = int(window[0]), int(window[1])
    if high < low:
        raise UndefinedQuantityError(f"empty window [{low}, {high}]")
    if low < -profile.radius or high > profile.radius:
        raise InvalidParameterError(
            f"window [{low}, {high}] exceeds the profile radius {profile.radius}"
        )
    values = profile.n[low + profile.radius:high + profile.radius + 1]
    mean = float(np.mean(values))
    if mean == 0.0:
        raise UndefinedQuantityError(f"no atoms inside window [{low}, {high}]")
    return float(np.std(values) / mean)
