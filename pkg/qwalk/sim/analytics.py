"""
Walk analytics: moments, variance scaling fits, classical random-walk
baseline and the quantum/classical step-count comparison
"""

import logging
import math
from typing import List, Optional, Sequence

import numpy as np
from pydantic import BaseModel, validator
from scipy.stats import binom

from ..core.exceptions import FitError, InvalidParameterError
from .coin import (
    SYMMETRIC_COIN_STATE,
    CoinParams,
    CoinStateLike,
    PositionDistribution,
    _validate_steps,
    evolve_pure,
    init_pure_walker,
    make_coin,
    position_distribution,
)
from .lattice import DensityProfile, min_steps_full_overlap

logger = logging.getLogger(__name__)

MIN_FIT_POINTS = 3
MIN_FIT_MAX_STEPS = 50
ZERO_VARIANCE_TOLERANCE = 1e-20


class MomentReport(BaseModel):
    """Shape statistics of a position distribution (lattice units)"""

    mean: float
    variance: float
    second_moment: float
    excess_kurtosis: Optional[float] = None

    @validator("variance")
    def _non_negative(cls, value: float) -> float:
        if value < 0:
            raise ValueError("variance must be non-negative")
        return value


class ScalingFit(BaseModel):
    """Fit of variance = slope * N^2 through the origin"""

    theta: float
    slope: float
    r_squared: float
    steps: List[int]
    variances: List[float]

    @validator("r_squared")
    def _unit_interval(cls, value: float) -> float:
        if not 0.0 <= value <= 1.0:
            raise ValueError("r_squared must lie in [0, 1]")
        return value


class SpeedupReport(BaseModel):
    """Walk steps needed to spread M atoms over +-M/2, quantum vs classical"""

    atom_count: int
    theta: float
    qw_steps: int
    crw_steps: int
    ratio: float


def moments(dist: PositionDistribution) -> MomentReport:
    """Mean, central variance, second moment about the origin and excess kurtosis"""
    sites = dist.sites.astype(float)
    probs = dist.probs / dist.probs.sum()
    mean = float(np.dot(sites, probs))
    centred = sites - mean
    variance = float(np.dot(centred ** 2, probs))
    # rounding residue of a single occupied site
    if variance <= ZERO_VARIANCE_TOLERANCE * max(1.0, mean ** 2):
        variance = 0.0
    kurtosis = None
    if variance > 0.0:
        kurtosis = float(np.dot(centred ** 4, probs) / variance ** 2 - 3.0)
    return MomentReport(
        mean=mean,
        variance=variance,
        second_moment=float(np.dot(sites ** 2, probs)),
        excess_kurtosis=kurtosis,
    )


def profile_moments(profile: DensityProfile) -> MomentReport:
    """Moments of n_j / M"""
    return moments(profile.as_distribution())


def predicted_variance(theta: float, steps: int) -> float:
    """Asymptotic variance (1 - sin theta) N^2"""
    return (1.0 - math.sin(theta)) * steps ** 2


def variance_scaling_fit(
    theta: float,
    step_list: Sequence[int],
    xi: float = 0.0,
    zeta: float = 0.0,
    coin_state: CoinStateLike = SYMMETRIC_COIN_STATE,
) -> ScalingFit:
    """
    Least-squares slope c of variance = c N^2 (no intercept).

    One walk is evolved up to max(step_list) and sampled at each requested N.
    """
    try:
        steps = [_validate_steps(n) for n in step_list]
    except InvalidParameterError as e:
        raise FitError(f"invalid step list: {e}") from e
    checkpoints = sorted(set(steps))
    if len(checkpoints) < MIN_FIT_POINTS:
        raise FitError(f"need at least {MIN_FIT_POINTS} distinct step counts, got {checkpoints}")
    if checkpoints[-1] < MIN_FIT_MAX_STEPS:
        raise FitError(f"largest step count must be at least {MIN_FIT_MAX_STEPS}")

    coin = make_coin(CoinParams(xi=xi, theta=theta, zeta=zeta))
    horizon = checkpoints[-1]
    state = init_pure_walker(0, coin_state, horizon, horizon)

    variance_at = {}
    done = 0
    for target in checkpoints:
        state = evolve_pure(state, coin, target - done)
        done = target
        variance_at[target] = moments(position_distribution(state)).variance

    x = np.array([float(n) ** 2 for n in steps])
    y = np.array([variance_at[n] for n in steps])
    if not np.any(x):
        raise FitError("all step counts are zero")
    solution, *_ = np.linalg.lstsq(x[:, None], y, rcond=None)
    slope = float(solution[0])

    total = float(np.dot(y, y))
    residual = float(np.sum((y - slope * x) ** 2))
    r_squared = 1.0 if total == 0.0 else min(max(1.0 - residual / total, 0.0), 1.0)

    logger.debug(f"Variance fit theta={theta:.6f}: slope={slope:.6f}, r2={r_squared:.6f}")
    return ScalingFit(
        theta=theta,
        slope=slope,
        r_squared=r_squared,
        steps=steps,
        variances=[float(v) for v in y],
    )


def crw_distribution(steps: int) -> PositionDistribution:
    """Unbiased +-1 classical random walk: P(j) = C(N, (N+j)/2) / 2^N"""
    steps = _validate_steps(steps)
    k = np.arange(steps + 1)
    probs = np.zeros(2 * steps + 1)
    probs[2 * k] = binom.pmf(k, steps, 0.5)
    return PositionDistribution(radius=steps, probs=probs)


def speedup_report(atom_count: int, theta: float) -> SpeedupReport:
    """Quantum walk steps to full overlap vs M^2 classical steps"""
    if atom_count < 2:
        raise InvalidParameterError(f"speedup needs at least two atoms, got {atom_count}")
    qw_steps = min_steps_full_overlap(atom_count, theta)
    crw_steps = atom_count ** 2
    return SpeedupReport(
        atom_count=atom_count,
        theta=theta,
        qw_steps=qw_steps,
        crw_steps=crw_steps,
        ratio=qw_steps / crw_steps,
    )
