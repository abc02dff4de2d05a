"""
Walk simulation core
"""

from .analytics import (
    MomentReport,
    ScalingFit,
    SpeedupReport,
    crw_distribution,
    moments,
    predicted_variance,
    profile_moments,
    speedup_report,
    variance_scaling_fit,
)
from .coin import (
    SYMMETRIC_COIN_STATE,
    CoinMatrix,
    CoinParams,
    PositionDistribution,
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
from .lattice import (
    DensityProfile,
    EnsembleSpec,
    ProfileKind,
    ensemble_profile,
    init_ensemble,
    min_steps_full_overlap,
    overlap_window,
    predicted_spread,
    profile_support,
    uniformity,
)
from .noise import (
    DensityWalkerState,
    KrausSet,
    NoiseKind,
    NoiseModel,
    NoiseOrder,
    check_physical,
    coin_populations_density,
    evolve_density,
    init_density_walker,
    kraus_for,
    position_distribution_density,
    purity,
    step_density,
)
