"""
Frozen experiment presets, one per reproduced figure
"""

import math
from typing import Callable, Dict, List

from ..core.exceptions import InvalidParameterError
from ..core.schemas import (
    CoinConfig,
    EnsembleWalkerConfig,
    ExperimentConfig,
    OutputKind,
    WalkerConfig,
)
from ..sim.lattice import ProfileKind
from ..sim.noise import NoiseKind, NoiseModel

ATOM_COUNT = 40
SINGLE_STEPS = 100
ENSEMBLE_STEPS = 40

SINGLE_OUTPUTS = [OutputKind.DISTRIBUTION, OutputKind.MOMENTS, OutputKind.SUPPORT]
ENSEMBLE_OUTPUTS = [
    OutputKind.PROFILE,
    OutputKind.MOMENTS,
    OutputKind.SUPPORT,
    OutputKind.UNIFORMITY,
]

# (label, kind, p)
NOISE_RUNS = [
    ("noiseless", NoiseKind.NONE, 0.0),
    ("phaseflip_0p02", NoiseKind.PHASE_FLIP, 0.02),
    ("phaseflip_0p1", NoiseKind.PHASE_FLIP, 0.1),
    ("ampdamp_0p2", NoiseKind.AMPLITUDE_DAMPING, 0.2),
]

BIASED_COINS = [
    ("xi30_theta30", math.pi / 6, math.pi / 6, 0.0),
    ("theta30_zeta30", 0.0, math.pi / 6, math.pi / 6),
    ("xi75_theta60", 5 * math.pi / 12, math.pi / 3, 0.0),
    ("theta60_zeta75", 0.0, math.pi / 3, 5 * math.pi / 12),
]


def _ensemble(profile: ProfileKind) -> WalkerConfig:
    return WalkerConfig(ensemble=EnsembleWalkerConfig(M=ATOM_COUNT, profile=profile))


def _fig1() -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name=f"fig1_theta{degrees}",
            coin=CoinConfig(theta=degrees, unit="deg"),
            steps=SINGLE_STEPS,
            outputs=SINGLE_OUTPUTS,
        )
        for degrees in (15, 45, 75)
    ]


def _fig2() -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name=f"fig2_{label}",
            coin=CoinConfig(xi=xi, theta=theta, zeta=zeta),
            steps=SINGLE_STEPS,
            outputs=SINGLE_OUTPUTS,
        )
        for label, xi, theta, zeta in BIASED_COINS
    ]


def _fig3(profile: ProfileKind, prefix: str) -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name=f"{prefix}_N{steps}",
            steps=steps,
            walker=_ensemble(profile),
            outputs=ENSEMBLE_OUTPUTS,
        )
        for steps in (0, 10, 25, 40)
    ]


def _noise_comparison(profile: ProfileKind, prefix: str) -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name=f"{prefix}_{label}",
            steps=ENSEMBLE_STEPS,
            walker=_ensemble(profile),
            noise=NoiseModel(kind=kind, p=p),
            outputs=ENSEMBLE_OUTPUTS,
        )
        for label, kind, p in NOISE_RUNS
    ]


def _theta_sweep(profile: ProfileKind, prefix: str) -> List[ExperimentConfig]:
    return [
        ExperimentConfig(
            name=f"{prefix}_theta{degrees}",
            coin=CoinConfig(theta=degrees, unit="deg"),
            steps=ENSEMBLE_STEPS,
            walker=_ensemble(profile),
            outputs=ENSEMBLE_OUTPUTS,
        )
        for degrees in (30, 45, 60)
    ]


PRESETS: Dict[str, Callable[[], List[ExperimentConfig]]] = {
    "fig1": _fig1,
    "fig2": _fig2,
    "fig3-mi": lambda: _fig3(ProfileKind.MOTT_INSULATOR, "fig3_mi"),
    "fig3-sf": lambda: _fig3(ProfileKind.SUPERFLUID, "fig3_sf"),
    "fig4": lambda: _noise_comparison(ProfileKind.MOTT_INSULATOR, "fig4"),
    "fig5": lambda: _noise_comparison(ProfileKind.SUPERFLUID, "fig5"),
    "fig-multi1": lambda: _theta_sweep(ProfileKind.MOTT_INSULATOR, "fig_multi1"),
    "fig-multi2": lambda: _theta_sweep(ProfileKind.SUPERFLUID, "fig_multi2"),
}

PRESET_DESCRIPTIONS = {
    "fig1": "single walker, Hadamard-family coins theta = 15, 45, 75 deg, N = 100",
    "fig2": "single walker, four biased coins, N = 100",
    "fig3-mi": "Mott insulator M = 40, Hadamard, N = 0, 10, 25, 40",
    "fig3-sf": "superfluid M = 40, Hadamard, N = 0, 10, 25, 40",
    "fig4": "Mott insulator M = N = 40 under phase flip and amplitude damping",
    "fig5": "superfluid M = N = 40 under phase flip and amplitude damping",
    "fig-multi1": "Mott insulator M = N = 40, theta = 30, 45, 60 deg",
    "fig-multi2": "superfluid M = N = 40, theta = 30, 45, 60 deg",
}


def preset_names() -> List[str]:
    return list(PRESETS)


def build_preset(name: str) -> List[ExperimentConfig]:
    """Configs of a frozen preset, in a fixed order"""
    try:
        factory = PRESETS[name]
    except KeyError:
        raise InvalidParameterError(
            f"Unknown preset '{name}'; available: {', '.join(PRESETS)}"
        ) from None
    return factory()
