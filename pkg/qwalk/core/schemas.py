"""
Experiment documents and result records
"""

import json
import math
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import numpy as np
from pydantic import BaseModel, Field, root_validator, validator

from ..sim.analytics import MomentReport, ScalingFit
from ..sim.coin import SYMMETRIC_COIN_STATE, CoinParams
from ..sim.lattice import ProfileKind
from ..sim.noise import NoiseKind, NoiseModel
from .config import settings

ANGLE_KEYS = ("xi", "theta", "zeta")


class AngleUnit(str, Enum):
    RAD = "rad"
    DEG = "deg"


class OutputKind(str, Enum):
    DISTRIBUTION = "distribution"
    PROFILE = "profile"
    MOMENTS = "moments"
    SCALING_FIT = "scaling_fit"
    SUPPORT = "support"
    UNIFORMITY = "uniformity"


class CoinConfig(BaseModel):
    """Coin angles; degrees are converted so the resolved config is in radians"""

    xi: float = 0.0
    theta: float = math.pi / 4
    zeta: float = 0.0
    unit: AngleUnit = AngleUnit.RAD

    @root_validator(pre=True)
    def _to_radians(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        values = dict(values)
        unit = values.get("unit", AngleUnit.RAD)
        if isinstance(unit, AngleUnit):
            unit = unit.value
        if unit == AngleUnit.DEG.value:
            for key in ANGLE_KEYS:
                if key in values:
                    try:
                        values[key] = math.radians(float(values[key]))
                    except (TypeError, ValueError):
                        raise ValueError(f"{key} must be a number of degrees")
            values["unit"] = AngleUnit.RAD.value
        return values

    @validator(*ANGLE_KEYS)
    def _finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("angles must be finite")
        return value

    def to_params(self) -> CoinParams:
        return CoinParams(xi=self.xi, theta=self.theta, zeta=self.zeta)

    class Config:
        extra = "forbid"


class SingleWalkerConfig(BaseModel):
    j0: int = 0
    # [[re, im], [re, im]]; defaults to (|0> + i|1>) / sqrt(2)
    coin_state: Optional[List[Tuple[float, float]]] = None

    @validator("coin_state")
    def _two_components(cls, value):
        if value is not None and len(value) != 2:
            raise ValueError("coin_state needs exactly two [re, im] components")
        return value

    def coin_vector(self) -> np.ndarray:
        if self.coin_state is None:
            return np.array(SYMMETRIC_COIN_STATE, dtype=np.complex128)
        return np.array([complex(re, im) for re, im in self.coin_state], dtype=np.complex128)

    class Config:
        extra = "forbid"


class EnsembleWalkerConfig(BaseModel):
    M: int = Field(..., ge=1, description="Number of atoms")
    profile: ProfileKind = ProfileKind.MOTT_INSULATOR

    class Config:
        extra = "forbid"


class WalkerConfig(BaseModel):
    single: Optional[SingleWalkerConfig] = None
    ensemble: Optional[EnsembleWalkerConfig] = None

    @root_validator(skip_on_failure=True)
    def _exactly_one_mode(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        single, ensemble = values.get("single"), values.get("ensemble")
        if single is not None and ensemble is not None:
            raise ValueError("walker must be either 'single' or 'ensemble', not both")
        if single is None and ensemble is None:
            values["single"] = SingleWalkerConfig()
        return values

    @property
    def mode(self) -> str:
        return "single" if self.single is not None else "ensemble"

    class Config:
        extra = "forbid"


class AnalysisConfig(BaseModel):
    epsilon: float = Field(default_factory=lambda: settings.SUPPORT_EPSILON, gt=0.0, lt=1.0)
    window: Optional[Tuple[int, int]] = None
    scaling_steps: List[int] = Field(default_factory=lambda: [25, 50, 75, 100])

    class Config:
        extra = "forbid"


class EmitSpec(BaseModel):
    csv_path: Optional[str] = None
    json_path: Optional[str] = None
    plot_script: Optional[str] = None
    plot_html: Optional[str] = None
    include_zero_rows: bool = Field(default_factory=lambda: settings.CSV_INCLUDE_ZERO_ROWS)

    class Config:
        extra = "forbid"


class ExperimentConfig(BaseModel):
    """A fully resolved experiment"""

    name: str = "experiment"
    coin: CoinConfig = Field(default_factory=CoinConfig)
    steps: int = Field(..., ge=0)
    walker: WalkerConfig = Field(default_factory=WalkerConfig)
    noise: NoiseModel = Field(default_factory=NoiseModel)
    outputs: List[OutputKind] = Field(default_factory=list)
    analysis: AnalysisConfig = Field(default_factory=AnalysisConfig)
    emit: EmitSpec = Field(default_factory=EmitSpec)

    @root_validator(skip_on_failure=True)
    def _consistent_outputs(cls, values: Dict[str, Any]) -> Dict[str, Any]:
        mode = values["walker"].mode
        outputs = list(dict.fromkeys(values["outputs"]))
        if not outputs:
            primary = OutputKind.DISTRIBUTION if mode == "single" else OutputKind.PROFILE
            outputs = [primary, OutputKind.MOMENTS]

        if mode == "ensemble":
            for kind in (OutputKind.DISTRIBUTION, OutputKind.SCALING_FIT):
                if kind in outputs:
                    raise ValueError(f"output '{kind.value}' requires a single walker")
        else:
            if OutputKind.PROFILE in outputs:
                raise ValueError("output 'profile' requires an ensemble walker")
            if OutputKind.SCALING_FIT in outputs and values["noise"].kind != NoiseKind.NONE:
                raise ValueError("output 'scaling_fit' requires a noiseless walk")
            if OutputKind.UNIFORMITY in outputs and values["analysis"].window is None:
                raise ValueError("output 'uniformity' for a single walker needs analysis.window")

        emit = values["emit"]
        has_table = OutputKind.DISTRIBUTION in outputs or OutputKind.PROFILE in outputs
        if (emit.csv_path or emit.plot_html) and not has_table:
            raise ValueError("CSV and HTML emission need a 'distribution' or 'profile' output")
        if emit.plot_script and not emit.csv_path:
            raise ValueError("plot_script references the CSV, so emit.csv_path is required")

        values["outputs"] = outputs
        return values

    @property
    def mode(self) -> str:
        return self.walker.mode

    def resolved(self) -> Dict[str, Any]:
        """Plain-JSON echo of the config with every default materialized"""
        return json.loads(self.json())

    class Config:
        extra = "forbid"


class ExperimentResult(BaseModel):
    """Everything a run produced, plus the config that produced it"""

    name: str
    mode: str
    config: Dict[str, Any]
    value_label: str
    positions: Optional[List[int]] = None
    series: Optional[List[float]] = None
    moments: Optional[MomentReport] = None
    scaling_fit: Optional[ScalingFit] = None
    support: Optional[Tuple[int, int]] = None
    uniformity: Optional[float] = None
