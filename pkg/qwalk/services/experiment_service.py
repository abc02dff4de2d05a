"""
Experiment Service
Parses experiment documents and runs single-walker and ensemble experiments
"""

import asyncio
import json
import logging
import math
import re
from concurrent.futures import ThreadPoolExecutor
from typing import Any, Dict, List, Optional, Sequence

from pydantic import ValidationError

from ..core.config import settings
from ..core.exceptions import ConfigParseError, ExperimentError, InvalidParameterError
from ..core.schemas import (
    AngleUnit,
    CoinConfig,
    EnsembleWalkerConfig,
    ExperimentConfig,
    ExperimentResult,
    OutputKind,
    WalkerConfig,
)
from ..sim.analytics import (
    moments,
    predicted_variance,
    profile_moments,
    variance_scaling_fit,
)
from ..sim.coin import (
    PositionDistribution,
    evolve_pure,
    init_pure_walker,
    make_coin,
    position_distribution,
)
from ..sim.lattice import (
    DensityProfile,
    ensemble_profile,
    init_ensemble,
    profile_support,
    uniformity,
)
from ..sim.noise import (
    NoiseModel,
    evolve_density,
    init_density_walker,
    position_distribution_density,
)
from .presets import build_preset

logger = logging.getLogger(__name__)

SUMMARY_COLUMNS = [
    "theta",
    "steps",
    "mean",
    "variance",
    "second_moment",
    "excess_kurtosis",
    "predicted_variance",
    "crw_variance",
]


def _locate_key(text: str, path: Sequence[str]) -> Optional[int]:
    """Line of the last key in `path`, searching each key after its parent"""
    position = 0
    for key in path:
        match = re.compile(rf'"{re.escape(key)}"\s*:').search(text, position)
        if match is None:
            return None
        position = match.start()
    return text.count("\n", 0, position) + 1


def parse_config(text: str) -> ExperimentConfig:
    """Validate a JSON experiment document and materialize its defaults"""
    try:
        document = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigParseError(f"Malformed JSON: {e.msg}", field="<document>", line=e.lineno) from e

    if not isinstance(document, dict):
        raise ConfigParseError("An experiment document must be a JSON object", field="<document>", line=1)

    try:
        return ExperimentConfig.parse_obj(document)
    except ValidationError as e:
        # value errors first, missing keys last
        errors = sorted(e.errors(), key=lambda error: error["type"] == "value_error.missing")
        fields = []
        problems = []
        lines = []
        for error in errors:
            loc = [str(part) for part in error["loc"] if part != "__root__"]
            field = ".".join(loc) or "<document>"
            line = _locate_key(text, loc) if loc else None
            fields.append(field)
            lines.append(line)
            problems.append(f"{field}: {error['msg']}" + (f" (line {line})" if line is not None else ""))
        raise ConfigParseError(
            f"Invalid experiment config: {'; '.join(problems)}",
            field=fields[0],
            line=lines[0],
            fields=fields,
        ) from e


def _single_distribution(config: ExperimentConfig) -> PositionDistribution:
    single = config.walker.single
    coin = make_coin(config.coin.to_params())
    radius = abs(single.j0) + config.steps
    walker = init_pure_walker(single.j0, single.coin_vector(), radius, config.steps)
    if config.noise.is_noiseless:
        return position_distribution(evolve_pure(walker, coin, config.steps))
    evolved = evolve_density(init_density_walker(walker), coin, config.noise, config.steps)
    return position_distribution_density(evolved)


def _run_single(config: ExperimentConfig) -> Dict[str, Any]:
    dist = _single_distribution(config)
    # support and uniformity are shared with ensembles via a one-atom profile
    as_profile = DensityProfile(radius=dist.radius, n=dist.probs)
    outputs = config.outputs
    record: Dict[str, Any] = {"value_label": "probability"}

    if OutputKind.DISTRIBUTION in outputs:
        record["positions"] = [int(j) for j in dist.sites]
        record["series"] = [float(p) for p in dist.probs]
    if OutputKind.MOMENTS in outputs:
        record["moments"] = moments(dist)
    if OutputKind.SCALING_FIT in outputs:
        single = config.walker.single
        record["scaling_fit"] = variance_scaling_fit(
            config.coin.theta,
            config.analysis.scaling_steps,
            xi=config.coin.xi,
            zeta=config.coin.zeta,
            coin_state=single.coin_vector(),
        )
    if OutputKind.SUPPORT in outputs:
        record["support"] = profile_support(as_profile, config.analysis.epsilon)
    if OutputKind.UNIFORMITY in outputs:
        record["uniformity"] = uniformity(as_profile, config.analysis.window)
    return record


def _run_ensemble(config: ExperimentConfig) -> Dict[str, Any]:
    ensemble = config.walker.ensemble
    spec = init_ensemble(ensemble.M, ensemble.profile)
    profile = ensemble_profile(spec, config.coin.to_params(), config.noise, config.steps)
    outputs = config.outputs
    record: Dict[str, Any] = {"value_label": "n_j"}

    if OutputKind.PROFILE in outputs:
        record["positions"] = [int(j) for j in profile.sites]
        record["series"] = [float(n) for n in profile.n]
    if OutputKind.MOMENTS in outputs:
        record["moments"] = profile_moments(profile)
    if OutputKind.SUPPORT in outputs:
        record["support"] = profile_support(profile, config.analysis.epsilon)
    if OutputKind.UNIFORMITY in outputs:
        window = config.analysis.window or (-(ensemble.M // 2), ensemble.M // 2)
        record["uniformity"] = uniformity(profile, window)
    return record


def run_experiment(config: ExperimentConfig) -> ExperimentResult:
    """Run one experiment; identical configs give identical results"""
    logger.info(f"Running experiment '{config.name}' ({config.mode}, N={config.steps})")
    logger.debug(f"Resolved config: {config.json()}")
    try:
        if config.mode == "single":
            record = _run_single(config)
        else:
            record = _run_ensemble(config)
    except Exception as e:
        logger.error(f"Error running experiment '{config.name}': {str(e)}")
        raise ExperimentError(config.name, e) from e

    logger.info(f"Experiment '{config.name}' finished")
    return ExperimentResult(
        name=config.name,
        mode=config.mode,
        config=config.resolved(),
        **record,
    )


def _theta_label(theta_deg: float) -> str:
    return f"{theta_deg:g}".replace(".", "p").replace("-", "m")


def sweep_configs(
    thetas: Sequence[float],
    steps: int,
    unit: AngleUnit = AngleUnit.DEG,
    noise: Optional[NoiseModel] = None,
    ensemble: Optional[EnsembleWalkerConfig] = None,
) -> List[ExperimentConfig]:
    """One config per theta, sharing steps, noise and walker"""
    if not thetas:
        raise InvalidParameterError("a sweep needs at least one theta")
    unit = AngleUnit(unit)
    configs = []
    for theta in thetas:
        theta_deg = theta if unit == AngleUnit.DEG else math.degrees(theta)
        walker = WalkerConfig(ensemble=ensemble) if ensemble is not None else WalkerConfig()
        primary = OutputKind.PROFILE if ensemble is not None else OutputKind.DISTRIBUTION
        configs.append(
            ExperimentConfig(
                name=f"sweep_theta{_theta_label(theta_deg)}",
                coin=CoinConfig(theta=theta, unit=unit),
                steps=steps,
                walker=walker,
                noise=noise or NoiseModel(),
                outputs=[primary, OutputKind.MOMENTS],
            )
        )
    return configs


def summarize(results: Sequence[ExperimentResult]) -> List[Dict[str, Any]]:
    """One row per result: moments next to the (1 - sin theta) N^2 and classical N predictions"""
    rows = []
    for result in results:
        if result.moments is None:
            raise InvalidParameterError(f"result '{result.name}' has no moments to summarize")
        theta = float(result.config["coin"]["theta"])
        steps = int(result.config["steps"])
        rows.append(
            {
                "theta": theta,
                "steps": steps,
                "mean": result.moments.mean,
                "variance": result.moments.variance,
                "second_moment": result.moments.second_moment,
                "excess_kurtosis": result.moments.excess_kurtosis,
                "predicted_variance": predicted_variance(theta, steps),
                "crw_variance": float(steps),
            }
        )
    return rows


class ExperimentService:
    """Runs independent experiments concurrently on a thread pool"""

    def __init__(self, max_workers: Optional[int] = None):
        self.max_workers = max_workers or settings.THREADS
        self.executor = ThreadPoolExecutor(max_workers=self.max_workers)

    async def run(self, config: ExperimentConfig) -> ExperimentResult:
        return await asyncio.get_event_loop().run_in_executor(
            self.executor, run_experiment, config
        )

    async def run_many(self, configs: Sequence[ExperimentConfig]) -> List[ExperimentResult]:
        """Results come back in input order"""
        logger.info(f"Running {len(configs)} experiments on {self.max_workers} threads")
        return list(await asyncio.gather(*(self.run(config) for config in configs)))

    async def run_preset(self, name: str) -> List[ExperimentResult]:
        try:
            configs = build_preset(name)
        except Exception as e:
            logger.error(f"Error building preset '{name}': {str(e)}")
            raise
        return await self.run_many(configs)

    async def sweep(
        self,
        thetas: Sequence[float],
        steps: int,
        unit: AngleUnit = AngleUnit.DEG,
        noise: Optional[NoiseModel] = None,
        ensemble: Optional[EnsembleWalkerConfig] = None,
    ) -> List[ExperimentResult]:
        configs = sweep_configs(thetas, steps, unit=unit, noise=noise, ensemble=ensemble)
        return await self.run_many(configs)

    def shutdown(self) -> None:
        self.executor.shutdown(wait=True)
