"""
Tests for experiment execution, presets and the async service
"""

import math

import pytest

from qwalk.core.exceptions import (
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    ExperimentError,
    FitError,
    InvalidParameterError,
)
from qwalk.core.schemas import EnsembleWalkerConfig, OutputKind
from qwalk.services.experiment_service import (
    SUMMARY_COLUMNS,
    ExperimentService,
    parse_config,
    run_experiment,
    summarize,
    sweep_configs,
)
from qwalk.services.presets import PRESET_DESCRIPTIONS, build_preset, preset_names
from qwalk.sim.noise import NoiseKind, NoiseModel


@pytest.fixture
def service():
    service = ExperimentService(max_workers=2)
    yield service
    service.shutdown()


def test_two_step_hadamard_run():
    result = run_experiment(parse_config('{"name": "two", "steps": 2}'))
    assert result.name == "two"
    assert result.mode == "single"
    assert result.value_label == "probability"
    assert result.positions == [-2, -1, 0, 1, 2]
    assert result.series == pytest.approx([0.25, 0.0, 0.5, 0.0, 0.25])
    assert result.moments.variance == pytest.approx(2.0)
    assert result.config["steps"] == 2


def test_zero_step_run_reports_a_sharp_delta():
    result = run_experiment(parse_config('{"steps": 0, "walker": {"single": {"j0": 5}}}'))
    probabilities = dict(zip(result.positions, result.series))
    assert probabilities[5] == pytest.approx(1.0)
    assert result.moments.mean == pytest.approx(5.0)
    assert result.moments.variance == 0.0
    assert result.moments.excess_kurtosis is None
    assert '"excess_kurtosis": null' in result.json()


def test_identical_configs_give_identical_output():
    text = '{"steps": 30, "coin": {"theta": 30, "unit": "deg"}, "noise": {"kind": "BitFlip", "p": 0.05}}'
    first = run_experiment(parse_config(text))
    second = run_experiment(parse_config(text))
    assert first.json(sort_keys=True) == second.json(sort_keys=True)


def test_walker_off_origin():
    result = run_experiment(parse_config('{"steps": 1, "walker": {"single": {"j0": -3}}}'))
    assert result.positions[0] == -4
    probabilities = dict(zip(result.positions, result.series))
    assert probabilities[-4] == pytest.approx(0.5)
    assert probabilities[-2] == pytest.approx(0.5)


def test_noisy_single_walker_uses_density_path():
    result = run_experiment(
        parse_config('{"steps": 40, "noise": {"kind": "PhaseFlip", "p": 0.5}}')
    )
    assert result.moments.variance == pytest.approx(40.0, abs=1e-6)


def test_superfluid_ensemble_run():
    result = run_experiment(
        parse_config(
            '{"steps": 25, "walker": {"ensemble": {"M": 40, "profile": "SF"}},'
            ' "outputs": ["profile", "moments", "support", "uniformity"]}'
        )
    )
    assert result.mode == "ensemble"
    assert result.value_label == "n_j"
    assert sum(result.series) == pytest.approx(40.0)
    assert result.uniformity <= 0.25
    low, high = result.support
    assert low < -20 and high > 20


def test_scaling_fit_output():
    result = run_experiment(parse_config('{"steps": 0, "outputs": ["scaling_fit"]}'))
    assert result.positions is None
    assert result.scaling_fit.slope == pytest.approx(0.294, abs=2e-3)


def test_failures_are_wrapped_with_the_run_name():
    config = parse_config(
        '{"name": "short-fit", "steps": 5, "outputs": ["scaling_fit"],'
        ' "analysis": {"scaling_steps": [10, 20, 30]}}'
    )
    with pytest.raises(ExperimentError) as info:
        run_experiment(config)
    assert info.value.name == "short-fit"
    assert isinstance(info.value.cause, FitError)
    assert info.value.exit_code == EXIT_RUNTIME


def test_unnormalized_coin_state_is_a_validation_failure():
    config = parse_config('{"steps": 2, "walker": {"single": {"coin_state": [[1, 0], [1, 0]]}}}')
    with pytest.raises(ExperimentError) as info:
        run_experiment(config)
    assert info.value.exit_code == EXIT_VALIDATION


def test_preset_catalogue():
    assert preset_names() == [
        "fig1",
        "fig2",
        "fig3-mi",
        "fig3-sf",
        "fig4",
        "fig5",
        "fig-multi1",
        "fig-multi2",
    ]
    assert set(PRESET_DESCRIPTIONS) == set(preset_names())
    with pytest.raises(InvalidParameterError):
        build_preset("fig9")


def test_noise_presets_are_frozen():
    for name, profile in (("fig4", "MottInsulator"), ("fig5", "Superfluid")):
        configs = build_preset(name)
        assert [(c.noise.kind, c.noise.p) for c in configs] == [
            (NoiseKind.NONE, 0.0),
            (NoiseKind.PHASE_FLIP, 0.02),
            (NoiseKind.PHASE_FLIP, 0.1),
            (NoiseKind.AMPLITUDE_DAMPING, 0.2),
        ]
        for config in configs:
            assert config.steps == 40
            assert config.walker.ensemble.M == 40
            assert config.walker.ensemble.profile.value == profile


def test_theta_sweep_presets():
    thetas = [config.coin.theta for config in build_preset("fig-multi2")]
    assert thetas == pytest.approx([math.pi / 6, math.pi / 4, math.pi / 3])


def test_preset_names_are_unique_per_run():
    for name in preset_names():
        runs = [config.name for config in build_preset(name)]
        assert len(runs) == len(set(runs))


@pytest.mark.asyncio
async def test_fig1_widths_strictly_decrease(service):
    results = await service.run_preset("fig1")
    assert [r.name for r in results] == ["fig1_theta15", "fig1_theta45", "fig1_theta75"]
    variances = [r.moments.variance for r in results]
    assert variances[0] > variances[1] > variances[2]
    widths = [r.support[1] - r.support[0] for r in results]
    assert widths[0] > widths[1] > widths[2]


@pytest.mark.asyncio
async def test_fig2_biased_means(service):
    results = await service.run_preset("fig2")
    means = [r.moments.mean for r in results]
    assert means == pytest.approx([-14.64, 14.64, -22.69, 22.69], abs=0.05)


@pytest.mark.asyncio
async def test_fig3_mott_insulator_support_grows(service):
    results = await service.run_preset("fig3-mi")
    assert [r.config["steps"] for r in results] == [0, 10, 25, 40]
    widths = [r.support[1] - r.support[0] for r in results]
    assert widths == sorted(widths)
    for result in results:
        assert sum(result.series) == pytest.approx(40.0)


@pytest.mark.asyncio
async def test_run_many_preserves_order(service):
    configs = [parse_config(f'{{"name": "n{n}", "steps": {n}}}') for n in (9, 1, 5, 3)]
    results = await service.run_many(configs)
    assert [r.name for r in results] == ["n9", "n1", "n5", "n3"]


@pytest.mark.asyncio
async def test_concurrent_runs_match_serial_runs(service):
    configs = build_preset("fig-multi1")
    concurrent = await service.run_many(configs)
    serial = [run_experiment(config) for config in configs]
    assert [r.json() for r in concurrent] == [r.json() for r in serial]


@pytest.mark.asyncio
async def test_sweep_and_summary(service):
    results = await service.sweep([15, 45, 75], 50)
    rows = summarize(results)
    assert [set(row) for row in rows] == [set(SUMMARY_COLUMNS)] * 3
    assert rows[1]["theta"] == pytest.approx(math.pi / 4)
    assert rows[1]["crw_variance"] == 50.0
    for row in rows:
        assert row["variance"] == pytest.approx(row["predicted_variance"], rel=0.1)


def test_sweep_configs_for_noisy_ensembles():
    configs = sweep_configs(
        [0.5, 1.0],
        10,
        unit="rad",
        noise=NoiseModel(kind=NoiseKind.PHASE_FLIP, p=0.1),
        ensemble=EnsembleWalkerConfig(M=4, profile="SF"),
    )
    assert [c.coin.theta for c in configs] == [0.5, 1.0]
    assert all(c.outputs == [OutputKind.PROFILE, OutputKind.MOMENTS] for c in configs)
    assert configs[0].name != configs[1].name
    with pytest.raises(InvalidParameterError):
        sweep_configs([], 10)
