"""
QWalk Lattice command line
Commands: run <config.json>, preset <name> --out <dir>, sweep --theta-grid ... --steps ...
"""

import argparse
import asyncio
import logging
import os
import sys
from typing import List, Optional, Sequence

from pydantic import ValidationError

from ..core.config import settings
from ..core.exceptions import (
    EXIT_OK,
    EXIT_RUNTIME,
    EXIT_VALIDATION,
    ConfigParseError,
    ExperimentError,
    InvalidParameterError,
    QWalkError,
)
from ..core.schemas import AngleUnit, EnsembleWalkerConfig
from ..services.emit_service import EmitService
from ..services.experiment_service import ExperimentService, parse_config, run_experiment, summarize
from ..services.presets import PRESET_DESCRIPTIONS, preset_names
from ..sim.noise import NoiseKind, NoiseModel

logger = logging.getLogger(__name__)


def exit_code_for(exc: BaseException) -> int:
    """Map an exception to the process exit code"""
    if isinstance(exc, ExperimentError):
        return exit_code_for(exc.cause)
    if isinstance(exc, QWalkError):
        return exc.exit_code
    if isinstance(exc, ValidationError):
        return EXIT_VALIDATION
    return EXIT_RUNTIME


def configure_logging() -> None:
    level = logging.DEBUG if settings.DEBUG else getattr(logging, settings.LOG_LEVEL.upper(), logging.INFO)
    logging.basicConfig(
        level=level,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )


def parse_theta_grid(text: str) -> List[float]:
    try:
        values = [float(part) for part in text.split(",") if part.strip()]
    except ValueError:
        raise InvalidParameterError(f"--theta-grid must be comma-separated numbers, got '{text}'") from None
    if not values:
        raise InvalidParameterError("--theta-grid needs at least one value")
    return values


def parse_noise(text: Optional[str]) -> Optional[NoiseModel]:
    """Kind:p, e.g. PhaseFlip:0.1"""
    if not text:
        return None
    kind, _, p = text.partition(":")
    try:
        return NoiseModel(kind=NoiseKind(kind), p=float(p) if p else 0.0)
    except ValueError as e:
        raise InvalidParameterError(f"--noise must look like Kind:p, got '{text}' ({e})") from None


def parse_ensemble(text: Optional[str]) -> Optional[EnsembleWalkerConfig]:
    """M:profile, e.g. 40:MI"""
    if not text:
        return None
    count, _, profile = text.partition(":")
    try:
        return EnsembleWalkerConfig(M=int(count), profile=profile or "MI")
    except ValueError as e:
        raise InvalidParameterError(f"--ensemble must look like M:profile, got '{text}' ({e})") from None


def cmd_run(args: argparse.Namespace) -> int:
    try:
        with open(args.config, encoding="utf-8") as handle:
            text = handle.read()
    except OSError as e:
        raise ConfigParseError(f"Cannot read config ({e.strerror})", field="<document>") from e

    config = parse_config(text)
    print(f"🚀 Running '{config.name}' ({config.mode}, N={config.steps})")
    result = run_experiment(config)

    written = EmitService().emit(result, config.emit)
    if written:
        for path in written:
            print(f"📄 {path}")
    else:
        print(result.json(indent=2, sort_keys=True))
    print("✅ Done")
    return EXIT_OK


def cmd_preset(args: argparse.Namespace) -> int:
    if args.list:
        for name in preset_names():
            print(f"{name:12s} {PRESET_DESCRIPTIONS[name]}")
        return EXIT_OK
    if not args.name:
        raise InvalidParameterError("preset needs a name (or --list)")

    out_dir = args.out or os.path.join(settings.OUTPUT_DIR, args.name)
    print(f"🚀 Running preset '{args.name}'")
    service = ExperimentService()
    try:
        results = asyncio.run(service.run_preset(args.name))
    finally:
        service.shutdown()

    written = EmitService().emit_batch(results, out_dir, args.name.replace("-", "_"), html=args.html)
    print(f"✅ {len(results)} runs, {len(written)} files in {out_dir}")
    return EXIT_OK


def cmd_sweep(args: argparse.Namespace) -> int:
    thetas = parse_theta_grid(args.theta_grid)
    noise = parse_noise(args.noise)
    ensemble = parse_ensemble(args.ensemble)
    out_dir = args.out or os.path.join(settings.OUTPUT_DIR, "sweep")

    print(f"🚀 Sweeping {len(thetas)} coin angles at N={args.steps}")
    service = ExperimentService()
    try:
        results = asyncio.run(
            service.sweep(thetas, args.steps, unit=AngleUnit(args.unit), noise=noise, ensemble=ensemble)
        )
    finally:
        service.shutdown()

    emitter = EmitService()
    written = emitter.emit_batch(results, out_dir, "sweep", html=args.html)
    written.append(emitter.write_summary(summarize(results), os.path.join(out_dir, "sweep_summary.csv")))
    print(f"✅ {len(results)} runs, {len(written)} files in {out_dir}")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qwalk",
        description=f"{settings.APP_NAME} - discrete-time quantum walks of lattice atoms",
    )
    parser.add_argument("--version", action="version", version=f"%(prog)s {settings.VERSION}")
    subparsers = parser.add_subparsers(dest="command", required=True)

    run = subparsers.add_parser("run", help="Run an experiment described by a JSON config")
    run.add_argument("config", help="Path to the experiment JSON document")
    run.set_defaults(handler=cmd_run)

    preset = subparsers.add_parser("preset", help="Run a frozen figure preset")
    preset.add_argument("name", nargs="?", help="Preset name")
    preset.add_argument("--out", help="Output directory (default: OUTPUT_DIR/<name>)")
    preset.add_argument("--list", action="store_true", help="List preset names and exit")
    preset.add_argument("--html", action="store_true", help="Also write a plotly HTML overlay")
    preset.set_defaults(handler=cmd_preset)

    sweep = subparsers.add_parser("sweep", help="Run one walk per coin angle")
    sweep.add_argument("--theta-grid", required=True, help="Comma-separated theta values")
    sweep.add_argument("--unit", choices=[u.value for u in AngleUnit], default=AngleUnit.DEG.value)
    sweep.add_argument("--steps", type=int, required=True, help="Number of walk steps N")
    sweep.add_argument("--out", help="Output directory (default: OUTPUT_DIR/sweep)")
    sweep.add_argument("--noise", help="Noise channel as Kind:p, e.g. PhaseFlip:0.1")
    sweep.add_argument("--ensemble", help="Ensemble as M:profile, e.g. 40:SF")
    sweep.add_argument("--html", action="store_true", help="Also write a plotly HTML overlay")
    sweep.set_defaults(handler=cmd_sweep)

    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    configure_logging()
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.handler(args)
    except Exception as e:
        code = exit_code_for(e)
        logger.error(f"Error in '{args.command}': {str(e)}")
        print(f"❌ {e}", file=sys.stderr)
        return code


if __name__ == "__main__":
    sys.exit(main())
