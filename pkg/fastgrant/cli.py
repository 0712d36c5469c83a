import argparse
import asyncio
import logging
import os
import sys
import time
from typing import List, Optional, Sequence, Tuple

import aiofiles
from pydantic import ValidationError

from .bounds import bound_for_config
from .config import ConfigError, ExperimentConfig, apply_overrides, parse_config, serialize_config
from .engine import ExperimentSetup
from .experiment import ExperimentEnv
from .models import RunManifest
from .output import RunSummary, VariantSummary, emit_summary, summarize, write_summary, write_variant
from .recipes import recipe_variants
from .utils import staged_output_dir

EXIT_OK = 0
EXIT_CONFIG_ERROR = 1
EXIT_IO_ERROR = 2


def load_config(path: str) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as f:
        return parse_config(f.read())


def evaluate_bound(config: ExperimentConfig, setup: Optional[ExperimentSetup] = None) -> Optional[float]:
    """
    Regret bound of a config, or None when the instance does not admit one
    (e.g. tied weighted means)
    """
    try:
        return bound_for_config(config, setup)
    except ValueError as e:
        logging.warning("No regret bound for this config: %s", e)
        return None


def _variants(manifest: RunManifest) -> List[Tuple[str, ExperimentConfig]]:
    base = apply_overrides(
        load_config(manifest.config_path),
        {"seed": manifest.seed, "replications": manifest.replications},
    )
    if manifest.recipe is None:
        return [(base.policy.name, base)]
    return recipe_variants(manifest.recipe, base)


async def _run(manifest: RunManifest, variants: List[Tuple[str, ExperimentConfig]]) -> None:
    summaries: List[VariantSummary] = []
    tables: List[str] = []
    async with staged_output_dir(manifest.output_dir) as staging:
        for label, config in variants:
            start = time.time()
            env = ExperimentEnv(config, label)
            traces = await env.astep_batch(
                replications=config.replications, n_workers=manifest.workers, pbar=manifest.pbar
            )
            bound = evaluate_bound(config, env.setup)

            variant_dir = os.path.join(staging, label)
            await write_variant(variant_dir, traces)
            async with aiofiles.open(
                os.path.join(variant_dir, "config.conf"), "w", encoding="utf-8"
            ) as f:
                await f.write(serialize_config(config))

            summaries.append(summarize(traces, bound))
            tables.append(emit_summary(traces, bound))
            logging.info(
                "Ran %d replications of '%s' in %.2f seconds",
                config.replications,
                label,
                time.time() - start,
            )

        summary = RunSummary(
            seed=manifest.seed,
            replications=manifest.replications,
            recipe=manifest.recipe,
            variants=summaries,
        )
        await write_summary(staging, summary, "\n".join(tables))
    print("\n".join(tables), end="")


def run_command(manifest: RunManifest) -> int:
    """
    Run every variant of a manifest and write its artifacts. Returns the exit code.
    """
    try:
        variants = _variants(manifest)
        asyncio.run(_run(manifest, variants))
    except ConfigError as e:
        logging.error("Invalid configuration: %s", e)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        logging.error("Could not write outputs to %s: %s", manifest.output_dir, e)
        return EXIT_IO_ERROR
    return EXIT_OK


def bound_command(config_path: str) -> int:
    try:
        config = load_config(config_path)
    except ConfigError as e:
        logging.error("Invalid configuration: %s", e)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        logging.error("Could not read %s: %s", config_path, e)
        return EXIT_IO_ERROR
    bound = evaluate_bound(config)
    if bound is None:
        return EXIT_CONFIG_ERROR
    print(f"regret bound at T={config.horizon}: {bound:.9g}")
    return EXIT_OK


def validate_command(config_path: str) -> int:
    try:
        config = load_config(config_path)
    except ConfigError as e:
        logging.error("Invalid configuration: %s", e)
        return EXIT_CONFIG_ERROR
    except OSError as e:
        logging.error("Could not read %s: %s", config_path, e)
        return EXIT_IO_ERROR
    print(serialize_config(config), end="")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fastgrant",
        description="Fast uplink grant scheduling with probabilistic sleeping bandits",
    )
    parser.add_argument(
        "--log-level",
        type=str,
        default="WARNING",
        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
        help="Logging verbosity.",
    )
    commands = parser.add_subparsers(dest="command", required=True)

    run = commands.add_parser("run", help="Run seeded replications and write CSV outputs.")
    run.add_argument("--config", type=str, required=True, help="Path to the config document.")
    run.add_argument("--seed", type=int, required=True, help="Master seed (unsigned 64-bit).")
    run.add_argument("--reps", type=int, required=True, help="Number of replications.")
    run.add_argument("--out", type=str, required=True, help="Output directory.")
    run.add_argument("--recipe", type=str, default=None, help="Named reproduction recipe.")
    run.add_argument("--workers", type=int, default=1, help="Number of worker processes.")
    run.add_argument("--pbar", action="store_true", help="Enable progress bar.")

    bound = commands.add_parser("bound", help="Evaluate the regret bound of a config.")
    bound.add_argument("--config", type=str, required=True, help="Path to the config document.")

    validate = commands.add_parser("validate", help="Validate and print a config.")
    validate.add_argument("--config", type=str, required=True, help="Path to the config document.")
    return parser


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=args.log_level, format="%(levelname)s %(message)s")

    if args.command == "bound":
        return bound_command(args.config)
    if args.command == "validate":
        return validate_command(args.config)

    try:
        manifest = RunManifest(
            config_path=args.config,
            output_dir=args.out,
            seed=args.seed,
            replications=args.reps,
            recipe=args.recipe,
            workers=args.workers,
            pbar=args.pbar,
        )
    except ValidationError as e:
        logging.error("Invalid run arguments: %s", e)
        return EXIT_CONFIG_ERROR
    return run_command(manifest)


if __name__ == "__main__":
    sys.exit(main())
