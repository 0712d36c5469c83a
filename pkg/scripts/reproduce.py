import time
import argparse

from typing import Any
from fastgrant.cli import run_command
from fastgrant.models import RunManifest
from fastgrant.recipes import RECIPES


def main(args: Any) -> None:
    recipes = sorted(RECIPES) if args.recipes is None else args.recipes.split(",")

    for recipe in recipes:
        if recipe not in RECIPES:
            print(f"Unknown recipe '{recipe}', expected one of {sorted(RECIPES)}")
            return

    now = time.time()
    for recipe in recipes:
        manifest = RunManifest(
            config_path=f"{args.config_dir}/{recipe}.conf",
            output_dir=f"{args.output_dir}/{recipe}",
            seed=args.seed,
            replications=args.n_reps,
            recipe=recipe,
            workers=args.n_workers,
            pbar=args.enable_pbar,
        )
        print(f"Reproducing {recipe} into {manifest.output_dir}")
        status = run_command(manifest)
        if status != 0:
            print(f"Recipe {recipe} failed with exit code {status}")
            return

    elapsed_time = time.time() - now
    print(f"Reproduced {len(recipes)} recipes in {elapsed_time:.2f} seconds")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Reproduce the fast uplink grant figures from their recipes"
    )
    parser.add_argument(
        "--recipes",
        type=str,
        default=None,
        help="Comma-separated recipe names (default: all).",
    )
    parser.add_argument(
        "--config_dir",
        type=str,
        default="configs",
        help="Directory holding one <recipe>.conf per recipe.",
    )
    parser.add_argument(
        "--output_dir",
        type=str,
        default="results",
        help="Where to write one output directory per recipe.",
    )
    parser.add_argument("--seed", type=int, default=0, help="Master seed.")
    parser.add_argument("--n_reps", type=int, default=50, help="Replications per variant.")
    parser.add_argument("--enable_pbar", action="store_true", help="Enable progress bar.")
    parser.add_argument("--n_workers", type=int, default=1, help="Number of workers.")
    return parser


if __name__ == "__main__":
    args = build_parser().parse_args()
    main(args)
