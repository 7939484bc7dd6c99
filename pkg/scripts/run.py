#!/usr/bin/env python3
"""
Batch runner for hydrofrac.

Runs every scenario preset in the config directory (or the ones named on
the command line), writing time series and snapshots per preset.
"""

import argparse
import logging
import sys
from pathlib import Path

from hydrofrac.exceptions import HydrofracError
from hydrofrac.scenarios import create_scenario
from hydrofrac.services import writers
from hydrofrac.services.benchmarks import DEFAULT_CONFIG_DIR
from hydrofrac.services.config_loader import load_config

logging.basicConfig(
    level=logging.INFO,
    format="%(asctime)s %(levelname)s %(name)s: %(message)s",
)
logger = logging.getLogger(__name__)


def collect_presets(config_dir: Path, names: list[str]) -> list[Path]:
    """Preset files to run: the named ones, else every YAML file in the directory."""
    if names:
        return [config_dir / (name if name.endswith(".yaml") else f"{name}.yaml") for name in names]
    return sorted(config_dir.glob("*.yaml"))


def main():
    parser = argparse.ArgumentParser(description="Run hydrofrac scenario presets")
    parser.add_argument("presets", nargs="*", help="Preset names (default: all)")
    parser.add_argument(
        "--config-dir",
        type=Path,
        default=DEFAULT_CONFIG_DIR,
        help="Configuration directory",
    )
    parser.add_argument(
        "--out-dir",
        type=Path,
        default=Path(__file__).parent.parent / "results",
        help="Output directory",
    )
    parser.add_argument("--steps", type=int, help="Override the number of outer steps")
    parser.add_argument(
        "--dry-run",
        action="store_true",
        help="Load and validate the presets without running them",
    )
    args = parser.parse_args()

    presets = collect_presets(args.config_dir, args.presets)
    logger.info(f"Found {len(presets)} presets in {args.config_dir}")

    failures = []
    for i, path in enumerate(presets, 1):
        logger.info(f"[{i}/{len(presets)}] {path.name}")
        try:
            config = load_config(path)
            if args.dry_run:
                logger.info(f"  [DRY RUN] {config.name}: {config.description}")
                continue
            out_dir = args.out_dir / path.stem
            scenario = create_scenario(config, out_dir)
            record = scenario.run(args.steps)
            writers.emit_timeseries(record.rows, out_dir / "timeseries.csv")
        except HydrofracError as e:
            logger.error(f"  {path.name} failed: {e}")
            failures.append(path.name)

    if failures:
        logger.error(f"{len(failures)} preset(s) failed: {', '.join(failures)}")
        sys.exit(1)
    logger.info(f"Done! {len(presets)} preset(s) processed")


if __name__ == "__main__":
    main()
