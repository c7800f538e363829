"""
Main application entry point
"""
import argparse
import sys
from pathlib import Path

# Add project root to path
sys.path.append(str(Path(__file__).parent))

import config
from src.database.models import init_db
from src.errors import LabError
from src.harness.experiments import EXPERIMENTS, load_config, run_experiment


def run_command(name: str, config_path: Path = None, seed: int = None, workers: int = None,
                out: str = None) -> int:
    """
    Run one named experiment and print its verdicts

    Args:
        name: Experiment name
        config_path: INI file with one section per experiment
        seed: Master seed override
        workers: Worker count override
        out: Output directory override

    Returns:
        Process exit code (0 when every criterion passed)
    """
    print("\n" + "=" * 80)
    print(f"EXPERIMENT: {name.upper()}")
    print("=" * 80 + "\n")

    cfg = load_config(name, config_path, seed=seed, workers=workers, out=out)
    report = run_experiment(cfg)

    print("\n" + "=" * 80)
    if report.passed:
        print("✅ ALL CRITERIA PASSED")
    else:
        print(f"❌ {report.count('FAIL')} FAILED, {report.count('ERROR')} ERRORS")
    print("=" * 80)
    for path in report.paths:
        print(f"  📄 {path}")
    print()
    return 0 if report.passed else 1


def main(argv=None) -> int:
    """Main entry point"""
    parser = argparse.ArgumentParser(
        description="CUE chaos laboratory: sampling, Toeplitz oracles and asymptotic checks"
    )

    parser.add_argument(
        "command",
        choices=["init", *EXPERIMENTS],
        help="Experiment to run (or 'init' to create the run ledger)"
    )

    parser.add_argument(
        "--config",
        type=Path,
        default=config.EXPERIMENTS_PATH,
        help=f"Experiment configuration file (default: {config.EXPERIMENTS_PATH.name})"
    )

    parser.add_argument(
        "--seed",
        type=int,
        help=f"Master seed (default: {config.MASTER_SEED})"
    )

    parser.add_argument(
        "--workers",
        type=int,
        help=f"Worker processes (default: {config.WORKERS})"
    )

    parser.add_argument(
        "--out",
        help=f"Output directory (default: {config.OUTPUT_DIR})"
    )

    args = parser.parse_args(argv)

    if args.command == "init":
        print("📦 Initializing database...")
        init_db()
        return 0

    try:
        return run_command(args.command, args.config, args.seed, args.workers, args.out)
    except LabError as e:
        print(f"❌ {e}")
        return 2


if __name__ == "__main__":
    sys.exit(main())
