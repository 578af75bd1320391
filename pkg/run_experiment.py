#!/usr/bin/env python3
"""
qgraph-loc command line.

Every diagnostic is a subcommand whose flags mirror its parameter keys; `run`
executes a YAML or JSON experiment file.

Usage:
    python run_experiment.py run experiment.yaml [--out DIR]
    python run_experiment.py ct-check --n 2 --L 8 --trials 50 --seed 1
    python run_experiment.py schedule --N 2 --d 1 --p1 auto --L0 1000 --K 3
"""

import argparse
import json
import logging
import sys
from pathlib import Path
from typing import Any, Dict, List, Optional

# Add src to Python path
sys.path.insert(0, str(Path(__file__).parent / "src"))

from src.config.settings import settings
from src.diagnostics import diagnostic_registry
from src.orchestrator import run
from src.orchestrator.runner import EXIT_CODES, hashed_params, state_of
from src.storage import ResultStore

# flags every diagnostic subcommand accepts, besides its own parameters
COMMON_FLAGS = {
    "n": ("integer", "Particle number of the cube"),
    "d": ("integer", "Lattice dimension"),
    "L": ("integer", "Half-side of the cube"),
    "M": ("integer", "Mesh subdivisions per edge"),
    "law": ("string", "uniform, beta_smoothed or point_mass"),
    "q_minus": ("number", "Lower end of the single-site support"),
    "q_plus": ("number", "Upper end of the single-site support"),
    "shape": ("number", "Beta shape parameter"),
    "u0": ("number", "Pair interaction amplitude"),
    "r0": ("integer", "Interaction range"),
    "kernel": ("string", "hard_indicator or triangular_bump"),
    "center": ("array", "Cube center, flat coordinates"),
    "seed": ("integer", "Base seed"),
    "trials": ("integer", "Monte Carlo trials"),
}

SCALARS = {"integer": int, "number": float, "string": str}


def setup_logging(level: str = "INFO", directory: Optional[str] = None):
    """Setup logging configuration."""
    handlers: List[logging.Handler] = [logging.StreamHandler(sys.stdout)]
    if directory:
        Path(directory).mkdir(parents=True, exist_ok=True)
        handlers.append(logging.FileHandler(Path(directory) / "qgraph_loc.log"))

    logging.basicConfig(
        level=getattr(logging, level.upper(), logging.INFO),
        format='%(asctime)s - %(name)s - %(levelname)s - %(message)s',
        handlers=handlers,
    )

    # Reduce noise from external libraries
    logging.getLogger("concurrent.futures").setLevel(logging.WARNING)


def _array_item(text: str) -> Any:
    """Array elements: JSON for nested values, numbers otherwise."""
    if text.startswith("[") or text.startswith("{"):
        return json.loads(text)
    try:
        return int(text)
    except ValueError:
        return float(text)


def _number_or_text(text: str) -> Any:
    try:
        return float(text)
    except ValueError:
        return text


def _add_flag(parser: argparse.ArgumentParser, key: str, schema: Dict[str, Any]):
    names = [f"--{key}"]
    if "_" in key:
        names.append(f"--{key.replace('_', '-')}")
    kind = schema.get("type")
    help_text = schema.get("description")
    if isinstance(kind, list):
        parser.add_argument(*names, dest=key, type=_number_or_text, help=help_text)
    elif kind == "boolean":
        parser.add_argument(*names, dest=key, action=argparse.BooleanOptionalAction, default=None, help=help_text)
    elif kind == "array":
        item = SCALARS.get(schema.get("items", {}).get("type"), _array_item)
        parser.add_argument(*names, dest=key, type=item, nargs="+", help=help_text)
    else:
        parser.add_argument(*names, dest=key, type=SCALARS.get(kind, str), choices=schema.get("enum"),
                            help=help_text)


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(description="Multi-particle quantum-graph localization diagnostics")
    parser.add_argument("--log-level", default=settings.log_level,
                        choices=["DEBUG", "INFO", "WARNING", "ERROR"],
                        help="Logging level")
    commands = parser.add_subparsers(dest="command", required=True)

    run_parser = commands.add_parser("run", help="Run an experiment file")
    run_parser.add_argument("config", help="YAML or JSON experiment file")
    run_parser.add_argument("--out", default=None, help="Output directory (overrides the file)")

    for name, schema in diagnostic_registry.get_all_schemas().items():
        sub = commands.add_parser(name, help=diagnostic_registry.get(name).description, allow_abbrev=False)
        sub.add_argument("--out", default=settings.output_dir, help="Output directory")
        sub.add_argument("--threads", type=int, default=None, help="Worker processes")
        properties = schema.get("properties", {})
        for key, prop in properties.items():
            _add_flag(sub, key, prop)
        for key, (kind, help_text) in COMMON_FLAGS.items():
            if key not in properties:
                _add_flag(sub, key, {"type": kind, "description": help_text})
    return parser


def params_from(args: argparse.Namespace) -> Dict[str, Any]:
    skip = {"command", "out", "threads", "log_level"}
    params = {key: value for key, value in vars(args).items() if key not in skip and value is not None}
    if args.threads:
        params["workers"] = args.threads
    return params


def print_summary(name: str, response) -> None:
    """One-screen summary of a diagnostic response."""
    status = "✅" if response.success and response.passed is not False else "❌"
    print(f"\n{status} {name}")
    print("=" * 50)
    if not response.success:
        print(f"{response.error_type}: {response.error}")
        return
    for key, value in (response.data or {}).items():
        text = json.dumps(value, default=str) if isinstance(value, (dict, list)) else str(value)
        print(f"  {key:<24} {text[:96]}")
    if response.assertable:
        print(f"  {'passed':<24} {response.passed}")
    print(f"  {'rows':<24} {len(response.rows)}")


def run_diagnostic(args: argparse.Namespace) -> int:
    if args.threads:
        settings.threads = args.threads
    params = params_from(args)
    response = diagnostic_registry.execute(args.command, **params)
    if response.success:
        ResultStore(args.out).write_response(response, hashed_params(params))
    print_summary(args.command, response)
    return EXIT_CODES[state_of(response)]


def main(argv: Optional[List[str]] = None) -> int:
    """Main entry point."""
    args = build_parser().parse_args(argv)
    out = args.out if args.command != "run" or args.out else None
    setup_logging(args.log_level, out)
    logger = logging.getLogger("cli")

    if args.command == "run":
        code = run(args.config, args.out)
    else:
        code = run_diagnostic(args)
    logger.info(f"Exit code {code}")
    return code


if __name__ == "__main__":
    sys.exit(main())
