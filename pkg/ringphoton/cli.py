"""
Ring photon emission - command line runner
Runs one experiment from a scenario file and/or flags and writes a dataset
"""

import argparse
import json
import logging
import os
import sys
from typing import Any, Dict, List, Optional

from dotenv import load_dotenv
from pydantic import ValidationError

from utils.logging_utils import generate_log_filename, generate_output_filename, setup_logging

from .datasets import golden_check, read_dataset, write_dataset
from .errors import ConfigurationError
from .models import Command, ExperimentConfig, OutputFormat
from .registry import describe_experiments
from .simulator import ExperimentSimulator

logger = logging.getLogger(__name__)

SCENARIO_DIR = os.path.join(os.path.dirname(os.path.dirname(os.path.abspath(__file__))), "scenarios")

# argparse destination -> ExperimentConfig field
FLAG_FIELDS = {
    "command": "command",
    "n_sites": "n_sites",
    "spacing": "spacing",
    "theta_l": "theta_l",
    "phi_l": "phi_l",
    "p": "p",
    "l": "l",
    "ps": "ps",
    "grid": "grid",
    "ref_theta": "ref_theta",
    "ref_phi": "ref_phi",
    "out": "out",
    "format": "format",
    "tolerance": "tolerance",
    "bandwidth_factor": "bandwidth_factor",
    "n_frequencies": "n_frequencies",
    "workers": "workers",
}


def list_scenarios(directory: str = SCENARIO_DIR) -> List[str]:
    if not os.path.isdir(directory):
        return []
    return sorted(f[:-5] for f in os.listdir(directory) if f.endswith(".json"))


def load_scenario(name_or_path: str) -> Dict[str, Any]:
    """Load a config file by path, or a scenario by name from scenarios/"""
    path = name_or_path
    if not os.path.exists(path):
        path = os.path.join(SCENARIO_DIR, f"{name_or_path}.json")
    if not os.path.exists(path):
        raise ConfigurationError(f"Scenario '{name_or_path}' not found at {path}")

    with open(path, "r", encoding="utf-8") as f:
        try:
            document = json.load(f)
        except json.JSONDecodeError as e:
            raise ConfigurationError(f"{path} is not valid JSON: {e}") from e

    if not isinstance(document, dict):
        raise ConfigurationError(f"{path} must hold a JSON object")
    # Scenario files wrap the parameters in "config" next to name/description
    return dict(document.get("config", document))


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="ringphoton",
        description="Collective photon emission from atomic states on a ring lattice",
    )
    parser.add_argument("command", nargs="?", choices=[c.value for c in Command],
                        help="Experiment to run (may also come from --config)")
    parser.add_argument("--config", type=str, help="Scenario name (JSON file in scenarios/) or path to a config file")
    parser.add_argument("--list", action="store_true", help="List available scenarios and experiments")

    physics = parser.add_argument_group("physical parameters")
    physics.add_argument("--n-sites", dest="n_sites", type=int, help="Number of atoms N")
    physics.add_argument("--spacing", type=float, help="Lattice spacing a in units of the laser wavelength")
    physics.add_argument("--theta-l", dest="theta_l", type=float, help="Laser polar angle")
    physics.add_argument("--phi-l", dest="phi_l", type=float, help="Laser azimuthal angle")
    physics.add_argument("--p", type=int, help="Pair-state label p")
    physics.add_argument("--l", type=int, help="Spin-wave angular momentum for intensity commands")
    physics.add_argument("--ps", type=int, nargs="+", help="p values for the overlaps table")

    grid = parser.add_argument_group("evaluation")
    grid.add_argument("--grid", type=int, nargs=2, metavar=("N_THETA", "N_PHI"), help="Quadrature sizes")
    grid.add_argument("--ref-theta", dest="ref_theta", type=float, help="Reference polar angle for g2-map")
    grid.add_argument("--ref-phi", dest="ref_phi", type=float, help="Reference azimuthal angle for g2-map")
    grid.add_argument("--bandwidth-factor", dest="bandwidth_factor", type=float,
                      help="Oracle band in units of the collective decay rate")
    grid.add_argument("--n-frequencies", dest="n_frequencies", type=int, help="Oracle frequency nodes")
    grid.add_argument("--workers", type=int, help="Threads for grid evaluation")

    output = parser.add_argument_group("output")
    output.add_argument("--out", type=str, help="Output path (default: $RINGPHOTON_OUTPUT_DIR/<command>_N<n>_a<a>.<format>)")
    output.add_argument("--format", choices=[f.value for f in OutputFormat], help="Output format")
    output.add_argument("--golden", type=str, help="Reference dataset to compare against")
    output.add_argument("--tolerance", type=float, help="Relative L2 tolerance of the golden check")
    output.add_argument("--log", action="store_true", help="Also write the run log to logs/")
    return parser


def resolve_config(args: argparse.Namespace) -> ExperimentConfig:
    """Scenario values first, explicit flags on top, environment for the worker count"""
    values: Dict[str, Any] = load_scenario(args.config) if args.config else {}
    for dest, field in FLAG_FIELDS.items():
        flag = getattr(args, dest, None)
        if flag is not None:
            values[field] = flag
    if "workers" not in values and os.getenv("RINGPHOTON_WORKERS"):
        values["workers"] = int(os.getenv("RINGPHOTON_WORKERS"))
    if "command" not in values:
        raise ConfigurationError("No command given (positional argument or 'command' in the config file)")
    return ExperimentConfig(**values)


def _validation_message(error: ValidationError) -> str:
    return "; ".join(
        f"{'.'.join(str(part) for part in e['loc']) or 'config'}: {e['msg']}" for e in error.errors()
    )


def run(config: ExperimentConfig, golden: Optional[str] = None) -> int:
    """Run one experiment, write its dataset and optionally compare it with a golden file"""
    dataset = ExperimentSimulator(config).run()
    out = config.out or generate_output_filename(
        config.command.value, config.n_sites, config.spacing, config.format.value
    )
    write_dataset(dataset, out, config.format)

    print(f"{config.command.value}: wrote {len(dataset.rows)} rows to {out}")
    if "total" in dataset.metadata:
        print(f"  quadrature total: {dataset.metadata['total']:.8f}")
    if dataset.metadata.get("undefined_nodes"):
        print(f"  undefined nodes: {dataset.metadata['undefined_nodes']}")

    if golden:
        report = golden_check(dataset, read_dataset(golden), config.tolerance)
        status = "PASS" if report.passed else "FAIL"
        print(f"Golden check {status}: relative L2 {report.error:.3e} (tolerance {report.tolerance:.3e})")
        for node in report.worst_nodes:
            print(f"  {node.label}: {node.value} vs {node.reference} (|Δ| = {node.deviation:.3e})")
        return 0 if report.passed else 1
    return 0


def main(argv: Optional[List[str]] = None) -> int:
    load_dotenv()
    parser = build_parser()
    args = parser.parse_args(argv)

    if args.list:
        print("\nAvailable scenarios:")
        for name in list_scenarios():
            print(f"  - {name}")
        print("\nAvailable experiments:")
        for name, description in describe_experiments():
            print(f"  - {name}: {description}")
        return 0

    try:
        config = resolve_config(args)
        run_name = os.path.splitext(os.path.basename(args.config))[0] if args.config else config.command.value
        setup_logging(log_file=generate_log_filename(run_name, config.command.value) if args.log else None)
        return run(config, args.golden)
    except ValidationError as e:
        print(f"Error: invalid configuration: {_validation_message(e)}", file=sys.stderr)
    except (ValueError, OSError) as e:
        print(f"Error: {e}", file=sys.stderr)
    return 2


if __name__ == "__main__":
    sys.exit(main())
