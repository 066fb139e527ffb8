"""
Experiment registry.
Single source of truth for the commands the simulator and CLI accept.
"""

from .models import Command

# Command -> (ExperimentSimulator method, one-line description)
AVAILABLE_EXPERIMENTS = {
    Command.INTENSITY: ("run_intensity", "single-photon angular intensity of a spin wave"),
    Command.INTENSITY_PERP: ("run_intensity_perp", "closed form for a drive along the ring axis"),
    Command.PAIR_INTENSITY: ("run_pair_intensity", "angular intensity of a photon pair from ψ^(p)"),
    Command.G2_MAP: ("run_g2_map", "photon-photon correlation g2 against a reference direction"),
    Command.OVERLAPS: ("run_overlaps", "decomposition of ψ^(p) into opposite angular-momentum pairs"),
    Command.MODES: ("run_modes", "collective decay rates and frequency shifts"),
    Command.ORACLE_CHECK: ("run_oracle_check", "closed-form intensity against the explicit mode sum"),
}


def get_experiment(command) -> str:
    """Simulator method name for a command"""
    command = Command(command)
    if command not in AVAILABLE_EXPERIMENTS:
        raise ValueError(f"No experiment registered for '{command.value}'")
    return AVAILABLE_EXPERIMENTS[command][0]


def describe_experiments():
    return [(command.value, description) for command, (_, description) in AVAILABLE_EXPERIMENTS.items()]
