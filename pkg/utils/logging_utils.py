"""
Logging utilities for experiment runs
"""

import logging
import os
from datetime import datetime
from typing import Optional

LOG_FORMAT = "%(asctime)s %(levelname)-7s %(name)s: %(message)s"


def setup_logging(level: Optional[str] = None, log_file: Optional[str] = None) -> logging.Logger:
    """
    Configure the root logger once per process.

    Args:
        level: Level name; falls back to RINGPHOTON_LOG_LEVEL, then INFO
        log_file: Optional path that receives a copy of every record

    Returns:
        The ringphoton package logger
    """
    level = (level or os.getenv("RINGPHOTON_LOG_LEVEL", "INFO")).upper()
    handlers = [logging.StreamHandler()]
    if log_file:
        os.makedirs(os.path.dirname(log_file) or ".", exist_ok=True)
        handlers.append(logging.FileHandler(log_file, encoding="utf-8"))

    logging.basicConfig(level=getattr(logging, level, logging.INFO), format=LOG_FORMAT,
                        handlers=handlers, force=True)
    logging.captureWarnings(True)
    return logging.getLogger("ringphoton")


def generate_log_filename(run_name: str, command: str) -> str:
    """
    Generate a unique log filename based on run name and timestamp.

    Args:
        run_name: Scenario name, or the command when no scenario is used
        command: Experiment command being run

    Returns:
        Path to the log file
    """
    timestamp = datetime.now().strftime("%Y%m%d_%H%M%S")
    filename = f"{run_name}_{command}_{timestamp}.log"
    return os.path.join("logs", filename)


def generate_output_filename(command: str, n_sites: int, spacing: float, extension: str,
                             output_dir: Optional[str] = None) -> str:
    """Deterministic dataset path: identical configurations map to the same file"""
    output_dir = output_dir or os.getenv("RINGPHOTON_OUTPUT_DIR", "results")
    filename = f"{command}_N{n_sites}_a{spacing:g}.{extension}"
    return os.path.join(output_dir, filename)
