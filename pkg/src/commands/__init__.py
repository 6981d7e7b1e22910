"""Command processors behind the CLI"""

from .base_command import EXIT_CHECKS_FAILED, EXIT_OK, EXIT_SINGULAR, EXIT_USAGE, BaseCommand
from .jet_command import JetCommand
from .orchestrator import Orchestrator
from .simulate_command import SimulateCommand
from .verify_command import VerifyCommand

__all__ = [
    "BaseCommand",
    "Orchestrator",
    "VerifyCommand",
    "SimulateCommand",
    "JetCommand",
    "EXIT_OK",
    "EXIT_CHECKS_FAILED",
    "EXIT_USAGE",
    "EXIT_SINGULAR",
]
