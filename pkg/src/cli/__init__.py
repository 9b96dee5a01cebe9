"""
Command-line layer.

- config.py: RunConfig and the defaults < env < INI < flags merge
- commands.py: one runner per subcommand, report writing, exit codes
- main.py: argparse parser, logging setup and the ``gcme`` entry point
"""

from src.cli.commands import COMMANDS, CommandOutcome, execute
from src.cli.config import RunConfig, Tolerances, load_config
from src.cli.main import main, setup_logging

__all__ = [
    "COMMANDS",
    "CommandOutcome",
    "execute",
    "RunConfig",
    "Tolerances",
    "load_config",
    "main",
    "setup_logging",
]
