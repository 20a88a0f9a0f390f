"""
Experiments exposed as command-line subcommands.

Importing this package imports every experiment module so their
@experiment decorators populate the registry.
"""

from . import discrete, gaussian
from .registry import get_available_experiment_names, register_all_experiments

__all__ = ["register_all_experiments", "get_available_experiment_names", "gaussian", "discrete"]
