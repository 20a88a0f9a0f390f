"""
Registry for auto-registering experiments.

This module provides a decorator-based approach to register experiments.
Experiments decorated with @experiment are collected in a registry and
attached to the command-line group as subcommands by
register_all_experiments().
"""

import asyncio
import logging
from functools import wraps
from pathlib import Path
from typing import Any, Callable, Dict, Optional, Set

import click

from ..nrmh_core.config import ExperimentConfig, load_config, with_overrides
from ..nrmh_core.errors import NRMHError

logger = logging.getLogger("nrmh")

# Registry to store all decorated experiments
_experiment_registry: Set[Callable] = set()


def experiment(
    func: Optional[Callable] = None,
    *,
    name: Optional[str] = None,
    description: Optional[str] = None,
) -> Callable:
    """
    Decorator to mark an async function as an experiment.

    The decorated function takes an ExperimentConfig and returns a result
    dict with at least ``success`` and ``message``. Library errors raised
    inside it are logged and turned into a failed result carrying the
    error's exit code.

    Can be used in two ways:
    1. Direct decoration:
        @experiment
        async def my_experiment(config):
            ...

    2. With parameters:
        @experiment(name="my-experiment", description="What it does")
        async def my_experiment(config):
            ...

    Args:
        func: The function to decorate
        name: Optional subcommand name. Defaults to the function name with dashes.
        description: Optional help text. Defaults to the function's docstring.
    """

    def decorator(func: Callable) -> Callable:
        @wraps(func)
        async def wrapper(config: ExperimentConfig) -> Dict[str, Any]:
            try:
                return await func(config)
            except NRMHError as e:
                logger.error(f"Experiment {wrapper._experiment_metadata['name']} failed: {e}")
                return {"success": False, "message": str(e), "exit_code": e.exit_code}

        wrapper._experiment_metadata = {
            "name": name or func.__name__.replace("_", "-"),
            "description": description or func.__doc__,
        }
        _experiment_registry.add(wrapper)
        return wrapper

    # Handle both @experiment and @experiment(...) cases
    if func is None:
        return decorator
    return decorator(func)


def _build_command(func: Callable) -> click.Command:
    metadata = func._experiment_metadata

    @click.option(
        "--config",
        "config_path",
        type=click.Path(dir_okay=False, path_type=Path),
        default=None,
        help="Experiment config file (key = value lines)",
    )
    @click.option("--seed", type=str, default=None, help="Master seed (overrides the config file)")
    @click.option("--steps", type=int, default=None, help="Transitions per chain (overrides the config file)")
    @click.option(
        "--out",
        type=click.Path(file_okay=False, path_type=Path),
        default=None,
        help="Output directory (overrides the config file)",
    )
    @click.pass_context
    def command(ctx: click.Context, config_path, seed, steps, out):
        try:
            config = with_overrides(load_config(config_path), seed=seed, steps=steps, out=out)
        except NRMHError as e:
            logger.error(f"Configuration error: {e}")
            click.echo(f"Error: {e}", err=True)
            ctx.exit(e.exit_code)

        result = asyncio.run(func(config))
        if not result["success"]:
            click.echo(f"Error: {result['message']}", err=True)
            ctx.exit(result["exit_code"])
        click.echo(result["message"])

    return click.command(name=metadata["name"], help=metadata["description"])(command)


def register_all_experiments(group: click.Group) -> None:
    """
    Attach every experiment marked with @experiment to the given click group.

    Args:
        group: The click group that receives one subcommand per experiment
    """
    logger.debug(f"Registering {len(_experiment_registry)} experiments")

    for func in sorted(_experiment_registry, key=lambda f: f._experiment_metadata["name"]):
        logger.debug(f"Registering experiment: {func._experiment_metadata['name']}")
        group.add_command(_build_command(func))


def get_available_experiment_names() -> list[str]:
    """
    Get a list of all registered experiment names.

    Returns:
        A sorted list of the subcommand names of all registered experiments
    """
    return sorted(func._experiment_metadata["name"] for func in _experiment_registry)
