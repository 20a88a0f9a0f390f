"""
Experiment configuration.

Config files are UTF-8 text with one ``key = value`` per line; ``#`` starts
a comment. Matrices are referenced as CSV paths, resolved relative to the
config file. Command-line flags override file values.
"""

import logging
from pathlib import Path
from typing import Annotated, Any, Dict, Optional

from pydantic import BaseModel, BeforeValidator, ConfigDict, Field, ValidationError

from .errors import ConfigError
from .validators import (
    SKEW_KEYWORDS,
    _validate_baseline,
    _validate_bool,
    _validate_dimension,
    _validate_nonnegative_count,
    _validate_optional_nonnegative,
    _validate_optional_positive,
    _validate_positive_count,
    _validate_seed,
    _validate_skew_source,
    _validate_start,
)

logger = logging.getLogger("nrmh")

DEFAULT_STEPS = 1_000_000
DEFAULT_MAX_LAG = 500


class ExperimentConfig(BaseModel):
    """Validated settings shared by all experiments."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    dimension: Annotated[
        Optional[int],
        BeforeValidator(_validate_dimension),
        Field(description="Built-in covariance structure to use.", examples=[3, 9]),
    ] = None
    covariance: Annotated[
        Optional[Path],
        Field(description="CSV file with an explicit covariance matrix V; overrides dimension."),
    ] = None
    skew: Annotated[
        Optional[str],
        BeforeValidator(_validate_skew_source),
        Field(
            description="Source of the skew drift S. Defaults to the experiment's own choice.",
            examples=["builtin-3d", "optimize", "zero", "skew.csv"],
        ),
    ] = None
    steps: Annotated[
        int,
        BeforeValidator(_validate_positive_count),
        Field(description="Transitions per chain.", examples=[10_000, 1_000_000]),
    ] = DEFAULT_STEPS
    seed: Annotated[
        int,
        BeforeValidator(_validate_seed),
        Field(description="Master seed; chain seeds are split from it.", examples=[0, 12345]),
    ] = 0
    out: Annotated[Path, Field(description="Output directory for artifacts.")] = Path("results")
    h: Annotated[
        Optional[float],
        BeforeValidator(_validate_optional_positive),
        Field(description="Step size override."),
    ] = None
    sigma: Annotated[
        Optional[float],
        BeforeValidator(_validate_optional_positive),
        Field(description="Diffusivity override."),
    ] = None
    c: Annotated[
        Optional[float],
        BeforeValidator(_validate_optional_nonnegative),
        Field(description="Vorticity scale override."),
    ] = None
    baseline: Annotated[
        str,
        BeforeValidator(_validate_baseline),
        Field(description="Reversible comparison sampler.", examples=["mala", "mh", "none"]),
    ] = "mala"
    max_lag: Annotated[
        int,
        BeforeValidator(_validate_nonnegative_count),
        Field(description="Largest EACF lag."),
    ] = DEFAULT_MAX_LAG
    write_traces: Annotated[
        bool,
        BeforeValidator(_validate_bool),
        Field(description="Write full chain traces as CSV."),
    ] = True
    optimizer_restarts: Annotated[
        int,
        BeforeValidator(_validate_nonnegative_count),
        Field(description="Random restarts of the skew drift search."),
    ] = 32
    instances: Annotated[
        int,
        BeforeValidator(_validate_positive_count),
        Field(description="Random instances in the discrete demo."),
    ] = 50
    start: Annotated[
        Optional[list[float]],
        BeforeValidator(_validate_start),
        Field(description="Starting point; defaults to the origin.", examples=["0,0,0"]),
    ] = None


def _validated(values: Dict[str, Any], source: str) -> ExperimentConfig:
    try:
        return ExperimentConfig.model_validate(values)
    except ValidationError as e:
        raise ConfigError(f"Invalid configuration in {source}: {e}") from e


def parse_config_text(text: str, base_dir: Path = Path(".")) -> ExperimentConfig:
    values: Dict[str, Any] = {}
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigError(f"Line {lineno}: expected 'key = value', got {raw!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key not in ExperimentConfig.model_fields:
            raise ConfigError(f"Line {lineno}: unknown key '{key}'")
        if key in values:
            raise ConfigError(f"Line {lineno}: duplicate key '{key}'")
        values[key] = value

    if "covariance" in values:
        values["covariance"] = base_dir / values["covariance"]
    if "skew" in values and values["skew"] not in SKEW_KEYWORDS:
        values["skew"] = str(base_dir / values["skew"])
    if "out" in values:
        values["out"] = Path(values["out"])
    return _validated(values, "config file")


def load_config(path: Optional[Path]) -> ExperimentConfig:
    """Read a config file, or return the defaults when no path is given."""
    if path is None:
        return ExperimentConfig()
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError(f"Cannot read config file {path}: {e}") from e
    logger.debug(f"Loaded config file {path}")
    return parse_config_text(text, base_dir=path.parent)


def with_overrides(config: ExperimentConfig, **overrides: Any) -> ExperimentConfig:
    """Apply command-line overrides; ``None`` means not given."""
    given = {key: value for key, value in overrides.items() if value is not None}
    if not given:
        return config
    return _validated({**config.model_dump(), **given}, "command-line overrides")
