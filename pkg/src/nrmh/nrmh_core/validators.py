"""
Shared validation functions for experiment configuration.

This module provides reusable Pydantic validators used by the configuration
model and the command-line overrides, so values coming from config files
(always strings) and from click (already typed) are validated the same way.
"""

from typing import Union

SEED_LIMIT = 1 << 64
SKEW_KEYWORDS = {"builtin-3d", "optimize", "zero"}
BASELINES = {"mala", "mh", "none"}
BUILTIN_DIMENSIONS = {3, 9}


def parse_bool(value: Union[str, bool, None]) -> bool:
    """Parse string to boolean, handling common representations."""
    if value is None:
        return False
    if isinstance(value, bool):
        return value
    return value.strip().lower() in ("true", "1", "yes", "on", "enabled")


def _validate_bool(v: Union[str, bool, None]) -> bool:
    return parse_bool(v)


def _validate_dimension(v: Union[str, int, None]) -> int | None:
    """Validate the dimension selects one of the built-in covariance structures."""
    if v is None:
        return v
    dimension = int(v)
    if dimension not in BUILTIN_DIMENSIONS:
        raise ValueError(
            f"Invalid dimension '{v}'. Must be one of: {', '.join(map(str, sorted(BUILTIN_DIMENSIONS)))} "
            "(use 'covariance' for other targets)"
        )
    return dimension


def _validate_seed(v: Union[str, int]) -> int:
    """Validate the seed is an unsigned 64-bit integer (decimal or 0x-prefixed)."""
    seed = int(v, 0) if isinstance(v, str) else int(v)
    if not 0 <= seed < SEED_LIMIT:
        raise ValueError(f"Invalid seed '{v}'. Must be in [0, 2^64)")
    return seed


def _validate_positive_count(v: Union[str, int]) -> int:
    count = int(v)
    if count <= 0:
        raise ValueError(f"Invalid count '{v}'. Must be a positive integer")
    return count


def _validate_nonnegative_count(v: Union[str, int]) -> int:
    count = int(v)
    if count < 0:
        raise ValueError(f"Invalid count '{v}'. Must be a nonnegative integer")
    return count


def _validate_skew_source(v: str | None) -> str | None:
    """Validate the skew source is a keyword or a CSV path."""
    if v is None:
        return v
    source = str(v).strip()
    if not source:
        raise ValueError("Skew source cannot be empty")
    if source not in SKEW_KEYWORDS and not source.lower().endswith(".csv"):
        raise ValueError(
            f"Invalid skew source '{v}'. Must be one of: {', '.join(sorted(SKEW_KEYWORDS))} or a .csv path"
        )
    return source


def _validate_baseline(v: Union[str, bool]) -> str:
    """Validate the baseline sampler; booleans toggle the default MALA baseline."""
    if isinstance(v, bool):
        return "mala" if v else "none"
    name = str(v).strip().lower()
    if name in BASELINES:
        return name
    if name in ("true", "1", "yes", "on", "enabled", "false", "0", "no", "off", "disabled"):
        return "mala" if parse_bool(name) else "none"
    raise ValueError(f"Invalid baseline '{v}'. Must be one of: {', '.join(sorted(BASELINES))}")


def _validate_start(v: Union[str, list, None]) -> list[float] | None:
    """Parse a comma-separated starting point."""
    if v is None or isinstance(v, list):
        return v
    try:
        return [float(part) for part in str(v).split(",")]
    except ValueError:
        raise ValueError(f"Invalid starting point '{v}'. Must be comma-separated numbers")


def _validate_optional_positive(v: Union[str, float, None]) -> float | None:
    if v is None:
        return v
    value = float(v)
    if not value > 0.0:
        raise ValueError(f"Invalid value '{v}'. Must be positive")
    return value


def _validate_optional_nonnegative(v: Union[str, float, None]) -> float | None:
    if v is None:
        return v
    value = float(v)
    if not value >= 0.0:
        raise ValueError(f"Invalid value '{v}'. Must be nonnegative")
    return value
