"""Pytest configuration and fixtures for NRMH tests."""

import os

import pytest


def long_runs_enabled() -> bool:
    """Check if long sampler runs were requested.

    Returns:
        True if the NRMH_RUN_SLOW environment variable is set to a non-empty
        value other than "0".
    """
    return os.environ.get("NRMH_RUN_SLOW", "0") not in ("", "0")


# Marker for tests that run chains of 10^5 steps or more
needs_long_runs = pytest.mark.skipif(
    not long_runs_enabled(),
    reason="Long chain runs only execute when NRMH_RUN_SLOW=1",
)
