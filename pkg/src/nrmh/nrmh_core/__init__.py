"""
Core functionality for the NRMH samplers.

Finite-state kernels and their analysis live in markov, analysis and
instances; the Gaussian construction in gaussian and drift; trace
statistics in diagnostics; configuration in config and validators.
"""

__all__ = [
    "analysis",
    "config",
    "csv_io",
    "diagnostics",
    "drift",
    "errors",
    "gaussian",
    "instances",
    "markov",
    "numerics",
    "rng",
    "sampling",
    "validators",
]
