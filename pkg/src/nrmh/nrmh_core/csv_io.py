"""
CSV interchange for matrices and vectors: one row per line, comma separated,
'.' as decimal separator, no header.
"""

from pathlib import Path

import numpy as np

from .errors import ConfigError
from .numerics import Matrix, Vector


def read_matrix_csv(path: Path) -> Matrix:
    try:
        M = np.loadtxt(path, delimiter=",", ndmin=2, encoding="utf-8")
    except (OSError, ValueError) as e:
        raise ConfigError(f"Cannot read matrix from {path}: {e}") from e
    if not np.all(np.isfinite(M)):
        raise ConfigError(f"Matrix in {path} has non-finite entries")
    return M


def read_vector_csv(path: Path) -> Vector:
    """A vector stored either as one row or as one column."""
    M = read_matrix_csv(path)
    if min(M.shape) != 1:
        raise ConfigError(f"Expected a single row or column in {path}, got shape {M.shape}")
    return M.reshape(-1)


def write_matrix_csv(path: Path, M) -> None:
    np.savetxt(path, np.atleast_2d(np.asarray(M, dtype=float)), delimiter=",", fmt="%.17g")
