"""
Trace statistics for sampler runs: empirical autocorrelation functions,
batch-means asymptotic variance estimates and acceptance ratios, plus the
CSV and JSON writers for them.
"""

import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Annotated, Dict, List, Optional

import numpy as np
from pydantic import BaseModel, ConfigDict, Field

from .errors import InvariantViolation, TraceTooShort
from .numerics import Matrix

logger = logging.getLogger("nrmh")

MIN_BATCH_TRACE_LENGTH = 16
CSV_FLOAT_FORMAT = "%.17g"


class TraceMetadata(BaseModel):
    """Run metadata stored next to every trace."""

    model_config = ConfigDict(frozen=True)

    algorithm: Annotated[str, Field(description="Sampler that produced the trace", examples=["nrmh", "mala"])]
    seed: Annotated[int, Field(ge=0, description="Seed of the chain's random stream")]
    prng: Annotated[str, Field(description="Random stream algorithm", examples=["PCG64/marsaglia-polar"])]
    steps: Annotated[int, Field(ge=0, description="Number of transitions")]
    dimension: Annotated[int, Field(ge=1, description="State space dimension")]
    h: Annotated[Optional[float], Field(description="Step size")] = None
    sigma: Annotated[Optional[float], Field(description="Diffusivity scale")] = None
    c: Annotated[Optional[float], Field(description="Vorticity scale")] = None
    wall_time_seconds: Annotated[float, Field(ge=0.0, description="Elapsed wall time")] = 0.0


@dataclass(frozen=True)
class ChainTrace:
    """States after each transition, the acceptance flag of each transition and run metadata."""

    states: Matrix
    accepted: np.ndarray
    meta: TraceMetadata

    def __post_init__(self):
        if self.states.ndim != 2 or self.states.shape[0] != self.accepted.shape[0]:
            raise InvariantViolation(
                f"Trace has {self.states.shape[0]} states but {self.accepted.shape[0]} acceptance flags"
            )

    def __len__(self) -> int:
        return self.states.shape[0]

    @property
    def dimension(self) -> int:
        return self.states.shape[1]


@dataclass(frozen=True)
class EacfResult:
    lags: np.ndarray
    values: Matrix

    @property
    def normalized(self) -> Matrix:
        """r(k) / r(0) per coordinate; zero for coordinates with zero variance."""
        r0 = self.values[0]
        out = np.zeros_like(self.values)
        np.divide(self.values, r0, out=out, where=r0 != 0.0)
        return out


@dataclass(frozen=True)
class SummaryRow:
    coord: int
    batch_means_asvar: float
    mean: float
    variance: float


def eacf(trace: ChainTrace, max_lag: int) -> EacfResult:
    """r(k) = 1/(P-k) sum_{p < P-k} (X_p - mean)(X_{p+k} - mean), k = 0..max_lag."""
    length = len(trace)
    if max_lag < 0 or max_lag >= length:
        raise TraceTooShort(f"Lag {max_lag} needs a trace longer than {length}")
    centered = trace.states - trace.states.mean(axis=0)
    values = np.empty((max_lag + 1, trace.dimension))
    for k in range(max_lag + 1):
        values[k] = np.einsum("ij,ij->j", centered[: length - k], centered[k:]) / (length - k)
    return EacfResult(lags=np.arange(max_lag + 1), values=values)


def batch_means_asvar(trace: ChainTrace) -> np.ndarray:
    """m * Var(batch means) over m = floor(sqrt(P)) batches of length m; the remainder is dropped."""
    length = len(trace)
    if length < MIN_BATCH_TRACE_LENGTH:
        raise TraceTooShort(f"Batch means need at least {MIN_BATCH_TRACE_LENGTH} states, got {length}")
    m = math.isqrt(length)
    batch_means = trace.states[: m * m].reshape(m, m, trace.dimension).mean(axis=1)
    return m * batch_means.var(axis=0, ddof=1)


def acceptance_ratio(trace: ChainTrace) -> float:
    if len(trace) == 0:
        raise TraceTooShort("Acceptance ratio of an empty trace is undefined")
    return float(np.count_nonzero(trace.accepted)) / len(trace)


def summarize(trace: ChainTrace) -> List[SummaryRow]:
    asvar = batch_means_asvar(trace)
    means = trace.states.mean(axis=0)
    variances = trace.states.var(axis=0)
    return [
        SummaryRow(coord=i + 1, batch_means_asvar=float(asvar[i]), mean=float(means[i]), variance=float(variances[i]))
        for i in range(trace.dimension)
    ]


def write_eacf_csv(path: Path, result: EacfResult) -> None:
    n = result.values.shape[1]
    header = ",".join(["lag"] + [f"coord_{i}" for i in range(1, n + 1)] + [f"coordn_{i}" for i in range(1, n + 1)])
    table = np.column_stack([result.lags, result.values, result.normalized])
    fmt = ["%d"] + [CSV_FLOAT_FORMAT] * (2 * n)
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt=fmt)


def write_summary_csv(path: Path, rows: List[SummaryRow]) -> None:
    lines = ["coord,batch_means_asvar,mean,variance"]
    lines += [
        f"{r.coord},{r.batch_means_asvar:.17g},{r.mean:.17g},{r.variance:.17g}" for r in rows
    ]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_trace_csv(path: Path, trace: ChainTrace) -> None:
    n = trace.dimension
    header = ",".join(["step"] + [f"x_{i}" for i in range(1, n + 1)] + ["accepted"])
    table = np.column_stack([np.arange(1, len(trace) + 1), trace.states, trace.accepted.astype(int)])
    fmt = ["%d"] + [CSV_FLOAT_FORMAT] * n + ["%d"]
    np.savetxt(path, table, delimiter=",", header=header, comments="", fmt=fmt)


def write_acceptance_csv(path: Path, ratios: Dict[str, float]) -> None:
    lines = ["algorithm,acceptance_ratio"] + [f"{name},{value:.17g}" for name, value in ratios.items()]
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def write_metadata(path: Path, meta: TraceMetadata) -> None:
    Path(path).write_text(meta.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.debug(f"Wrote metadata for {meta.algorithm} to {path}")
