"""
Chain runner shared by the Gaussian samplers.
"""

import asyncio
import logging
import time
from dataclasses import dataclass
from typing import Callable, List, Optional, Sequence, Tuple

import numpy as np

from .diagnostics import ChainTrace, TraceMetadata, acceptance_ratio
from .numerics import Vector
from .rng import GaussianStream

logger = logging.getLogger("nrmh")

StepFunction = Callable[[Vector, GaussianStream], Tuple[Vector, bool]]


@dataclass(frozen=True)
class ChainJob:
    """Everything needed to run one chain; the stream is created from ``seed`` when the job starts."""

    algorithm: str
    step: StepFunction
    x0: Vector
    steps: int
    seed: int
    h: Optional[float] = None
    sigma: Optional[float] = None
    c: Optional[float] = None


def run_chain(
    step: StepFunction,
    x0: Vector,
    steps: int,
    stream: GaussianStream,
    meta: TraceMetadata,
) -> ChainTrace:
    """Apply ``step`` ``steps`` times from x0, recording every state and acceptance flag."""
    x = np.array(x0, dtype=float)
    states = np.empty((steps, x.size))
    accepted = np.zeros(steps, dtype=bool)
    logger.info(f"Starting {meta.algorithm} chain: {steps} steps, seed {meta.seed}")
    started = time.perf_counter()
    for i in range(steps):
        x, accepted[i] = step(x, stream)
        states[i] = x
    elapsed = time.perf_counter() - started
    trace = ChainTrace(
        states=states,
        accepted=accepted,
        meta=meta.model_copy(update={"wall_time_seconds": elapsed}),
    )
    if steps:
        logger.info(
            f"Finished {meta.algorithm} chain in {elapsed:.1f}s, "
            f"acceptance ratio {acceptance_ratio(trace):.4f}"
        )
    return trace


def _run_job(job: ChainJob) -> ChainTrace:
    stream = GaussianStream(job.seed)
    meta = TraceMetadata(
        algorithm=job.algorithm,
        seed=stream.seed,
        prng=stream.name,
        steps=job.steps,
        dimension=len(job.x0),
        h=job.h,
        sigma=job.sigma,
        c=job.c,
    )
    return run_chain(job.step, job.x0, job.steps, stream, meta)


async def run_chains(jobs: Sequence[ChainJob]) -> List[ChainTrace]:
    """Run independent chains concurrently in worker threads; results keep the job order."""
    return list(await asyncio.gather(*(asyncio.to_thread(_run_job, job) for job in jobs)))
