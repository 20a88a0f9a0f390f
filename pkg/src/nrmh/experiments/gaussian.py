"""
Gaussian experiments: non-reversible MH against a reversible baseline on the
3-dimensional and 9-dimensional diagonal targets.
"""

import json
import logging
import math
from functools import partial
from pathlib import Path
from typing import Any, Dict, List

import numpy as np
from pydantic import BaseModel

from ..nrmh_core.config import ExperimentConfig
from ..nrmh_core.csv_io import read_matrix_csv
from ..nrmh_core.diagnostics import (
    ChainTrace,
    acceptance_ratio,
    eacf,
    summarize,
    write_acceptance_csv,
    write_eacf_csv,
    write_metadata,
    write_summary_csv,
    write_trace_csv,
)
from ..nrmh_core.drift import drift_spectral_bound, optimize_skew_drift
from ..nrmh_core.errors import ConfigError, ParameterViolation
from ..nrmh_core.gaussian import (
    GaussianTarget,
    NRMHParams,
    SkewDrift,
    build_proposal,
    mala_baseline_step,
    mh_step,
    nrmh_step,
    optimal_spectral_bound,
    select_params,
)
from ..nrmh_core.rng import split_seed
from ..nrmh_core.sampling import ChainJob, run_chains
from .registry import experiment

logger = logging.getLogger("nrmh")

BUILTIN_3D_VARIANCES = (1.0, 1.0, 0.25)
BUILTIN_3D_SKEW = (
    (0.0, math.sqrt(3.0), 1.0),
    (-math.sqrt(3.0), 0.0, 1.0),
    (-1.0, -1.0, 0.0),
)
BUILTIN_9D_VARIANCES = (0.8147, 0.9058, 0.1270, 0.9134, 0.6324, 0.0975, 0.2785, 0.5469, 0.9575)
BUILTIN_VARIANCES = {3: BUILTIN_3D_VARIANCES, 9: BUILTIN_9D_VARIANCES}

MIN_STEPS = 16


class ParameterReport(BaseModel):
    """Contents of parameters.json."""

    dimension: int
    skew_source: str
    seed: int
    C1: float
    C2: float
    c: float
    h: float
    sigma: float
    spectral_bound: float
    reversible_spectral_bound: float
    optimal_spectral_bound: float


def resolve_target(config: ExperimentConfig, default_dimension: int) -> GaussianTarget:
    if config.covariance is not None:
        return GaussianTarget.from_covariance(read_matrix_csv(config.covariance))
    return GaussianTarget.diagonal(BUILTIN_VARIANCES[config.dimension or default_dimension])


def resolve_drift(config: ExperimentConfig, target: GaussianTarget, default_source: str) -> SkewDrift:
    source = config.skew or default_source
    if source == "builtin-3d":
        if target.n != 3:
            raise ConfigError(f"The builtin-3d skew drift needs a 3-dimensional target, got n={target.n}")
        return SkewDrift.from_matrix(np.array(BUILTIN_3D_SKEW))
    if source == "optimize":
        return optimize_skew_drift(target, budget=config.optimizer_restarts, seed=config.seed)
    if source == "zero":
        return SkewDrift.zero(target.n)
    S = read_matrix_csv(Path(source))
    if S.shape != (target.n, target.n):
        raise ConfigError(f"Skew matrix in {source} has shape {S.shape}, expected {(target.n, target.n)}")
    return SkewDrift.from_matrix(S)


def resolve_params(config: ExperimentConfig, target: GaussianTarget, drift: SkewDrift) -> NRMHParams:
    """Selected parameters with any overrides applied; overrides are re-checked jointly."""
    params = select_params(target, drift)
    if config.h is None and config.sigma is None and config.c is None:
        return params
    try:
        overridden = NRMHParams(
            h=params.h if config.h is None else config.h,
            sigma=params.sigma if config.sigma is None else config.sigma,
            c=params.c if config.c is None else config.c,
            C1=params.C1,
            C2=params.C2,
            n=params.n,
        )
    except ParameterViolation as e:
        raise ConfigError(f"Parameter overrides are not admissible: {e}") from e
    logger.info(f"Using parameter overrides: c={overridden.c:.4g} h={overridden.h:.4g} sigma={overridden.sigma:.4g}")
    return overridden


def _starting_point(config: ExperimentConfig, n: int) -> np.ndarray:
    if config.start is None:
        return np.zeros(n)
    if len(config.start) != n:
        raise ConfigError(f"Starting point has {len(config.start)} coordinates, target has {n}")
    return np.array(config.start, dtype=float)


def _write_chain_artifacts(out: Path, trace: ChainTrace, config: ExperimentConfig) -> None:
    chain_dir = out / trace.meta.algorithm
    chain_dir.mkdir(parents=True, exist_ok=True)
    write_eacf_csv(chain_dir / "eacf.csv", eacf(trace, config.max_lag))
    write_summary_csv(chain_dir / "summary.csv", summarize(trace))
    write_metadata(chain_dir / "metadata.json", trace.meta)
    if config.write_traces:
        write_trace_csv(chain_dir / "trace.csv", trace)


async def run_gaussian_experiment(
    config: ExperimentConfig, default_dimension: int, default_skew: str
) -> Dict[str, Any]:
    if config.steps < MIN_STEPS:
        raise ConfigError(f"Need at least {MIN_STEPS} steps for batch means, got {config.steps}")
    if config.max_lag >= config.steps:
        raise ConfigError(f"max_lag={config.max_lag} must be below steps={config.steps}")

    target = resolve_target(config, default_dimension)
    drift = resolve_drift(config, target, default_skew)
    params = resolve_params(config, target, drift)
    model = build_proposal(target, drift, params)
    x0 = _starting_point(config, target.n)

    report = ParameterReport(
        dimension=target.n,
        skew_source=config.skew or default_skew,
        seed=config.seed,
        C1=params.C1,
        C2=params.C2,
        c=params.c,
        h=params.h,
        sigma=params.sigma,
        spectral_bound=drift_spectral_bound(target, drift),
        reversible_spectral_bound=drift_spectral_bound(target, SkewDrift.zero(target.n)),
        optimal_spectral_bound=optimal_spectral_bound(target),
    )

    common = {"x0": x0, "steps": config.steps, "h": params.h}
    jobs: List[ChainJob] = [
        ChainJob(
            algorithm="nrmh",
            step=partial(nrmh_step, model),
            seed=split_seed(config.seed, 0),
            sigma=params.sigma,
            c=params.c,
            **common,
        )
    ]
    if config.baseline == "mala":
        jobs.append(
            ChainJob(algorithm="mala", step=partial(mala_baseline_step, target, params.h), seed=split_seed(config.seed, 1), **common)
        )
    elif config.baseline == "mh":
        jobs.append(
            ChainJob(algorithm="mh", step=partial(mh_step, model), seed=split_seed(config.seed, 1), sigma=params.sigma, **common)
        )

    traces = await run_chains(jobs)

    out = config.out
    out.mkdir(parents=True, exist_ok=True)
    (out / "parameters.json").write_text(report.model_dump_json(indent=2) + "\n", encoding="utf-8")
    ratios = {trace.meta.algorithm: acceptance_ratio(trace) for trace in traces}
    write_acceptance_csv(out / "acceptance.csv", ratios)
    for trace in traces:
        _write_chain_artifacts(out, trace, config)

    lines = [
        f"c = {params.c:.4f}, h = {params.h:.4g}, sigma = {params.sigma:.4f}",
        f"s(B) = {report.spectral_bound:.4f} (reversible {report.reversible_spectral_bound:.4f}, "
        f"optimum {report.optimal_spectral_bound:.4f})",
        "acceptance: " + ", ".join(f"{name} = {value:.4f}" for name, value in ratios.items()),
        f"artifacts written to {out}",
    ]
    return {
        "success": True,
        "message": "\n".join(lines),
        "parameters": json.loads(report.model_dump_json()),
        "acceptance": ratios,
        "out": str(out),
    }


@experiment(name="experiment3d")
async def experiment3d(config: ExperimentConfig) -> Dict[str, Any]:
    """Compare NRMH and MALA on the 3-dimensional target diag(1, 1, 1/4) with its known optimal skew drift."""
    return await run_gaussian_experiment(config, default_dimension=3, default_skew="builtin-3d")


@experiment(name="experiment9d")
async def experiment9d(config: ExperimentConfig) -> Dict[str, Any]:
    """Compare NRMH and MALA on the 9-dimensional diagonal target with an optimized skew drift."""
    return await run_gaussian_experiment(config, default_dimension=9, default_skew="optimize")
