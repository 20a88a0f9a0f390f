import math

import numpy as np

from nrmh.nrmh_core.gaussian import (
    GaussianTarget,
    NRMHParams,
    SkewDrift,
    build_proposal,
    select_params,
)
from nrmh.nrmh_core.markov import cyclic_vorticity, make_compat_triple

BUILTIN_3D_VARIANCES = (1.0, 1.0, 0.25)
NINE_DIM_VARIANCES = (0.8147, 0.9058, 0.1270, 0.9134, 0.6324, 0.0975, 0.2785, 0.5469, 0.9575)
BUILTIN_3D_SKEW = np.array(
    [
        [0.0, math.sqrt(3.0), 1.0],
        [-math.sqrt(3.0), 0.0, 1.0],
        [-1.0, -1.0, 0.0],
    ]
)


def cyclic_triple(scale: float = 1.0 / 9.0, strict: bool = False):
    """Uniform 3-state proposal and target with the cyclic vorticity pattern.

    With the default scale the vorticity bound holds with equality, so the
    triple is only valid in non-strict mode.
    """
    Q = np.full((3, 3), 1.0 / 3.0)
    pi = np.full(3, 1.0 / 3.0)
    return make_compat_triple(Q, cyclic_vorticity(3, scale), pi, strict=strict)


def builtin_3d_model():
    """Target, drift and proposal model of the 3-dimensional example with selected parameters."""
    target = GaussianTarget.diagonal(BUILTIN_3D_VARIANCES)
    drift = SkewDrift.from_matrix(BUILTIN_3D_SKEW)
    params = select_params(target, drift)
    return build_proposal(target, drift, params)


def model_with_scale(model, c: float):
    """The same proposal with a different vorticity scale c."""
    p = model.params
    params = NRMHParams(h=p.h, sigma=p.sigma, c=c, C1=p.C1, C2=p.C2, n=p.n)
    return build_proposal(model.target, model.drift, params)


def random_target_and_drift(n: int, rng: np.random.Generator):
    """A random SPD covariance with moderate conditioning and a random skew drift of random size."""
    X = rng.normal(size=(n, n))
    V = X @ X.T / n + 0.3 * np.eye(n)
    Y = rng.normal(size=(n, n))
    S = rng.uniform(0.0, 2.0) * (Y - Y.T) / 2.0
    return GaussianTarget.from_covariance(V), SkewDrift.from_matrix(S)
