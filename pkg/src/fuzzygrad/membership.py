"""Batched Gaussian membership grades and rule firing strengths.

All arrays are batch-major: inputs ``[B, M]``, grades ``[B, P, M]``,
firings ``[B, P]``.  Every operation is row-independent, so evaluating a
batch is bit-identical to evaluating its rows one at a time.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConfigError, DimensionError
from .params import ConstrainedParams


@dataclass(frozen=True)
class T1Firings:
    f: np.ndarray  # [B, P], product of grades over the feature axis


@dataclass(frozen=True)
class IT2Firings:
    f_lo: np.ndarray  # [B, P]
    f_hi: np.ndarray  # [B, P], f_lo <= f_hi elementwise


def _check_inputs(x: np.ndarray, params: ConstrainedParams) -> np.ndarray:
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2:
        raise DimensionError(f"inputs must be [B, M], got shape {x.shape}")
    if x.shape[1] != params.c.shape[1]:
        raise DimensionError(
            f"inputs have {x.shape[1]} features but rules expect {params.c.shape[1]}"
        )
    return x


def gauss(x: np.ndarray, c: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    """exp(-(x - c)^2 / (2 sigma^2)) broadcast to [B, P, M]."""
    d = x[:, None, :] - c[None, :, :]
    q = np.square(d) / (2.0 * np.square(sigma))[None, :, :]
    return np.exp(-q)


def mu_t1(x: np.ndarray, params: ConstrainedParams) -> np.ndarray:
    """Membership grades of a T1 model, shape [B, P, M], values in (0, 1]."""
    if params.kind != "t1" or params.sigma is None:
        raise ConfigError("mu_t1 requires T1 constrained parameters")
    x = _check_inputs(x, params)
    return gauss(x, params.c, params.sigma)


def mu_it2(x: np.ndarray, params: ConstrainedParams) -> tuple[np.ndarray, np.ndarray]:
    """Lower and upper membership grades of an IT2 model.

    The upper grade is a Gaussian with the wide spread; the lower grade is
    the height-scaled Gaussian with the narrow spread, so lower <= upper
    holds elementwise for any valid parameters.
    """
    if params.kind != "it2" or params.sigma_lo is None:
        raise ConfigError("mu_it2 requires IT2 constrained parameters")
    x = _check_inputs(x, params)
    upper = gauss(x, params.c, params.sigma_hi)
    lower = params.h[None, :, :] * gauss(x, params.c, params.sigma_lo)
    return lower, upper


def firings(grades, kind: str):
    """Product of grades over the feature axis.

    ``grades`` is the array returned by :func:`mu_t1` (kind ``"t1"``) or the
    (lower, upper) pair from :func:`mu_it2` (kind ``"it2"``).  The product
    accumulates feature by feature in index order so results do not depend
    on batch size.
    """
    if kind == "t1":
        return T1Firings(f=_prod_features(grades))
    if kind == "it2":
        lower, upper = grades
        return IT2Firings(f_lo=_prod_features(lower), f_hi=_prod_features(upper))
    raise ConfigError(f"kind must be 't1' or 'it2', got {kind!r}")


def _prod_features(mu: np.ndarray) -> np.ndarray:
    if mu.ndim != 3:
        raise DimensionError(f"grades must be [B, P, M], got shape {mu.shape}")
    f = mu[:, :, 0]
    for m in range(1, mu.shape[2]):
        f = f * mu[:, :, m]
    return f
