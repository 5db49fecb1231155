"""Takagi-Sugeno consequents and the T1 weighted-average output."""

from __future__ import annotations

import numpy as np

from .constants import EPS_FIRING
from .errors import DimensionError
from .membership import T1Firings


def consequents(x: np.ndarray, a: np.ndarray, a0: np.ndarray) -> np.ndarray:
    """Per-rule affine outputs ``y[b,d,p] = sum_m a[d,p,m] x[b,m] + a0[d,p]``.

    Accumulates feature terms in index order starting from the offset, so a
    row's value never depends on the rest of the batch.
    """
    x = np.asarray(x, dtype=np.float64)
    a = np.asarray(a, dtype=np.float64)
    a0 = np.asarray(a0, dtype=np.float64)
    if x.ndim != 2 or a.ndim != 3 or a0.ndim != 2:
        raise DimensionError("consequents expects x [B,M], a [D,P,M], a0 [D,P]")
    b, m = x.shape
    d, p, ma = a.shape
    if ma != m or a0.shape != (d, p):
        raise DimensionError(
            f"consequent shapes disagree: x {x.shape}, a {a.shape}, a0 {a0.shape}"
        )
    yp = np.broadcast_to(a0[None, :, :], (b, d, p))
    for j in range(m):
        yp = yp + a[None, :, :, j] * x[:, j][:, None, None]
    return yp


def t1_output(f: T1Firings, yp: np.ndarray) -> np.ndarray:
    """Firing-weighted average of rule consequents, shape [B, D].

    The normalizer carries an additive EPS_FIRING guard so rows far from
    every rule center degrade to 0 instead of dividing by zero.
    """
    fv = f.f
    if fv.ndim != 2 or yp.ndim != 3 or fv.shape[0] != yp.shape[0] or fv.shape[1] != yp.shape[2]:
        raise DimensionError(f"firings {fv.shape} do not match consequents {yp.shape}")
    num = np.sum(yp * fv[:, None, :], axis=2)
    den = np.sum(fv, axis=1) + EPS_FIRING
    return num / den[:, None]
