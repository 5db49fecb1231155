"""Interval type-2 type reduction, two ways.

The fast path enumerates all ``2**P`` switch assignments at once: each
assignment ``u`` picks, per rule, the upper (``u_p = 1``) or lower
(``u_p = 0``) firing, and the candidate centroid is the affine ratio

    Y(u) = (alpha0 + alpha . u) / (beta0 + beta . u)

with ``alpha0 = sum_p y_p f_lo_p``, ``alpha_p = y_p (f_hi_p - f_lo_p)``,
``beta0 = sum_p f_lo_p`` and ``beta_p = f_hi_p - f_lo_p``.  The reduced
interval is the min/max over all candidates, extracted by a single scan.

The classical iterative Karnik-Mendel procedure is kept as an independent
oracle: per sample it sorts the consequents and iterates the switching
point until it stops moving.  Both paths share the same additive
denominator guard, so they agree to high precision even when firings
vanish.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from . import _kernels
from .constants import EPS_FIRING
from .errors import CapacityError, ConfigError, DimensionError, NumericError
from .membership import IT2Firings
from .params import MAX_ENUM_RULES

KM_MAX_ITERS = 100


@dataclass(frozen=True)
class SwitchMatrix:
    """All binary switch assignments as columns; rule 0 is the most
    significant bit, so column j is the binary expansion of j."""

    rules: int
    u: np.ndarray  # [P, 2**P] uint8, read-only


@dataclass(frozen=True)
class TypeReducedInterval:
    y_lo: np.ndarray  # [B, D]
    y_hi: np.ndarray  # [B, D]


def _check_rules(p: int) -> None:
    if not isinstance(p, (int, np.integer)) or p < 1:
        raise ConfigError(f"rule count must be a positive integer, got {p!r}")
    if p > MAX_ENUM_RULES:
        raise CapacityError(
            f"2**{p} switch columns exceed the enumeration capacity bound "
            f"(P <= {MAX_ENUM_RULES})"
        )


@lru_cache(maxsize=8)
def _switch_matrix_cached(p: int) -> np.ndarray:
    cols = np.arange(1 << p, dtype=np.int64)
    u = np.empty((p, 1 << p), dtype=np.uint8)
    for row in range(p):
        u[row] = (cols >> (p - 1 - row)) & 1
    u.setflags(write=False)
    return u


def switch_matrix(p: int) -> SwitchMatrix:
    """The [P, 2**P] matrix of all switch assignments in counting order."""
    _check_rules(int(p))
    return SwitchMatrix(rules=int(p), u=_switch_matrix_cached(int(p)))


def alpha_beta(f_lo: np.ndarray, f_hi: np.ndarray, yp: np.ndarray):
    """Affine candidate coefficients (alpha0, alpha, beta0, beta).

    Shapes: alpha0 [B,D], alpha [B,D,P], beta0 [B], beta [B,P].
    """
    alpha0 = np.sum(yp * f_lo[:, None, :], axis=2)
    df = f_hi - f_lo
    alpha = yp * df[:, None, :]
    beta0 = np.sum(f_lo, axis=1)
    return alpha0, alpha, beta0, df


def _check_it2(f: IT2Firings, yp: np.ndarray) -> None:
    if not isinstance(f, IT2Firings):
        raise ConfigError("IT2 type reduction requires IT2 firing strengths")
    if (
        f.f_lo.ndim != 2
        or yp.ndim != 3
        or f.f_lo.shape != f.f_hi.shape
        or f.f_lo.shape[0] != yp.shape[0]
        or f.f_lo.shape[1] != yp.shape[2]
    ):
        raise DimensionError(
            f"firings {f.f_lo.shape} do not match consequents {yp.shape}"
        )


def reduce_enum(f: IT2Firings, yp: np.ndarray, u: SwitchMatrix | None = None) -> TypeReducedInterval:
    """Type-reduced interval via the enumeration scan.

    ``u`` may be supplied to pin the switch-column order explicitly; the
    scan backends generate the same columns arithmetically, so passing it
    only buys the consistency check.
    """
    _check_it2(f, yp)
    b, p = f.f_lo.shape
    d = yp.shape[1]
    _check_rules(p)
    if u is not None and u.rules != p:
        raise DimensionError(f"switch matrix is for P={u.rules}, firings have P={p}")
    ylo, yhi, _, _ = _scan(f, yp)
    return TypeReducedInterval(y_lo=ylo.reshape(b, d), y_hi=yhi.reshape(b, d))


def _scan(f: IT2Firings, yp: np.ndarray):
    """Flattened (row = batch x output) enumeration scan on the active backend."""
    b, p = f.f_lo.shape
    d = yp.shape[1]
    alpha0, alpha, beta0, beta = alpha_beta(f.f_lo, f.f_hi, yp)
    a0f = np.ascontiguousarray(alpha0.reshape(b * d))
    af = np.ascontiguousarray(alpha.reshape(b * d, p))
    b0f = np.ascontiguousarray(np.repeat(beta0, d))
    bf = np.ascontiguousarray(np.repeat(beta, d, axis=0))
    return _kernels.enum_scan(a0f, af, b0f, bf, EPS_FIRING)


def switch_bits(j: np.ndarray, p: int) -> np.ndarray:
    """Expand column indices to 0/1 assignments along a trailing rule axis."""
    shifts = np.arange(p - 1, -1, -1, dtype=np.int64)
    return ((j[..., None] >> shifts) & 1).astype(np.float64)


def km_endpoint(y, f_lo, f_hi, upper: bool, eps: float = EPS_FIRING):
    """One endpoint of the Karnik-Mendel interval for a single sample.

    Returns ``(value, switch)`` where ``switch`` is the 0/1 choice of the
    upper firing per rule in the original rule order.  The iteration stops
    once the switching index is stable between passes.
    """
    p = len(y)
    order = sorted(range(p), key=y.__getitem__)
    ys = [y[i] for i in order]
    fl = [f_lo[i] for i in order]
    fh = [f_hi[i] for i in order]

    num = 0.0
    den = 0.0
    for i in range(p):
        w = 0.5 * (fl[i] + fh[i])
        num += w * ys[i]
        den += w
    yy = num / (den + eps)

    k_prev = -1
    for _ in range(KM_MAX_ITERS):
        k = 0
        while k < p and ys[k] <= yy:
            k += 1
        # Small consequents get the upper firing when minimizing and the
        # lower firing when maximizing.
        num = 0.0
        den = 0.0
        for i in range(p):
            below = i < k
            if upper:
                w = fl[i] if below else fh[i]
            else:
                w = fh[i] if below else fl[i]
            num += w * ys[i]
            den += w
        yy = num / (den + eps)
        if k == k_prev:
            switch = np.zeros(p)
            for i in range(p):
                if upper:
                    used_hi = i >= k
                else:
                    used_hi = i < k
                if used_hi:
                    switch[order[i]] = 1.0
            return yy, switch
        k_prev = k
    raise NumericError("Karnik-Mendel iteration did not converge")


def reduce_km(f: IT2Firings, yp: np.ndarray) -> TypeReducedInterval:
    """Iterative Karnik-Mendel oracle; one sequential reduction per (b, d)."""
    _check_it2(f, yp)
    b, p = f.f_lo.shape
    d = yp.shape[1]
    y_lo = np.empty((b, d))
    y_hi = np.empty((b, d))
    for i in range(b):
        fl = f.f_lo[i].tolist()
        fh = f.f_hi[i].tolist()
        for j in range(d):
            ys = yp[i, j].tolist()
            y_lo[i, j], _ = km_endpoint(ys, fl, fh, upper=False)
            y_hi[i, j], _ = km_endpoint(ys, fl, fh, upper=True)
    return TypeReducedInterval(y_lo=y_lo, y_hi=y_hi)


def it2_output(interval: TypeReducedInterval) -> np.ndarray:
    """Defuzzified output: the midpoint of the reduced interval."""
    return (interval.y_lo + interval.y_hi) * 0.5
