"""Pure-numpy enumeration scan.

Evaluates every switch column ``j`` of the candidate ratio

    Y(j) = (alpha0 + sum_p alpha_p u_p(j)) / (beta0 + sum_p beta_p u_p(j) + eps)

where ``u_p(j)`` is bit ``P-1-p`` of ``j`` (rule 0 is the most significant
bit), and returns per-row min/max values with the lowest attaining column
indices.

Columns are processed in fixed chunks of ``2**chunk_bits``; within a chunk
the subset sums are built by doubling, which costs O(2**P) adds per row
instead of O(P * 2**P).  Chunk boundaries depend only on P, and rows are
independent, so results never depend on batch size or memory blocking.
The compiled backend reproduces the same additions in the same order.
"""

from __future__ import annotations

import numpy as np

from ..constants import ENUM_ROW_BUDGET


def enum_scan(alpha0, alpha, beta0, beta, eps, chunk_bits):
    r, p = alpha.shape
    k = min(p, chunk_bits)
    cols = 1 << k
    nchunks = 1 << (p - k)

    ylo = np.full(r, np.inf)
    yhi = np.full(r, -np.inf)
    jmin = np.zeros(r, dtype=np.int64)
    jmax = np.zeros(r, dtype=np.int64)

    rows_per_block = max(1, ENUM_ROW_BUDGET // cols)
    for r0 in range(0, r, rows_per_block):
        r1 = min(r, r0 + rows_per_block)
        _scan_rows(
            alpha0[r0:r1], alpha[r0:r1], beta0[r0:r1], beta[r0:r1],
            eps, p, k, cols, nchunks,
            ylo[r0:r1], yhi[r0:r1], jmin[r0:r1], jmax[r0:r1],
        )
    return ylo, yhi, jmin, jmax


def _scan_rows(alpha0, alpha, beta0, beta, eps, p, k, cols, nchunks,
               ylo, yhi, jmin, jmax):
    rb = alpha0.shape[0]
    rows = np.arange(rb)
    x = np.empty((rb, cols))
    z = np.empty((rb, cols))
    for chunk in range(nchunks):
        start = chunk << k
        # Seed with the high-rule contributions of this chunk, low rules
        # then enter via doubling; multiplying by the 0/1 bit keeps the
        # addition sequence identical for every column.
        bx = alpha0.copy()
        bz = beta0.copy()
        for q in range(p - k):
            bit = float((start >> (p - 1 - q)) & 1)
            bx = bx + alpha[:, q] * bit
            bz = bz + beta[:, q] * bit
        x[:, 0] = bx
        z[:, 0] = bz
        width = 1
        for i in range(k):
            q = p - 1 - i
            x[:, width:2 * width] = x[:, :width] + alpha[:, q:q + 1]
            z[:, width:2 * width] = z[:, :width] + beta[:, q:q + 1]
            width *= 2
        y = x / (z + eps)
        loc_min = y.argmin(axis=1)
        loc_max = y.argmax(axis=1)
        vmin = y[rows, loc_min]
        vmax = y[rows, loc_max]
        upd = vmin < ylo
        ylo[upd] = vmin[upd]
        jmin[upd] = start + loc_min[upd]
        upd = vmax > yhi
        yhi[upd] = vmax[upd]
        jmax[upd] = start + loc_max[upd]
