"""Plain (gradient-free) batched inference for trained models."""

from __future__ import annotations

import numpy as np

from .errors import DimensionError
from .it2 import it2_output, reduce_enum, reduce_km
from .membership import firings, mu_it2, mu_t1
from .params import ModelConfig, RawParams, materialize
from .t1 import consequents, t1_output


def predict(raw: RawParams, config: ModelConfig, x: np.ndarray, row_chunk: int = 2048) -> np.ndarray:
    """Model outputs for rows ``x`` [N, M], shape [N, D].

    Rows are processed in chunks; every operation in the pipeline is
    row-independent, so chunking never changes results.
    """
    raw.check(config)
    x = np.asarray(x, dtype=np.float64)
    if x.ndim != 2 or x.shape[1] != config.inputs:
        raise DimensionError(f"inputs must be [N, {config.inputs}], got {x.shape}")
    params = materialize(raw, config.kind)
    outputs = []
    for start in range(0, x.shape[0], row_chunk):
        xb = x[start:start + row_chunk]
        yp = consequents(xb, raw.a, raw.a0)
        if config.kind == "t1":
            f = firings(mu_t1(xb, params), "t1")
            outputs.append(t1_output(f, yp))
        else:
            f = firings(mu_it2(xb, params), "it2")
            if config.reducer == "km":
                interval = reduce_km(f, yp)
            else:
                interval = reduce_enum(f, yp)
            outputs.append(it2_output(interval))
    return np.concatenate(outputs, axis=0)
