"""Model configuration, parameter containers and the constraint-free
reparameterization.

Optimizers work on :class:`RawParams`, whose entries are unconstrained
reals.  :func:`materialize` maps them onto :class:`ConstrainedParams`
that always describe valid fuzzy sets:

* LMF heights ``h = sigmoid(h_raw)`` lie strictly inside (0, 1),
* spreads ``sigma_lo = sigma_raw - |delta|`` and
  ``sigma_hi = sigma_raw + |delta|`` are ordered by construction and
  floored at ``EPS_SIGMA`` so the Gaussians stay evaluable.

Models are persisted as a single JSON document holding the config and the
raw tensors; constrained values are re-derived on load, never stored.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .constants import EPS_SIGMA
from .errors import (
    CapacityError,
    ConfigError,
    DimensionError,
    InsufficientDataError,
    ParameterError,
)

KINDS = ("t1", "it2")
REDUCERS = ("enum", "km")

# Rule count above which the 2**P enumeration no longer fits in memory.
MAX_ENUM_RULES = 20

H_RAW_INIT = math.log(0.9 / 0.1)  # sigmoid(H_RAW_INIT) == 0.9


@dataclass(frozen=True)
class ModelConfig:
    """Structural description of a fuzzy model."""

    kind: str
    rules: int
    inputs: int
    outputs: int = 1
    reducer: str = "enum"

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ConfigError(f"kind must be one of {KINDS}, got {self.kind!r}")
        if self.reducer not in REDUCERS:
            raise ConfigError(f"reducer must be one of {REDUCERS}, got {self.reducer!r}")
        for name in ("rules", "inputs", "outputs"):
            v = getattr(self, name)
            if not isinstance(v, int) or v < 1:
                raise ConfigError(f"{name} must be a positive integer, got {v!r}")
        if self.reducer == "enum" and self.rules > MAX_ENUM_RULES:
            raise CapacityError(
                f"enumeration reducer holds 2**P candidates; "
                f"P={self.rules} exceeds the P<={MAX_ENUM_RULES} bound"
            )

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "rules": self.rules,
            "inputs": self.inputs,
            "outputs": self.outputs,
            "reducer": self.reducer,
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ModelConfig":
        try:
            return cls(
                kind=d["kind"],
                rules=int(d["rules"]),
                inputs=int(d["inputs"]),
                outputs=int(d["outputs"]),
                reducer=d.get("reducer", "enum"),
            )
        except KeyError as exc:
            raise ConfigError(f"model config is missing field {exc}") from exc


@dataclass
class RawParams:
    """Unconstrained learnable tensors, exactly as the optimizer sees them.

    ``delta`` and ``h_raw`` are only meaningful for IT2 models; a T1 model
    ignores them (their gradients are exactly zero).
    """

    c: np.ndarray          # [P, M] rule centers
    sigma_raw: np.ndarray  # [P, M]
    a: np.ndarray          # [D, P, M] consequent slopes
    a0: np.ndarray         # [D, P] consequent offsets
    delta: Optional[np.ndarray] = None   # [P, M] spread split (IT2)
    h_raw: Optional[np.ndarray] = None   # [P, M] pre-sigmoid LMF height (IT2)

    def arrays(self) -> dict[str, np.ndarray]:
        """Present tensors keyed by field name."""
        out = {"c": self.c, "sigma_raw": self.sigma_raw, "a": self.a, "a0": self.a0}
        if self.delta is not None:
            out["delta"] = self.delta
        if self.h_raw is not None:
            out["h_raw"] = self.h_raw
        return out

    def replace(self, **updates: np.ndarray) -> "RawParams":
        fields = {
            "c": self.c,
            "sigma_raw": self.sigma_raw,
            "a": self.a,
            "a0": self.a0,
            "delta": self.delta,
            "h_raw": self.h_raw,
        }
        fields.update(updates)
        return RawParams(**fields)

    def copy(self) -> "RawParams":
        return RawParams(
            c=self.c.copy(),
            sigma_raw=self.sigma_raw.copy(),
            a=self.a.copy(),
            a0=self.a0.copy(),
            delta=None if self.delta is None else self.delta.copy(),
            h_raw=None if self.h_raw is None else self.h_raw.copy(),
        )

    def check(self, config: ModelConfig) -> None:
        p, m, d = config.rules, config.inputs, config.outputs
        want = {"c": (p, m), "sigma_raw": (p, m), "a": (d, p, m), "a0": (d, p)}
        for name, shape in want.items():
            arr = getattr(self, name)
            if arr.shape != shape:
                raise DimensionError(f"{name} has shape {arr.shape}, expected {shape}")
        if config.kind == "it2":
            if self.delta is None or self.h_raw is None:
                raise ConfigError("IT2 model requires delta and h_raw tensors")
            if self.delta.shape != (p, m) or self.h_raw.shape != (p, m):
                raise DimensionError("delta/h_raw must have shape [P, M]")


@dataclass(frozen=True)
class ConstrainedParams:
    """Materialized fuzzy-set parameters; always satisfy validity bounds."""

    kind: str
    c: np.ndarray
    sigma: Optional[np.ndarray] = None      # T1 spread
    sigma_lo: Optional[np.ndarray] = None   # IT2 lower spread
    sigma_hi: Optional[np.ndarray] = None   # IT2 upper spread
    h: Optional[np.ndarray] = None          # IT2 LMF height in (0, 1)


@dataclass(frozen=True)
class MiniBatch:
    """One optimizer step worth of rows: features [B, M], targets [B, D]."""

    x: np.ndarray
    y: np.ndarray

    def __post_init__(self):
        if self.x.ndim != 2 or self.y.ndim != 2 or self.x.shape[0] != self.y.shape[0]:
            raise DimensionError(
                f"batch shapes disagree: x {self.x.shape}, y {self.y.shape}"
            )

    @property
    def size(self) -> int:
        return self.x.shape[0]


def sigmoid(x: np.ndarray) -> np.ndarray:
    """Numerically stable logistic function."""
    x = np.asarray(x, dtype=np.float64)
    out = np.empty_like(x)
    pos = x >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-x[pos]))
    ex = np.exp(x[~pos])
    out[~pos] = ex / (1.0 + ex)
    return out


def materialize(raw: RawParams, kind: str) -> ConstrainedParams:
    """Map raw optimizer-space tensors to valid fuzzy-set parameters.

    The mapping is differentiable except at ``delta == 0`` and where the
    spread floor engages; the training graph uses subgradient 0 at both.
    """
    if kind not in KINDS:
        raise ConfigError(f"kind must be one of {KINDS}, got {kind!r}")
    for name, arr in raw.arrays().items():
        if not np.all(np.isfinite(arr)):
            raise ParameterError(f"raw parameter {name!r} contains non-finite entries")

    if kind == "t1":
        sigma = np.maximum(raw.sigma_raw, EPS_SIGMA)
        return ConstrainedParams(kind="t1", c=raw.c, sigma=sigma)

    if raw.delta is None or raw.h_raw is None:
        raise ConfigError("IT2 materialization requires delta and h_raw")
    spread = np.abs(raw.delta)
    sigma_lo = np.maximum(raw.sigma_raw - spread, EPS_SIGMA)
    sigma_hi = np.maximum(raw.sigma_raw + spread, EPS_SIGMA)
    h = sigmoid(raw.h_raw)
    return ConstrainedParams(
        kind="it2", c=raw.c, sigma_lo=sigma_lo, sigma_hi=sigma_hi, h=h
    )


def init_params(config: ModelConfig, train_x: np.ndarray, seed: int) -> RawParams:
    """Seeded initialization: centers are P distinct training rows, unit raw
    spreads, a small spread split and h near 0.9 for IT2, small uniform
    consequent slopes and zero offsets."""
    train_x = np.asarray(train_x, dtype=np.float64)
    if train_x.ndim != 2 or train_x.shape[1] != config.inputs:
        raise DimensionError(
            f"train_x has shape {train_x.shape}, expected [N, {config.inputs}]"
        )
    n = train_x.shape[0]
    p, m, d = config.rules, config.inputs, config.outputs
    if n < p:
        raise InsufficientDataError(
            f"initialization samples {p} distinct rows but only {n} are available"
        )
    rng = np.random.default_rng(seed)
    idx = rng.choice(n, size=p, replace=False)
    c = train_x[idx].copy()
    sigma_raw = np.ones((p, m))
    a = rng.uniform(-0.1, 0.1, size=(d, p, m))
    a0 = np.zeros((d, p))
    if config.kind == "it2":
        delta = np.full((p, m), 0.1)
        h_raw = np.full((p, m), H_RAW_INIT)
    else:
        delta = None
        h_raw = None
    return RawParams(c=c, sigma_raw=sigma_raw, a=a, a0=a0, delta=delta, h_raw=h_raw)


def model_to_dict(config: ModelConfig, raw: RawParams, normalization: dict | None = None) -> dict:
    """JSON-ready document ``{config, raw_params[, normalization]}``.

    ``normalization`` carries the z-score statistics a model was trained
    with so evaluation on raw CSV files can reproduce training units.
    """
    doc = {
        "config": config.to_dict(),
        "raw_params": {k: v.tolist() for k, v in raw.arrays().items()},
    }
    if normalization is not None:
        doc["normalization"] = normalization
    return doc


def model_from_dict(doc: dict) -> tuple[ModelConfig, RawParams, dict | None]:
    try:
        config = ModelConfig.from_dict(doc["config"])
        tensors = doc["raw_params"]
        raw = RawParams(
            c=np.asarray(tensors["c"], dtype=np.float64),
            sigma_raw=np.asarray(tensors["sigma_raw"], dtype=np.float64),
            a=np.asarray(tensors["a"], dtype=np.float64),
            a0=np.asarray(tensors["a0"], dtype=np.float64),
            delta=(
                np.asarray(tensors["delta"], dtype=np.float64)
                if "delta" in tensors
                else None
            ),
            h_raw=(
                np.asarray(tensors["h_raw"], dtype=np.float64)
                if "h_raw" in tensors
                else None
            ),
        )
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"malformed model document: {exc}") from exc
    raw.check(config)
    return config, raw, doc.get("normalization")


def save_model(path, config: ModelConfig, raw: RawParams, normalization: dict | None = None) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(model_to_dict(config, raw, normalization), fh)
        fh.write("\n")


def load_model(path) -> tuple[ModelConfig, RawParams, dict | None]:
    try:
        with open(path, "r", encoding="utf-8") as fh:
            doc = json.load(fh)
    except FileNotFoundError as exc:
        raise ConfigError(f"model file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"model file {path} is not valid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise ConfigError(f"model file {path} does not hold a JSON object")
    return model_from_dict(doc)
