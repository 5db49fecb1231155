"""Mini-batch Adam training loop and RMSE evaluation."""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .autodiff import backward, forward
from .errors import ConfigError, DimensionError, NumericError
from .infer import predict
from .params import MiniBatch, ModelConfig, RawParams, init_params, materialize


@dataclass(frozen=True)
class TrainConfig:
    epochs: int = 100
    batch_size: int = 64
    learning_rate: float = 0.01
    beta1: float = 0.9
    beta2: float = 0.999
    adam_eps: float = 1e-8
    seed: int = 0
    shuffle: bool = True

    def __post_init__(self):
        if self.epochs < 1:
            raise ConfigError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ConfigError(f"batch_size must be >= 1, got {self.batch_size}")
        if not self.learning_rate > 0:
            raise ConfigError(f"learning_rate must be > 0, got {self.learning_rate}")


@dataclass
class TrainReport:
    epoch_losses: list[float]
    rmse_train: list[float]
    rmse_test: list[float]
    wall_time_s: float
    epochs_run: int


@dataclass
class AdamState:
    """First/second moment accumulators, one pair per raw tensor."""

    m: dict[str, np.ndarray]
    v: dict[str, np.ndarray]

    @classmethod
    def init(cls, raw: RawParams) -> "AdamState":
        arrays = raw.arrays()
        return cls(
            m={k: np.zeros_like(a) for k, a in arrays.items()},
            v={k: np.zeros_like(a) for k, a in arrays.items()},
        )


def make_batches(x: np.ndarray, y: np.ndarray, batch_size: int, seed: int,
                 epoch: int, shuffle: bool = True) -> list[MiniBatch]:
    """Partition the dataset into ceil(N/B) batches covering it exactly once.

    The permutation is re-drawn each epoch from ``seed ^ epoch``; the final
    batch may be smaller than ``batch_size``.
    """
    n = x.shape[0]
    if n < 1:
        raise DimensionError("cannot batch an empty dataset")
    if shuffle:
        order = np.random.default_rng(seed ^ epoch).permutation(n)
    else:
        order = np.arange(n)
    return [
        MiniBatch(x=x[order[s:s + batch_size]], y=y[order[s:s + batch_size]])
        for s in range(0, n, batch_size)
    ]


def adam_step(raw: RawParams, grads: dict[str, np.ndarray], state: AdamState,
              lr: float, t: int, beta1: float = 0.9, beta2: float = 0.999,
              eps: float = 1e-8) -> tuple[RawParams, AdamState]:
    """One bias-corrected Adam update; returns fresh params and state."""
    if t < 1:
        raise ConfigError(f"step counter must be >= 1, got {t}")
    new_params = {}
    new_m = {}
    new_v = {}
    for name, value in raw.arrays().items():
        g = grads[name]
        if not np.all(np.isfinite(g)):
            raise NumericError(f"non-finite gradient for {name!r}")
        m = beta1 * state.m[name] + (1.0 - beta1) * g
        v = beta2 * state.v[name] + (1.0 - beta2) * np.square(g)
        m_hat = m / (1.0 - beta1 ** t)
        v_hat = v / (1.0 - beta2 ** t)
        new_params[name] = value - lr * m_hat / (np.sqrt(v_hat) + eps)
        new_m[name] = m
        new_v[name] = v
    return raw.replace(**new_params), AdamState(m=new_m, v=new_v)


def rmse(pred: np.ndarray, target: np.ndarray) -> np.ndarray:
    """Per-output root mean squared error, shape [D]."""
    pred = np.asarray(pred, dtype=np.float64)
    target = np.asarray(target, dtype=np.float64)
    if pred.shape != target.shape:
        raise DimensionError(f"prediction shape {pred.shape} != target shape {target.shape}")
    return np.sqrt(np.mean(np.square(pred - target), axis=0))


def _check_constraints(raw: RawParams, config: ModelConfig) -> None:
    params = materialize(raw, config.kind)
    if config.kind == "t1":
        assert np.all(params.sigma > 0)
    else:
        assert np.all(params.h > 0) and np.all(params.h < 1)
        assert np.all(params.sigma_lo > 0)
        assert np.all(params.sigma_lo <= params.sigma_hi)


def train(config: ModelConfig, tconfig: TrainConfig,
          train_data: tuple[np.ndarray, np.ndarray],
          test_data: tuple[np.ndarray, np.ndarray],
          on_epoch: Optional[Callable[[int, float], None]] = None,
          ) -> tuple[RawParams, TrainReport]:
    """Run the full mini-batch loop and report normalized-unit RMSEs.

    ``on_epoch(epoch, loss)`` is invoked after every epoch (the CLI uses it
    to stream losses).  Raises NumericError with epoch/batch context if the
    loss or a gradient goes non-finite.
    """
    x_train, y_train = (np.asarray(a, dtype=np.float64) for a in train_data)
    x_test, y_test = (np.asarray(a, dtype=np.float64) for a in test_data)
    started = time.perf_counter()

    raw = init_params(config, x_train, tconfig.seed)
    state = AdamState.init(raw)
    step = 0
    epoch_losses = []
    for epoch in range(1, tconfig.epochs + 1):
        batches = make_batches(
            x_train, y_train, tconfig.batch_size, tconfig.seed, epoch, tconfig.shuffle
        )
        sse = 0.0
        for b_idx, batch in enumerate(batches):
            try:
                loss, tape = forward(raw, batch, config)
                grads = backward(tape)
                step += 1
                raw, state = adam_step(
                    raw, grads, state, tconfig.learning_rate, step,
                    tconfig.beta1, tconfig.beta2, tconfig.adam_eps,
                )
            except NumericError as exc:
                raise NumericError(f"epoch {epoch}, batch {b_idx}: {exc}") from exc
            sse += loss * batch.size
        epoch_loss = sse / x_train.shape[0]
        epoch_losses.append(epoch_loss)
        _check_constraints(raw, config)
        if on_epoch is not None:
            on_epoch(epoch, epoch_loss)

    rmse_train = rmse(predict(raw, config, x_train), y_train)
    rmse_test = rmse(predict(raw, config, x_test), y_test)
    report = TrainReport(
        epoch_losses=epoch_losses,
        rmse_train=rmse_train.tolist(),
        rmse_test=rmse_test.tolist(),
        wall_time_s=time.perf_counter() - started,
        epochs_run=tconfig.epochs,
    )
    return raw, report
