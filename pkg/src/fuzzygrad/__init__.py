"""Gradient-trained Takagi-Sugeno fuzzy systems.

Type-1 and interval type-2 models with Gaussian antecedents, trained by
mini-batch Adam through a small reverse-mode tape.  The IT2 type-reduced
interval is obtained by scanning all 2**P switch assignments in one
batched pass; the classical iterative Karnik-Mendel procedure is kept as
an independent oracle and timing baseline.
"""

from ._kernels import BACKEND
from .data import Dataset, NormStats, denormalize_targets, load_csv, split, zscore
from .errors import (
    CapacityError,
    ConfigError,
    DataError,
    DimensionError,
    FuzzygradError,
    InsufficientDataError,
    NumericError,
    ParameterError,
)
from .infer import predict
from .it2 import (
    SwitchMatrix,
    TypeReducedInterval,
    it2_output,
    reduce_enum,
    reduce_km,
    switch_matrix,
)
from .membership import IT2Firings, T1Firings, firings, mu_it2, mu_t1
from .params import (
    ConstrainedParams,
    MiniBatch,
    ModelConfig,
    RawParams,
    init_params,
    load_model,
    materialize,
    save_model,
)
from .t1 import consequents, t1_output
from .train import AdamState, TrainConfig, TrainReport, adam_step, make_batches, rmse, train

__version__ = "0.1.0"

__all__ = [
    "AdamState",
    "BACKEND",
    "CapacityError",
    "ConfigError",
    "ConstrainedParams",
    "DataError",
    "Dataset",
    "DimensionError",
    "FuzzygradError",
    "InsufficientDataError",
    "IT2Firings",
    "MiniBatch",
    "ModelConfig",
    "NormStats",
    "NumericError",
    "ParameterError",
    "RawParams",
    "SwitchMatrix",
    "T1Firings",
    "TrainConfig",
    "TrainReport",
    "TypeReducedInterval",
    "adam_step",
    "consequents",
    "denormalize_targets",
    "firings",
    "init_params",
    "it2_output",
    "load_csv",
    "load_model",
    "make_batches",
    "materialize",
    "mu_it2",
    "mu_t1",
    "predict",
    "reduce_enum",
    "reduce_km",
    "rmse",
    "save_model",
    "split",
    "switch_matrix",
    "t1_output",
    "train",
    "zscore",
]
