"""CSV ingestion, z-score normalization and seeded splitting.

Normalization statistics are always fitted on a training split and then
applied to any other split, so test rows never leak into the statistics.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass
from typing import Optional

import numpy as np

from .constants import EPS_STD
from .errors import DataError


@dataclass(frozen=True)
class NormStats:
    """Per-column means and sample standard deviations in original units."""

    feature_mean: np.ndarray
    feature_std: np.ndarray
    target_mean: np.ndarray
    target_std: np.ndarray

    def to_dict(self) -> dict:
        return {
            "feature_mean": self.feature_mean.tolist(),
            "feature_std": self.feature_std.tolist(),
            "target_mean": self.target_mean.tolist(),
            "target_std": self.target_std.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "NormStats":
        return cls(
            feature_mean=np.asarray(d["feature_mean"], dtype=np.float64),
            feature_std=np.asarray(d["feature_std"], dtype=np.float64),
            target_mean=np.asarray(d["target_mean"], dtype=np.float64),
            target_std=np.asarray(d["target_std"], dtype=np.float64),
        )


@dataclass(frozen=True)
class Dataset:
    """Feature/target matrices plus the statistics they were normalized
    with (``stats is None`` for raw, as-loaded data)."""

    features: np.ndarray  # [N, M]
    targets: np.ndarray   # [N, D]
    feature_names: tuple[str, ...]
    target_names: tuple[str, ...]
    stats: Optional[NormStats] = None

    @property
    def n(self) -> int:
        return self.features.shape[0]


def load_csv(path, n_targets: int) -> Dataset:
    """Parse a headed CSV; the trailing ``n_targets`` columns are targets."""
    if n_targets < 1:
        raise DataError(f"n_targets must be >= 1, got {n_targets}")
    try:
        fh = open(path, "r", encoding="utf-8", newline="")
    except FileNotFoundError as exc:
        raise DataError(f"dataset file not found: {path}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise DataError(f"{path}: file is empty") from None
        header = [name.strip() for name in header]
        ncols = len(header)
        if n_targets >= ncols:
            raise DataError(
                f"{path}: {n_targets} target columns requested but the file "
                f"has only {ncols} columns"
            )
        rows = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != ncols:
                raise DataError(f"{path}:{lineno}: expected {ncols} values, got {len(row)}")
            try:
                rows.append([float(v) for v in row])
            except ValueError:
                bad = next(i for i, v in enumerate(row) if not _is_float(v))
                raise DataError(
                    f"{path}:{lineno}: non-numeric value {row[bad]!r} "
                    f"in column {header[bad]!r}"
                ) from None
    if not rows:
        raise DataError(f"{path}: no data rows (empty dataset)")
    matrix = np.asarray(rows, dtype=np.float64)
    m = ncols - n_targets
    return Dataset(
        features=matrix[:, :m],
        targets=matrix[:, m:],
        feature_names=tuple(header[:m]),
        target_names=tuple(header[m:]),
    )


def _is_float(v: str) -> bool:
    try:
        float(v)
        return True
    except ValueError:
        return False


def fit_stats(data: Dataset) -> NormStats:
    """Column means and sample (N-1) standard deviations of a split."""
    if data.n < 2:
        raise DataError(f"need at least 2 rows to fit statistics, got {data.n}")
    return NormStats(
        feature_mean=data.features.mean(axis=0),
        feature_std=data.features.std(axis=0, ddof=1),
        target_mean=data.targets.mean(axis=0),
        target_std=data.targets.std(axis=0, ddof=1),
    )


def _apply(values: np.ndarray, mean: np.ndarray, std: np.ndarray) -> np.ndarray:
    out = (values - mean) / np.maximum(std, EPS_STD)
    # A guarded (near-)constant column carries no information; make it an
    # exact zero instead of amplified rounding noise.
    out[:, std <= EPS_STD] = 0.0
    return out


def zscore(data: Dataset, stats: NormStats | None = None) -> Dataset:
    """Normalize columns to zero mean / unit sample std.

    When ``stats`` is given (fitted on the training split) it is applied
    as-is; otherwise statistics are fitted on ``data`` itself.
    """
    if stats is None:
        stats = fit_stats(data)
    return Dataset(
        features=_apply(data.features, stats.feature_mean, stats.feature_std),
        targets=_apply(data.targets, stats.target_mean, stats.target_std),
        feature_names=data.feature_names,
        target_names=data.target_names,
        stats=stats,
    )


def split(data: Dataset, train_frac: float = 0.7, seed: int = 0) -> tuple[Dataset, Dataset]:
    """Seeded permutation split; the first floor(train_frac * N) rows train."""
    if data.n < 2:
        raise DataError(f"need at least 2 rows to split, got {data.n}")
    if not 0.0 < train_frac < 1.0:
        raise DataError(f"train_frac must lie in (0, 1), got {train_frac}")
    perm = np.random.default_rng(seed).permutation(data.n)
    n_train = int(train_frac * data.n)
    tr, te = perm[:n_train], perm[n_train:]

    def take(idx):
        return Dataset(
            features=data.features[idx],
            targets=data.targets[idx],
            feature_names=data.feature_names,
            target_names=data.target_names,
            stats=data.stats,
        )

    return take(tr), take(te)


def denormalize_targets(stats: NormStats, y: np.ndarray) -> np.ndarray:
    """Map normalized targets back to original units."""
    return y * np.maximum(stats.target_std, EPS_STD) + stats.target_mean
