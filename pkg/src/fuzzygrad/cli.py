"""Command-line interface: train, eval, bench, bench-backends.

Exit codes: 0 success, 1 data error, 2 configuration/usage error,
3 numeric error (including reducer disagreement in bench).
"""

from __future__ import annotations

import argparse
import json
import os
import statistics
import sys
import time

import numpy as np

from . import _kernels
from .data import load_csv, split, zscore
from .errors import ConfigError, DataError, DimensionError, FuzzygradError, NumericError
from .infer import predict
from .it2 import reduce_enum, reduce_km
from .membership import IT2Firings
from .params import ModelConfig, load_model, save_model
from .train import TrainConfig, rmse, train


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="fuzzygrad",
        description="Train and benchmark T1/IT2 Takagi-Sugeno fuzzy models",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p_train = sub.add_parser("train", help="train a model on a CSV dataset")
    p_train.add_argument("--dataset", required=True, help="CSV file; trailing columns are targets")
    p_train.add_argument("--targets", type=int, default=1, help="number of target columns D")
    p_train.add_argument("--model", required=True, choices=("t1", "it2"))
    p_train.add_argument("--rules", type=int, required=True, help="rule count P")
    p_train.add_argument("--reducer", choices=("enum", "km"), default="enum")
    p_train.add_argument("--epochs", type=int, default=100)
    p_train.add_argument("--batch", type=int, default=64)
    p_train.add_argument("--lr", type=float, default=0.01)
    p_train.add_argument("--seed", type=int, default=0)
    p_train.add_argument("--out", default="model.json", help="model JSON output path")
    p_train.add_argument("--report", default="report.json", help="report JSON output path")
    p_train.set_defaults(func=cmd_train)

    p_eval = sub.add_parser("eval", help="evaluate a saved model on a CSV dataset")
    p_eval.add_argument("--model", required=True, help="model JSON written by train")
    p_eval.add_argument("--dataset", required=True)
    p_eval.add_argument("--targets", type=int, default=1)
    p_eval.set_defaults(func=cmd_eval)

    p_bench = sub.add_parser(
        "bench", help="time the enumeration reducer against the iterative Karnik-Mendel loop"
    )
    p_bench.add_argument("--rules", type=int, required=True)
    p_bench.add_argument("--batch", type=int, default=512)
    p_bench.add_argument("--samples", type=int, default=512)
    p_bench.add_argument("--repeats", type=int, default=5)
    p_bench.add_argument("--seed", type=int, default=0)
    p_bench.add_argument("--out", default="bench.csv", help="CSV output path")
    p_bench.set_defaults(func=cmd_bench)

    p_bb = sub.add_parser(
        "bench-backends", help="time the compiled scan kernel against the numpy fallback"
    )
    p_bb.add_argument("--rules", type=int, required=True)
    p_bb.add_argument("--batch", type=int, default=512)
    p_bb.add_argument("--samples", type=int, default=512)
    p_bb.add_argument("--repeats", type=int, default=5)
    p_bb.add_argument("--seed", type=int, default=0)
    p_bb.add_argument("--out", default="bench_backends.csv")
    p_bb.set_defaults(func=cmd_bench_backends)

    return parser


def cmd_train(args) -> int:
    data = load_csv(args.dataset, args.targets)
    train_raw, test_raw = split(data, train_frac=0.7, seed=args.seed)
    train_n = zscore(train_raw)
    test_n = zscore(test_raw, stats=train_n.stats)

    config = ModelConfig(
        kind=args.model,
        rules=args.rules,
        inputs=train_n.features.shape[1],
        outputs=args.targets,
        reducer=args.reducer,
    )
    tconfig = TrainConfig(
        epochs=args.epochs, batch_size=args.batch,
        learning_rate=args.lr, seed=args.seed,
    )

    def on_epoch(epoch, loss):
        print(f"epoch {epoch:4d}/{tconfig.epochs}  loss {loss:.12f}", flush=True)

    raw, report = train(
        config, tconfig,
        (train_n.features, train_n.targets),
        (test_n.features, test_n.targets),
        on_epoch=on_epoch,
    )

    save_model(args.out, config, raw, normalization=train_n.stats.to_dict())
    doc = {
        "dataset": args.dataset,
        "config": {
            **config.to_dict(),
            "epochs": tconfig.epochs,
            "batch_size": tconfig.batch_size,
            "learning_rate": tconfig.learning_rate,
            "seed": tconfig.seed,
        },
        "epochs": report.epochs_run,
        "losses": report.epoch_losses,
        "rmse_train": report.rmse_train,
        "rmse_test": report.rmse_test,
        "wall_time_s": report.wall_time_s,
    }
    with open(args.report, "w", encoding="utf-8") as fh:
        json.dump(doc, fh)
        fh.write("\n")
    for d, value in enumerate(report.rmse_test):
        print(f"test_rmse[{d}] = {value!r}")
    print(f"wall_time_s = {report.wall_time_s:.3f}")
    print(f"model -> {args.out}\nreport -> {args.report}")
    return 0


def cmd_eval(args) -> int:
    config, raw, normalization = load_model(args.model)
    if normalization is None:
        raise ConfigError(f"{args.model} carries no normalization statistics")
    from .data import NormStats

    stats = NormStats.from_dict(normalization)
    data = load_csv(args.dataset, args.targets)
    if data.features.shape[1] != config.inputs or args.targets != config.outputs:
        raise ConfigError(
            f"dataset has M={data.features.shape[1]}, D={args.targets} but the "
            f"model expects M={config.inputs}, D={config.outputs}"
        )
    normalized = zscore(data, stats=stats)
    values = rmse(predict(raw, config, normalized.features), normalized.targets)
    for d, value in enumerate(values):
        print(f"rmse[{d}] = {value!r}")
    return 0


def _random_instance(rng, n, p):
    g1 = rng.uniform(0.0, 1.0, size=(n, p))
    g2 = rng.uniform(0.0, 1.0, size=(n, p))
    f = IT2Firings(f_lo=np.minimum(g1, g2), f_hi=np.maximum(g1, g2))
    yp = rng.uniform(-5.0, 5.0, size=(n, 1, p))
    return f, yp


def _median_time(fn, repeats):
    times = []
    for _ in range(repeats):
        t0 = time.perf_counter()
        fn()
        times.append(time.perf_counter() - t0)
    return statistics.median(times)


def cmd_bench(args) -> int:
    p, bsz, n = args.rules, args.batch, args.samples
    rng = np.random.default_rng(args.seed)
    f, yp = _random_instance(rng, n, p)

    def run_enum():
        for s in range(0, n, bsz):
            block = IT2Firings(f_lo=f.f_lo[s:s + bsz], f_hi=f.f_hi[s:s + bsz])
            reduce_enum(block, yp[s:s + bsz])

    def collect_enum():
        parts = []
        for s in range(0, n, bsz):
            block = IT2Firings(f_lo=f.f_lo[s:s + bsz], f_hi=f.f_hi[s:s + bsz])
            iv = reduce_enum(block, yp[s:s + bsz])
            parts.append(np.stack([iv.y_lo, iv.y_hi]))
        return np.concatenate(parts, axis=1)

    # Correctness gate before any timing is reported.
    enum_iv = collect_enum()
    km_iv = reduce_km(f, yp)
    gap = float(np.max(np.abs(enum_iv - np.stack([km_iv.y_lo, km_iv.y_hi]))))
    if gap > 1e-9:
        raise NumericError(
            f"enumeration and Karnik-Mendel reducers disagree by {gap:.3e} (> 1e-9)"
        )

    t_enum = _median_time(run_enum, args.repeats)
    t_km = _median_time(lambda: reduce_km(f, yp), args.repeats)
    speedup = t_km / t_enum

    threads = os.cpu_count() if _kernels.BACKEND == "cython" else 1
    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(
            f"# enum_backend={_kernels.BACKEND} enum_threads={threads} "
            f"km=python-sequential samples={n} repeats={args.repeats} "
            f"max_disagreement={gap:.3e}\n"
        )
        fh.write("P,B,t_enum_s,t_km_s,speedup\n")
        fh.write(f"{p},{bsz},{t_enum:.6g},{t_km:.6g},{speedup:.6g}\n")
    print(
        f"P={p} B={bsz} samples={n}: enum {t_enum:.4g}s, km {t_km:.4g}s, "
        f"speedup {speedup:.1f}x (outputs agree within {gap:.2e})"
    )
    print(f"csv -> {args.out}")
    return 0


def cmd_bench_backends(args) -> int:
    from .constants import EPS_FIRING
    from .it2 import alpha_beta

    p, bsz, n = args.rules, args.batch, args.samples
    if p > 20:
        raise ConfigError(f"rules must be <= 20 for the enumeration scan, got {p}")
    rng = np.random.default_rng(args.seed)
    f, yp = _random_instance(rng, n, p)
    alpha0, alpha, beta0, beta = alpha_beta(f.f_lo, f.f_hi, yp)
    a0f = np.ascontiguousarray(alpha0.reshape(n))
    af = np.ascontiguousarray(alpha.reshape(n, p))

    backends = _kernels.available_backends()
    results = {
        name: scan(a0f, af, beta0, beta, EPS_FIRING)
        for name, scan in backends.items()
    }
    names = sorted(results)
    gap = 0.0
    for other in names[1:]:
        gap = max(
            gap,
            float(np.max(np.abs(results[other][0] - results[names[0]][0]))),
            float(np.max(np.abs(results[other][1] - results[names[0]][1]))),
        )
    if gap > 1e-12:
        raise NumericError(f"scan backends disagree by {gap:.3e} (> 1e-12)")

    rows = []
    for name, scan in backends.items():
        def run(scan=scan):
            for s in range(0, n, bsz):
                scan(a0f[s:s + bsz], af[s:s + bsz], beta0[s:s + bsz],
                     beta[s:s + bsz], EPS_FIRING)

        t = _median_time(run, args.repeats)
        rows.append((name, t, n / t))

    with open(args.out, "w", encoding="utf-8") as fh:
        fh.write(
            f"# backend scan comparison: samples={n} repeats={args.repeats} "
            f"max_disagreement={gap:.3e}\n"
        )
        fh.write("P,B,backend,t_s,rows_per_s\n")
        for name, t, throughput in rows:
            fh.write(f"{p},{bsz},{name},{t:.6g},{throughput:.6g}\n")
    for name, t, throughput in rows:
        print(f"{name:>6}: {t:.4g}s ({throughput:.3g} rows/s)")
    if "cython" not in backends:
        print("note: compiled kernel unavailable; only the numpy fallback was timed")
    print(f"csv -> {args.out}")
    return 0


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return exc.code if isinstance(exc.code, int) else 2
    try:
        return args.func(args)
    except DataError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (ConfigError, DimensionError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except NumericError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3
    except FuzzygradError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    raise SystemExit(main())
