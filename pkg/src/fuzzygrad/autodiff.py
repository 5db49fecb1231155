"""Minimal reverse-mode autodiff over numpy arrays.

A :class:`Tape` records primitive operations in execution order; each node
stores its value and per-parent vector-Jacobian closures.  One backward
sweep walks the tape in reverse and accumulates adjoints, which is exact
for the piecewise-smooth fuzzy forward pass: min/max selections route the
gradient through the lowest attaining candidate, ``abs`` propagates 0 at
the origin, and clamp floors stop gradients where they engage.

The primitive set is exactly what the fuzzy forward pass needs (arithmetic,
exp/square/sigmoid/abs, clamp, reductions, matmul, reshape/select, and a
fused type-reduction node); :func:`forward` composes the full graph from
raw parameters to the mean-squared-error loss and :func:`backward` returns
gradients shaped like the raw tensors.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .constants import EPS_FIRING, EPS_SIGMA
from .errors import ConfigError, DataError, DimensionError, NumericError
from .it2 import _scan, km_endpoint, switch_bits
from .membership import IT2Firings
from .params import MiniBatch, ModelConfig, RawParams, sigmoid as _sigmoid_value


class Node:
    __slots__ = ("op", "parents", "vjps", "value", "adjoint")

    def __init__(self, op, parents, vjps, value):
        self.op = op
        self.parents = parents
        self.vjps = vjps
        self.value = value
        self.adjoint = None


class Tape:
    """Append-only record of primitive ops in topological order."""

    def __init__(self):
        self.nodes: list[Node] = []

    def _append(self, op, parents, vjps, value) -> "Var":
        node = Node(op, tuple(p.idx for p in parents), tuple(vjps), value)
        self.nodes.append(node)
        return Var(self, len(self.nodes) - 1)

    def leaf(self, value, name="leaf") -> "Var":
        return self._append(name, (), (), np.asarray(value, dtype=np.float64))

    def backward(self, out: "Var") -> None:
        """Accumulate adjoints of every node reachable from ``out``."""
        for node in self.nodes:
            node.adjoint = None
        seed = self.nodes[out.idx]
        seed.adjoint = np.ones_like(seed.value)
        for node in reversed(self.nodes):
            if node.adjoint is None:
                continue
            for parent_idx, vjp in zip(node.parents, node.vjps):
                contribution = vjp(node.adjoint)
                parent = self.nodes[parent_idx]
                if parent.adjoint is None:
                    parent.adjoint = np.zeros_like(parent.value)
                parent.adjoint = parent.adjoint + contribution


@dataclass(frozen=True)
class Var:
    tape: Tape
    idx: int

    @property
    def value(self) -> np.ndarray:
        return self.tape.nodes[self.idx].value

    @property
    def grad(self) -> Optional[np.ndarray]:
        return self.tape.nodes[self.idx].adjoint

    def __add__(self, other):
        return add(self, other)

    __radd__ = __add__

    def __mul__(self, other):
        return mul(self, other)

    __rmul__ = __mul__

    def __sub__(self, other):
        return sub(self, other)

    def __rsub__(self, other):
        return sub(other, self)

    def __truediv__(self, other):
        return div(self, other)

    def __rtruediv__(self, other):
        return div(other, self)

    def __neg__(self):
        return neg(self)


def _unbroadcast(g: np.ndarray, shape: tuple) -> np.ndarray:
    """Sum ``g`` down to ``shape`` (inverse of numpy broadcasting)."""
    if g.shape == shape:
        return g
    extra = g.ndim - len(shape)
    if extra > 0:
        g = g.sum(axis=tuple(range(extra)))
    axes = tuple(i for i, s in enumerate(shape) if s == 1 and g.shape[i] != 1)
    if axes:
        g = g.sum(axis=axes, keepdims=True)
    return g


def _binary(op_name, a, b, fwd, vjp_a, vjp_b):
    a_var = isinstance(a, Var)
    b_var = isinstance(b, Var)
    av = a.value if a_var else np.asarray(a, dtype=np.float64)
    bv = b.value if b_var else np.asarray(b, dtype=np.float64)
    value = fwd(av, bv)
    tape = a.tape if a_var else b.tape
    parents, vjps = [], []
    if a_var:
        parents.append(a)
        vjps.append(lambda g: _unbroadcast(vjp_a(g, av, bv), av.shape))
    if b_var:
        parents.append(b)
        vjps.append(lambda g: _unbroadcast(vjp_b(g, av, bv), bv.shape))
    return tape._append(op_name, parents, vjps, value)


def add(a, b):
    return _binary("add", a, b, np.add, lambda g, av, bv: g, lambda g, av, bv: g)


def sub(a, b):
    return _binary("sub", a, b, np.subtract, lambda g, av, bv: g, lambda g, av, bv: -g)


def mul(a, b):
    return _binary("mul", a, b, np.multiply,
                   lambda g, av, bv: g * bv, lambda g, av, bv: g * av)


def div(a, b):
    return _binary("div", a, b, np.divide,
                   lambda g, av, bv: g / bv,
                   lambda g, av, bv: -g * av / (bv * bv))


def neg(a: Var) -> Var:
    return a.tape._append("neg", (a,), (lambda g: -g,), np.negative(a.value))


def exp(a: Var) -> Var:
    out = np.exp(a.value)
    return a.tape._append("exp", (a,), (lambda g: g * out,), out)


def square(a: Var) -> Var:
    av = a.value
    return a.tape._append("square", (a,), (lambda g: g * (2.0 * av),), np.square(av))


def sigmoid(a: Var) -> Var:
    out = _sigmoid_value(a.value)
    return a.tape._append("sigmoid", (a,), (lambda g: g * (out * (1.0 - out)),), out)


def absval(a: Var) -> Var:
    av = a.value
    return a.tape._append("abs", (a,), (lambda g: g * np.sign(av),), np.abs(av))


def clamp_min(a: Var, floor: float) -> Var:
    av = a.value
    mask = av > floor  # gradient is 0 wherever the floor engages
    return a.tape._append(
        "clamp-min", (a,), (lambda g: g * mask,), np.maximum(av, floor)
    )


def sum_reduce(a: Var, axis=None, keepdims=False) -> Var:
    av = a.value

    def vjp(g):
        if axis is not None and not keepdims:
            g = np.expand_dims(g, axis)
        return np.broadcast_to(g, av.shape)

    return a.tape._append(
        "sum-reduce", (a,), (vjp,), np.sum(av, axis=axis, keepdims=keepdims)
    )


def _extreme_reduce(op_name, a, axis, argfn):
    av = a.value
    idx = argfn(av, axis=axis)
    out = np.take_along_axis(av, np.expand_dims(idx, axis), axis=axis).squeeze(axis)

    def vjp(g):
        full = np.zeros_like(av)
        np.put_along_axis(full, np.expand_dims(idx, axis), np.expand_dims(g, axis), axis)
        return full

    return a.tape._append(op_name, (a,), (vjp,), out)


def min_reduce(a: Var, axis: int) -> Var:
    """Minimum along an axis; ties route the gradient to the lowest index."""
    return _extreme_reduce("min-reduce", a, axis, np.argmin)


def max_reduce(a: Var, axis: int) -> Var:
    return _extreme_reduce("max-reduce", a, axis, np.argmax)


def matmul(a: Var, b) -> Var:
    b_var = isinstance(b, Var)
    bv = b.value if b_var else np.asarray(b, dtype=np.float64)
    av = a.value
    parents = [a]
    vjps = [lambda g: g @ bv.T]
    if b_var:
        parents.append(b)
        vjps.append(lambda g: av.T @ g)
    return a.tape._append("matmul", parents, vjps, av @ bv)


def reshape(a: Var, shape) -> Var:
    av = a.value
    return a.tape._append(
        "reshape", (a,), (lambda g: g.reshape(av.shape),), av.reshape(shape)
    )


def select_index(a: Var, index: int, axis: int) -> Var:
    av = a.value
    out = np.take(av, index, axis=axis)

    def vjp(g):
        full = np.zeros_like(av)
        sl = [slice(None)] * av.ndim
        sl[axis] = index
        full[tuple(sl)] = g
        return full

    return a.tape._append("select-index", (a,), (vjp,), out)


def type_reduce(f_lo: Var, f_hi: Var, yp: Var, method: str) -> Var:
    """Fused type-reduction node returning the stacked interval [2, B, D].

    Forward runs the enumeration scan (or the iterative oracle when
    ``method == "km"``); backward applies the exact quotient rule of the
    candidate attained at the recorded switch column, which is the gradient
    of the piecewise-smooth reduction almost everywhere.
    """
    fl, fh, y = f_lo.value, f_hi.value, yp.value
    b, p = fl.shape
    d = y.shape[1]
    if method == "enum":
        ylo, yhi, jmin, jmax = _scan(IT2Firings(f_lo=fl, f_hi=fh), y)
        ylo = ylo.reshape(b, d)
        yhi = yhi.reshape(b, d)
        bits_lo = switch_bits(jmin.reshape(b, d), p)
        bits_hi = switch_bits(jmax.reshape(b, d), p)
    elif method == "km":
        ylo = np.empty((b, d))
        yhi = np.empty((b, d))
        bits_lo = np.empty((b, d, p))
        bits_hi = np.empty((b, d, p))
        for i in range(b):
            fl_row = fl[i].tolist()
            fh_row = fh[i].tolist()
            for j in range(d):
                ys = y[i, j].tolist()
                ylo[i, j], bits_lo[i, j] = km_endpoint(ys, fl_row, fh_row, upper=False)
                yhi[i, j], bits_hi[i, j] = km_endpoint(ys, fl_row, fh_row, upper=True)
    else:
        raise ConfigError(f"unknown type-reduction method {method!r}")
    value = np.stack([ylo, yhi])

    cache = {}

    def _grads(g):
        if cache.get("seed") is not g:
            d_fl = np.zeros_like(fl)
            d_fh = np.zeros_like(fh)
            d_yp = np.zeros_like(y)
            for stream, bits in ((0, bits_lo), (1, bits_hi)):
                gs = g[stream]
                w = fl[:, None, :] * (1.0 - bits) + fh[:, None, :] * bits
                z = w.sum(axis=2) + EPS_FIRING
                gy = gs / z
                d_yp += w * gy[:, :, None]
                gw = (y - value[stream][:, :, None]) * gy[:, :, None]
                d_fl += ((1.0 - bits) * gw).sum(axis=1)
                d_fh += (bits * gw).sum(axis=1)
            cache["seed"] = g
            cache["grads"] = (d_fl, d_fh, d_yp)
        return cache["grads"]

    return f_lo.tape._append(
        "type-reduce",
        (f_lo, f_hi, yp),
        (lambda g: _grads(g)[0], lambda g: _grads(g)[1], lambda g: _grads(g)[2]),
        value,
    )


@dataclass
class FlsTape:
    """Recorded forward pass plus the leaves gradients are taken against."""

    tape: Tape
    loss: Var
    leaves: dict[str, Var]
    stages: list[tuple[str, Var]] = field(default_factory=list)


def forward(raw: RawParams, batch: MiniBatch, config: ModelConfig) -> tuple[float, FlsTape]:
    """Record materialize -> membership -> firings -> consequents -> output
    -> loss and return the scalar loss with the tape."""
    raw.check(config)
    if batch.x.shape[1] != config.inputs or batch.y.shape[1] != config.outputs:
        raise DimensionError(
            f"batch shapes {batch.x.shape}/{batch.y.shape} do not match config "
            f"M={config.inputs}, D={config.outputs}"
        )
    if not (np.all(np.isfinite(batch.x)) and np.all(np.isfinite(batch.y))):
        raise DataError("mini-batch contains non-finite values")

    tape = Tape()
    leaves = {name: tape.leaf(arr, name) for name, arr in raw.arrays().items()}
    stages: list[tuple[str, Var]] = []
    x = batch.x
    bsz = batch.size

    # materialize
    if config.kind == "t1":
        sigma = clamp_min(leaves["sigma_raw"], EPS_SIGMA)
        stages.append(("materialize", sigma))
        mu_parts = [_tape_gauss(x, leaves["c"], sigma)]
    else:
        spread = absval(leaves["delta"])
        sigma_lo = clamp_min(leaves["sigma_raw"] - spread, EPS_SIGMA)
        sigma_hi = clamp_min(leaves["sigma_raw"] + spread, EPS_SIGMA)
        h = sigmoid(leaves["h_raw"])
        stages.append(("materialize", h))
        mu_hi = _tape_gauss(x, leaves["c"], sigma_hi)
        mu_lo = mul(h, _tape_gauss(x, leaves["c"], sigma_lo))
        mu_parts = [mu_lo, mu_hi]
    for mu in mu_parts:
        stages.append(("membership", mu))

    firing_vars = [_tape_firings(mu) for mu in mu_parts]
    for f in firing_vars:
        stages.append(("firings", f))

    yp = _tape_consequents(x, leaves["a"], leaves["a0"], config)
    stages.append(("consequents", yp))

    if config.kind == "t1":
        f = firing_vars[0]
        num = sum_reduce(mul(yp, reshape(f, (bsz, 1, config.rules))), axis=2)
        den = add(sum_reduce(f, axis=1), EPS_FIRING)
        pred = div(num, reshape(den, (bsz, 1)))
    else:
        interval = type_reduce(firing_vars[0], firing_vars[1], yp, config.reducer)
        stages.append(("type-reduction", interval))
        lo = select_index(interval, 0, axis=0)
        hi = select_index(interval, 1, axis=0)
        pred = mul(add(lo, hi), 0.5)
    stages.append(("output", pred))

    diff = sub(pred, batch.y)
    loss = mul(sum_reduce(square(diff)), 1.0 / (bsz * config.outputs))
    stages.append(("loss", loss))

    loss_value = float(loss.value)
    if not np.isfinite(loss_value):
        raise NumericError(f"non-finite loss (first appeared in stage {_bad_stage(stages)!r})")
    return loss_value, FlsTape(tape=tape, loss=loss, leaves=leaves, stages=stages)


def _bad_stage(stages) -> str:
    for name, var in stages:
        if not np.all(np.isfinite(var.value)):
            return name
    return "loss"


def _tape_gauss(x: np.ndarray, c: Var, sigma: Var) -> Var:
    d = sub(x[:, None, :], c)
    q = div(square(d), mul(square(sigma), 2.0))
    return exp(neg(q))


def _tape_firings(mu: Var) -> Var:
    f = select_index(mu, 0, axis=2)
    for m in range(1, mu.value.shape[2]):
        f = mul(f, select_index(mu, m, axis=2))
    return f


def _tape_consequents(x: np.ndarray, a: Var, a0: Var, config: ModelConfig) -> Var:
    yp = None
    for m in range(config.inputs):
        term = mul(select_index(a, m, axis=2), x[:, m][:, None, None])
        yp = add(a0, term) if yp is None else add(yp, term)
    return yp


def backward(fls: FlsTape) -> dict[str, np.ndarray]:
    """Gradients of the recorded loss w.r.t. every raw tensor.

    Tensors the loss does not depend on (e.g. ``h_raw`` under a T1 model)
    come back as exact zeros.
    """
    fls.tape.backward(fls.loss)
    out = {}
    for name, leaf in fls.leaves.items():
        g = leaf.grad
        out[name] = np.zeros_like(leaf.value) if g is None else g
    return out
