"""Dense float64 tensors with reverse-mode automatic differentiation.

Values are plain numpy float64 ndarrays. A :class:`Node` wraps one array
together with a same-shaped gradient buffer and the recipe (a vector-Jacobian
product closure) for pushing gradients to its parents. Graphs are define-by-run:
every forward pass builds a fresh graph, and :func:`backward` releases it.

Everything runs in float64 on purpose: the data sets this engine targets are
tiny, and determinism plus finite-difference fidelity matter more than speed.
A graph must stay confined to a single thread for its lifetime; parameters may
be shared freely once training has finished.
"""

from __future__ import annotations

import math
from typing import Callable, Sequence

import numpy as np

__all__ = [
    "Node",
    "Parameter",
    "AdamState",
    "constant",
    "matmul",
    "add",
    "sub",
    "mul",
    "scale",
    "relu",
    "sigmoid",
    "softmax_rows",
    "layer_norm",
    "batch_norm_train",
    "batch_norm_eval",
    "dropout",
    "feature_embed",
    "reshape",
    "transpose",
    "slice_rows",
    "concat",
    "uniform_init",
    "sum_all",
    "mean_all",
    "mean_axis",
    "binary_cross_entropy",
    "backward",
    "adam_step",
    "zero_grads",
    "gradient_check",
]

BCE_CLAMP = 1e-7


class Node:
    """One vertex of a computation graph.

    Holds the forward value, a same-shaped gradient (zero until touched, and
    allocated lazily so forward-only passes stay cheap), the tag of the
    producing operation, and ordered references to the parent nodes. Leaves
    have no parents and no vjp.
    """

    __slots__ = ("value", "_grad", "op_tag", "parents", "_vjp")

    def __init__(self, value, parents=(), op_tag="leaf", vjp=None):
        self.value = np.asarray(value, dtype=np.float64)
        self._grad: np.ndarray | None = None
        self.parents: tuple[Node, ...] = tuple(parents)
        self.op_tag = op_tag
        self._vjp: Callable | None = vjp

    @property
    def grad(self) -> np.ndarray:
        if self._grad is None:
            self._grad = np.zeros_like(self.value)
        return self._grad

    @grad.setter
    def grad(self, value: np.ndarray) -> None:
        self._grad = value

    @property
    def shape(self) -> tuple[int, ...]:
        return self.value.shape

    def __repr__(self):
        return f"Node(op={self.op_tag!r}, shape={self.value.shape})"


class Parameter(Node):
    """A trainable leaf, addressed by a unique dotted name path."""

    __slots__ = ("name",)

    def __init__(self, value, name: str):
        super().__init__(value, op_tag="parameter")
        self.name = name

    def __repr__(self):
        return f"Parameter({self.name!r}, shape={self.value.shape})"


def constant(value) -> Node:
    """Wrap raw data as a non-trainable leaf."""
    return Node(value, op_tag="constant")


def _as_node(x) -> Node:
    return x if isinstance(x, Node) else constant(x)


def _unbroadcast(grad: np.ndarray, shape: tuple[int, ...]) -> np.ndarray:
    """Sum a gradient down to ``shape`` after numpy broadcasting."""
    extra = grad.ndim - len(shape)
    if extra > 0:
        grad = grad.sum(axis=tuple(range(extra)))
    keep = tuple(i for i, n in enumerate(shape) if n == 1 and grad.shape[i] != 1)
    if keep:
        grad = grad.sum(axis=keep, keepdims=True)
    return grad


# ---------------------------------------------------------------------------
# Linear algebra and elementwise operations
# ---------------------------------------------------------------------------


def matmul(a: Node, b: Node) -> Node:
    """Matrix product.

    Accepts 2-D by 2-D, stacked (k-D) by 2-D shared weights, and stacked by
    stacked with identical leading dimensions. Gradients follow
    d/da = g . b^T and d/db = a^T . g, summed over broadcast axes.
    """
    a, b = _as_node(a), _as_node(b)
    av, bv = a.value, b.value
    if av.ndim < 2 or bv.ndim < 2:
        raise ValueError(f"matmul needs rank >= 2 operands, got shapes {av.shape} and {bv.shape}")
    if av.shape[-1] != bv.shape[-2]:
        raise ValueError(f"matmul inner dimensions disagree: {av.shape} vs {bv.shape}")
    if av.ndim > 2 and bv.ndim > 2 and av.shape[:-2] != bv.shape[:-2]:
        raise ValueError(f"matmul stacked dimensions disagree: {av.shape} vs {bv.shape}")
    out = av @ bv

    def vjp(g):
        ga = _unbroadcast(g @ np.swapaxes(bv, -1, -2), av.shape)
        gb = _unbroadcast(np.swapaxes(av, -1, -2) @ g, bv.shape)
        return ga, gb

    return Node(out, (a, b), "matmul", vjp)


def add(a: Node, b: Node) -> Node:
    """Elementwise sum; the second operand may broadcast as a trailing bias."""
    a, b = _as_node(a), _as_node(b)
    av, bv = a.value, b.value
    try:
        out = av + bv
    except ValueError:
        raise ValueError(f"add shapes are incompatible: {av.shape} vs {bv.shape}") from None

    def vjp(g):
        return _unbroadcast(g, av.shape), _unbroadcast(g, bv.shape)

    return Node(out, (a, b), "add", vjp)


def sub(a: Node, b: Node) -> Node:
    a, b = _as_node(a), _as_node(b)
    av, bv = a.value, b.value
    out = av - bv

    def vjp(g):
        return _unbroadcast(g, av.shape), _unbroadcast(-g, bv.shape)

    return Node(out, (a, b), "sub", vjp)


def mul(a: Node, b: Node) -> Node:
    """Elementwise (Hadamard) product."""
    a, b = _as_node(a), _as_node(b)
    av, bv = a.value, b.value
    if av.shape != bv.shape:
        raise ValueError(f"mul expects matching shapes, got {av.shape} and {bv.shape}")
    out = av * bv

    def vjp(g):
        return g * bv, g * av

    return Node(out, (a, b), "mul", vjp)


def scale(a: Node, c: float) -> Node:
    a = _as_node(a)
    c = float(c)

    def vjp(g):
        return (g * c,)

    return Node(a.value * c, (a,), "scale", vjp)


def relu(x: Node) -> Node:
    """Elementwise max(0, x); the subgradient at 0 is taken as 0."""
    x = _as_node(x)
    mask = x.value > 0.0
    out = np.where(mask, x.value, 0.0)

    def vjp(g):
        return (g * mask,)

    return Node(out, (x,), "relu", vjp)


def sigmoid(x: Node) -> Node:
    """Elementwise logistic function, computed in overflow-safe halves.

    Mathematically the output lies in (0, 1); in float64 it saturates to
    exactly 0.0 or 1.0 once |x| exceeds roughly 37.
    """
    x = _as_node(x)
    v = x.value
    out = np.empty_like(v)
    pos = v >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-v[pos]))
    ex = np.exp(v[~pos])
    out[~pos] = ex / (1.0 + ex)

    def vjp(g):
        return (g * out * (1.0 - out),)

    return Node(out, (x,), "sigmoid", vjp)


def softmax_rows(x: Node) -> Node:
    """Softmax over the last axis, one distribution per trailing row.

    Uses max-subtraction so rows of any magnitude stay finite, and floors the
    shifted logits at -700 so even extreme gaps keep every entry strictly
    positive instead of underflowing to zero; each row sums to 1.
    """
    x = _as_node(x)
    shifted = np.maximum(x.value - x.value.max(axis=-1, keepdims=True), -700.0)
    e = np.exp(shifted)
    out = e / e.sum(axis=-1, keepdims=True)

    def vjp(g):
        inner = (g * out).sum(axis=-1, keepdims=True)
        return (out * (g - inner),)

    return Node(out, (x,), "softmax_rows", vjp)


def layer_norm(x: Node, gain: Node, bias: Node, eps: float = 1e-5) -> Node:
    """Normalise each trailing row to zero mean and unit variance, then
    apply the learned elementwise affine transform."""
    if eps <= 0:
        raise ValueError(f"layer_norm eps must be positive, got {eps}")
    x, gain, bias = _as_node(x), _as_node(gain), _as_node(bias)
    v = x.value
    n = v.shape[-1]
    mu = v.mean(axis=-1, keepdims=True)
    xc = v - mu
    var = (xc * xc).mean(axis=-1, keepdims=True)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out = xhat * gain.value + bias.value

    def vjp(g):
        gyh = g * gain.value
        gx = (inv / n) * (
            n * gyh
            - gyh.sum(axis=-1, keepdims=True)
            - xhat * (gyh * xhat).sum(axis=-1, keepdims=True)
        )
        ggain = _unbroadcast(g * xhat, gain.value.shape)
        gbias = _unbroadcast(g, bias.value.shape)
        return gx, ggain, gbias

    return Node(out, (x, gain, bias), "layer_norm", vjp)


def batch_norm_train(x: Node, gain: Node, bias: Node, eps: float = 1e-5) -> Node:
    """Batch normalisation of a 2-D block using its own column statistics.

    Gradients flow through the batch mean and variance, so this is only valid
    in training mode; evaluation uses :func:`batch_norm_eval` with frozen
    running statistics.
    """
    x, gain, bias = _as_node(x), _as_node(gain), _as_node(bias)
    v = x.value
    if v.ndim != 2:
        raise ValueError(f"batch_norm_train expects a 2-D block, got shape {v.shape}")
    m = v.shape[0]
    mu = v.mean(axis=0)
    xc = v - mu
    var = (xc * xc).mean(axis=0)
    inv = 1.0 / np.sqrt(var + eps)
    xhat = xc * inv
    out = xhat * gain.value + bias.value

    def vjp(g):
        gyh = g * gain.value
        gx = (inv / m) * (
            m * gyh - gyh.sum(axis=0) - xhat * (gyh * xhat).sum(axis=0)
        )
        return gx, (g * xhat).sum(axis=0), g.sum(axis=0)

    return Node(out, (x, gain, bias), "batch_norm_train", vjp)


def batch_norm_eval(x: Node, gain: Node, bias: Node, running_mean, running_var,
                    eps: float = 1e-5) -> Node:
    """Batch normalisation against fixed running statistics."""
    x, gain, bias = _as_node(x), _as_node(gain), _as_node(bias)
    inv = 1.0 / np.sqrt(np.asarray(running_var, dtype=np.float64) + eps)
    xhat = (x.value - running_mean) * inv
    out = xhat * gain.value + bias.value

    def vjp(g):
        return g * gain.value * inv, (g * xhat).sum(axis=0), g.sum(axis=0)

    return Node(out, (x, gain, bias), "batch_norm_eval", vjp)


def dropout(x: Node, rate: float, rng: np.random.Generator) -> Node:
    """Inverted dropout; draw the keep mask from ``rng``. Training-mode only,
    callers must bypass this op entirely at inference."""
    x = _as_node(x)
    if not 0.0 <= rate < 1.0:
        raise ValueError(f"dropout rate must lie in [0, 1), got {rate}")
    if rate == 0.0:
        return x
    keep = (rng.random(x.value.shape) >= rate) / (1.0 - rate)
    out = x.value * keep

    def vjp(g):
        return (g * keep,)

    return Node(out, (x,), "dropout", vjp)


def feature_embed(x: np.ndarray, w: Node, b: Node) -> Node:
    """Map each scalar feature through its own affine lift.

    ``x`` is a raw (n, f) data matrix; ``w`` and ``b`` have shape (f, d).
    Output token grid has shape (n, f, d) with out[i, j] = x[i, j] * w[j] + b[j].
    """
    x = np.asarray(x, dtype=np.float64)
    w, b = _as_node(w), _as_node(b)
    if x.ndim != 2 or w.value.ndim != 2 or x.shape[1] != w.value.shape[0]:
        raise ValueError(
            f"feature_embed shapes disagree: data {x.shape}, weights {w.value.shape}"
        )
    out = x[:, :, None] * w.value[None, :, :] + b.value[None, :, :]

    def vjp(g):
        return np.einsum("nf,nfd->fd", x, g), g.sum(axis=0)

    return Node(out, (w, b), "feature_embed", vjp)


# ---------------------------------------------------------------------------
# Shape manipulation
# ---------------------------------------------------------------------------


def reshape(x: Node, shape: Sequence[int]) -> Node:
    x = _as_node(x)
    orig = x.value.shape
    out = x.value.reshape(shape)

    def vjp(g):
        return (g.reshape(orig),)

    return Node(out, (x,), "reshape", vjp)


def transpose(x: Node, axes: Sequence[int]) -> Node:
    x = _as_node(x)
    axes = tuple(axes)
    inverse = tuple(np.argsort(axes))
    out = x.value.transpose(axes)

    def vjp(g):
        return (g.transpose(inverse),)

    return Node(out, (x,), "transpose", vjp)


def slice_rows(x: Node, start: int, stop: int) -> Node:
    """View of rows [start, stop); the backward pass scatters into zeros."""
    x = _as_node(x)
    out = x.value[start:stop]

    def vjp(g):
        full = np.zeros_like(x.value)
        full[start:stop] = g
        return (full,)

    return Node(out, (x,), "slice_rows", vjp)


def concat(nodes: Sequence[Node], axis: int = 0) -> Node:
    nodes = [_as_node(n) for n in nodes]
    sizes = [n.value.shape[axis] for n in nodes]
    out = np.concatenate([n.value for n in nodes], axis=axis)
    splits = np.cumsum(sizes)[:-1]

    def vjp(g):
        return tuple(np.split(g, splits, axis=axis))

    return Node(out, tuple(nodes), "concat", vjp)


# ---------------------------------------------------------------------------
# Reductions and loss
# ---------------------------------------------------------------------------


def sum_all(x: Node) -> Node:
    x = _as_node(x)
    shape = x.value.shape

    def vjp(g):
        return (np.broadcast_to(g, shape).copy(),)

    return Node(x.value.sum(), (x,), "sum_all", vjp)


def mean_all(x: Node) -> Node:
    x = _as_node(x)
    shape = x.value.shape
    n = x.value.size

    def vjp(g):
        return (np.broadcast_to(g / n, shape).copy(),)

    return Node(x.value.mean(), (x,), "mean_all", vjp)


def mean_axis(x: Node, axis: int) -> Node:
    x = _as_node(x)
    n = x.value.shape[axis]

    def vjp(g):
        return (np.repeat(np.expand_dims(g / n, axis), n, axis=axis),)

    return Node(x.value.mean(axis=axis), (x,), "mean_axis", vjp)


def binary_cross_entropy(y_hat: Node, y: np.ndarray) -> Node:
    """Summed binary cross entropy  -sum_i [y log p + (1-y) log(1-p)].

    Predictions are clamped to [1e-7, 1 - 1e-7] before the logs; the clamp
    has zero gradient outside that band. Callers wanting a mean divide by the
    batch size themselves.
    """
    y_hat = _as_node(y_hat)
    y = np.asarray(y, dtype=np.float64)
    if y_hat.value.shape != y.shape:
        raise ValueError(
            f"binary_cross_entropy length mismatch: predictions {y_hat.value.shape}, labels {y.shape}"
        )
    lo, hi = BCE_CLAMP, 1.0 - BCE_CLAMP
    p = np.clip(y_hat.value, lo, hi)
    loss = -(y * np.log(p) + (1.0 - y) * np.log(1.0 - p)).sum()
    in_band = (y_hat.value >= lo) & (y_hat.value <= hi)

    def vjp(g):
        return (g * in_band * (p - y) / (p * (1.0 - p)),)

    return Node(loss, (y_hat,), "binary_cross_entropy", vjp)


# ---------------------------------------------------------------------------
# Backward pass
# ---------------------------------------------------------------------------


def _topological_order(root: Node) -> list[Node]:
    order: list[Node] = []
    seen: set[int] = set()
    stack: list[tuple[Node, bool]] = [(root, False)]
    while stack:
        node, expanded = stack.pop()
        if expanded:
            order.append(node)
            continue
        if id(node) in seen:
            continue
        seen.add(id(node))
        stack.append((node, True))
        for parent in node.parents:
            if id(parent) not in seen:
                stack.append((parent, False))
    return order


def backward(loss: Node) -> None:
    """Populate ``grad`` on every ancestor of a scalar loss.

    Each call propagates a fresh unit seed and adds the resulting gradients
    onto whatever is already stored, so two calls without zeroing give
    exactly twice the single-pass gradients.
    """
    if loss.value.shape != ():
        raise ValueError(f"backward expects a scalar loss, got shape {loss.value.shape}")
    order = _topological_order(loss)
    pending: dict[int, np.ndarray] = {id(loss): np.ones((), dtype=np.float64)}
    for node in reversed(order):
        g = pending.pop(id(node), None)
        if g is None:
            continue
        if node._grad is None:
            node._grad = g.copy()
        else:
            node._grad += g
        if node._vjp is None:
            continue
        for parent, pg in zip(node.parents, node._vjp(g)):
            if pg is None:
                continue
            prev = pending.get(id(parent))
            pending[id(parent)] = pg if prev is None else prev + pg


# ---------------------------------------------------------------------------
# Optimiser
# ---------------------------------------------------------------------------


class AdamState:
    """First and second moment buffers, one pair per parameter name."""

    def __init__(self, params: Sequence[Parameter]):
        names = [p.name for p in params]
        if len(set(names)) != len(names):
            raise ValueError("parameter names must be unique within one optimiser state")
        self.step_count = 0
        self.first_moment = {p.name: np.zeros_like(p.value) for p in params}
        self.second_moment = {p.name: np.zeros_like(p.value) for p in params}


def adam_step(params: Sequence[Parameter], state: AdamState, lr: float,
              beta1: float = 0.9, beta2: float = 0.999, eps: float = 1e-8) -> None:
    """One bias-corrected Adam update; gradients are zeroed afterwards."""
    if lr <= 0:
        raise ValueError(f"learning rate must be positive, got {lr}")
    state.step_count += 1
    t = state.step_count
    c1 = 1.0 - beta1 ** t
    c2 = 1.0 - beta2 ** t
    for p in params:
        g = p.grad
        m = state.first_moment[p.name]
        v = state.second_moment[p.name]
        m *= beta1
        m += (1.0 - beta1) * g
        v *= beta2
        v += (1.0 - beta2) * g * g
        p.value -= lr * (m / c1) / (np.sqrt(v / c2) + eps)
        p._grad = None


def zero_grads(params: Sequence[Parameter]) -> None:
    for p in params:
        p._grad = None


# ---------------------------------------------------------------------------
# Gradient checking
# ---------------------------------------------------------------------------


def gradient_check(loss_fn: Callable[[np.ndarray], Node], params: Sequence[Parameter],
                   x: np.ndarray, h: float = 1e-5,
                   max_coords_per_param: int = 20, seed: int = 0) -> float:
    """Worst relative error between reverse-mode and central-difference
    gradients over a random sample of parameter coordinates.

    ``loss_fn`` must rebuild its graph on every call and be a pure function
    of ``x`` and the current parameter values. Coordinates where both
    gradient estimates are below 1e-6 in magnitude count as zero error.
    """
    if h <= 0:
        raise ValueError(f"step size must be positive, got {h}")
    zero_grads(params)
    backward(loss_fn(x))
    analytic = {p.name: p.grad.copy() for p in params}
    zero_grads(params)

    rng = np.random.default_rng(seed)
    worst = 0.0
    for p in params:
        flat = p.value.reshape(-1)
        k = min(max_coords_per_param, flat.size)
        coords = rng.choice(flat.size, size=k, replace=False)
        ana_flat = analytic[p.name].reshape(-1)
        for i in coords:
            orig = flat[i]
            flat[i] = orig + h
            up = float(loss_fn(x).value)
            flat[i] = orig - h
            down = float(loss_fn(x).value)
            flat[i] = orig
            numeric = (up - down) / (2.0 * h)
            denom = max(abs(numeric), abs(ana_flat[i]))
            if denom < 1e-6:
                continue
            worst = max(worst, abs(numeric - ana_flat[i]) / denom)
    return worst


def uniform_init(rng: np.random.Generator, shape: tuple[int, ...], fan_in: int) -> np.ndarray:
    """Weight initialisation: uniform on +-sqrt(1 / fan_in)."""
    bound = math.sqrt(1.0 / fan_in)
    return rng.uniform(-bound, bound, size=shape)
