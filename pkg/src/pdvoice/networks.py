"""Network definitions for the three gradient-trained classifiers.

Each network is a bag of named parameters plus a ``forward`` that rebuilds
its graph from a raw (n, d) feature matrix and returns positive-class
probabilities of shape (n,). ``training`` switches dropout and batch-norm
behaviour; ``record_attention`` stashes the attention distributions of the
last forward pass as plain arrays for inspection.
"""

from __future__ import annotations

import math

import numpy as np

from . import autodiff as ad
from .autodiff import Node, Parameter, uniform_init

BN_MOMENTUM = 0.1
BN_EPS = 1e-5


class Linear:
    """Affine map with uniform +-sqrt(1/fan_in) weights and zero bias."""

    def __init__(self, n_in: int, n_out: int, name: str, rng: np.random.Generator):
        self.W = Parameter(uniform_init(rng, (n_in, n_out), n_in), f"{name}.W")
        self.b = Parameter(np.zeros(n_out), f"{name}.b")

    def __call__(self, x: Node) -> Node:
        return ad.add(ad.matmul(x, self.W), self.b)

    def parameters(self) -> list[Parameter]:
        return [self.W, self.b]


class LayerNorm:
    def __init__(self, dim: int, name: str):
        self.gain = Parameter(np.ones(dim), f"{name}.gain")
        self.bias = Parameter(np.zeros(dim), f"{name}.bias")

    def __call__(self, x: Node) -> Node:
        return ad.layer_norm(x, self.gain, self.bias)

    def parameters(self) -> list[Parameter]:
        return [self.gain, self.bias]


class GhostBatchNorm:
    """Batch normalisation over fixed-size virtual sub-batches.

    During training each chunk of ``virtual_batch`` rows is normalised with
    its own statistics (a short tail chunk keeps whatever rows remain) and
    the running statistics absorb every chunk with momentum 0.1. Inference
    always normalises against the running statistics.
    """

    def __init__(self, dim: int, virtual_batch: int, name: str):
        if virtual_batch < 1:
            raise ValueError(f"virtual_batch must be >= 1, got {virtual_batch}")
        self.virtual_batch = virtual_batch
        self.name = name
        self.gain = Parameter(np.ones(dim), f"{name}.gain")
        self.bias = Parameter(np.zeros(dim), f"{name}.bias")
        self.running_mean = np.zeros(dim)
        self.running_var = np.ones(dim)

    def __call__(self, x: Node, training: bool, update_stats: bool) -> Node:
        if not training:
            return ad.batch_norm_eval(x, self.gain, self.bias,
                                      self.running_mean, self.running_var, BN_EPS)
        n = x.value.shape[0]
        chunks = []
        for start in range(0, n, self.virtual_batch):
            stop = min(start + self.virtual_batch, n)
            block = ad.slice_rows(x, start, stop) if (start, stop) != (0, n) else x
            chunks.append(ad.batch_norm_train(block, self.gain, self.bias, BN_EPS))
            if update_stats:
                values = x.value[start:stop]
                self.running_mean = ((1.0 - BN_MOMENTUM) * self.running_mean
                                     + BN_MOMENTUM * values.mean(axis=0))
                self.running_var = ((1.0 - BN_MOMENTUM) * self.running_var
                                    + BN_MOMENTUM * values.var(axis=0))
        return chunks[0] if len(chunks) == 1 else ad.concat(chunks, axis=0)

    def parameters(self) -> list[Parameter]:
        return [self.gain, self.bias]

    def buffers(self) -> dict[str, np.ndarray]:
        return {f"{self.name}.running_mean": self.running_mean,
                f"{self.name}.running_var": self.running_var}

    def load_buffers(self, buffers: dict[str, np.ndarray]) -> None:
        self.running_mean = np.asarray(buffers[f"{self.name}.running_mean"], dtype=np.float64)
        self.running_var = np.asarray(buffers[f"{self.name}.running_var"], dtype=np.float64)


class FeedForward:
    """Position-wise two-layer ReLU block with dropout after the activation."""

    def __init__(self, dim: int, multiplier: int, dropout: float, name: str,
                 rng: np.random.Generator):
        self.inner = Linear(dim, dim * multiplier, f"{name}.inner", rng)
        self.outer = Linear(dim * multiplier, dim, f"{name}.outer", rng)
        self.dropout = dropout

    def __call__(self, x: Node, training: bool, rng: np.random.Generator | None) -> Node:
        h = ad.relu(self.inner(x))
        if training and self.dropout > 0.0:
            h = ad.dropout(h, self.dropout, rng)
        return self.outer(h)

    def parameters(self) -> list[Parameter]:
        return self.inner.parameters() + self.outer.parameters()


class MultiHeadAttention:
    """Scaled dot-product attention over the middle axis of (batch, seq, dim).

    Softmax runs over the attended-to positions, so every (batch, head, query)
    row of the weight tensor is a distribution. Dropout, when active, hits the
    weights right after the softmax.
    """

    def __init__(self, dim: int, n_heads: int, dropout: float, name: str,
                 rng: np.random.Generator):
        if dim % n_heads != 0:
            raise ValueError(f"attention dim {dim} is not divisible by {n_heads} heads")
        self.n_heads = n_heads
        self.head_dim = dim // n_heads
        self.dropout = dropout
        self.query = Linear(dim, dim, f"{name}.query", rng)
        self.key = Linear(dim, dim, f"{name}.key", rng)
        self.value = Linear(dim, dim, f"{name}.value", rng)
        self.out = Linear(dim, dim, f"{name}.out", rng)

    def __call__(self, x: Node, training: bool, rng: np.random.Generator | None,
                 record: list | None = None) -> Node:
        n, t, d = x.value.shape
        h, dh = self.n_heads, self.head_dim

        def split_heads(node):
            return ad.transpose(ad.reshape(node, (n, t, h, dh)), (0, 2, 1, 3))

        q = split_heads(self.query(x))
        k = split_heads(self.key(x))
        v = split_heads(self.value(x))
        scores = ad.scale(ad.matmul(q, ad.transpose(k, (0, 1, 3, 2))), 1.0 / math.sqrt(dh))
        weights = ad.softmax_rows(scores)  # (n, h, t, t)
        if record is not None:
            record.append(weights.value.copy())
        if training and self.dropout > 0.0:
            weights = ad.dropout(weights, self.dropout, rng)
        context = ad.matmul(weights, v)
        context = ad.reshape(ad.transpose(context, (0, 2, 1, 3)), (n, t, d))
        return self.out(context)

    def parameters(self) -> list[Parameter]:
        return (self.query.parameters() + self.key.parameters()
                + self.value.parameters() + self.out.parameters())


class FeatureAttentionBlock:
    """Self-attention across the feature tokens of each sample, post-norm:
    x = LN(x + attn(x)); x = LN(x + ff(x))."""

    def __init__(self, dim: int, n_heads: int, ff_multiplier: int, dropout: float,
                 name: str, rng: np.random.Generator):
        self.attn = MultiHeadAttention(dim, n_heads, dropout, f"{name}.attn", rng)
        self.norm1 = LayerNorm(dim, f"{name}.norm1")
        self.ff = FeedForward(dim, ff_multiplier, dropout, f"{name}.ff", rng)
        self.norm2 = LayerNorm(dim, f"{name}.norm2")

    def __call__(self, x: Node, training: bool, rng, record=None) -> Node:
        x = self.norm1(ad.add(x, self.attn(x, training, rng, record)))
        return self.norm2(ad.add(x, self.ff(x, training, rng)))

    def parameters(self) -> list[Parameter]:
        return (self.attn.parameters() + self.norm1.parameters()
                + self.ff.parameters() + self.norm2.parameters())


class IntersampleAttentionBlock:
    """Attention across the samples of the batch.

    Each sample's token grid is flattened to one vector, attention runs over
    the n rows, and the result is folded back into (n, tokens, dim) before the
    usual residual, norm, and feed-forward treatment.
    """

    def __init__(self, n_tokens: int, dim: int, n_heads: int, ff_multiplier: int,
                 dropout: float, name: str, rng: np.random.Generator):
        self.attn = MultiHeadAttention(n_tokens * dim, n_heads, dropout, f"{name}.attn", rng)
        self.norm1 = LayerNorm(dim, f"{name}.norm1")
        self.ff = FeedForward(dim, ff_multiplier, dropout, f"{name}.ff", rng)
        self.norm2 = LayerNorm(dim, f"{name}.norm2")

    def __call__(self, x: Node, training: bool, rng, record=None) -> Node:
        n, t, d = x.value.shape
        flat = ad.reshape(x, (1, n, t * d))
        mixed = ad.reshape(self.attn(flat, training, rng, record), (n, t, d))
        x = self.norm1(ad.add(x, mixed))
        return self.norm2(ad.add(x, self.ff(x, training, rng)))

    def parameters(self) -> list[Parameter]:
        return (self.attn.parameters() + self.norm1.parameters()
                + self.ff.parameters() + self.norm2.parameters())


# ---------------------------------------------------------------------------
# Full networks
# ---------------------------------------------------------------------------


class MlpNetwork:
    """ReLU stack ending in a single sigmoid unit."""

    def __init__(self, n_features: int, hidden_sizes, rng: np.random.Generator):
        sizes = [n_features, *hidden_sizes]
        self.layers = [Linear(sizes[i], sizes[i + 1], f"hidden{i}", rng)
                       for i in range(len(sizes) - 1)]
        self.head = Linear(sizes[-1], 1, "head", rng)

    def forward(self, X: np.ndarray, training: bool = False, rng=None,
                update_stats: bool = False, record_attention: bool = False) -> Node:
        h: Node = ad.constant(X)
        for layer in self.layers:
            h = ad.relu(layer(h))
        logits = ad.reshape(self.head(h), (X.shape[0],))
        return ad.sigmoid(logits)

    def parameters(self) -> list[Parameter]:
        out = []
        for layer in self.layers:
            out.extend(layer.parameters())
        out.extend(self.head.parameters())
        return out

    def buffers(self) -> dict[str, np.ndarray]:
        return {}

    def load_buffers(self, buffers) -> None:
        pass


class AttentiveNetwork:
    """Input-conditioned softmax feature mask in front of a one-hidden-layer
    head with ghost batch normalisation.

    The mask logits come from a learned linear map of the input, so each
    sample selects its own feature weighting; the masked input is the
    elementwise product mask * x.
    """

    def __init__(self, n_features: int, head_hidden: int, virtual_batch: int,
                 rng: np.random.Generator):
        self.mask_linear = Linear(n_features, n_features, "mask", rng)
        self.hidden = Linear(n_features, head_hidden, "hidden", rng)
        self.gbn = GhostBatchNorm(head_hidden, virtual_batch, "gbn")
        self.head = Linear(head_hidden, 1, "head", rng)
        self.last_attention_: dict[str, np.ndarray] = {}

    def masked_input(self, x: Node, record_attention: bool = False) -> tuple[Node, Node]:
        mask = ad.softmax_rows(self.mask_linear(x))
        if record_attention:
            self.last_attention_ = {"mask": mask.value.copy()}
        return mask, ad.mul(mask, x)

    def forward(self, X: np.ndarray, training: bool = False, rng=None,
                update_stats: bool = False, record_attention: bool = False) -> Node:
        x = ad.constant(X)
        _, xhat = self.masked_input(x, record_attention)
        h = self.gbn(self.hidden(xhat), training, update_stats)
        h = ad.relu(h)
        logits = ad.reshape(self.head(h), (X.shape[0],))
        return ad.sigmoid(logits)

    def attention_mask(self, X: np.ndarray) -> np.ndarray:
        """Softmax feature weights per sample; rows sum to 1."""
        mask, _ = self.masked_input(ad.constant(X))
        return mask.value

    def parameters(self) -> list[Parameter]:
        return (self.mask_linear.parameters() + self.hidden.parameters()
                + self.gbn.parameters() + self.head.parameters())

    def buffers(self) -> dict[str, np.ndarray]:
        return self.gbn.buffers()

    def load_buffers(self, buffers) -> None:
        self.gbn.load_buffers(buffers)


class SaintNetwork:
    """Per-feature token embedding, alternating feature and intersample
    attention blocks, mean pooling over tokens, sigmoid head.

    Each scalar feature j maps through its own affine lift x -> x * w_j + b_j
    into ``embed_dim`` dimensions. With intersample attention enabled the
    prediction for one row depends on which other rows share the batch.
    """

    def __init__(self, n_features: int, embed_dim: int, n_layers: int, n_heads: int,
                 ff_multiplier: int, dropout: float, use_intersample: bool,
                 rng: np.random.Generator):
        if embed_dim % n_heads != 0:
            raise ValueError(f"embed_dim {embed_dim} is not divisible by {n_heads} heads")
        self.n_features = n_features
        self.use_intersample = use_intersample
        self.dropout = dropout
        # Fan-in of a per-feature lift is the single scalar it consumes.
        self.w_emb = Parameter(uniform_init(rng, (n_features, embed_dim), 1), "embed.W")
        self.b_emb = Parameter(np.zeros((n_features, embed_dim)), "embed.b")
        self.feature_blocks = []
        self.sample_blocks = []
        for i in range(n_layers):
            self.feature_blocks.append(FeatureAttentionBlock(
                embed_dim, n_heads, ff_multiplier, dropout, f"layer{i}.feature", rng))
            if use_intersample:
                self.sample_blocks.append(IntersampleAttentionBlock(
                    n_features, embed_dim, n_heads, ff_multiplier, dropout,
                    f"layer{i}.sample", rng))
        self.head = Linear(embed_dim, 1, "head", rng)
        self.last_attention_: dict[str, list[np.ndarray]] = {}

    def embed(self, X: np.ndarray) -> Node:
        return ad.feature_embed(X, self.w_emb, self.b_emb)

    def forward(self, X: np.ndarray, training: bool = False, rng=None,
                update_stats: bool = False, record_attention: bool = False) -> Node:
        feature_rec: list | None = [] if record_attention else None
        sample_rec: list | None = [] if record_attention else None
        h = self.embed(X)
        for i, block in enumerate(self.feature_blocks):
            h = block(h, training, rng, feature_rec)
            if self.use_intersample:
                h = self.sample_blocks[i](h, training, rng, sample_rec)
        pooled = ad.mean_axis(h, axis=1)
        logits = ad.reshape(self.head(pooled), (X.shape[0],))
        if record_attention:
            self.last_attention_ = {"feature": feature_rec, "intersample": sample_rec}
        return ad.sigmoid(logits)

    def parameters(self) -> list[Parameter]:
        out = [self.w_emb, self.b_emb]
        for i, block in enumerate(self.feature_blocks):
            out.extend(block.parameters())
            if self.use_intersample:
                out.extend(self.sample_blocks[i].parameters())
        out.extend(self.head.parameters())
        return out

    def buffers(self) -> dict[str, np.ndarray]:
        return {}

    def load_buffers(self, buffers) -> None:
        pass
