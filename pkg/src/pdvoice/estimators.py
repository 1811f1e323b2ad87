"""Sklearn-style classifiers around the autodiff networks.

All three share one training loop: mini-batch Adam on mean binary cross
entropy, batches drawn by a seeded shuffle every epoch, batch size capped at
the training-set size. Randomness comes from two named sub-streams per model
("init.<kind>" and "train.<kind>"), so training is bit-reproducible for a
given seed and adding another model to an experiment never disturbs this one.

``predict_proba`` returns the positive-class probability as a 1-D vector
(the companion ``predict`` thresholds it at 0.5). With intersample attention
enabled, SAINT scores the entire evaluation set as a single batch, so its
predictions depend on the composition of that set; this is inherent to
attending across samples and is documented rather than hidden.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator, ClassifierMixin

from . import autodiff as ad
from .exceptions import TrainingDivergedError
from .networks import AttentiveNetwork, MlpNetwork, SaintNetwork
from .seeding import substream
from .validation import check_binary_labels, check_matrix, check_n_features

ADAM_BETA1 = 0.9
ADAM_BETA2 = 0.999
ADAM_EPS = 1e-8


class _NeuralClassifier(ClassifierMixin, BaseEstimator):
    """Shared fit/predict machinery; subclasses build the network."""

    kind = ""

    def _build_network(self, n_features: int, rng: np.random.Generator):
        raise NotImplementedError

    def _check_hyperparams(self) -> None:
        if self.epochs < 1:
            raise ValueError(f"epochs must be >= 1, got {self.epochs}")
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        if self.learning_rate <= 0:
            raise ValueError(f"learning_rate must be positive, got {self.learning_rate}")

    def fit(self, X, y):
        self._check_hyperparams()
        X = check_matrix(X)
        y = check_binary_labels(y, X.shape[0])
        if np.unique(y).size < 2:
            raise ValueError("training data must contain both classes")
        n = X.shape[0]

        init_rng = substream(self.seed, f"init.{self.kind}")
        self.network_ = self._build_network(X.shape[1], init_rng)
        params = self.network_.parameters()
        state = ad.AdamState(params)
        train_rng = substream(self.seed, f"train.{self.kind}")
        batch = min(self.batch_size, n)

        curve = []
        y_float = y.astype(np.float64)
        for epoch in range(self.epochs):
            order = train_rng.permutation(n)
            total = 0.0
            for start in range(0, n, batch):
                idx = order[start:start + batch]
                probs = self.network_.forward(X[idx], training=True, rng=train_rng,
                                              update_stats=True)
                loss = ad.scale(ad.binary_cross_entropy(probs, y_float[idx]), 1.0 / idx.size)
                if not np.isfinite(loss.value):
                    raise TrainingDivergedError(epoch)
                ad.backward(loss)
                ad.adam_step(params, state, self.learning_rate,
                             ADAM_BETA1, ADAM_BETA2, ADAM_EPS)
                total += float(loss.value) * idx.size
            curve.append(total / n)
        self.loss_curve_ = np.array(curve)
        self.n_features_in_ = X.shape[1]
        self.classes_ = np.array([0, 1])
        return self

    def predict_proba(self, X) -> np.ndarray:
        X = check_n_features(check_matrix(X), self.n_features_in_)
        return self.network_.forward(X, training=False).value

    def predict(self, X) -> np.ndarray:
        return (self.predict_proba(X) >= 0.5).astype(np.int64)


class MlpClassifier(_NeuralClassifier):
    """Fully connected ReLU network with a sigmoid output unit."""

    kind = "mlp"

    def __init__(self, hidden_sizes=(64, 32), epochs=100, batch_size=256,
                 learning_rate=1e-3, seed=42):
        self.hidden_sizes = hidden_sizes
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed

    def _check_hyperparams(self):
        super()._check_hyperparams()
        if not self.hidden_sizes or any(w < 1 for w in self.hidden_sizes):
            raise ValueError(f"hidden layer widths must be >= 1, got {self.hidden_sizes}")

    def _build_network(self, n_features, rng):
        return MlpNetwork(n_features, tuple(self.hidden_sizes), rng)


class AttentiveClassifier(_NeuralClassifier):
    """Learned softmax feature mask feeding a ghost-batch-normalised head."""

    kind = "attentive"

    def __init__(self, head_hidden=32, virtual_batch=128, epochs=100,
                 batch_size=256, learning_rate=1e-3, seed=42):
        self.head_hidden = head_hidden
        self.virtual_batch = virtual_batch
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed

    def _check_hyperparams(self):
        super()._check_hyperparams()
        if self.head_hidden < 1:
            raise ValueError(f"head_hidden must be >= 1, got {self.head_hidden}")
        if self.virtual_batch < 1:
            raise ValueError(f"virtual_batch must be >= 1, got {self.virtual_batch}")

    def _build_network(self, n_features, rng):
        return AttentiveNetwork(n_features, self.head_hidden, self.virtual_batch, rng)

    def attention_mask(self, X) -> np.ndarray:
        """Per-sample feature weights (rows sum to 1)."""
        X = check_n_features(check_matrix(X), self.n_features_in_)
        return self.network_.attention_mask(X)


class SaintClassifier(_NeuralClassifier):
    """Tokenised transformer with feature attention and, optionally,
    intersample attention across the rows of each batch."""

    kind = "saint"

    def __init__(self, embed_dim=16, n_layers=2, n_heads=2, ff_multiplier=2,
                 dropout=0.1, use_intersample=True, epochs=100, batch_size=256,
                 learning_rate=1e-3, seed=42):
        self.embed_dim = embed_dim
        self.n_layers = n_layers
        self.n_heads = n_heads
        self.ff_multiplier = ff_multiplier
        self.dropout = dropout
        self.use_intersample = use_intersample
        self.epochs = epochs
        self.batch_size = batch_size
        self.learning_rate = learning_rate
        self.seed = seed

    def _check_hyperparams(self):
        super()._check_hyperparams()
        if self.embed_dim < 1 or self.n_layers < 1 or self.n_heads < 1:
            raise ValueError("embed_dim, n_layers and n_heads must all be >= 1")
        if self.embed_dim % self.n_heads != 0:
            raise ValueError(
                f"embed_dim {self.embed_dim} must be divisible by n_heads {self.n_heads}")
        if not 0.0 <= self.dropout < 1.0:
            raise ValueError(f"dropout must lie in [0, 1), got {self.dropout}")

    def _build_network(self, n_features, rng):
        return SaintNetwork(n_features, self.embed_dim, self.n_layers, self.n_heads,
                            self.ff_multiplier, self.dropout, self.use_intersample, rng)

    def attention_maps(self, X) -> dict:
        """Attention distributions of one inference pass: feature-attention
        tensors of shape (n, heads, tokens, tokens) per layer, and, when
        intersample attention is on, (1, heads, n, n) tensors per layer."""
        X = check_n_features(check_matrix(X), self.n_features_in_)
        self.network_.forward(X, training=False, record_attention=True)
        return self.network_.last_attention_
