"""Biased matrix factorization trained with stochastic gradient descent.

Per-sample objective:
    0.5 * (r - r_hat)^2 + 0.5 * reg * (b_u^2 + b_i^2 + |p_u|^2 + |q_i|^2)
with r_hat = mu + b_u + b_i + p_u . q_i. Predictions are clamped to [1, 5].
"""

from dataclasses import dataclass, field
from typing import Dict, Iterable, List, Sequence, Tuple

import numpy as np

from domain.errors import EmptyTraining
from domain.types import InteractionRecord

RATING_MIN = 1.0
RATING_MAX = 5.0


@dataclass
class MFModel:
    dim: int
    global_mean: float
    user_index: Dict[str, int] = field(default_factory=dict)
    item_index: Dict[str, int] = field(default_factory=dict)
    user_bias: np.ndarray = None
    item_bias: np.ndarray = None
    user_factors: np.ndarray = None
    item_factors: np.ndarray = None

    def raw(self, user_id: str, item_id: str) -> float:
        """Unclamped prediction; unknown users or items contribute nothing."""
        value = self.global_mean
        u = self.user_index.get(user_id)
        i = self.item_index.get(item_id)
        if u is not None:
            value += self.user_bias[u]
        if i is not None:
            value += self.item_bias[i]
        if u is not None and i is not None:
            value += float(self.user_factors[u] @ self.item_factors[i])
        return float(value)

    def predict(self, user_id: str, item_id: str) -> float:
        return min(RATING_MAX, max(RATING_MIN, self.raw(user_id, item_id)))

    def user_bias_of(self, user_id: str) -> float:
        u = self.user_index.get(user_id)
        return 0.0 if u is None else float(self.user_bias[u])

    def item_bias_of(self, item_id: str) -> float:
        i = self.item_index.get(item_id)
        return 0.0 if i is None else float(self.item_bias[i])


def sample_loss(model: MFModel, u: int, i: int, rating: float, reg: float) -> float:
    p, q = model.user_factors[u], model.item_factors[i]
    bu, bi = model.user_bias[u], model.item_bias[i]
    err = rating - (model.global_mean + bu + bi + float(p @ q))
    penalty = bu * bu + bi * bi + float(p @ p) + float(q @ q)
    return 0.5 * err * err + 0.5 * reg * penalty


def sample_gradients(model: MFModel, u: int, i: int, rating: float, reg: float
                     ) -> Tuple[float, float, np.ndarray, np.ndarray]:
    """Analytic gradient of ``sample_loss`` w.r.t. (b_u, b_i, p_u, q_i)."""
    p, q = model.user_factors[u], model.item_factors[i]
    bu, bi = model.user_bias[u], model.item_bias[i]
    err = rating - (model.global_mean + bu + bi + float(p @ q))
    return (-err + reg * bu, -err + reg * bi, -err * q + reg * p, -err * p + reg * q)


def fit_triples(triples: Sequence[Tuple[str, str, float]], dim: int = 32,
                learning_rate: float = 0.005, epochs: int = 30, reg: float = 0.02,
                seed: int = 0, init_std: float = 0.1) -> MFModel:
    """
    Fit biased MF on (user_id, item_id, rating) triples.

    Raises:
        EmptyTraining: no triples given
    """
    if not triples:
        raise EmptyTraining("no rated interactions to train on")
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(seed)

    users = sorted({t[0] for t in triples})
    items = sorted({t[1] for t in triples})
    model = MFModel(
        dim=dim,
        global_mean=float(np.mean([t[2] for t in triples])),
        user_index={u: k for k, u in enumerate(users)},
        item_index={i: k for k, i in enumerate(items)},
        user_bias=np.zeros(len(users)),
        item_bias=np.zeros(len(items)),
        user_factors=rng.normal(0.0, init_std, size=(len(users), dim)),
        item_factors=rng.normal(0.0, init_std, size=(len(items), dim)),
    )
    us = np.array([model.user_index[t[0]] for t in triples])
    its = np.array([model.item_index[t[1]] for t in triples])
    rs = np.array([float(t[2]) for t in triples])

    for _ in range(epochs):
        for k in rng.permutation(len(rs)):
            u, i, r = us[k], its[k], rs[k]
            g_bu, g_bi, g_p, g_q = sample_gradients(model, u, i, r, reg)
            model.user_bias[u] -= learning_rate * g_bu
            model.item_bias[i] -= learning_rate * g_bi
            model.user_factors[u] = model.user_factors[u] - learning_rate * g_p
            model.item_factors[i] = model.item_factors[i] - learning_rate * g_q
    return model


def train_mf(train: Iterable[InteractionRecord], d: int = 32, learning_rate: float = 0.005,
             epochs: int = 30, reg: float = 0.02, seed: int = 0) -> MFModel:
    """Train on the rated records of ``train``; unrated records are ignored."""
    triples = [(r.user_id, r.item_id, float(r.rating)) for r in train if r.rating is not None]
    if not triples:
        raise EmptyTraining("training split has no rated interactions")
    return fit_triples(triples, dim=d, learning_rate=learning_rate, epochs=epochs,
                       reg=reg, seed=seed)


def rmse_on(model: MFModel, triples: Iterable[Tuple[str, str, float]]) -> float:
    errors: List[float] = [model.predict(u, i) - r for u, i, r in triples]
    return float(np.sqrt(np.mean(np.square(errors)))) if errors else 0.0
