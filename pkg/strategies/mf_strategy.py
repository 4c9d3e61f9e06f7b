"""Ranking by matrix-factorization predicted rating."""

from typing import List

from env.mf import MFModel
from registry import register
from strategy_api import RecommenderStrategy
from domain.errors import ConfigError
from domain.types import id_sort_key


class MFStrategy(RecommenderStrategy):
    name = "mf"

    def __init__(self, catalog, model: MFModel = None, **kwargs):
        super().__init__(catalog)
        if model is None:
            raise ConfigError("mf strategy needs a trained model")
        self.model = model

    def rank(self, user_id: str, seed: int, round_index: int = 0) -> List[str]:
        scores = {i: self.model.raw(user_id, i) for i in self.catalog}
        return sorted(self.catalog, key=lambda i: (-scores[i], id_sort_key(i)))


STRATEGY = MFStrategy
register(STRATEGY)
