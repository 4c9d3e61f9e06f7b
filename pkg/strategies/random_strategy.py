"""Seeded random ranking."""

from typing import List

import numpy as np

from settings import derive_seed
from registry import register
from strategy_api import RecommenderStrategy
from domain.types import id_sort_key


class RandomStrategy(RecommenderStrategy):
    name = "random"

    def __init__(self, catalog, **kwargs):
        super().__init__(catalog)
        self._ids = sorted(catalog, key=id_sort_key)

    def rank(self, user_id: str, seed: int, round_index: int = 0) -> List[str]:
        rng = np.random.default_rng(derive_seed(seed, "random", user_id))
        return [self._ids[k] for k in rng.permutation(len(self._ids))]


STRATEGY = RandomStrategy
register(STRATEGY)
