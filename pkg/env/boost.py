"""Temporary exposure boost of one target item."""

from typing import List, Optional

from domain.errors import UnknownItem
from strategy_api import RecommenderStrategy


class BoostedStrategy(RecommenderStrategy):
    """Wraps a strategy and pins ``target`` to rank 1 during rounds 1..boost_rounds."""

    def __init__(self, base: RecommenderStrategy, target: str, boost_rounds: int):
        super().__init__(base.catalog)
        self.base = base
        self.target = target
        self.boost_rounds = boost_rounds
        self.name = f"{base.name}+boost"

    def boosted(self, round_index: int) -> bool:
        return 1 <= round_index <= self.boost_rounds

    def rank(self, user_id: str, seed: int, round_index: int = 0) -> List[str]:
        return self.base.rank(user_id, seed, round_index)

    def ranking(self, user_id, seed, exclusions=(), query: Optional[str] = None,
                round_index: int = 0) -> List[str]:
        ids = self.base.ranking(user_id, seed, exclusions, query, round_index)
        if query or not self.boosted(round_index):
            return ids
        return [self.target] + [i for i in ids if i != self.target]


def apply_exposure_boost(strategy: RecommenderStrategy, item_id: str,
                         boost_rounds: int) -> RecommenderStrategy:
    """
    Boost ``item_id`` to the top of page 1 for the first ``boost_rounds`` rounds.

    Raises:
        UnknownItem: ``item_id`` is not in the strategy's catalog
    """
    if boost_rounds < 0:
        raise ValueError("boost_rounds must be >= 0")
    if item_id not in strategy.catalog:
        raise UnknownItem(f"item {item_id} is not in the catalog")
    if boost_rounds == 0:
        return strategy
    return BoostedStrategy(strategy, item_id, boost_rounds)
