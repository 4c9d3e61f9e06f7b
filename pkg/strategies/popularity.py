"""Most-popular ranking, optionally fed by the shared interaction ledger."""

from typing import List, Optional

from env.ledger import InteractionLedger
from registry import register
from strategy_api import RecommenderStrategy
from domain.types import id_sort_key


class PopularityStrategy(RecommenderStrategy):
    """Ranks by dataset interaction count plus likes from closed ledger rounds."""

    name = "popularity"

    def __init__(self, catalog, ledger: Optional[InteractionLedger] = None, **kwargs):
        super().__init__(catalog)
        self.ledger = ledger

    def score(self, item_id: str) -> int:
        count = self.catalog[item_id].stat_count
        if self.ledger is not None:
            count += self.ledger.closed_likes(item_id)
        return count

    def rank(self, user_id: str, seed: int, round_index: int = 0) -> List[str]:
        return sorted(self.catalog, key=lambda i: (-self.score(i), id_sort_key(i)))


STRATEGY = PopularityStrategy
register(STRATEGY)
