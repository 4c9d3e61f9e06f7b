"""Base API for recommendation strategies."""

from abc import ABC, abstractmethod
from typing import Dict, Iterable, List, Optional

from domain.types import Item


class RecommenderStrategy(ABC):
    """Base class for all ranking strategies."""

    name: str = None

    def __init__(self, catalog: Dict[str, Item], **kwargs):
        self.catalog = catalog

    @abstractmethod
    def rank(self, user_id: str, seed: int, round_index: int = 0) -> List[str]:
        """
        Full ranking of catalog item ids for ``user_id``.

        Returns:
            every catalog id exactly once, best first
        """
        pass

    def ranking(self, user_id: str, seed: int, exclusions: Iterable[str] = (),
                query: Optional[str] = None, round_index: int = 0) -> List[str]:
        """``rank`` with exclusions removed and an optional title filter applied."""
        excluded = set(exclusions)
        ids = [i for i in self.rank(user_id, seed, round_index) if i not in excluded]
        if query:
            needle = query.lower()
            ids = [i for i in ids if needle in self.catalog[i].title.lower()]
        return ids

    def recommend(self, user_id: str, page_number: int, page_size: int,
                  exclusions: Iterable[str] = (), seed: int = 0,
                  query: Optional[str] = None, round_index: int = 0) -> List[Item]:
        """Items of page ``page_number``; empty once the ranking is exhausted."""
        if page_size < 1:
            raise ValueError("page_size must be >= 1")
        if page_number < 1:
            return []
        ids = self.ranking(user_id, seed, exclusions, query, round_index)
        start = (page_number - 1) * page_size
        return [self.catalog[i] for i in ids[start:start + page_size]]

    def __repr__(self):
        return f"<{self.__class__.__name__}(name='{self.name}')>"
