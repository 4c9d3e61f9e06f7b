"""Rankings computed by a third-party recommender and read from a file."""

import json
from typing import Dict, List

from registry import register
from strategy_api import RecommenderStrategy
from domain.errors import ConfigError, ParseFailure
from domain.types import id_sort_key


def load_rankings(path: str) -> Dict[str, List[str]]:
    """Read line-JSON ``{"user_id": ..., "items": [...]}`` rows."""
    rankings = {}
    try:
        with open(path, encoding="utf-8") as f:
            for lineno, line in enumerate(f, 1):
                if not line.strip():
                    continue
                try:
                    row = json.loads(line)
                    rankings[str(row["user_id"])] = [str(i) for i in row["items"]]
                except (ValueError, KeyError, TypeError) as e:
                    raise ParseFailure(f"{path}:{lineno}: {e}") from e
    except OSError as e:
        raise ConfigError(f"cannot read rankings {path}: {e}") from e
    return rankings


class ExternalStrategy(RecommenderStrategy):
    """User's listed items first, then the rest of the catalog by popularity."""

    name = "external"

    def __init__(self, catalog, rankings: Dict[str, List[str]] = None, **kwargs):
        super().__init__(catalog)
        if rankings is None:
            raise ConfigError("external strategy needs a rankings file")
        self.rankings = rankings
        self._fallback = sorted(catalog, key=lambda i: (-catalog[i].stat_count, id_sort_key(i)))

    def rank(self, user_id: str, seed: int, round_index: int = 0) -> List[str]:
        listed = []
        seen = set()
        for item_id in self.rankings.get(user_id, []):
            if item_id in self.catalog and item_id not in seen:
                listed.append(item_id)
                seen.add(item_id)
        return listed + [i for i in self._fallback if i not in seen]


STRATEGY = ExternalStrategy
register(STRATEGY)
