"""Page-by-page recommender environment and its transition function."""

from dataclasses import dataclass, field, replace
from typing import Callable, Dict, FrozenSet, List, Optional, Tuple

from domain.actions import (Action, ClickItem, Exit, NextPage, PrevPage, Rate, Search,
                            WebClick, WebInput, WebTerminate, is_purchase_id)
from domain.errors import InvalidTransition, SessionClosed
from domain.types import ContextVector, Item, SessionState
from env.ledger import InteractionLedger
from strategy_api import RecommenderStrategy

RateHook = Callable[[str, int], None]


@dataclass
class SessionSpec:
    """Per-session inputs the transition function needs besides the state."""
    user_id: str
    seed: int
    context: Optional[ContextVector] = None
    exclusions: FrozenSet[str] = frozenset()
    round_index: int = 0
    own_ratings: Dict[str, int] = field(default_factory=dict)
    on_rate: List[RateHook] = field(default_factory=list)


def webshop_elements(items: Tuple[Item, ...], page_number: int) -> Tuple[str, ...]:
    ids = []
    for item in items:
        ids += [f"view_{item.item_id}", f"add_to_cart_{item.item_id}"]
    ids += ["search_input", "next_page"]
    if page_number > 1:
        ids.append("prev_page")
    ids.append("purchase_cart")
    return tuple(ids)


class RecEnv:
    """The environment a simulated user browses."""

    def __init__(self, catalog: Dict[str, Item], strategy: RecommenderStrategy,
                 page_size: int = 10, mode: str = "recommendation",
                 ledger: Optional[InteractionLedger] = None, like_threshold: int = 4):
        self.catalog = catalog
        self.strategy = strategy
        self.page_size = page_size
        self.mode = mode
        self.ledger = ledger
        self.like_threshold = like_threshold

    def reset(self, spec: SessionSpec) -> SessionState:
        return self._page(spec, 1, query=None, cart=(), own_ratings=dict(spec.own_ratings))

    def _page(self, spec: SessionSpec, page_number: int, query: Optional[str],
              cart: Tuple[str, ...], own_ratings: Dict[str, int]) -> SessionState:
        items = tuple(self.strategy.recommend(spec.user_id, page_number, self.page_size,
                                              exclusions=spec.exclusions, seed=spec.seed,
                                              query=query, round_index=spec.round_index))
        if self.ledger is not None and items:
            self.ledger.record_exposure(item.item_id for item in items)
        elements = webshop_elements(items, page_number) if self.mode == "webshop" else ()
        return SessionState(mode=self.mode, page_number=page_number, items=items,
                            page_context=self._page_context(query, cart),
                            user_context=spec.context, interactive_elements=elements,
                            query=query, cart=cart, own_ratings=own_ratings)

    def _page_context(self, query: Optional[str], cart: Tuple[str, ...]) -> str:
        if self.mode != "webshop":
            return ""
        total = sum(self.catalog[i].price or 0.0 for i in cart if i in self.catalog)
        page_type = f"search results for '{query}'" if query else "recommendations"
        return f"page type: {page_type}; cart: {len(cart)} items; cart price: {total:.2f}"

    def step(self, state: SessionState, action: Action, spec: SessionSpec) -> SessionState:
        """
        Apply ``action`` to ``state``.

        Raises:
            SessionClosed: the state is terminated
            InvalidTransition: the action is not legal in this state
        """
        if state.terminated:
            raise SessionClosed("session already terminated")
        if isinstance(action, (WebClick, WebInput, WebTerminate)):
            if state.mode != "webshop":
                raise InvalidTransition(f"{type(action).__name__} outside webshop mode")
            return self._web_step(state, action, spec)
        if isinstance(action, Exit):
            return replace(state, terminated=True)
        if isinstance(action, NextPage):
            return self._page(spec, state.page_number + 1, state.query, state.cart, state.own_ratings)
        if isinstance(action, PrevPage):
            if state.page_number <= 1:
                raise InvalidTransition("no previous page on page 1")
            return self._page(spec, state.page_number - 1, state.query, state.cart, state.own_ratings)
        if isinstance(action, ClickItem):
            self._require_on_page(state, action.item_id)
            return replace(state, expanded_item=action.item_id)
        if isinstance(action, Search):
            if not action.query.strip():
                raise InvalidTransition("empty search query")
            return self._page(spec, 1, action.query.strip(), state.cart, state.own_ratings)
        if isinstance(action, Rate):
            return self._rate(state, action, spec)
        raise InvalidTransition(f"unsupported action {action!r}")

    def _require_on_page(self, state: SessionState, item_id: str):
        if state.find(item_id) is None:
            raise InvalidTransition(f"item {item_id} is not on page {state.page_number}")

    def _rate(self, state: SessionState, action: Rate, spec: SessionSpec) -> SessionState:
        self._require_on_page(state, action.item_id)
        if action.value not in (1, 2, 3, 4, 5):
            raise InvalidTransition("rate value ∉ 1..5")
        if self.ledger is not None and action.value >= self.like_threshold:
            self.ledger.record_like(action.item_id)
        for hook in spec.on_rate:
            hook(action.item_id, action.value)
        ratings = dict(state.own_ratings)
        ratings[action.item_id] = action.value
        return replace(state, own_ratings=ratings)

    def _web_step(self, state: SessionState, action, spec: SessionSpec) -> SessionState:
        if isinstance(action, WebTerminate):
            return replace(state, terminated=True)
        if action.semantic_id not in state.interactive_elements:
            raise InvalidTransition(f"no element {action.semantic_id!r} on this page")
        if isinstance(action, WebInput):
            if action.semantic_id != "search_input":
                raise InvalidTransition(f"element {action.semantic_id!r} takes no input")
            return self._page(spec, 1, action.text.strip(), state.cart, state.own_ratings)

        sid = action.semantic_id
        if sid == "next_page":
            return self._page(spec, state.page_number + 1, state.query, state.cart, state.own_ratings)
        if sid == "prev_page":
            return self._page(spec, state.page_number - 1, state.query, state.cart, state.own_ratings)
        if sid == "search_input":
            return state
        if sid.startswith("view_"):
            return replace(state, expanded_item=sid[len("view_"):])
        if sid.startswith("add_to_cart_"):
            item_id = sid[len("add_to_cart_"):]
            cart = state.cart if item_id in state.cart else state.cart + (item_id,)
            return replace(state, cart=cart, page_context=self._page_context(state.query, cart))
        if is_purchase_id(sid):
            if self.ledger is not None:
                for item_id in state.cart:
                    self.ledger.record_like(item_id)
            return replace(state, terminated=True)
        raise InvalidTransition(f"element {sid!r} has no effect")
