"""The discrete action grammar available to a simulated user."""

from dataclasses import dataclass
from typing import Union

PURCHASE_MARKERS = ("buy", "purchase", "checkout", "place_order")


@dataclass(frozen=True)
class NextPage:
    pass


@dataclass(frozen=True)
class PrevPage:
    pass


@dataclass(frozen=True)
class ClickItem:
    item_id: str


@dataclass(frozen=True)
class Search:
    query: str


@dataclass(frozen=True)
class Rate:
    item_id: str
    value: int


@dataclass(frozen=True)
class Exit:
    pass


@dataclass(frozen=True)
class WebClick:
    semantic_id: str


@dataclass(frozen=True)
class WebInput:
    semantic_id: str
    text: str


@dataclass(frozen=True)
class WebTerminate:
    pass


Action = Union[NextPage, PrevPage, ClickItem, Search, Rate, Exit, WebClick, WebInput, WebTerminate]

ACTION_TYPES = {cls.__name__: cls for cls in
                (NextPage, PrevPage, ClickItem, Search, Rate, Exit, WebClick, WebInput, WebTerminate)}
WEB_ONLY = (WebClick, WebInput, WebTerminate)


def action_type(action: Action) -> str:
    return type(action).__name__


def is_purchase_id(semantic_id: str) -> bool:
    sid = semantic_id.lower()
    return any(marker in sid for marker in PURCHASE_MARKERS)


def is_terminal(action: Action) -> bool:
    """Exit, terminate, or a purchase-tagged click end a session."""
    if isinstance(action, (Exit, WebTerminate)):
        return True
    return isinstance(action, WebClick) and is_purchase_id(action.semantic_id)
