"""Action grammar: parsing model text into actions and back."""

import re
from typing import List

from domain.actions import (Action, ClickItem, Exit, NextPage, PrevPage, Rate, Search,
                            WebClick, WebInput, WebTerminate)
from domain.errors import MalformedAction
from domain.types import SessionState

_ID = r"[A-Za-z0-9_.\-]+"

_PATTERNS = [
    (re.compile(r"\[NEXT_PAGE\]"), lambda m: NextPage()),
    (re.compile(r"\[PREVIOUS_PAGE\]"), lambda m: PrevPage()),
    (re.compile(rf"\[CLICK_ITEM:\s*({_ID})\s*\]"), lambda m: ClickItem(m.group(1))),
    (re.compile(r"\[SEARCH:\s*([^\]\n]*?\S)\s*\]"), lambda m: Search(m.group(1))),
    (re.compile(rf"\[RATE:\s*({_ID})\s*:\s*([1-5])\s*\]"),
     lambda m: Rate(m.group(1), int(m.group(2)))),
    (re.compile(r"\[EXIT\]"), lambda m: Exit()),
    (re.compile(r"\[PURCHASE CART\]"), lambda m: WebClick("purchase_cart")),
    (re.compile(rf"(?<![\w])click\(\s*({_ID})\s*\)"), lambda m: WebClick(m.group(1))),
    (re.compile(rf"(?<![\w])input\(\s*({_ID})\s*,\s*([^)\n]*?\S)\s*\)"),
     lambda m: WebInput(m.group(1), m.group(2))),
    (re.compile(r"(?<![\w])terminate(?:\(\))?(?![\w])"), lambda m: WebTerminate()),
]

GRAMMAR_HELP = ("[NEXT_PAGE] | [PREVIOUS_PAGE] | [CLICK_ITEM:<item_id>] | [SEARCH:<query>] | "
                "[RATE:<item_id>:<1-5>] | [EXIT] | [PURCHASE CART] | click(<semantic_id>) | "
                "input(<semantic_id>, <text>) | terminate")


def parse_action(text: str) -> Action:
    """
    Parse the earliest recognizable action in ``text``.

    Raises:
        MalformedAction: nothing in the text matches the grammar
    """
    best = None
    for pattern, build in _PATTERNS:
        match = pattern.search(text or "")
        if match and (best is None or match.start() < best[0].start()):
            best = (match, build)
    if best is None:
        raise MalformedAction(f"no action in: {(text or '')[:120]!r}")
    match, build = best
    return build(match)


def render_action(action: Action) -> str:
    """Grammar text of ``action``; ``parse_action`` inverts it."""
    if isinstance(action, NextPage):
        return "[NEXT_PAGE]"
    if isinstance(action, PrevPage):
        return "[PREVIOUS_PAGE]"
    if isinstance(action, ClickItem):
        return f"[CLICK_ITEM:{action.item_id}]"
    if isinstance(action, Search):
        return f"[SEARCH:{action.query}]"
    if isinstance(action, Rate):
        return f"[RATE:{action.item_id}:{action.value}]"
    if isinstance(action, Exit):
        return "[EXIT]"
    if isinstance(action, WebClick):
        return f"click({action.semantic_id})"
    if isinstance(action, WebInput):
        return f"input({action.semantic_id}, {action.text})"
    if isinstance(action, WebTerminate):
        return "terminate"
    raise TypeError(f"not an action: {action!r}")


def legal_actions(state: SessionState) -> List[Action]:
    """Enumerable actions available in ``state`` (free-text search excluded)."""
    if state.terminated:
        return []
    if state.mode == "webshop":
        return [WebClick(sid) for sid in state.interactive_elements] + [WebTerminate()]
    actions: List[Action] = [NextPage()]
    if state.page_number > 1:
        actions.append(PrevPage())
    for item in state.items:
        actions.append(ClickItem(item.item_id))
    for item in state.items:
        actions.extend(Rate(item.item_id, v) for v in range(1, 6))
    actions.append(Exit())
    return actions


def legal_action_lines(state: SessionState) -> List[str]:
    """Prompt lines describing the actions available in ``state``."""
    if state.mode == "webshop":
        return ["click(<semantic_id>) for any interactive element listed on the page",
                "input(search_input, <text>) to search for products",
                "terminate to leave without buying"]
    lines = ["[NEXT_PAGE]"]
    if state.page_number > 1:
        lines.append("[PREVIOUS_PAGE]")
    lines += ["[CLICK_ITEM:<item_id>] to open an item on this page",
              "[RATE:<item_id>:<1-5>] to rate an item on this page",
              "[SEARCH:<query>] to search titles",
              "[EXIT] to end the session"]
    return lines


def is_legal(action: Action, state: SessionState) -> bool:
    """Whether ``env.step`` accepts ``action`` in ``state``."""
    if state.terminated:
        return False
    if state.mode == "webshop":
        if isinstance(action, WebTerminate):
            return True
        if isinstance(action, WebInput):
            return action.semantic_id == "search_input" and bool(action.text.strip())
        return isinstance(action, WebClick) and action.semantic_id in state.interactive_elements
    if isinstance(action, (NextPage, Exit)):
        return True
    if isinstance(action, PrevPage):
        return state.page_number > 1
    if isinstance(action, Search):
        return bool(action.query.strip())
    if isinstance(action, ClickItem):
        return state.find(action.item_id) is not None
    if isinstance(action, Rate):
        return state.find(action.item_id) is not None and action.value in (1, 2, 3, 4, 5)
    return False
