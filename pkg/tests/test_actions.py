import string

import numpy as np
import pytest

from domain.actions import (ClickItem, Exit, NextPage, PrevPage, Rate, Search, WebClick, WebInput,
                            WebTerminate, is_terminal)
from domain.errors import MalformedAction
from domain.types import Item, SessionState
from env.actions import is_legal, legal_actions, parse_action, render_action

ACTIONS = [NextPage(), PrevPage(), ClickItem("42"), Search("space opera"), Rate("7", 4), Exit(),
           WebClick("add_to_cart_3"), WebInput("search_input", "red shoes"), WebTerminate()]


@pytest.mark.parametrize("action", ACTIONS, ids=lambda a: type(a).__name__)
def test_render_then_parse(action):
    assert parse_action(render_action(action)) == action


def test_parse_takes_earliest_action():
    text = "THOUGHT: maybe [EXIT] later\nACTION: [CLICK_ITEM:5]"
    assert parse_action(text) == Exit()
    assert parse_action("I think [CLICK_ITEM:5] then [EXIT]") == ClickItem("5")


def test_parse_rejects_free_text():
    with pytest.raises(MalformedAction):
        parse_action("I will click item 42")


def test_parse_rejects_rating_out_of_range():
    with pytest.raises(MalformedAction):
        parse_action("[RATE:7:9]")


def test_purchase_cart_is_a_purchase_click():
    action = parse_action("ACTION: [PURCHASE CART]")
    assert action == WebClick("purchase_cart")
    assert is_terminal(action)
    assert not is_terminal(WebClick("view_3"))


def test_terminate_needs_word_boundary():
    assert parse_action("terminate()") == WebTerminate()
    with pytest.raises(MalformedAction):
        parse_action("predeterminated")


def _state(page_number=1, mode="recommendation", elements=()):
    items = (Item("1", "Heat"), Item("2", "Up"))
    return SessionState(mode=mode, page_number=page_number, items=items,
                        interactive_elements=elements)


def test_legal_actions_on_first_page():
    actions = legal_actions(_state())
    assert NextPage() in actions
    assert PrevPage() not in actions
    assert ClickItem("2") in actions
    assert Rate("1", 5) in actions
    assert actions[-1] == Exit()


def test_legal_actions_in_webshop():
    state = _state(mode="webshop", elements=("view_1", "next_page", "purchase_cart"))
    assert legal_actions(state) == [WebClick("view_1"), WebClick("next_page"),
                                    WebClick("purchase_cart"), WebTerminate()]


def test_is_legal():
    state = _state(page_number=2)
    assert is_legal(PrevPage(), state)
    assert is_legal(Search("heat"), state)
    assert not is_legal(Search("   "), state)
    assert not is_legal(ClickItem("99"), state)
    assert not is_legal(WebClick("view_1"), state)
    assert not is_legal(NextPage(), SessionState("recommendation", 1, (), terminated=True))


ID_CHARS = string.ascii_letters + string.digits + "_.-"
TEXT_CHARS = string.ascii_letters + string.digits + " -'&,.!?"

MALFORMED = [
    "", "   ", "I will click item 42", "[NEXT PAGE]", "[next_page]", "NEXT_PAGE", "[PREV_PAGE]",
    "[PREVIOUS PAGE]", "[CLICK_ITEM]", "[CLICK_ITEM:]", "[CLICK_ITEM: ]", "[CLICK_ITEM:4 2]",
    "[CLICK_ITEM:42", "CLICK_ITEM:42]", "[CLICK_ITEM:a/b]", "[CLICK_ITEM:42)", "[SEARCH:]",
    "[SEARCH:   ]", "[SEARCH:space\nopera]", "[SEARCH space opera]", "[RATE:7]", "[RATE:7:0]",
    "[RATE:7:6]", "[RATE:7:9]", "[RATE:7:4.5]", "[RATE::4]", "[RATE:7:-3]", "[RATE:7:45]",
    "[EXIT", "EXIT", "[QUIT]", "exit()", "<EXIT>", "[PURCHASE_CART]", "click()",
    "click(view 3)", "click(view_3", "doubleclick(view_3)", "click[view_3]", "Click(view_3)",
    "input(search_input)", "input(search_input, )", "input(, red shoes)",
    "input(search_input red shoes)", "terminated", "determinate", "TERMINATE",
    "terminate_session", "ACTION: none", "THOUGHT: I am done browsing.\nACTION:",
]


def _word(rng, chars, low, high):
    return "".join(chars[i] for i in rng.integers(len(chars), size=int(rng.integers(low, high + 1))))


def _text(rng):
    return _word(rng, TEXT_CHARS, 1, 30).strip() or "x"


def _random_action(rng):
    kind = int(rng.integers(9))
    if kind == 0:
        return NextPage()
    if kind == 1:
        return PrevPage()
    if kind == 2:
        return ClickItem(_word(rng, ID_CHARS, 1, 12))
    if kind == 3:
        return Search(_text(rng))
    if kind == 4:
        return Rate(_word(rng, ID_CHARS, 1, 12), int(rng.integers(1, 6)))
    if kind == 5:
        return Exit()
    if kind == 6:
        return WebClick(_word(rng, ID_CHARS, 1, 20))
    if kind == 7:
        return WebInput(_word(rng, ID_CHARS, 1, 20), _text(rng))
    return WebTerminate()


def test_generated_actions_round_trip():
    rng = np.random.default_rng(2024)
    actions = [_random_action(rng) for _ in range(10_000)]
    assert {type(a) for a in actions} == {type(a) for a in ACTIONS}
    for action in actions:
        assert parse_action(render_action(action)) == action, render_action(action)


def test_malformed_corpus_is_rejected():
    assert len(MALFORMED) == 50
    for text in MALFORMED:
        with pytest.raises(MalformedAction):
            parse_action(text)
