import pytest

import registry
from conftest import fixture_path
from domain.actions import ClickItem, Exit, NextPage, PrevPage, Rate, Search, WebClick, WebInput
from domain.errors import InvalidTransition, SessionClosed, UnknownItem
from domain.types import Item, SessionState
from env.boost import apply_exposure_boost
from env.environment import RecEnv, SessionSpec, webshop_elements
from env.ledger import InteractionLedger
from env.render import format_context, render_page, short_description


def _golden(name):
    with open(fixture_path(name), encoding="utf-8") as f:
        return f.read().rstrip("\n")


HEAT = Item("1", "Heat", description="A heist thriller.", categories=("Action", "Crime"),
            price=9.99, stat_count=10, stat_mean_rating=4.3)
UP = Item("2", "Up", categories=("Animation",))


def test_recommendation_page_golden(evening_context):
    state = SessionState(mode="recommendation", page_number=1, items=(HEAT, UP),
                         user_context=evening_context, expanded_item="1", own_ratings={"2": 5})
    assert render_page(state) == _golden("recommendation_page.txt")


def test_webshop_page_golden():
    items = (HEAT, UP)
    state = SessionState(mode="webshop", page_number=1, items=items,
                         page_context="page type: recommendations; cart: 0 items; cart price: 0.00",
                         interactive_elements=webshop_elements(items, 1))
    assert render_page(state) == _golden("webshop_page.txt")


def test_masked_factors_disappear(evening_context):
    assert format_context(evening_context, ["c_t"]) == "Friday 19:30"
    assert format_context(evening_context, []) == ""
    state = SessionState(mode="recommendation", page_number=1, items=(UP,),
                         user_context=evening_context)
    assert "CONTEXT" not in render_page(state, mask=[])


def test_short_description_cuts_at_word():
    item = Item("3", "Long", description="word " * 40)
    text = short_description(item, limit=22)
    assert text == "word word word word..."


@pytest.fixture
def env(catalog):
    return RecEnv(catalog, registry.create("popularity", catalog), page_size=4,
                  ledger=InteractionLedger())


def test_pages_follow_popularity(env):
    spec = SessionSpec(user_id="1", seed=0, exclusions=frozenset({"1"}))
    state = env.reset(spec)
    assert state.item_ids() == ("2", "3", "4", "5")
    state = env.step(state, NextPage(), spec)
    assert (state.page_number, state.item_ids()) == (2, ("6", "7", "8", "9"))
    assert env.step(state, PrevPage(), spec).item_ids() == ("2", "3", "4", "5")


def test_click_search_and_rate(env):
    seen = []
    spec = SessionSpec(user_id="1", seed=0, on_rate=[lambda i, v: seen.append((i, v))])
    state = env.reset(spec)
    state = env.step(state, ClickItem("2"), spec)
    assert state.expanded_item == "2"
    state = env.step(state, Rate("2", 5), spec)
    assert state.own_ratings["2"] == 5
    assert seen == [("2", 5)]
    found = env.step(state, Search("the"), spec)
    assert found.page_number == 1 and found.item_ids() == ("6",)
    env.ledger.close_round()
    assert env.ledger.closed_likes("2") == 1


def test_illegal_transitions(env):
    spec = SessionSpec(user_id="1", seed=0)
    state = env.reset(spec)
    with pytest.raises(InvalidTransition):
        env.step(state, PrevPage(), spec)
    with pytest.raises(InvalidTransition):
        env.step(state, ClickItem("12"), spec)
    with pytest.raises(InvalidTransition):
        env.step(state, WebClick("view_1"), spec)
    closed = env.step(state, Exit(), spec)
    with pytest.raises(SessionClosed):
        env.step(closed, NextPage(), spec)


def test_pages_run_out(catalog):
    env = RecEnv(catalog, registry.create("popularity", catalog), page_size=10)
    spec = SessionSpec(user_id="1", seed=0)
    state = env.step(env.reset(spec), NextPage(), spec)
    assert state.item_ids() == ("11", "12")
    assert env.step(state, NextPage(), spec).items == ()


def test_webshop_purchase_records_likes(catalog):
    ledger = InteractionLedger()
    env = RecEnv(catalog, registry.create("popularity", catalog), page_size=2, mode="webshop",
                 ledger=ledger)
    spec = SessionSpec(user_id="1", seed=0)
    state = env.reset(spec)
    assert state.interactive_elements[-1] == "purchase_cart"
    state = env.step(state, WebClick("add_to_cart_1"), spec)
    assert state.cart == ("1",)
    assert "cart: 1 items" in state.page_context
    state = env.step(state, WebInput("search_input", "Toy"), spec)
    assert state.item_ids() == ("2",) and state.cart == ("1",)
    state = env.step(state, WebClick("purchase_cart"), spec)
    assert state.terminated
    ledger.close_round()
    assert ledger.like_curve("1") == [1]


def test_ledger_exposes_only_closed_rounds():
    ledger = InteractionLedger()
    ledger.record_like("7", 2)
    assert ledger.closed_likes("7") == 0
    ledger.close_round()
    ledger.record_like("7")
    ledger.close_round()
    assert ledger.like_curve("7") == [2, 3]
    with pytest.raises(ValueError):
        ledger.record_like("7", -1)


def test_boost_pins_target_during_boost_rounds(catalog):
    base = registry.create("popularity", catalog)
    boosted = apply_exposure_boost(base, "12", boost_rounds=2)
    assert boosted.recommend("1", 1, 3, round_index=1)[0].item_id == "12"
    assert boosted.recommend("1", 1, 3, round_index=3)[0].item_id == "1"
    assert apply_exposure_boost(base, "12", 0) is base
    with pytest.raises(UnknownItem):
        apply_exposure_boost(base, "404", 1)


def test_random_strategy_is_seeded(catalog):
    strategy = registry.create("random", catalog)
    assert strategy.rank("1", 5) == strategy.rank("1", 5)
    assert sorted(strategy.rank("1", 5), key=int) == sorted(catalog, key=int)
