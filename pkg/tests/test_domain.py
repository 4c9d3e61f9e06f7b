from dataclasses import replace

import numpy as np
import pytest

from domain.actions import Rate, WebClick
from domain.codec import dump_jsonl, dumps, from_dict, load_jsonl, to_dict
from domain.errors import ParseFailure
from domain.types import (BigFive, ContextVector, EmotionalState, Persona, SessionState, Trajectory,
                          TrajectoryStep, id_sort_key)
from domain.validation import check_mode, validate


def _paths(violations):
    return [v.path for v in violations]


def test_persona_round_trip(persona):
    restored = from_dict(Persona, to_dict(persona.with_summary("mostly evenings")))
    assert restored == persona.with_summary("mostly evenings")
    assert isinstance(restored.habits, tuple)


def test_context_round_trip(evening_context):
    assert from_dict(ContextVector, to_dict(evening_context)) == evening_context


def test_trajectory_round_trip_keeps_action_types(evening_context, tmp_path):
    trajectory = Trajectory(agent_id="1", session_id="1-d0-s38-0", context=evening_context,
                            steps=(TrajectoryStep("PAGE 1", "looks good", Rate("2", 4)),),
                            terminal_action=WebClick("purchase_cart"), strategy="popularity")
    path = str(tmp_path / "t.jsonl")
    assert dump_jsonl([trajectory], path) == 1
    assert load_jsonl(Trajectory, path) == [trajectory]


def test_random_emotional_states_round_trip():
    rng = np.random.default_rng(3)
    for _ in range(50):
        state = EmotionalState(*(float(v) for v in rng.random(4)))
        assert from_dict(EmotionalState, to_dict(state)) == state


def test_dumps_is_canonical(persona):
    assert dumps(persona) == dumps(from_dict(Persona, to_dict(persona)))
    assert dumps(persona).index('"age"') < dumps(persona).index('"traits"')


def test_from_dict_rejects_non_objects():
    with pytest.raises(ParseFailure):
        from_dict(Persona, ["not", "a", "dict"])


def test_valid_persona_has_no_violations(persona):
    assert validate(persona) == []


@pytest.mark.parametrize("trait,ok", [(0, False), (1, True), (3, True), (4, False)])
def test_trait_boundaries(trait, ok):
    violations = validate(BigFive(openness=trait))
    assert (violations == []) is ok


@pytest.mark.parametrize("value,ok", [(-0.01, False), (0.0, True), (1.0, True), (1.01, False)])
def test_affect_boundaries(value, ok):
    assert (validate(EmotionalState(boredom=value)) == []) is ok


@pytest.mark.parametrize("value,ok", [(0, False), (1, True), (5, True), (6, False)])
def test_rating_boundaries(value, ok):
    assert (validate(Rate("1", value)) == []) is ok


def test_persona_violations_carry_paths(persona):
    bad = Persona(agent_id="2", age=7, occupation="", traits=BigFive(neuroticism=9), habits=(),
                  recent_goals=(), preferences="  ")
    paths = _paths(validate(bad, "persona"))
    assert "persona.age" in paths
    assert "persona.preferences" in paths
    assert "persona.traits.neuroticism" in paths


def test_context_violations(evening_context):
    broken = replace(evening_context, c_g="", c_s=replace(evening_context.c_s, mood="ecstatic"))
    paths = _paths(validate(broken))
    assert paths == ["c_s.mood", "c_g"]


def test_web_actions_outside_webshop():
    assert check_mode(WebClick("view_1"), "recommendation") is not None
    assert check_mode(WebClick("view_1"), "webshop") is None


def test_state_with_elements_outside_webshop():
    state = SessionState(mode="recommendation", page_number=1, items=(),
                         interactive_elements=("view_1",))
    assert _paths(validate(state)) == ["interactive_elements"]


def test_numeric_ids_sort_first():
    assert sorted(["10", "b", "2", "a", "1"], key=id_sort_key) == ["1", "2", "10", "a", "b"]
