import numpy as np
import pytest

from domain.errors import OrderViolation
from backend.rules import tokens
from domain.types import EmotionalState, EpisodicRecord
from memory import EmotionalMemory, EpisodicMemory, initial_records
from memory.store import MemorySnapshot, load_snapshots, save_snapshots


def _memory():
    return EpisodicMemory("1", [
        EpisodicRecord(0, "rate", "rated Toy Story (Animation; Comedy) 4/5", "2"),
        EpisodicRecord(1, "rate", "rated Alien (Horror; Sci-Fi) 1/5", "4"),
        EpisodicRecord(2, "view", "viewed Airplane (Comedy)", "7"),
    ])


def test_initial_records_follow_history(history, catalog):
    records = initial_records(history, catalog)
    assert [r.step_index for r in records] == [0, 1, 2, 3, 4]
    assert records[0].text == "rated Toy Story (Animation; Comedy) 4/5"
    assert {r.kind for r in records} == {"rate"}


def test_append_keeps_step_order():
    memory = _memory()
    memory.append(EpisodicRecord(2, "reflection", "chose [EXIT] because I was tired"))
    assert memory.next_step() == 3
    with pytest.raises(OrderViolation):
        memory.append(EpisodicRecord(1, "view", "viewed Heat (Action; Crime)", "1"))
    with pytest.raises(ValueError):
        memory.append(EpisodicRecord(5, "view", "   "))
    assert len(memory) == 4


def test_retrieve_weighs_overlap_and_recency():
    memory = _memory()
    top = memory.retrieve("comedy", 2)
    assert [r.item_id for r in top] == ["7", "2"]
    assert memory.retrieve("comedy", 0) == []
    assert len(memory.retrieve("comedy", 10)) == 3


def test_retrieve_ties_prefer_recent():
    memory = EpisodicMemory("1", [EpisodicRecord(0, "view", "viewed Heat", "1"),
                                  EpisodicRecord(0, "view", "viewed Up", "2")])
    assert memory.retrieve("nothing in common", 1)[0].item_id == "2"
    with pytest.raises(ValueError):
        memory.retrieve("x", -1)


def test_item_ids_are_unique_in_order():
    memory = _memory()
    memory.append(EpisodicRecord(3, "rate", "rated Toy Story (Animation; Comedy) 5/5", "2"))
    assert memory.item_ids() == ["2", "4", "7"]


def test_emotion_stays_bounded_and_logged():
    emotion = EmotionalMemory(EmotionalState(fatigue=0.9, boredom=0.1))
    emotion.update_emotion({"fatigue": 0.5, "boredom": -0.4}, step_index=3)
    assert (emotion.state.fatigue, emotion.state.boredom) == (1.0, 0.0)
    assert emotion.update_log == [(3, {"fatigue": 0.5, "boredom": -0.4})]
    emotion.set_levels(4, curiosity=0.2)
    assert emotion.state.curiosity == pytest.approx(0.2)
    with pytest.raises(KeyError):
        emotion.update_emotion({"joy": 0.1})


def test_snapshots_round_trip(tmp_path):
    emotion = EmotionalMemory().update_emotion({"satisfaction": 0.25}, 1)
    path = str(tmp_path / "memory.jsonl")
    assert save_snapshots([MemorySnapshot("1", _memory(), emotion)], path) == 1
    restored = load_snapshots(path)["1"]
    assert restored.episodic.records == _memory().records
    assert restored.emotional.state == emotion.state
    assert restored.emotional.update_log == [(1, {"satisfaction": 0.25})]
    assert load_snapshots(str(tmp_path / "absent.jsonl")) == {}


COORDINATES = ("fatigue", "satisfaction", "curiosity", "boredom")
WORDS = ("comedy", "drama", "horror", "rated", "viewed", "night", "heat", "alien", "up", "space")


def test_emotion_is_bounded_under_random_updates():
    rng = np.random.default_rng(17)
    updates = 0
    for _ in range(200):
        start = EmotionalState(*rng.random(4).tolist())
        emotion = EmotionalMemory(start)
        for step in range(50):
            names = [c for c in COORDINATES if rng.random() < 0.6] or ["boredom"]
            deltas = {name: float(rng.uniform(-2.0, 2.0)) for name in names}
            emotion.update_emotion(deltas, step)
            updates += 1
            assert all(0.0 <= v <= 1.0 for v in emotion.state.as_dict().values())
        assert len(emotion.update_log) == 50
    assert updates == 10_000


def _brute_force(records, query, k, weight):
    query_tokens = tokens(query)
    max_step = max(r.step_index for r in records)
    rows = []
    for pos, r in enumerate(records):
        overlap = len(query_tokens & tokens(r.text)) / len(query_tokens) if query_tokens else 0.0
        recency = (1 + r.step_index) / (1 + max_step)
        rows.append((weight * overlap + (1 - weight) * recency, r.step_index, pos))
    best = sorted(rows, reverse=True)[:k]
    return [records[pos] for _, _, pos in best]


def test_retrieval_matches_brute_force_sort():
    rng = np.random.default_rng(5)
    for trial in range(300):
        steps = np.sort(rng.integers(0, 15, size=int(rng.integers(1, 25))))
        records = [EpisodicRecord(int(s), "view",
                                  " ".join(rng.choice(WORDS, size=int(rng.integers(1, 6)))), str(n))
                   for n, s in enumerate(steps)]
        weight = float(rng.choice([0.0, 0.3, 0.7, 1.0]))
        memory = EpisodicMemory("1", records, weight=weight)
        query = " ".join(rng.choice(WORDS, size=int(rng.integers(0, 4))))
        k = int(rng.integers(0, len(records) + 2))
        assert memory.retrieve(query, k) == _brute_force(records, query, k, weight), trial
