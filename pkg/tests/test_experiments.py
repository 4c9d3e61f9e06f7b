import json
from dataclasses import replace

import pytest

from backend.scripted import ScriptedBackend
from domain.actions import ClickItem, Exit, NextPage, Rate, WebClick, WebTerminate
from domain.errors import KeyMismatch, UnknownItem
from domain.types import InteractionRecord, Item, SessionState, TemporalContext, Trajectory, TrajectoryStep
from env.environment import webshop_elements
from env.render import render_page
from ingest.sessions import LoggedSession
from metrics.experiments import (ab_correlate, ab_sim_metric, action_alignment_experiment,
                                 alignment_counts, alignment_table, context_experiment,
                                 context_labels, distribution_experiment, liked_events,
                                 load_prediction_pairs, matthew_experiment,
                                 preference_alignment_experiment, rating_experiment,
                                 score_predictions, swap_brand, temporal_experiment)
from metrics.judge import emit_judge_prompts
from settings import with_overrides


def _trajectory(context, actions, strategy="popularity", terminal=Exit(), session_id="s"):
    steps = tuple(TrajectoryStep(f"page {n}", f"thought {n}", a) for n, a in enumerate(actions))
    return Trajectory(agent_id="1", session_id=session_id, context=context, steps=steps,
                      terminal_action=terminal, strategy=strategy)


@pytest.mark.parametrize("n,m,expected", [(20, 1, (10, 10)), (20, 9, (2, 18)), (20, 0, (20, 0)),
                                          (7, 2, (2, 5))])
def test_alignment_counts(n, m, expected):
    assert alignment_counts(n, m) == expected
    assert sum(alignment_counts(n, m)) == n


def test_membership_alignment_is_exact(persona, history, catalog, backend):
    reports = [preference_alignment_experiment([persona], {"1": history}, catalog, backend, m,
                                               items_per_agent=4, seed=3) for m in (1, 3)]
    for report in reports:
        assert report.metrics["accuracy"] == 1.0
        assert (report.metrics["agents"], report.metrics["skipped"]) == (1, 0)
    table = alignment_table(reports)
    assert [row["ratio"] for row in table.tables["table"]] == ["1:1", "1:3"]
    assert table.metrics["f1_1to1"] == 1.0


def test_alignment_skips_short_histories(persona, history, catalog, backend):
    report = preference_alignment_experiment([persona], {"1": history}, catalog, backend, 0,
                                             items_per_agent=20)
    assert report.metrics["skipped"] == 1
    assert "accuracy" not in report.metrics
    assert report.notes


def test_rating_experiment(persona, history, catalog, backend):
    test = {"1": [InteractionRecord("1", "9", 5, 200), InteractionRecord("1", "12", None, 201,
                                                                         kind="view")]}
    report = rating_experiment([persona], {"1": history}, test, catalog, backend, seed=1)
    assert report.metrics["pairs"] == 1
    assert report.metrics["agent_rmse"] == 0.0
    assert report.check(["agent_rmse", "agent_mae"]) == []


def test_prediction_file_scoring(tmp_path):
    path = tmp_path / "predictions.csv"
    path.write_text("prediction,truth\n2,4\n4,4\n")
    report = score_predictions(*load_prediction_pairs(str(path)))
    assert report.metrics["mae"] == 1.0
    assert report.metrics["rmse"] == pytest.approx(2 ** 0.5)


def test_temporal_experiment(evening_context):
    report = temporal_experiment([_trajectory(evening_context, [ClickItem("2"), NextPage()])],
                                 engagement_hours=[19, 8])
    assert report.metrics["share_evening"] == 1.0
    assert "spearman_vs_real" in report.metrics
    assert report.metrics["engagement_share_morning"] == 0.5
    assert len(report.tables["bands"]) == 4
    empty = temporal_experiment([_trajectory(evening_context, [NextPage()])])
    assert empty.metrics["flagged"] == 1 and empty.notes


def test_distribution_experiment(evening_context):
    trajectory = _trajectory(evening_context, [Rate("2", 5), Rate("5", 4)])
    report = distribution_experiment([trajectory], [5, 5, 4, 4])
    assert report.metrics["tv_distance"] == 0.0
    assert report.metrics["mean_rating_relaxed"] == 4.5
    assert report.tables["by_activity"][0]["label"] == "dinner at home"


def test_ab_correlation():
    trajectories = [_trajectory(None, [NextPage()] * n, strategy=name)
                    for name, n in (("popularity", 0), ("random", 2), ("mf", 1))]
    sim = ab_sim_metric(trajectories)
    assert sim == {"popularity": 1.0, "random": 3.0, "mf": 2.0}
    report = ab_correlate(sim, {"popularity": 0.2, "random": 0.5, "mf": 0.9}, resamples=50)
    assert report.metrics["spearman"] == pytest.approx(0.5)
    with pytest.raises(KeyMismatch) as info:
        ab_correlate(sim, {"popularity": 0.2, "random": 0.5})
    assert info.value.missing_in_real == ["mf"]


def test_swap_brand_removes_the_brand_cue_from_pages():
    towelettes = Item("1", "Neutrogena Make-Up Remover Cleansing Towelettes",
                      description="Neutrogena towelettes remove makeup", brand="Neutrogena")
    lookalike = Item("2", "Neutrogenaish Lotion", description="Not a Neutrogena product",
                     brand="Other")
    swapped = swap_brand({"1": towelettes, "2": lookalike}, "Neutrogena", "Neutrovia")
    assert swapped["1"] == replace(towelettes, brand="Neutrovia",
                                   title="Neutrovia Make-Up Remover Cleansing Towelettes",
                                   description="Neutrovia towelettes remove makeup")
    assert swapped["2"] is lookalike
    assert swap_brand({"3": Item("3", "NeutrogenaPlus Kit", brand="Neutrogena")}, "Neutrogena",
                      "Neutrovia")["3"].title == "NeutrogenaPlus Kit"

    for mode in ("recommendation", "webshop"):
        before = render_page(SessionState(mode, 1, (towelettes,)))
        after = render_page(SessionState(mode, 1, (swapped["1"],)))
        assert "Neutrogena" in before
        assert "Neutrovia" in after and "Neutrogena" not in after
        assert after.replace("Neutrovia", "Neutrogena") == before


def test_matthew_without_boost_has_no_gap(persona, history, catalog, config, backend):
    report = matthew_experiment([persona], {"1": history}, catalog, config, backend, target="12",
                                boost_rounds=0, rounds=2, seeds=1)
    assert report.metrics["final_gap"] == 0.0
    assert all(row["boosted"] == row["original"] for row in report.tables["curves"])
    assert report.check() == []


def test_matthew_rejects_unknown_target(persona, history, catalog, config, backend):
    with pytest.raises(UnknownItem):
        matthew_experiment([persona], {"1": history}, catalog, config, backend, target="404")


def test_context_labels_and_ratios(evening_context, catalog):
    weekend_out = replace(evening_context, c_l="cafe", c_t=TemporalContext(600, 6))
    assert context_labels(_trajectory(evening_context, [])) == ("home", "weekday")
    assert context_labels(_trajectory(weekend_out, [])) == ("outside", "weekend")
    assert context_labels(_trajectory(None, [])) == ()
    trajectories = [_trajectory(evening_context, [Rate("7", 5), Rate("4", 2)]),
                    _trajectory(weekend_out, [Rate("8", 4)])]
    events = liked_events(trajectories, catalog)
    assert [e.item_id for e in events] == ["7", "8"]
    report = context_experiment(trajectories, catalog)
    assert report.metrics["liked"] == 2
    rows = {(r["genre"], r["context"]): r["log_ratio"] for r in report.tables["ratios"]}
    assert rows[("Comedy", "home")] > 0
    assert rows[("Horror", "home")] < 0


def test_action_alignment_replays_logged_steps(persona, history, catalog, config, backend):
    items = (catalog["5"], catalog["4"])
    state = SessionState(mode="webshop", page_number=1, items=items,
                         interactive_elements=webshop_elements(items, 1))
    session = LoggedSession("w1", "1", "webshop", ((state, WebClick("view_5")),))
    orphan = LoggedSession("w2", "99", "webshop", ((state, WebTerminate()),))
    cfg = replace(config, env=replace(config.env, mode="webshop"))
    report = action_alignment_experiment([session, orphan], {"1": persona}, {"1": history},
                                         catalog, cfg, backend)
    assert report.metrics["skipped_sessions"] == 1
    assert report.metrics["steps"] == 1
    assert report.metrics["action_accuracy"] == 1.0
    assert report.metrics["outcome_accuracy"] == 1.0


def test_judge_prompts(evening_context, persona, tmp_path):
    trajectories = [_trajectory(evening_context, [ClickItem("2")], session_id=f"s{n}")
                    for n in range(3)]
    path = tmp_path / "judge.jsonl"
    assert emit_judge_prompts(trajectories, "human_likeness", str(path)) == 3
    rows = [json.loads(line) for line in path.read_text().splitlines()]
    assert [r["sample_id"] for r in rows] == ["s0", "s1", "s2"]
    assert ("Please rate on a scale of 1 to 5, with 1 being most like an AI and 5 being most "
            "like a human.") in rows[0]["prompt"]
    assert emit_judge_prompts(trajectories, "consistency", str(path), {"1": persona}) == 3
    assert emit_judge_prompts(trajectories, "context_consistency", str(path), {"1": persona}) == 3


class CountingBackend(ScriptedBackend):
    def __init__(self):
        super().__init__()
        self.tags = []

    def complete(self, request):
        self.tags.append(request.task_tag)
        return super().complete(request)


def test_action_replay_appraises_each_page_once(persona, history, catalog, config):
    first_items = (catalog["5"], catalog["4"])
    first = SessionState(mode="webshop", page_number=1, items=first_items,
                         interactive_elements=webshop_elements(first_items, 1))
    second_items = (catalog["9"], catalog["12"])
    second = SessionState(mode="webshop", page_number=2, items=second_items,
                          interactive_elements=webshop_elements(second_items, 2))
    session = LoggedSession("w1", "1", "webshop", ((first, WebClick("view_5")),
                                                   (first, WebClick("view_4")),
                                                   (second, WebTerminate())))
    cfg = replace(config, env=replace(config.env, mode="webshop"))
    backend = CountingBackend()
    report = action_alignment_experiment([session], {"1": persona}, {"1": history}, catalog, cfg,
                                         backend)
    assert report.metrics["steps"] == 3
    assert backend.tags.count("APPRAISE") == 2


def _taste_population(persona, agents=200):
    """
    Agents with private taste labels; every item outside an agent's history
    shares none of them. Agents 4k and 4k+1 interacted with single-label
    matches, 4k+2 with 4-of-5 matches, 4k+3 with 2-of-3 matches.
    """
    catalog, personas, histories = {}, [], {}
    for k in range(1, agents + 1):
        a, b, c, d = (f"taste{k}{s}" for s in "abcd")
        labels = {0: (a,), 1: (a,), 2: (a, b, c, d, "Horror"), 3: (a, b, "Horror")}[k % 4]
        histories[str(k)] = []
        for j in range(10):
            item_id = str(k * 100 + j)
            catalog[item_id] = Item(item_id, f"Film {item_id}", categories=labels)
            histories[str(k)].append(InteractionRecord(str(k), item_id, 4, j))
        personas.append(replace(persona, agent_id=str(k), preferences=f"{a}, {b}, {c}, {d}"))
    return personas, histories, catalog


@pytest.mark.slow
def test_alignment_oracle_and_degraded_trend(persona):
    personas, histories, catalog = _taste_population(persona)
    for m in (1, 3, 9):
        report = preference_alignment_experiment(personas, histories, catalog, ScriptedBackend(), m,
                                                 seed=11)
        assert (report.metrics["agents"], report.metrics["accuracy"]) == (200, 1.0)

    overlap = ScriptedBackend("overlap")
    reports = [preference_alignment_experiment(personas, histories, catalog, overlap, m, seed=11)
               for m in (1, 3, 9)]
    recall = [r.metrics["recall"] for r in reports]
    precision = [r.metrics["precision"] for r in reports]
    assert recall == pytest.approx([1.0, 0.75, 0.5])
    assert recall[0] > recall[1] > recall[2]
    assert all(later >= earlier - 0.05 for earlier, later in zip(precision, precision[1:]))


@pytest.mark.slow
def test_early_boost_leaves_a_lasting_like_gap(persona, history, catalog, config, backend):
    short = with_overrides(config, {"agent.max_steps": 3})
    report = matthew_experiment([persona], {"1": history}, catalog, short, backend, target="11",
                                boost_rounds=2, rounds=10, seeds=20)
    gaps = [row["gap"] for row in report.tables["curves"]]
    assert all(gap > 0 for gap in gaps[2:])
    assert report.metrics["gap_positive_fraction"] == 1.0
    assert report.metrics["gap_nondecreasing_fraction"] >= 0.8
