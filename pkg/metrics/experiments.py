"""
Experiment drivers: each runs one evaluation design over simulated agents
and returns a ``MetricsReport``.
"""

import csv
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import replace
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np

import audit.logger as audit
import registry
from agent.bundle import build_bundle
from agent.policy import (SessionProgress, appraise_page, classify_interacted, forced_exit,
                          infer_internal_state, novelty_fraction, rate_item, select_action)
from agent.session import page_key
from agent.simulate import effective_mask, run_population
from backend.base import CompletionBackend
from domain.actions import Action, ClickItem, Rate, WebClick
from domain.errors import (AppraisalFailure, BackendError, ClassificationFailure, IOFailure,
                           KeyMismatch, RatingFailure, Undefined, UnknownItem)
from domain.types import InteractionRecord, Item, Persona, SessionState, Trajectory, id_sort_key
from env.boost import apply_exposure_boost
from env.environment import RecEnv
from env.ledger import InteractionLedger
from env.mf import MFModel
from ingest.sessions import LoggedSession
from lifesim.summary import BANDS
from metrics.report import MetricsReport
from metrics.statistics import (LikedEvent, action_category, action_match, band_shares,
                                bootstrap_interval, classification_metrics, click_subtype,
                                log_freq_ratio, outcome_of, pages_visited,
                                rating_distribution, rmse_mae, spearman, temporal_ctr, tv_distance)
from settings import RunConfig, derive_seed
from strategy_api import RecommenderStrategy

REAL_BAND_PATTERN = {"Morning": 0.11, "Afternoon": 0.21, "Evening": 0.35, "Night": 0.28}
CONTEXT_LABELS = ("home", "outside", "weekday", "weekend")

StrategyFactory = Callable[[Dict[str, Item], InteractionLedger], RecommenderStrategy]


def _in_id_order(personas: Sequence[Persona]) -> List[Persona]:
    return sorted(personas, key=lambda p: id_sort_key(p.agent_id))


def _pool(fn, items, workers: int) -> list:
    with ThreadPoolExecutor(max_workers=max(1, workers)) as pool:
        return list(pool.map(fn, items))


# preference alignment --------------------------------------------------------

def alignment_counts(items_per_agent: int, m: int) -> Tuple[int, int]:
    """(interacted, non-interacted) counts for a 1:m ratio; the total is always ``items_per_agent``."""
    if m < 0 or items_per_agent < 1:
        raise ValueError("need m >= 0 and items_per_agent >= 1")
    interacted = items_per_agent // (1 + m)
    return interacted, items_per_agent - interacted


def preference_alignment_experiment(personas: Sequence[Persona],
                                    histories: Dict[str, List[InteractionRecord]],
                                    catalog: Dict[str, Item], backend: CompletionBackend, m: int,
                                    items_per_agent: int = 20, seed: int = 0,
                                    interacted: Optional[Dict[str, List[str]]] = None,
                                    weight: float = 0.7, item_type: str = "movie",
                                    workers: int = 1) -> MetricsReport:
    """
    Ask every agent which of its assigned items it has interacted with.

    Each agent receives ``items_per_agent`` items at ratio 1:m. Interacted
    items come from ``interacted`` (default: the agent's history), the rest
    from catalog items the agent never touched. Agents without enough of
    either are skipped and counted.
    """
    n_int, n_non = alignment_counts(items_per_agent, m)

    def one(persona: Persona):
        agent_id = persona.agent_id
        history = histories.get(agent_id, [])
        pool = interacted.get(agent_id, []) if interacted is not None else [r.item_id for r in history]
        pool = sorted({i for i in pool if i in catalog}, key=id_sort_key)
        known = set(pool) | {r.item_id for r in history}
        others = sorted((i for i in catalog if i not in known), key=id_sort_key)
        if len(pool) < n_int or len(others) < n_non:
            audit.warn(f"alignment skipped agent={agent_id}: {len(pool)} interacted, {len(others)} others")
            return None
        rng = np.random.default_rng(derive_seed(seed, "alignment", m, agent_id))
        chosen = list(rng.choice(pool, size=n_int, replace=False)) if n_int else []
        chosen += list(rng.choice(others, size=n_non, replace=False)) if n_non else []
        order = [str(chosen[k]) for k in rng.permutation(len(chosen))]
        truth = {i: i in pool for i in order}
        bundle = build_bundle(persona, history, catalog, weight)
        try:
            labels = classify_interacted([catalog[i] for i in order], persona, bundle.episodic, backend,
                                         item_type=item_type,
                                         seed=derive_seed(seed, "classify", m, agent_id))
        except (ClassificationFailure, BackendError) as e:
            audit.warn(f"alignment skipped agent={agent_id}: {e}")
            return None
        return [truth[i] for i in order], [labels[i] for i in order]

    results = _pool(one, _in_id_order(personas), workers)
    truths, preds = [], []
    for result in results:
        if result is not None:
            truths += result[0]
            preds += result[1]
    skipped = sum(1 for r in results if r is None)
    report = MetricsReport(experiment=f"alignment_1to{m}",
                           parameters={"m": m, "items_per_agent": items_per_agent, "seed": seed,
                                       "interacted": n_int, "non_interacted": n_non})
    report.metrics.update({"agents": len(results) - skipped, "skipped": skipped})
    if truths:
        scores = classification_metrics(truths, preds, "binary", positive=True)
        report.metrics.update(scores._asdict())
    else:
        report.notes.append("no agent could be evaluated")
    return report


def alignment_table(reports: Sequence[MetricsReport]) -> MetricsReport:
    """One row per ratio, accuracy/precision/recall/F1 columns."""
    combined = MetricsReport(experiment="alignment",
                             parameters={"m_values": [r.parameters["m"] for r in reports]})
    rows = []
    for r in reports:
        m = r.parameters["m"]
        row = {"ratio": f"1:{m}"}
        for name in ("accuracy", "precision", "recall", "f1"):
            if name in r.metrics:
                row[name] = r.metrics[name]
                combined.metrics[f"{name}_1to{m}"] = r.metrics[name]
        combined.metrics[f"skipped_1to{m}"] = r.metrics.get("skipped", 0)
        rows.append(row)
        combined.notes += r.notes
    combined.tables["table"] = rows
    return combined


# rating prediction -----------------------------------------------------------

def rating_experiment(personas: Sequence[Persona], train: Dict[str, List[InteractionRecord]],
                      test: Dict[str, List[InteractionRecord]], catalog: Dict[str, Item],
                      backend: CompletionBackend, model: Optional[MFModel] = None, seed: int = 0,
                      weight: float = 0.7, evidence_k: int = 5, workers: int = 1) -> MetricsReport:
    """Agents rate their rated held-out items; RMSE/MAE beside the MF baseline."""

    def one(persona: Persona):
        bundle = build_bundle(persona, train.get(persona.agent_id, []), catalog, weight)
        rows = []
        for record in test.get(persona.agent_id, []):
            if record.rating is None or record.item_id not in catalog:
                continue
            try:
                value = rate_item(catalog[record.item_id], persona, bundle.episodic, backend,
                                  mask=[], k=evidence_k,
                                  seed=derive_seed(seed, "rate", persona.agent_id, record.item_id))
            except (RatingFailure, BackendError) as e:
                audit.warn(f"rating skipped agent={persona.agent_id} item={record.item_id}: {e}")
                continue
            rows.append((record.item_id, value, record.rating))
        return persona.agent_id, rows

    results = _pool(one, _in_id_order(personas), workers)
    agent_preds, truths, mf_preds = [], [], []
    for agent_id, rows in results:
        for item_id, value, truth in rows:
            agent_preds.append(value)
            truths.append(truth)
            if model is not None:
                mf_preds.append(model.predict(agent_id, item_id))

    report = MetricsReport(experiment="rating", parameters={"seed": seed},
                           metrics={"pairs": len(truths)})
    if not truths:
        report.notes.append("no rated held-out items")
        return report
    rmse, mae = rmse_mae(agent_preds, truths)
    report.metrics.update({"agent_rmse": rmse, "agent_mae": mae})
    report.tables["table"] = [{"method": "agent", "rmse": rmse, "mae": mae}]
    if model is not None:
        mf_rmse, mf_mae = rmse_mae(mf_preds, truths)
        report.metrics.update({"mf_rmse": mf_rmse, "mf_mae": mf_mae})
        report.tables["table"].append({"method": "mf", "rmse": mf_rmse, "mae": mf_mae})
    return report


def load_prediction_pairs(path: str) -> Tuple[List[float], List[float]]:
    """Read a CSV with ``prediction`` and ``truth`` columns."""
    try:
        with open(path, encoding="utf-8", newline="") as f:
            rows = list(csv.DictReader(f))
    except OSError as e:
        raise IOFailure(f"cannot read predictions {path}: {e}") from e
    try:
        return [float(r["prediction"]) for r in rows], [float(r["truth"]) for r in rows]
    except (KeyError, ValueError) as e:
        raise IOFailure(f"bad predictions file {path}: {e}") from e


def score_predictions(predictions: Sequence[float], truths: Sequence[float]) -> MetricsReport:
    rmse, mae = rmse_mae(predictions, truths)
    return MetricsReport(experiment="rating", parameters={"source": "predictions"},
                         metrics={"pairs": len(truths), "rmse": rmse, "mae": mae},
                         tables={"table": [{"method": "predictions", "rmse": rmse, "mae": mae}]})


# temporal patterns -----------------------------------------------------------

def temporal_experiment(trajectories: Sequence[Trajectory],
                        engagement_hours: Optional[Sequence[int]] = None) -> MetricsReport:
    """Click shares per time-of-day band, compared with the reference real pattern."""
    ctr = temporal_ctr(trajectories)
    report = MetricsReport(experiment="temporal", parameters={"sessions": len(trajectories)})
    report.metrics["clicks"] = ctr.clicks
    report.metrics["flagged"] = int(ctr.flagged)
    for band in BANDS:
        report.metrics[f"share_{band.lower()}"] = ctr.shares[band]
    if ctr.flagged:
        report.notes.append("no clicks: shares are all zero")
    else:
        try:
            report.metrics["spearman_vs_real"] = spearman(ctr.as_tuple(),
                                                          [REAL_BAND_PATTERN[b] for b in BANDS])
        except Undefined as e:
            report.notes.append(f"spearman undefined: {e}")
    rows = [{"band": band, "real": REAL_BAND_PATTERN[band], "sim": ctr.shares[band]} for band in BANDS]
    if engagement_hours is not None:
        eng = band_shares(engagement_hours)
        report.metrics["engagements"] = eng.clicks
        for row in rows:
            row["engagements"] = eng.shares[row["band"]]
            report.metrics[f"engagement_share_{row['band'].lower()}"] = eng.shares[row["band"]]
    report.tables["bands"] = rows
    return report


# rating distribution and situational breakdown ----------------------------------

def simulated_ratings(trajectories: Sequence[Trajectory]) -> List[Tuple[Trajectory, int]]:
    return [(t, step.action.value) for t in trajectories for step in t.steps
            if isinstance(step.action, Rate)]


def _means(groups: Dict[str, List[int]]) -> List[Dict]:
    return [{"label": label, "count": len(values), "mean_rating": float(np.mean(values))}
            for label, values in sorted(groups.items())]


def distribution_experiment(trajectories: Sequence[Trajectory], real_ratings: Sequence[int]) -> MetricsReport:
    """Simulated vs real rating histograms, plus mean simulated rating by mood and latest activity."""
    pairs = simulated_ratings(trajectories)
    sim = rating_distribution(value for _, value in pairs)
    real = rating_distribution(real_ratings)
    report = MetricsReport(experiment="distribution",
                           parameters={"simulated": len(pairs), "real": len(real_ratings)},
                           metrics={"tv_distance": tv_distance(sim, real)})
    report.tables["histogram"] = [{"rating": k + 1, "real": real[k], "sim": sim[k]} for k in range(5)]
    by_mood: Dict[str, List[int]] = {}
    by_activity: Dict[str, List[int]] = {}
    for trajectory, value in pairs:
        if trajectory.context is None:
            continue
        by_mood.setdefault(trajectory.context.c_s.mood, []).append(value)
        by_activity.setdefault(trajectory.context.c_s.latest_activity, []).append(value)
    report.tables["by_mood"] = _means(by_mood)
    report.tables["by_activity"] = _means(by_activity)
    for row in report.tables["by_mood"]:
        report.metrics[f"mean_rating_{row['label']}"] = row["mean_rating"]
    return report


# offline A/B correlation -----------------------------------------------------

def ab_sim_metric(trajectories: Sequence[Trajectory]) -> Dict[str, float]:
    """Mean pages visited per session, per strategy."""
    pages: Dict[str, List[int]] = {}
    for t in trajectories:
        pages.setdefault(t.strategy, []).append(pages_visited(t))
    return {name: float(np.mean(values)) for name, values in pages.items()}


def ab_correlate(sim_metric: Dict[str, float], real_metric: Dict[str, float],
                 resamples: int = 1000, seed: int = 0) -> MetricsReport:
    """
    Spearman correlation between simulated and real per-strategy outcomes.

    Raises:
        KeyMismatch: the two tables cover different strategies
    """
    if set(sim_metric) != set(real_metric):
        raise KeyMismatch(set(sim_metric) - set(real_metric), set(real_metric) - set(sim_metric))
    keys = sorted(sim_metric)
    xs = [sim_metric[k] for k in keys]
    ys = [real_metric[k] for k in keys]
    report = MetricsReport(experiment="ab", parameters={"strategies": len(keys), "resamples": resamples,
                                                        "seed": seed})
    report.metrics["spearman"] = spearman(xs, ys)
    try:
        low, high, used = bootstrap_interval(xs, ys, spearman, resamples, seed)
        report.metrics.update({"ci_low": low, "ci_high": high, "bootstrap_used": used})
    except Undefined as e:
        report.notes.append(f"bootstrap undefined: {e}")
    report.tables["strategies"] = [{"strategy": k, "sim": sim_metric[k], "real": real_metric[k]}
                                   for k in keys]
    return report


# Matthew effect and brand loyalty ---------------------------------------------

def popularity_factory(catalog: Dict[str, Item], ledger: InteractionLedger) -> RecommenderStrategy:
    return registry.create("popularity", catalog, ledger=ledger)


def swap_brand(catalog: Dict[str, Item], brand: str, fictitious: str) -> Dict[str, Item]:
    """
    Copy of ``catalog`` with ``brand`` relabelled as ``fictitious``.

    The brand field and every whole-word mention in titles and descriptions
    are replaced; other text is left as is.
    """
    mention = re.compile(rf"(?<!\w){re.escape(brand)}(?!\w)")

    def relabel(text: str) -> str:
        return mention.sub(lambda _: fictitious, text) if text else text

    return {i: replace(item, brand=fictitious, title=relabel(item.title),
                       description=relabel(item.description))
            if item.brand == brand else item
            for i, item in catalog.items()}


def _like_curve(personas, histories, catalog, cfg: RunConfig, backend, strategy_factory,
                run_seed: int, rounds: int, tracked: Sequence[str], target=None,
                boost_rounds: int = 0) -> List[int]:
    ledger = InteractionLedger()
    strategy = strategy_factory(catalog, ledger)
    if target is not None and boost_rounds:
        strategy = apply_exposure_boost(strategy, target, boost_rounds)

    def env_for(agent_id: str) -> RecEnv:
        return RecEnv(catalog, strategy, cfg.env.page_size, cfg.env.mode, ledger, cfg.env.like_threshold)

    for round_index in range(1, rounds + 1):
        round_cfg = replace(cfg, seed=derive_seed(run_seed, "round", round_index))
        run_population(personas, histories, catalog, env_for, round_cfg, backend,
                       round_index=round_index)
        ledger.close_round()
    curves = [ledger.like_curve(item_id) for item_id in tracked]
    return [int(sum(values)) for values in zip(*curves)] if curves else [0] * rounds


def matthew_experiment(personas: Sequence[Persona], histories: Dict[str, List[InteractionRecord]],
                       catalog: Dict[str, Item], cfg: RunConfig, backend: CompletionBackend,
                       target: Optional[str] = None, boost_rounds: int = 2, rounds: int = 10,
                       seeds: int = 20, mode: str = "boost", brand: Optional[str] = None,
                       fictitious_brand: Optional[str] = None,
                       strategy_factory: StrategyFactory = popularity_factory) -> MetricsReport:
    """
    Paired multi-round simulations with and without an intervention.

    ``boost`` mode pins ``target`` to the top of page 1 during the first
    ``boost_rounds`` rounds and tracks its cumulative likes. ``brand_swap``
    mode tracks the likes of every item carrying ``brand`` against the same
    items relabelled with ``fictitious_brand``. Both conditions of a seed
    share every random stream.

    Raises:
        UnknownItem: ``target`` is not in the catalog
    """
    if mode not in ("boost", "brand_swap"):
        raise ValueError(f"mode must be boost or brand_swap, got {mode!r}")
    if rounds < 1 or seeds < 1:
        raise ValueError("rounds and seeds must be >= 1")
    if mode == "boost":
        if target not in catalog:
            raise UnknownItem(f"item {target} is not in the catalog")
        tracked = [target]
        labels = ("boosted", "original")
    else:
        if not brand or not fictitious_brand:
            raise ValueError("brand_swap needs brand and fictitious_brand")
        tracked = sorted((i for i, item in catalog.items() if item.brand == brand), key=id_sort_key)
        if not tracked:
            raise UnknownItem(f"no catalog item carries brand {brand!r}")
        labels = ("original_brand", "fictitious_brand")

    ordered = _in_id_order(personas)
    per_condition = {labels[0]: [], labels[1]: []}
    report = MetricsReport(experiment="matthew" if mode == "boost" else "brand_loyalty",
                           parameters={"mode": mode, "rounds": rounds, "seeds": seeds,
                                       "boost_rounds": boost_rounds, "target": target,
                                       "brand": brand, "fictitious_brand": fictitious_brand})
    for s in range(seeds):
        run_seed = derive_seed(cfg.seed, "matthew", s)
        if mode == "boost":
            first = _like_curve(ordered, histories, catalog, cfg, backend, strategy_factory,
                                run_seed, rounds, tracked, target, boost_rounds)
            second = _like_curve(ordered, histories, catalog, cfg, backend, strategy_factory,
                                 run_seed, rounds, tracked)
        else:
            first = _like_curve(ordered, histories, catalog, cfg, backend, strategy_factory,
                                run_seed, rounds, tracked)
            second = _like_curve(ordered, histories, swap_brand(catalog, brand, fictitious_brand),
                                 cfg, backend, strategy_factory, run_seed, rounds, tracked)
        per_condition[labels[0]].append(first)
        per_condition[labels[1]].append(second)
        gaps = [a - b for a, b in zip(first, second)]
        report.per_seed[str(s)] = {f"gap_round_{r + 1}": float(g) for r, g in enumerate(gaps)}

    a = np.asarray(per_condition[labels[0]], dtype=float)
    b = np.asarray(per_condition[labels[1]], dtype=float)
    mean_a, mean_b = a.mean(axis=0), b.mean(axis=0)
    gap = mean_a - mean_b
    report.tables["curves"] = [{"round": r + 1, labels[0]: float(mean_a[r]), labels[1]: float(mean_b[r]),
                                "gap": float(gap[r])} for r in range(rounds)]
    report.metrics.update({f"final_{labels[0]}": float(mean_a[-1]), f"final_{labels[1]}": float(mean_b[-1]),
                           "final_gap": float(gap[-1])})
    after = gap[boost_rounds:] if mode == "boost" else gap
    report.metrics["gap_positive_fraction"] = float(np.mean(after > 0)) if after.size else 0.0
    steps = np.diff(gap)
    report.metrics["gap_nondecreasing_fraction"] = float(np.mean(steps >= 0)) if steps.size else 1.0
    return report


# context effects ---------------------------------------------------------------

def context_labels(trajectory: Trajectory) -> Tuple[str, ...]:
    ctx = trajectory.context
    if ctx is None:
        return ()
    place = "home" if ctx.c_l == "home" else "outside"
    day = "weekend" if ctx.c_t.day_of_week >= 5 else "weekday"
    return place, day


def liked_events(trajectories: Sequence[Trajectory], catalog: Dict[str, Item],
                 like_threshold: int = 4) -> List[LikedEvent]:
    events = []
    for t in trajectories:
        labels = context_labels(t)
        if not labels:
            continue
        for step in t.steps:
            action = step.action
            if isinstance(action, Rate) and action.value >= like_threshold and action.item_id in catalog:
                events.append(LikedEvent(action.item_id, catalog[action.item_id].categories, labels))
    return events


def context_experiment(trajectories: Sequence[Trajectory], catalog: Dict[str, Item],
                       like_threshold: int = 4) -> MetricsReport:
    """Log frequency ratio of every liked genre in each context label."""
    events = liked_events(trajectories, catalog, like_threshold)
    genres = sorted({g for e in events for g in e.genres})
    report = MetricsReport(experiment="context", parameters={"like_threshold": like_threshold},
                           metrics={"liked": len(events), "genres": len(genres)})
    rows = []
    for genre in genres:
        for label in CONTEXT_LABELS:
            try:
                value = log_freq_ratio(events, genre, label, len(genres))
            except Undefined:
                continue
            rows.append({"genre": genre, "context": label, "log_ratio": value})
    report.tables["ratios"] = rows
    report.metrics["pairs"] = len(rows)
    if not events:
        report.notes.append("no liked interactions with a context")
    return report


# action alignment --------------------------------------------------------------

def predict_next_action(bundle, state: SessionState, progress: SessionProgress, cfg: RunConfig,
                        backend: CompletionBackend, seed: int,
                        appraised: Optional[Dict[tuple, list]] = None) -> Action:
    """
    The agent's next action on a logged state; a model failure counts as an exit.

    ``appraised`` carries page appraisals across the steps of one session, so a
    page revisited by the log advances fatigue and boredom only once.
    """
    mask = effective_mask(cfg)
    persona = bundle.prompt_persona(mask)
    appraised = {} if appraised is None else appraised
    try:
        key = page_key(state)
        if key not in appraised:
            appraised[key] = appraise_page(state, persona, bundle.episodic, backend, mask,
                                           cfg.memory.evidence_k, seed)
            progress.note_page(appraised[key])
            progress.novelty = novelty_fraction(state, bundle.episodic)
        intentions = appraised[key]
        internal = infer_internal_state(progress, persona, state.user_context, bundle.emotional.state,
                                        backend, mask, cfg.agent.fatigue_step, cfg.agent.boredom_step,
                                        seed)
        _, action, _ = select_action(state, intentions, internal, persona, bundle.episodic, backend,
                                     progress, mask, cfg.agent.thoughts_on, cfg.agent.boredom_threshold,
                                     cfg.memory.evidence_k, seed)
        return action
    except (AppraisalFailure, BackendError) as e:
        audit.warn(f"agent={bundle.agent_id} could not predict an action: {e}")
        return forced_exit(state.mode)


def _follow(progress: SessionProgress, action: Action):
    progress.note_action(action)
    if isinstance(action, ClickItem):
        progress.visited = progress.visited + (action.item_id,)
    elif isinstance(action, WebClick) and action.semantic_id.startswith("view_"):
        progress.visited = progress.visited + (action.semantic_id[len("view_"):],)
    elif isinstance(action, Rate):
        progress.rated = progress.rated + (action.item_id,)


def action_alignment_experiment(sessions: Sequence[LoggedSession], personas: Dict[str, Persona],
                                histories: Dict[str, List[InteractionRecord]], catalog: Dict[str, Item],
                                cfg: RunConfig, backend: CompletionBackend) -> MetricsReport:
    """
    Replay logged sessions step by step and compare predicted with logged actions.

    Progress is advanced with the logged actions, so every prediction sees the
    true prefix of its session.
    """
    truths: List[Action] = []
    preds: List[Action] = []
    outcome_truth: List[str] = []
    outcome_pred: List[str] = []
    skipped = 0
    for session in sorted(sessions, key=lambda s: (id_sort_key(s.user_id), s.session_id)):
        persona = personas.get(session.user_id)
        if persona is None or not session.steps:
            audit.warn(f"actions skipped session={session.session_id}: no persona or no steps")
            skipped += 1
            continue
        bundle = build_bundle(persona, histories.get(session.user_id, []), catalog,
                              cfg.memory.retrieval_weight)
        progress = SessionProgress(start=bundle.emotional.state)
        appraised = {}
        predicted = None
        for index, (state, truth) in enumerate(session.steps):
            seed = derive_seed(cfg.seed, "actions", session.session_id, index)
            predicted = predict_next_action(bundle, state, progress, cfg, backend, seed, appraised)
            truths.append(truth)
            preds.append(predicted)
            _follow(progress, truth)
        outcome_truth.append(outcome_of(session.steps[-1][1]))
        outcome_pred.append(outcome_of(predicted))

    report = MetricsReport(experiment="actions",
                           parameters={"sessions": len(sessions), "mode": cfg.env.mode},
                           metrics={"steps": len(truths), "skipped_sessions": skipped})
    if not truths:
        report.notes.append("no session could be replayed")
        return report
    report.metrics["action_accuracy"] = sum(action_match(p, t) for p, t in zip(preds, truths)) / len(truths)
    report.metrics["action_type_macro_f1"] = classification_metrics(
        [action_category(t) for t in truths], [action_category(p) for p in preds], "macro").f1
    clicks = [(t, p) for t, p in zip(truths, preds) if isinstance(t, (ClickItem, WebClick))]
    if clicks:
        report.metrics["click_type_weighted_f1"] = classification_metrics(
            [click_subtype(t) for t, _ in clicks],
            [click_subtype(p) if isinstance(p, (ClickItem, WebClick)) else "none" for _, p in clicks],
            "weighted").f1
    outcome = classification_metrics(outcome_truth, outcome_pred, "weighted")
    report.metrics["outcome_accuracy"] = outcome.accuracy
    report.metrics["outcome_weighted_f1"] = outcome.f1
    report.tables["table"] = [{k: report.metrics[k] for k in
                               ("action_accuracy", "action_type_macro_f1", "click_type_weighted_f1",
                                "outcome_weighted_f1") if k in report.metrics}]
    return report
