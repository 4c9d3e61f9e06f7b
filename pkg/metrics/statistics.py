"""Pure metric computations used by the experiment drivers."""

import math
from dataclasses import dataclass
from typing import Callable, Dict, Hashable, Iterable, List, NamedTuple, Optional, Sequence, Tuple

import numpy as np
from scipy.stats import rankdata

import audit.logger as audit
from domain.actions import (Action, ClickItem, Exit, NextPage, PrevPage, Rate, Search, WebClick,
                            WebInput, WebTerminate, is_purchase_id)
from domain.errors import EmptyInput, ShapeError, Undefined
from domain.types import Trajectory
from lifesim.summary import BANDS, band_of

AVERAGING = ("binary", "macro", "weighted")
PAGE_CHANGING = (NextPage, PrevPage, Search, WebInput)


def _pair(predictions: Sequence, truths: Sequence) -> Tuple[np.ndarray, np.ndarray]:
    p = np.asarray(predictions, dtype=float)
    t = np.asarray(truths, dtype=float)
    if p.shape != t.shape or p.ndim != 1:
        raise ShapeError(f"{p.size} predictions vs {t.size} truths")
    return p, t


def rmse_mae(predictions: Sequence[float], truths: Sequence[float]) -> Tuple[float, float]:
    """
    Root mean squared and mean absolute error.

    Raises:
        ShapeError: lengths differ or are zero
    """
    p, t = _pair(predictions, truths)
    if p.size == 0:
        raise ShapeError("no predictions")
    diff = p - t
    return float(np.sqrt(np.mean(diff ** 2))), float(np.mean(np.abs(diff)))


class Scores(NamedTuple):
    accuracy: float
    precision: float
    recall: float
    f1: float


def _ratio(num: float, den: float, what: str) -> float:
    if den == 0:
        audit.warn(f"zero denominator for {what}, scored 0")
        return 0.0
    return num / den


def _class_scores(truth: Sequence[Hashable], pred: Sequence[Hashable], label) -> Tuple[float, float, float]:
    tp = sum(1 for t, p in zip(truth, pred) if t == label and p == label)
    fp = sum(1 for t, p in zip(truth, pred) if t != label and p == label)
    fn = sum(1 for t, p in zip(truth, pred) if t == label and p != label)
    precision = _ratio(tp, tp + fp, f"precision of {label!r}")
    recall = _ratio(tp, tp + fn, f"recall of {label!r}")
    f1 = _ratio(2 * precision * recall, precision + recall, f"f1 of {label!r}")
    return precision, recall, f1


def classification_metrics(truth: Sequence[Hashable], pred: Sequence[Hashable],
                           averaging: str = "binary", positive: Hashable = True) -> Scores:
    """
    Accuracy plus precision, recall and F1 under the requested averaging.

    ``binary`` scores the ``positive`` label only; ``macro`` averages over the
    labels seen in either sequence; ``weighted`` weights them by support in
    ``truth``.

    Raises:
        ShapeError: lengths differ or are zero
    """
    if averaging not in AVERAGING:
        raise ValueError(f"averaging must be one of {AVERAGING}")
    truth, pred = list(truth), list(pred)
    if len(truth) != len(pred) or not truth:
        raise ShapeError(f"{len(pred)} predictions vs {len(truth)} truths")
    accuracy = sum(1 for t, p in zip(truth, pred) if t == p) / len(truth)
    if averaging == "binary":
        return Scores(accuracy, *_class_scores(truth, pred, positive))

    labels = sorted(set(truth) | set(pred), key=repr)
    per_label = {label: _class_scores(truth, pred, label) for label in labels}
    if averaging == "macro":
        weights = {label: 1.0 / len(labels) for label in labels}
    else:
        weights = {label: truth.count(label) / len(truth) for label in labels}
    precision, recall, f1 = (sum(weights[label] * per_label[label][k] for label in labels)
                             for k in range(3))
    return Scores(accuracy, precision, recall, f1)


def spearman(xs: Sequence[float], ys: Sequence[float]) -> float:
    """
    Spearman rank correlation; ties get mid-ranks.

    Raises:
        Undefined: fewer than two pairs or a constant ranking
    """
    x, y = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if x.shape != y.shape or x.ndim != 1:
        raise ShapeError(f"{x.size} vs {y.size} values")
    if x.size < 2:
        raise Undefined("spearman needs at least two pairs")
    rx, ry = rankdata(x) - (x.size + 1) / 2.0, rankdata(y) - (y.size + 1) / 2.0
    den = math.sqrt(float(np.sum(rx ** 2)) * float(np.sum(ry ** 2)))
    if den == 0:
        raise Undefined("zero rank variance")
    return float(np.clip(np.sum(rx * ry) / den, -1.0, 1.0))


def bootstrap_interval(xs: Sequence[float], ys: Sequence[float],
                       statistic: Callable[[np.ndarray, np.ndarray], float] = spearman,
                       resamples: int = 1000, seed: int = 0,
                       level: float = 0.95) -> Tuple[float, float, int]:
    """
    Percentile bootstrap interval of a paired statistic.

    Resamples where the statistic is undefined are dropped.

    Returns:
        (low, high, usable resamples)
    """
    x, y = np.asarray(xs, dtype=float), np.asarray(ys, dtype=float)
    if x.shape != y.shape:
        raise ShapeError(f"{x.size} vs {y.size} values")
    rng = np.random.default_rng(seed)
    values = []
    for _ in range(resamples):
        idx = rng.integers(0, x.size, size=x.size)
        try:
            values.append(statistic(x[idx], y[idx]))
        except Undefined:
            continue
    if not values:
        raise Undefined("statistic undefined on every bootstrap resample")
    tail = (1.0 - level) / 2.0 * 100.0
    low, high = np.percentile(values, [tail, 100.0 - tail])
    return float(low), float(high), len(values)


def rating_distribution(ratings: Iterable[int]) -> Tuple[float, ...]:
    """
    Normalized histogram over the ratings 1..5.

    Raises:
        EmptyInput: no ratings
    """
    values = np.asarray(list(ratings), dtype=int)
    if values.size == 0:
        raise EmptyInput("no ratings")
    if values.min() < 1 or values.max() > 5:
        raise ValueError("ratings must lie in 1..5")
    counts = np.bincount(values, minlength=6)[1:6]
    return tuple(float(c) for c in counts / values.size)


def tv_distance(h1: Sequence[float], h2: Sequence[float]) -> float:
    a, b = _pair(h1, h2)
    return float(0.5 * np.sum(np.abs(a - b)))


@dataclass(frozen=True)
class LikedEvent:
    """One liked interaction with the genres of its item and its context labels."""
    item_id: str
    genres: Tuple[str, ...]
    labels: Tuple[str, ...]


def smoothed_log_ratio(count_in_context: int, total_in_context: int, count_overall: int,
                       total_overall: int, n_genres: int) -> float:
    """ln(p(g|c) / p(g|all)) with add-one smoothing on the genre counts."""
    conditional = (count_in_context + 1) / (total_in_context + n_genres)
    marginal = (count_overall + 1) / (total_overall + n_genres)
    return math.log(conditional / marginal)


def log_freq_ratio(liked: Sequence[LikedEvent], genre: str, context_label: str,
                   n_genres: Optional[int] = None) -> float:
    """
    Over- or under-representation of ``genre`` among likes in ``context_label``.

    Counts are genre occurrences over liked items; ``n_genres`` defaults to
    the number of distinct genres among the likes.

    Raises:
        Undefined: no likes in the context, or the genre is never liked
    """
    in_context = [e for e in liked if context_label in e.labels]
    if not liked or not in_context:
        raise Undefined(f"no liked interactions in context {context_label!r}")
    overall = [g for e in liked for g in e.genres]
    if genre not in overall:
        raise Undefined(f"genre {genre!r} is never liked")
    conditional = [g for e in in_context for g in e.genres]
    n = n_genres if n_genres is not None else len(set(overall))
    return smoothed_log_ratio(conditional.count(genre), len(conditional),
                              overall.count(genre), len(overall), n)


def action_match(predicted: Action, truth: Action) -> bool:
    """Exact match: same action type and every parameter equal."""
    return type(predicted) is type(truth) and predicted == truth


def outcome_of(action: Action) -> str:
    if isinstance(action, WebClick) and is_purchase_id(action.semantic_id):
        return "purchase"
    return "terminate"


def session_outcome(trajectory: Trajectory) -> str:
    """``purchase`` when the session ended on a purchase-tagged click, else ``terminate``."""
    return outcome_of(trajectory.terminal_action)


def action_category(action: Action) -> str:
    """High-level category used for action-type F1."""
    if isinstance(action, (WebClick, ClickItem)):
        return "click"
    if isinstance(action, (WebInput, Search)):
        return "input"
    if isinstance(action, (WebTerminate, Exit)):
        return "terminate"
    if isinstance(action, Rate):
        return "rate"
    return "navigate"


def click_subtype(action: Action) -> str:
    """Finer click intent (view, cart, purchase, navigation) of a click action."""
    if isinstance(action, ClickItem):
        return "view"
    sid = action.semantic_id
    if is_purchase_id(sid):
        return "purchase"
    if sid.startswith("view_"):
        return "view"
    if sid.startswith("add_to_cart_"):
        return "add_to_cart"
    return "navigate"


def _changes_page(action: Action) -> bool:
    if isinstance(action, PAGE_CHANGING):
        return True
    return isinstance(action, WebClick) and action.semantic_id in ("next_page", "prev_page")


def pages_visited(trajectory: Trajectory) -> int:
    """1 + the number of successful page-changing transitions."""
    return 1 + sum(1 for step in trajectory.steps if _changes_page(step.action))


def is_click(action: Action) -> bool:
    if isinstance(action, ClickItem):
        return True
    return isinstance(action, WebClick) and action.semantic_id.startswith(("view_", "add_to_cart_"))


@dataclass
class BandShares:
    shares: Dict[str, float]
    clicks: int
    flagged: bool = False

    def as_tuple(self) -> Tuple[float, ...]:
        return tuple(self.shares[band] for band in BANDS)


def band_shares(hours: Iterable[int]) -> BandShares:
    """Share of events per time-of-day band; all zero and flagged when there are none."""
    counts = {band: 0 for band in BANDS}
    for hour in hours:
        counts[band_of(hour)] += 1
    total = sum(counts.values())
    if total == 0:
        return BandShares({band: 0.0 for band in BANDS}, 0, flagged=True)
    return BandShares({band: counts[band] / total for band in BANDS}, total)


def temporal_ctr(trajectories: Iterable[Trajectory]) -> BandShares:
    """Click shares over Morning, Afternoon, Evening and Night by the session's c_t hour."""
    hours: List[int] = []
    skipped = 0
    for trajectory in trajectories:
        clicks = sum(1 for step in trajectory.steps if is_click(step.action))
        if not clicks:
            continue
        if trajectory.context is None:
            skipped += 1
            continue
        hours += [trajectory.context.c_t.hour] * clicks
    if skipped:
        audit.warn(f"temporal_ctr skipped {skipped} sessions without a context")
    result = band_shares(hours)
    if result.flagged:
        audit.warn("temporal_ctr found no clicks")
    return result
