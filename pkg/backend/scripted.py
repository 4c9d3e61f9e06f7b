"""Deterministic rule-based backend.

Dispatches on the ``#TASK:`` line and reads the structured fields the
prompt templates embed. Output is a pure function of (task tag, parsed
fields, seed); no state is kept between calls.
"""

from typing import Callable, Dict, List

from backend import rules
from backend.base import CompletionBackend, CompletionRequest, CompletionResponse, task_tag_of
from backend.parsing import (optional_field, pairs_dict, parse_block, parse_float, parse_int,
                             parse_pairs, parse_tagged_field)
from backend.rules import ItemRow, parse_item_row
from domain.errors import FieldMissing, UnknownTaskTag

OCCUPATIONS = ("student", "software engineer", "teacher", "retired", "nurse",
               "freelance designer", "sales assistant", "office clerk")

GOAL_PHRASES = {
    "leisure": ("unwind after {activity} with something I will enjoy",
                "find something fun for my free time"),
    "rest": ("pass a quiet moment with something light", "relax for a bit"),
    "meal": ("find something short to enjoy during my meal", "fill the time while eating"),
    "commute": ("kill time on the way with something easy to follow",
                "find something to enjoy while travelling"),
    "social": ("pick something to share with friends", "get a recommendation for the group"),
    "work": ("take a short break from {activity}", "find something quick between tasks"),
    "chores": ("find something to keep me company during {activity}",
               "make the chores pass faster"),
    "sleep": ("find something calm before sleeping", "wind down"),
}

BANDS = ("Morning", "Afternoon", "Evening", "Night")


def _rows(text: str, header: str) -> List[ItemRow]:
    rows = []
    for line in parse_block(text, header):
        row = parse_item_row(line)
        if row is not None:
            rows.append(row)
    return rows


def _id_list(text: str, field_name: str) -> List[str]:
    raw = optional_field(text, field_name) or ""
    if raw.lower() in ("", "none", "-"):
        return []
    return [part.strip() for part in raw.split(",") if part.strip()]


def _preferences(text: str) -> str:
    return optional_field(text, "PREFERENCES") or ""


def _first_preference(preferences: str) -> str:
    parts = [p.strip() for p in preferences.split(",") if p.strip()]
    return parts[0] if parts else "anything"


class ScriptedBackend(CompletionBackend):
    """Rule-based stand-in for a model; referentially transparent."""

    name = "scripted"

    def __init__(self, classify_rule: str = "membership"):
        self.classify_rule = classify_rule
        self._handlers: Dict[str, Callable[[str, int], str]] = {
            "PERSONA": self._persona,
            "SCORE": self._score,
            "APPRAISE": self._appraise,
            "INTERNAL": self._internal,
            "ACT": self._act,
            "REFLECT": self._reflect,
            "RATE": self._rate,
            "CLASSIFY": self._classify,
            "SCHEDULE": self._schedule,
            "SUMMARIZE": self._summarize,
            "GOAL": self._goal,
            "INTERVIEW": self._interview,
            "THOUGHT_ID": self._thought_id,
            "THOUGHT_TA": self._thought_ta,
        }

    def complete(self, request: CompletionRequest) -> CompletionResponse:
        tag = task_tag_of(request.user_text)
        handler = self._handlers.get(tag)
        if handler is None:
            raise UnknownTaskTag(f"scripted backend has no rule for task {tag!r}")
        seed = request.seed if request.seed is not None else 0
        text = handler(request.user_text, seed)
        return CompletionResponse(text=text, token_estimate=len(text.split()), backend_name=self.name)

    # persona -------------------------------------------------------------

    def _persona(self, text: str, seed: int) -> str:
        rows = _rows(text, "HISTORY")
        try:
            index = parse_int(text, "CANDIDATE") - 1
        except FieldMissing:
            index = 0
        prefs = rules.top_labels(rows, start=max(0, index), count=3)
        demographics = pairs_dict(optional_field(text, "DEMOGRAPHICS") or "")
        h = rules.stable_int("persona", seed, index, *[r.item_id for r in rows])

        age = demographics.get("age") or str(18 + h % 48)
        occupation = demographics.get("occupation") or OCCUPATIONS[(h // 48) % len(OCCUPATIONS)]
        traits = {name: 1 + rules.stable_int("trait", seed, index, name) % 3
                  for name in ("O", "C", "E", "A", "N")}

        engagement = "high" if len(rows) >= 25 else "medium" if len(rows) >= 10 else "low"
        conformity = ("low", "medium", "high")[rules.stable_int("conformity", seed, index) % 3]
        label_uses = [label for row in rows for label in row.labels]
        spread = len(set(label_uses)) / len(label_uses) if label_uses else 0.0
        variety = "high" if spread > 0.5 else "medium" if spread > 0.25 else "low"

        if prefs:
            goals = f"find more {prefs[0]} titles; try something beyond {prefs[-1]}"
        else:
            goals = "discover something new"
        return "\n".join([
            f"AGE: {age}",
            f"OCCUPATION: {occupation}",
            "TRAITS: " + ", ".join(f"{k}={v}" for k, v in traits.items()),
            f"HABITS: engagement={engagement}, conformity={conformity}, variety={variety}",
            f"GOALS: {goals}",
            f"PREFERENCES: {', '.join(prefs) if prefs else 'popular titles'}",
        ])

    def _score(self, text: str, seed: int) -> str:
        prefs = _preferences(text)
        rows = _rows(text, "HELD_OUT")
        if not rows:
            return "SCORE: 0"
        hits = sum(1 for row in rows if rules.matched_labels(row.labels, prefs))
        return f"SCORE: {rules.round_half_up(100 * hits / len(rows))}"

    # agent ---------------------------------------------------------------

    def _appraise(self, text: str, seed: int) -> str:
        prefs = _preferences(text)
        rows = _rows(text, "PAGE_ITEMS")
        if not rows:
            return "INTENTIONS: none"
        parts = []
        for row in rows:
            overlap = rules.overlap_fraction(row.labels, prefs)
            parts.append(f"{row.item_id}={rules.appraise_rule(overlap)}:{overlap:.2f}")
        return "INTENTIONS: " + ", ".join(parts)

    def _internal(self, text: str, seed: int) -> str:
        start = pairs_dict(optional_field(text, "START") or "")
        steps = pairs_dict(optional_field(text, "INCREMENTS") or "")
        fatigue, curiosity, boredom = rules.internal_state_rule(
            start_fatigue=float(start.get("fatigue", 0.0)),
            start_boredom=float(start.get("boredom", 0.0)),
            steps_taken=parse_int(text, "STEPS_TAKEN"),
            zero_watch_streak=parse_int(text, "ZERO_WATCH_STREAK"),
            openness=parse_int(text, "OPENNESS"),
            novelty=parse_float(text, "NOVELTY"),
            fatigue_step=float(steps.get("fatigue", 0.05)),
            boredom_step=float(steps.get("boredom", 0.15)),
        )
        return f"FATIGUE: {fatigue:.6f}\nCURIOSITY: {curiosity:.6f}\nBOREDOM: {boredom:.6f}"

    def _act(self, text: str, seed: int) -> str:
        webshop = (optional_field(text, "MODE") or "").lower() == "webshop"
        state = pairs_dict(optional_field(text, "STATE") or "")
        boredom = float(state.get("boredom", 0.0))
        threshold = float(optional_field(text, "BOREDOM_THRESHOLD") or 0.8)
        prefs = _preferences(text)
        rows = _rows(text, "PAGE_ITEMS")
        verdicts = {}
        for item_id, value in parse_pairs(optional_field(text, "INTENTIONS_SO_FAR") or ""):
            verdicts[item_id] = value.split(":", 1)[0].strip().upper()
        visited = set(_id_list(text, "VISITED"))
        rated = set(_id_list(text, "RATED"))
        cart = set(_id_list(text, "CART_IDS"))
        expanded = (optional_field(text, "EXPANDED_ID") or "none").strip()
        by_id = {row.item_id: row for row in rows}

        if boredom >= threshold or not rows:
            thought = ("Nothing here holds my attention any more, I'll stop for now."
                       if rows else "There is nothing left to look at.")
            return self._act_reply(thought, "terminate" if webshop else "[EXIT]")

        watch = [row for row in rows
                 if verdicts.get(row.item_id) == "WATCH" and row.item_id not in visited]
        best = None
        if watch:
            best = max(watch, key=lambda r: rules.overlap_fraction(r.labels, prefs))
            matched = rules.matched_labels(best.labels, prefs)
            liked = matched[0] if matched else _first_preference(prefs)

        if webshop:
            if expanded in by_id and expanded not in cart and verdicts.get(expanded) == "WATCH":
                return self._act_reply(f"{by_id[expanded].title} looks right, adding it to my cart.",
                                       f"click(add_to_cart_{expanded})")
            if best is not None:
                return self._act_reply(f"{best.title} fits what I like in {liked}, let me view it.",
                                       f"click(view_{best.item_id})")
            if cart:
                return self._act_reply("I have what I came for, time to check out.",
                                       "click(purchase_cart)")
            return self._act_reply("Nothing else here fits, let me look at the next page.",
                                   "click(next_page)")

        if expanded in by_id and expanded not in rated:
            row = by_id[expanded]
            value = rules.rating_rule(rules.overlap_fraction(row.labels, prefs))
            return self._act_reply(f"Having looked at {row.title}, I'd give it {value} out of 5.",
                                   f"[RATE:{expanded}:{value}]")
        if best is not None:
            return self._act_reply(f"{best.title} fits my taste for {liked}, I want to see more.",
                                   f"[CLICK_ITEM:{best.item_id}]")
        return self._act_reply("Nothing else here catches my eye, let me see the next page.",
                               "[NEXT_PAGE]")

    @staticmethod
    def _act_reply(thought: str, action: str) -> str:
        return f"THOUGHT: {thought}\nACTION: {action}"

    def _reflect(self, text: str, seed: int) -> str:
        action = optional_field(text, "LAST_ACTION") or "an action"
        prefs = _preferences(text)
        row = parse_item_row(optional_field(text, "ACTED_ITEM") or "")
        matched = rules.matched_labels(row.labels, prefs) if row else []
        if matched:
            return f"REFLECTION: chose {action} because it matches my taste for {matched[0]}"
        return (f"REFLECTION: chose {action} because nothing here matched my taste for "
                f"{_first_preference(prefs)}")

    def _rate(self, text: str, seed: int) -> str:
        prefs = _preferences(text)
        row = parse_item_row(parse_tagged_field(text, "ITEM"))
        labels = row.labels if row else ()
        matched = rules.matched_labels(labels, prefs)
        value = rules.rating_rule(rules.overlap_fraction(labels, prefs))
        return f"RATING: {value}\nREASON: it shares {len(matched)} of {len(labels)} labels with what I like"

    def _classify(self, text: str, seed: int) -> str:
        rows = _rows(text, "CANDIDATES")
        memory = set(_id_list(text, "MEMORY_ITEMS"))
        prefs = _preferences(text)
        overlaps = [rules.overlap_fraction(row.labels, prefs) for row in rows]
        bar = rules.recall_bar(overlaps)
        labels = []
        for row, overlap in zip(rows, overlaps):
            if self.classify_rule == "membership":
                hit = row.item_id in memory
            else:
                hit = overlap >= bar
            labels.append(f"{row.item_id}={'Interacted' if hit else 'Not Interacted'}")
        return "CLASSIFICATION: " + ", ".join(labels)

    def _interview(self, text: str, seed: int) -> str:
        satisfaction = parse_float(text, "SATISFACTION")
        rating = rules.interview_rule(satisfaction)
        if rating >= 8:
            reason = "the recommendations matched my taste most of the time"
        elif rating >= 5:
            reason = "some recommendations fit my taste but many did not"
        else:
            reason = "I rarely found anything I wanted to watch or buy"
        return f"RATING: {rating}\nREASON: {reason}"

    # life simulation -----------------------------------------------------

    def _schedule(self, text: str, seed: int) -> str:
        lines = []
        for block in parse_block(text, "TYPICAL DAY"):
            parts = [p.strip() for p in block.split("|")]
            if len(parts) != 4:
                continue
            span, activity_class, options, location = parts
            first, _, last = span.partition("-")
            start, end = int(first), int(last or first)
            choices = [o.strip() for o in options.split("/") if o.strip()] or [activity_class]
            activity = choices[rules.stable_int("schedule", seed, start) % len(choices)]
            for index in range(start, end + 1):
                lines.append(f"SLOT {index:02d} | {index // 2:02d}:{30 * (index % 2):02d} | "
                             f"{activity_class} | {activity} | {location}")
        return "\n".join(lines) if lines else "SLOT none"

    def _summarize(self, text: str, seed: int) -> str:
        days = parse_int(text, "HORIZON_DAYS")
        bands = pairs_dict(optional_field(text, "BAND_FREQUENCIES") or "")
        freqs = [float(bands.get(b.lower(), 0.0)) for b in BANDS]
        dominant = BANDS[freqs.index(max(freqs))]
        locations = optional_field(text, "TOP_LOCATIONS") or "home"
        goals = optional_field(text, "TOP_GOALS") or "none"
        budget = optional_field(text, "MEDIAN_BUDGET") or "n/a"
        return (f"SUMMARY: Over the last {days} days I mostly turned to recommendations in the "
                f"{dominant}, usually at {locations}; typical goals: {goals}; typical budget {budget}.")

    def _goal(self, text: str, seed: int) -> str:
        activity_class = (optional_field(text, "ACTIVITY_CLASS") or "leisure").lower()
        activity = optional_field(text, "ACTIVITY") or activity_class
        phrases = GOAL_PHRASES.get(activity_class, GOAL_PHRASES["leisure"])
        phrase = phrases[rules.stable_int("goal", seed, activity_class) % len(phrases)]
        return "GOAL: " + phrase.format(activity=activity)

    # thought corpora -----------------------------------------------------

    def _thought_id(self, text: str, seed: int) -> str:
        prefs = _preferences(text)
        row = parse_item_row(parse_tagged_field(text, "ITEM"))
        rating = parse_int(text, "GIVEN_RATING")
        title = row.title if row else "this item"
        labels = list(row.labels) if row else []
        matched = rules.matched_labels(labels, prefs)
        unmatched = [l for l in labels if l not in matched]
        if rating >= 4:
            why = (f"it is {' and '.join(matched)}, which I enjoy" if matched
                   else f"it offered something different from my usual {_first_preference(prefs)}")
        elif rating <= 2:
            why = (f"{' and '.join(unmatched)} is not what I look for; I prefer {prefs or 'other things'}"
                   if unmatched else "it did not live up to what I usually like")
        else:
            why = (f"the {matched[0]} side appealed to me but the rest did not" if matched
                   else "it was fine but nothing about it stood out for me")
        return f"RATIONALE: I rated {title} {rating}/5 because {why}."

    def _thought_ta(self, text: str, seed: int) -> str:
        prefs = _preferences(text)
        action = optional_field(text, "TAKEN_ACTION") or "this action"
        alternatives = len(parse_block(text, "ALTERNATIVES"))
        row = parse_item_row(optional_field(text, "TAKEN_ITEM") or "")
        matched = rules.matched_labels(row.labels, prefs) if row else []
        if row and matched:
            why = f"{row.title} is labelled {matched[0]}, which matches my taste"
        elif row:
            why = f"{row.title} was the item on screen I cared about most"
        else:
            why = f"nothing visible on this page matched my taste for {_first_preference(prefs)}"
        return f"RATIONALE: I chose {action} over {alternatives} alternatives because {why}."
