"""Prompt templates for every model task.

Each template starts with its ``#TASK: <TAG>`` line; the scripted backend
dispatches on it. Data lines use ``FIELD: value`` so both a model and the
scripted rules can read them. Item lines inside blocks look like
``- <item_id> | <title> | <label>; <label>``.
"""

from string import Formatter
from typing import Dict, List, Optional

from backend.base import CompletionRequest

SYSTEM_PROMPT = """You are role-playing a real person who uses a recommender system in everyday life.
Stay consistent with the persona, the situation and the memories you are given.
Answer only in the response format requested, one field per line."""

GROUNDING_INSTRUCTION = ("The reflection must be grounded in observable aspects "
                         "rather than generic justifications.")

_SAMPLING = {"temperature": 0.7, "max_tokens": 512}


def configure_sampling(temperature: float = None, max_tokens: int = None):
    """Set the sampling parameters attached to every request."""
    if temperature is not None:
        _SAMPLING["temperature"] = float(temperature)
    if max_tokens is not None:
        _SAMPLING["max_tokens"] = int(max_tokens)


class PromptTemplate:
    """A task-tagged template with ``{field}`` placeholders."""

    def __init__(self, task_tag: str, body: str, system: str = SYSTEM_PROMPT):
        self.task_tag = task_tag
        self.text = f"#TASK: {task_tag}\n{body}"
        self.system = system
        self._formatter = Formatter()

    def fields(self) -> List[str]:
        return [name for _, name, _, _ in self._formatter.parse(self.text) if name]

    def render(self, **data) -> str:
        return self.text.format(**data)

    def request(self, seed: Optional[int] = None, **data) -> CompletionRequest:
        return CompletionRequest(system_text=self.system, user_text=self.render(**data),
                                 task_tag=self.task_tag, seed=seed,
                                 temperature=_SAMPLING["temperature"],
                                 max_tokens=_SAMPLING["max_tokens"])

    def __repr__(self):
        return f"<PromptTemplate(task='{self.task_tag}')>"


PERSONA = PromptTemplate("PERSONA", """You are building the profile of a real user from a sample of their interaction history.
Infer a plausible persona: age, occupation, Big Five traits on a 1-3 scale, habits
(engagement, conformity and variety tendencies as low/medium/high), recent goals and preferences.
CANDIDATE: {candidate}
{demographics}HISTORY:
{history}

Answer with exactly these lines:
AGE: <integer>
OCCUPATION: <text>
TRAITS: O=<1-3>, C=<1-3>, E=<1-3>, A=<1-3>, N=<1-3>
HABITS: engagement=<low|medium|high>, conformity=<low|medium|high>, variety=<low|medium|high>
GOALS: <goal>; <goal>
PREFERENCES: <comma-separated genres, categories or brands>""")

SCORE = PromptTemplate("SCORE", """Judge how consistent a candidate persona is with the items this user went on to interact with.
{persona}
HELD_OUT:
{items}

Reply with one line: SCORE: <integer 0-100>""")

APPRAISE = PromptTemplate("APPRAISE", """{persona}
EVIDENCE:
{evidence}
PAGE_ITEMS:
{items}

You are looking at this page:
{page}

For every item on the page decide whether you want to look at it (WATCH) or not (SKIP),
with a confidence between 0 and 1.
Reply with one line: INTENTIONS: <item_id>=<WATCH|SKIP>:<confidence>, ...""")

INTERNAL = PromptTemplate("INTERNAL", """{persona}
{context}SESSION:
STEPS_TAKEN: {steps}
ZERO_WATCH_STREAK: {streak}
NOVELTY: {novelty}
OPENNESS: {openness}
START: fatigue={start_fatigue}, boredom={start_boredom}
INCREMENTS: fatigue={fatigue_step}, boredom={boredom_step}
RECENT_ACTIONS: {recent}

How do you feel right now, after browsing this far?
Reply with three lines:
FATIGUE: <0-1>
CURIOSITY: <0-1>
BOREDOM: <0-1>""")

ACT = PromptTemplate("ACT", """{persona}
MODE: {mode}
STATE: fatigue={fatigue}, curiosity={curiosity}, boredom={boredom}
BOREDOM_THRESHOLD: {threshold}
PAGE_ITEMS:
{items}
INTENTIONS_SO_FAR: {intentions}
VISITED: {visited}
RATED: {rated}
EXPANDED_ID: {expanded}
CART_IDS: {cart}
EVIDENCE:
{evidence}

You are looking at this page:
{page}

LEGAL ACTIONS:
{legal}
{correction}{instruction}""")

REFLECT = PromptTemplate("REFLECT", """{persona}
LAST_ACTION: {action}
ACTED_ITEM: {item}
THOUGHT_GIVEN: {thought}

Reflect in one sentence on why you took this action.
Reply with one line: REFLECTION: <one sentence>""")

RATE = PromptTemplate("RATE", """{persona}
{context}EVIDENCE:
{evidence}
ITEM: {item}
DESCRIPTION: {description}

{correction}How would you rate this item?
Reply with:
RATING: <integer 1-5>
REASON: <one sentence>""")

CLASSIFY = PromptTemplate("CLASSIFY", """{persona}
HISTORY:
{history}
MEMORY_ITEMS: {memory_ids}

## Recommended List ##
CANDIDATES:
{items}

### Instructions

1. Review each {item_type} in the ## Recommended List ##.
2. For each {item_type}, classify if you have already interacted with it ("Interacted") or if you have not ("Not Interacted").
{correction}Reply with one line: CLASSIFICATION: <item_id>=<Interacted|Not Interacted>, ...""")

SCHEDULE = PromptTemplate("SCHEDULE", """{persona}
OCCUPATION_CLASS: {occupation_class}
DAY_INDEX: {day_index}
DAY_TYPE: {day_type}
EXTERNALS: weather={weather}, season={season}, event={event}
PREVIOUS_DAY: {previous}
TYPICAL DAY:
{template_rows}

{repair}Plan this person's whole day as 48 half-hour slots from 00:00 to 23:30, taking the day type,
the weather, the season and any event into account.
Use one line per slot, in order:
SLOT <index> | <HH:MM> | <sleep|work|commute|meal|leisure|social|chores|rest> | <activity> | <location>""")

SUMMARIZE = PromptTemplate("SUMMARIZE", """{persona}
HORIZON_DAYS: {days}
ENGAGEMENTS: {count}
BAND_FREQUENCIES: {bands}
TOP_LOCATIONS: {locations}
TOP_GOALS: {goals}
MEDIAN_BUDGET: {budget}

Write a short first-person summary of when, where and why this person usually turns to recommendations.
Reply with one line: SUMMARY: <text>""")

GOAL = PromptTemplate("GOAL", """{persona}
TIME: {time}
LOCATION: {location}
ACTIVITY_CLASS: {activity_class}
ACTIVITY: {activity}
PREVIOUS_ACTIVITY: {previous}
MOOD: {mood}

Why is this person opening the recommender right now? State the purpose briefly.
Reply with one line: GOAL: <short goal>""")

INTERVIEW = PromptTemplate("INTERVIEW", """{persona}
SESSION SUMMARY:
{summary}
SATISFACTION: {satisfaction}

{correction}How satisfied are you with the recommender system you recently interacted with?
### Instructions:
1. Rating: Provide a rating from 1 to 10.
2. Explanation: Explain the reason for your rating.

### Response Format:
- RATING: [integer between 1 and 10]
- REASON: [detailed explanation]""")

THOUGHT_ID = PromptTemplate("THOUGHT_ID", """{persona}
{context}HISTORY:
{history}
ITEM: {item}
DESCRIPTION: {description}
GIVEN_RATING: {rating}

Explain why this rating aligns with the persona and the history above. Ground the explanation
in concrete attributes of the item (genre, brand, price, description) rather than generic statements.
Reply with one line: RATIONALE: <explanation>""")

THOUGHT_TA = PromptTemplate("THOUGHT_TA", """{persona}
{context}HISTORY:
{history}
STATE:
{state}
TAKEN_ACTION: {action}
TAKEN_ITEM: {item}
ALTERNATIVES:
{alternatives}

Write a brief rationale that explains (i) why the taken action is preferred over the alternatives
and (ii) how it aligns with the persona and the history. """ + GROUNDING_INSTRUCTION + """
Reply with one line: RATIONALE: <explanation>""")

TEMPLATES: Dict[str, PromptTemplate] = {
    "persona": PERSONA,
    "score": SCORE,
    "appraise": APPRAISE,
    "internal": INTERNAL,
    "act": ACT,
    "reflect": REFLECT,
    "rate": RATE,
    "classify": CLASSIFY,
    "schedule": SCHEDULE,
    "summarize": SUMMARIZE,
    "goal": GOAL,
    "interview": INTERVIEW,
    "thought_id": THOUGHT_ID,
    "thought_ta": THOUGHT_TA,
}
