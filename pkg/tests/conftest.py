"""Shared fixtures: a tiny movie catalog, a persona, histories and the scripted backend."""

import os
import sys

import pytest

PROJECT_ROOT = os.path.dirname(os.path.dirname(os.path.abspath(__file__)))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import registry  # noqa: E402,F401
import audit.logger as audit  # noqa: E402
from backend.scripted import ScriptedBackend  # noqa: E402
from domain.types import (BigFive, ConstraintContext, ContextVector, InteractionRecord, Item,  # noqa: E402
                          Persona, SituationalContext, TemporalContext)
from settings import load_config  # noqa: E402

FIXTURES = os.path.join(os.path.dirname(os.path.abspath(__file__)), "fixtures")

MOVIES = [
    ("1", "Heat", ("Action", "Crime")),
    ("2", "Toy Story", ("Animation", "Comedy")),
    ("3", "Casablanca", ("Drama", "Romance")),
    ("4", "Alien", ("Horror", "Sci-Fi")),
    ("5", "Annie Hall", ("Comedy", "Romance")),
    ("6", "The Godfather", ("Crime", "Drama")),
    ("7", "Airplane", ("Comedy",)),
    ("8", "Psycho", ("Horror", "Thriller")),
    ("9", "Amelie", ("Comedy", "Romance")),
    ("10", "Gladiator", ("Action", "Drama")),
    ("11", "Notting Hill", ("Comedy", "Romance")),
    ("12", "Scream", ("Horror",)),
]


def fixture_path(*parts) -> str:
    return os.path.join(FIXTURES, *parts)


@pytest.fixture(autouse=True)
def quiet_audit():
    """No test writes to an audit log unless it configures one."""
    audit.configure(None)
    yield
    audit.configure(None)


@pytest.fixture
def catalog():
    return {item_id: Item(item_id=item_id, title=title, description=f"{title}, a classic.",
                          categories=genres, stat_count=13 - int(item_id),
                          stat_mean_rating=3.5)
            for item_id, title, genres in MOVIES}


@pytest.fixture
def persona():
    return Persona(agent_id="1", age=31, occupation="software engineer",
                   traits=BigFive(openness=3, conscientiousness=2, extraversion=2,
                                  agreeableness=2, neuroticism=1),
                   habits=("engagement=high", "conformity=medium", "variety=medium"),
                   recent_goals=("find a good comedy",),
                   preferences="Comedy, Romance")


@pytest.fixture
def history():
    ratings = {"2": 4, "5": 5, "7": 4, "3": 3, "4": 1}
    return [InteractionRecord(user_id="1", item_id=item_id, rating=rating, timestamp=100 + n)
            for n, (item_id, rating) in enumerate(ratings.items())]


@pytest.fixture
def backend():
    return ScriptedBackend()


@pytest.fixture
def evening_context():
    return ContextVector(
        c_t=TemporalContext(minute_of_day=19 * 60 + 30, day_of_week=4),
        c_l="home",
        c_s=SituationalContext(latest_activity="dinner at home", mood="relaxed",
                               need_level=0.5, energy_level=0.25),
        c_g="unwind",
        c_b=ConstraintContext(budget=12.5, time_available_minutes=90),
    )


@pytest.fixture
def config(tmp_path):
    return load_config(overrides={"seed": 7, "out_dir": str(tmp_path / "run"), "workers": 1,
                                  "agent.sessions_per_agent": 1, "agent.max_steps": 8,
                                  "lifesim.horizon_days": 2, "env.page_size": 4})
