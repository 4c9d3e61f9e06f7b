"""Simulated users: policy steps, the session loop and population runs."""

from agent.bundle import AgentBundle, build_bundle
from agent.policy import (Intention, appraise_page, classify_interacted, infer_internal_state,
                          post_interview, rate_item, reflect, select_action)
from agent.session import run_session
