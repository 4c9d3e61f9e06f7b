"""Prompt templates for every model task."""

from prompts.templates import TEMPLATES, PromptTemplate, configure_sampling
from prompts.blocks import context_line, evidence_rows, history_rows, item_rows, persona_block
