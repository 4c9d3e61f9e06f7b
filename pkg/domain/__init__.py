"""Shared vocabulary of simulator types."""

from domain.actions import (Action, ClickItem, Exit, NextPage, PrevPage, Rate, Search,
                            WebClick, WebInput, WebTerminate, action_type, is_purchase_id,
                            is_terminal)
from domain.types import (BigFive, ConstraintContext, ContextVector, EmotionalState,
                          EpisodicRecord, InteractionRecord, Item, Persona, SessionState,
                          SituationalContext, TemporalContext, Trajectory, TrajectoryStep)
from domain.validation import Violation, validate
