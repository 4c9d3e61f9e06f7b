"""Rationale corpora for fine-tuning the policy model."""

from thoughts.build import build_id_records, build_ta_records, reconstruct_sources
from thoughts.export import export_jsonl, load_records
from thoughts.records import ThoughtInputs, ThoughtRecord
