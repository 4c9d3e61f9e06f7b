"""Extraction of ``FIELD: value`` lines from model output."""

import re
from typing import Dict, List, Optional, Tuple

from domain.errors import FieldMissing

RESPONSE_FIELDS = ("RATING", "REASON", "ACTION", "THOUGHT", "INTENTIONS",
                   "FATIGUE", "CURIOSITY", "BOREDOM")

_LIST_MARKER = r"(?:[-*•]\s*|\d+[.)]\s*)?"


def parse_tagged_field(text: str, field_name: str) -> str:
    """
    Return the value of the first ``FIELD: value`` line, case-insensitively.

    A leading list marker (``-``, ``*``, ``1.``) and surrounding markdown bold
    are tolerated. Numeric range checks are left to the caller.

    Raises:
        FieldMissing: no such line exists
    """
    pattern = re.compile(
        rf"^\s*{_LIST_MARKER}\**\s*{re.escape(field_name)}\s*\**\s*:\s*\**\s*(.*?)\s*$",
        re.IGNORECASE | re.MULTILINE)
    match = pattern.search(text or "")
    if not match:
        raise FieldMissing(field_name)
    return match.group(1).strip()


def optional_field(text: str, field_name: str) -> Optional[str]:
    try:
        return parse_tagged_field(text, field_name)
    except FieldMissing:
        return None


def parse_int(text: str, field_name: str) -> int:
    """Leading integer of a field value (``"7/10"`` and ``"7."`` give 7)."""
    raw = parse_tagged_field(text, field_name)
    match = re.match(r"[-+]?\d+", raw)
    if not match:
        raise FieldMissing(field_name)
    return int(match.group(0))


def parse_float(text: str, field_name: str) -> float:
    raw = parse_tagged_field(text, field_name)
    match = re.match(r"[-+]?\d*\.?\d+", raw)
    if not match:
        raise FieldMissing(field_name)
    return float(match.group(0))


def parse_pairs(value: str) -> List[Tuple[str, str]]:
    """Split ``"a=x, b=y"`` into ``[("a", "x"), ("b", "y")]``."""
    pairs = []
    for chunk in value.split(","):
        key, sep, val = chunk.partition("=")
        if sep and key.strip():
            pairs.append((key.strip(), val.strip()))
    return pairs


def pairs_dict(value: str) -> Dict[str, str]:
    return {k.lower(): v for k, v in parse_pairs(value)}


def parse_block(text: str, header: str) -> List[str]:
    """Return the ``- ...`` lines that follow a ``HEADER:`` line."""
    lines = (text or "").splitlines()
    out = []
    inside = False
    for line in lines:
        stripped = line.strip()
        if not inside:
            if stripped.upper() == f"{header.upper()}:":
                inside = True
            continue
        if stripped.startswith("- "):
            out.append(stripped[2:].strip())
        elif stripped:
            break
    return out
