"""Line-oriented JSON serialization for domain values.

Dataclasses are encoded field by field; actions carry a ``"type"`` tag so
the union can be restored. Decoding is driven by the dataclass type hints,
which restores tuples, nested values and optional fields.
"""

import json
import os
from dataclasses import fields, is_dataclass
from typing import Any, Dict, Iterable, Iterator, List, Type, TypeVar, Union, get_args, get_origin, get_type_hints

from domain.actions import ACTION_TYPES
from domain.errors import IOFailure, ParseFailure

T = TypeVar("T")


def to_dict(value: Any) -> Any:
    """Encode a domain value (or container of them) into plain JSON data."""
    if is_dataclass(value) and not isinstance(value, type):
        data = {}
        if type(value).__name__ in ACTION_TYPES:
            data["type"] = type(value).__name__
        for f in fields(value):
            data[f.name] = to_dict(getattr(value, f.name))
        return data
    if isinstance(value, (list, tuple)):
        return [to_dict(v) for v in value]
    if isinstance(value, dict):
        return {str(k): to_dict(v) for k, v in value.items()}
    return value


def action_from_dict(data: Dict[str, Any]):
    kind = data.get("type")
    cls = ACTION_TYPES.get(kind)
    if cls is None:
        raise ParseFailure(f"unknown action type: {kind!r}")
    return from_dict(cls, {k: v for k, v in data.items() if k != "type"})


def _is_action_union(hint) -> bool:
    args = [a for a in get_args(hint) if a is not type(None)]
    return bool(args) and all(a in ACTION_TYPES.values() for a in args)


def _decode(hint, data):
    if data is None:
        return None
    origin = get_origin(hint)
    if origin is Union:
        if _is_action_union(hint):
            return action_from_dict(data)
        inner = [a for a in get_args(hint) if a is not type(None)]
        return _decode(inner[0], data)
    if origin is tuple:
        args = get_args(hint)
        if len(args) == 2 and args[1] is Ellipsis:
            return tuple(_decode(args[0], d) for d in data)
        return tuple(_decode(a, d) for a, d in zip(args, data))
    if origin is dict:
        _, value_hint = get_args(hint)
        return {k: _decode(value_hint, v) for k, v in data.items()}
    if is_dataclass(hint):
        return from_dict(hint, data)
    if hint is float and isinstance(data, int):
        return float(data)
    return data


def from_dict(cls: Type[T], data: Dict[str, Any]) -> T:
    """Decode ``data`` produced by ``to_dict`` back into an instance of ``cls``."""
    if not isinstance(data, dict):
        raise ParseFailure(f"{cls.__name__}: expected an object, got {type(data).__name__}")
    hints = get_type_hints(cls)
    kwargs = {}
    for f in fields(cls):
        if f.name in data:
            kwargs[f.name] = _decode(hints[f.name], data[f.name])
    try:
        return cls(**kwargs)
    except TypeError as e:
        raise ParseFailure(f"{cls.__name__}: {e}") from e


def dumps(value: Any) -> str:
    """One canonical JSON line (sorted keys, no trailing newline)."""
    return json.dumps(to_dict(value), sort_keys=True, ensure_ascii=False)


def dump_jsonl(values: Iterable[Any], path: str) -> int:
    """Write one object per line; returns the count written."""
    count = 0
    try:
        parent = os.path.dirname(path)
        if parent:
            os.makedirs(parent, exist_ok=True)
        with open(path, "w", encoding="utf-8") as f:
            for value in values:
                f.write(dumps(value) + "\n")
                count += 1
    except OSError as e:
        raise IOFailure(f"cannot write {path}: {e}") from e
    return count


def iter_jsonl(path: str) -> Iterator[Dict[str, Any]]:
    with open(path, encoding="utf-8") as f:
        for lineno, line in enumerate(f, 1):
            line = line.strip()
            if not line:
                continue
            try:
                yield json.loads(line)
            except json.JSONDecodeError as e:
                raise ParseFailure(f"{path}:{lineno}: {e}") from e


def load_jsonl(cls: Type[T], path: str) -> List[T]:
    return [from_dict(cls, data) for data in iter_jsonl(path)]
