"""Readers for interaction files, item catalogs and MovieLens user tables."""

import json
import os
from dataclasses import dataclass, field, replace
from typing import Dict, Iterable, List, Optional, Set, Tuple

import audit.logger as audit
from domain.errors import ParseFailure
from domain.types import InteractionRecord, Item

# MovieLens-1M age buckets mapped to a representative age in years.
ML_AGE_BUCKETS = {1: 16, 18: 21, 25: 30, 35: 40, 45: 47, 50: 53, 56: 60}

ML_OCCUPATIONS = {
    0: "other", 1: "academic/educator", 2: "artist", 3: "clerical/admin",
    4: "college/grad student", 5: "customer service", 6: "doctor/health care",
    7: "executive/managerial", 8: "farmer", 9: "homemaker", 10: "K-12 student",
    11: "lawyer", 12: "programmer", 13: "retired", 14: "sales/marketing",
    15: "scientist", 16: "self-employed", 17: "technician/engineer",
    18: "tradesman/craftsman", 19: "unemployed", 20: "writer",
}


@dataclass
class Dataset:
    """Interactions restricted to catalog items, plus the user set."""
    interactions: List[InteractionRecord]
    catalog: Dict[str, Item]
    users: Set[str] = field(default_factory=set)


@dataclass(frozen=True)
class Demographics:
    age: int
    occupation: str


def _read_lines(path: str) -> List[str]:
    try:
        with open(path, encoding="utf-8") as f:
            return f.read().splitlines()
    except UnicodeDecodeError:
        with open(path, encoding="latin-1") as f:
            return f.read().splitlines()


def _parse_rating(raw: str) -> Optional[int]:
    value = float(raw)
    if value != int(value) or not 1 <= value <= 5:
        return None
    return int(value)


def read_interactions(path: str, delimiter: str = "::") -> Tuple[List[InteractionRecord], int]:
    """
    Parse ``user, item, rating, timestamp`` rows.

    Returns:
        (records in file order, malformed row count)

    Raises:
        FileNotFoundError: path does not exist
        ParseFailure: the file has rows but none of them parse
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    records, malformed = [], 0
    for line in _read_lines(path):
        if not line.strip():
            continue
        fields = [f.strip() for f in line.split(delimiter)]
        try:
            if len(fields) < 4 or not fields[0] or not fields[1]:
                raise ValueError("short row")
            rating = _parse_rating(fields[2])
            if rating is None:
                raise ValueError("rating out of range")
            timestamp = int(float(fields[3]))
        except ValueError:
            malformed += 1
            continue
        records.append(InteractionRecord(user_id=fields[0], item_id=fields[1], rating=rating,
                                         timestamp=timestamp, kind="rate"))
    if malformed and not records:
        raise ParseFailure(f"{path}: all {malformed} rows are malformed")
    return records, malformed


def load_interactions(path: str, delimiter: str = "::") -> List[InteractionRecord]:
    """Records in file order; malformed rows are skipped and reported."""
    records, malformed = read_interactions(path, delimiter)
    if malformed:
        audit.warn(f"malformed_rows={malformed} file={os.path.basename(path)}")
        print(f"WARNING: skipped {malformed} malformed rows in {path}")
    return records


def _item_from_json(row: dict) -> Item:
    price = row.get("price")
    return Item(item_id=str(row["item_id"]), title=str(row["title"]),
                description=str(row.get("description") or ""),
                categories=tuple(str(c) for c in row.get("categories") or ()),
                brand=row.get("brand") or None,
                price=None if price is None else float(price),
                stat_count=int(row.get("stat_count") or 0),
                stat_mean_rating=row.get("stat_mean_rating"))


def _item_from_fields(fields: List[str]) -> Item:
    # id, title, categories ("|"-separated)[, description[, brand[, price]]]
    categories = tuple(c for c in fields[2].split("|") if c) if len(fields) > 2 else ()
    description = fields[3] if len(fields) > 3 else ""
    brand = fields[4] if len(fields) > 4 and fields[4] else None
    price = float(fields[5]) if len(fields) > 5 and fields[5] else None
    return Item(item_id=fields[0], title=fields[1], description=description,
                categories=categories, brand=brand, price=price)


def load_catalog(path: str, delimiter: str = "::") -> Dict[str, Item]:
    """
    Read items from line-JSON or a delimited file (MovieLens ``movies.dat`` layout).

    Raises:
        FileNotFoundError: path does not exist
        ParseFailure: no row parses
    """
    if not os.path.exists(path):
        raise FileNotFoundError(path)
    catalog, malformed = {}, 0
    for line in _read_lines(path):
        if not line.strip():
            continue
        try:
            if line.lstrip().startswith("{"):
                item = _item_from_json(json.loads(line))
            else:
                fields = [f.strip() for f in line.split(delimiter)]
                if len(fields) < 2 or not fields[0] or not fields[1]:
                    raise ValueError("short row")
                item = _item_from_fields(fields)
        except (ValueError, KeyError, TypeError):
            malformed += 1
            continue
        catalog[item.item_id] = item
    if malformed:
        audit.warn(f"malformed_items={malformed} file={os.path.basename(path)}")
        if not catalog:
            raise ParseFailure(f"{path}: all {malformed} catalog rows are malformed")
    return catalog


def load_users(path: str, delimiter: str = "::") -> Dict[str, Demographics]:
    """MovieLens ``users.dat``: UserID::Gender::Age::Occupation::Zip."""
    users = {}
    for line in _read_lines(path):
        fields = [f.strip() for f in line.split(delimiter)]
        if len(fields) < 4:
            continue
        try:
            age = ML_AGE_BUCKETS.get(int(fields[2]), int(fields[2]))
            occupation = ML_OCCUPATIONS.get(int(fields[3]), "other")
        except ValueError:
            continue
        users[fields[0]] = Demographics(age=max(13, min(100, age)), occupation=occupation)
    return users


def attach_stats(catalog: Dict[str, Item], records: Iterable[InteractionRecord]) -> Dict[str, Item]:
    """Copy of ``catalog`` with interaction counts and mean ratings from ``records``."""
    counts: Dict[str, int] = {}
    sums: Dict[str, float] = {}
    rated: Dict[str, int] = {}
    for r in records:
        counts[r.item_id] = counts.get(r.item_id, 0) + 1
        if r.rating is not None:
            sums[r.item_id] = sums.get(r.item_id, 0.0) + r.rating
            rated[r.item_id] = rated.get(r.item_id, 0) + 1
    out = {}
    for item_id, item in catalog.items():
        n = counts.get(item_id, 0)
        mean = sums[item_id] / rated[item_id] if n and rated.get(item_id) else None
        if n and mean is None:  # only unrated interactions: scale midpoint
            mean = 3.0
        out[item_id] = replace(item, stat_count=n, stat_mean_rating=mean)
    return out


def build_dataset(records: List[InteractionRecord], catalog: Dict[str, Item]) -> Dataset:
    """Drop interactions on unknown items; users are those left with >= 1 interaction."""
    kept = [r for r in records if r.item_id in catalog]
    dropped = len(records) - len(kept)
    if dropped:
        audit.warn(f"interactions_without_item={dropped}")
    return Dataset(interactions=kept, catalog=catalog, users={r.user_id for r in kept})
