import json

import pytest

from domain.errors import ParseFailure
from domain.types import InteractionRecord, Item
from ingest.loader import attach_stats, build_dataset, load_catalog, load_users, read_interactions
from ingest.split import by_user, filter_min_interactions, read_split, temporal_split, write_split


def _records(n, users=5, items=7):
    return [InteractionRecord(user_id=str(k % users), item_id=str(k % items), rating=1 + k % 5,
                              timestamp=1000 - k) for k in range(n)]


def test_split_sizes_and_order():
    split = temporal_split(_records(100))
    assert split.sizes() == (80, 10, 10)
    assert max(r.timestamp for r in split.train) <= min(r.timestamp for r in split.validation)
    assert max(r.timestamp for r in split.validation) <= min(r.timestamp for r in split.test)


def test_split_uses_floor_for_small_inputs():
    assert temporal_split(_records(7)).sizes() == (5, 0, 2)
    assert temporal_split([]).sizes() == (0, 0, 0)


def test_split_partitions_input():
    records = _records(53)
    split = temporal_split(records)
    every = split.train + split.validation + split.test
    assert len(every) == len(records)
    assert sorted(every, key=lambda r: (r.timestamp, r.user_id)) == \
        sorted(records, key=lambda r: (r.timestamp, r.user_id))


def test_split_ties_break_by_user_then_item():
    records = [InteractionRecord("2", "1", 3, 5), InteractionRecord("1", "9", 3, 5),
               InteractionRecord("1", "10", 3, 5)]
    ordered = temporal_split(records, 1.0, 0.0, 0.0).train
    assert [(r.user_id, r.item_id) for r in ordered] == [("1", "9"), ("1", "10"), ("2", "1")]


def test_split_fractions_must_sum_to_one():
    with pytest.raises(ValueError):
        temporal_split(_records(10), 0.5, 0.1, 0.1)


def test_filter_reaches_fixpoint():
    # user c and item z fall below k=2; dropping them leaves item y with one interaction
    records = [InteractionRecord(u, i, 4, t) for t, (u, i) in enumerate(
        [("a", "x"), ("a", "x"), ("b", "x"), ("b", "y"), ("c", "y"), ("a", "z")])]
    kept = filter_min_interactions(records, 2)
    assert {(r.user_id, r.item_id) for r in kept} == {("a", "x")}
    assert filter_min_interactions(kept, 2) == kept


def test_split_files_round_trip(tmp_path):
    split = temporal_split(_records(20))
    stats = write_split(split, str(tmp_path))
    assert stats["counts"]["total"] == 20
    assert json.loads((tmp_path / "stats.json").read_text())["counts"]["train"] == 16
    assert read_split(str(tmp_path)).sizes() == split.sizes()


def test_read_interactions_counts_malformed_rows(tmp_path):
    path = tmp_path / "ratings.dat"
    path.write_text("1::10::5::978300760\n1::11::7::978300761\nbroken\n2::10::3::978300762\n")
    records, malformed = read_interactions(str(path))
    assert malformed == 2
    assert [(r.user_id, r.item_id, r.rating) for r in records] == [("1", "10", 5), ("2", "10", 3)]


def test_read_interactions_all_malformed(tmp_path):
    path = tmp_path / "ratings.dat"
    path.write_text("nothing here\n")
    with pytest.raises(ParseFailure):
        read_interactions(str(path))


def test_read_interactions_missing_file(tmp_path):
    with pytest.raises(FileNotFoundError):
        read_interactions(str(tmp_path / "missing.dat"))


def test_load_catalog_movielens_and_json(tmp_path):
    movies = tmp_path / "movies.dat"
    movies.write_text("1::Toy Story (1995)::Animation|Children's|Comedy\n")
    catalog = load_catalog(str(movies))
    assert catalog["1"].categories == ("Animation", "Children's", "Comedy")

    products = tmp_path / "products.jsonl"
    products.write_text(json.dumps({"item_id": 5, "title": "Kettle", "categories": ["Kitchen"],
                                    "brand": "Acme", "price": 19.5}) + "\n")
    item = load_catalog(str(products))["5"]
    assert (item.brand, item.price, item.labels()) == ("Acme", 19.5, ("Kitchen", "Acme"))


def test_load_users_maps_movielens_codes(tmp_path):
    users = tmp_path / "users.dat"
    users.write_text("1::F::1::10::48067\n2::M::56::16::70072\n")
    demographics = load_users(str(users))
    assert demographics["1"].age == 16
    assert demographics["2"].age == 60


def test_attach_stats_and_dataset():
    catalog = {"1": Item("1", "A"), "2": Item("2", "B")}
    records = [InteractionRecord("u", "1", 4, 1), InteractionRecord("v", "1", 2, 2),
               InteractionRecord("u", "3", 5, 3)]
    dataset = build_dataset(records, catalog)
    assert len(dataset.interactions) == 2
    stats = attach_stats(catalog, dataset.interactions)
    assert (stats["1"].stat_count, stats["1"].stat_mean_rating) == (2, 3.0)
    assert (stats["2"].stat_count, stats["2"].stat_mean_rating) == (0, None)


def test_by_user_orders_by_time():
    groups = by_user(_records(10, users=2))
    assert [r.timestamp for r in groups["0"]] == sorted(r.timestamp for r in groups["0"])
