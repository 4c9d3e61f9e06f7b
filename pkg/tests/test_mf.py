import numpy as np
import pytest

import registry
from domain.errors import ConfigError, EmptyTraining
from domain.types import InteractionRecord
from env.mf import fit_triples, rmse_on, sample_gradients, sample_loss, train_mf
from strategies.external import load_rankings

TRIPLES = [("a", "x", 5.0), ("a", "y", 1.0), ("b", "x", 4.0), ("b", "z", 2.0), ("c", "y", 3.0)]


def _numeric(model, u, i, r, reg, array, index, eps=1e-6):
    original = array[index]
    array[index] = original + eps
    up = sample_loss(model, u, i, r, reg)
    array[index] = original - eps
    down = sample_loss(model, u, i, r, reg)
    array[index] = original
    return (up - down) / (2 * eps)


def test_gradients_match_finite_differences():
    model = fit_triples(TRIPLES, dim=3, epochs=0, seed=4, init_std=0.5)
    model.user_bias[:] = [0.3, -0.2, 0.1]
    model.item_bias[:] = [0.4, -0.1, 0.2]
    u, i, r, reg = 0, 1, 1.0, 0.05
    g_bu, g_bi, g_p, g_q = sample_gradients(model, u, i, r, reg)
    assert g_bu == pytest.approx(_numeric(model, u, i, r, reg, model.user_bias, u), abs=1e-6)
    assert g_bi == pytest.approx(_numeric(model, u, i, r, reg, model.item_bias, i), abs=1e-6)
    for k in range(3):
        assert g_p[k] == pytest.approx(_numeric(model, u, i, r, reg, model.user_factors, (u, k)), abs=1e-6)
        assert g_q[k] == pytest.approx(_numeric(model, u, i, r, reg, model.item_factors, (i, k)), abs=1e-6)


def test_training_needs_ratings():
    with pytest.raises(EmptyTraining):
        fit_triples([])
    with pytest.raises(EmptyTraining):
        train_mf([InteractionRecord("a", "x", None, 1, kind="view")])


def test_predictions_are_clamped():
    model = fit_triples([("a", "x", 5.0), ("a", "y", 5.0)], dim=2, epochs=0)
    model.user_bias[0] = 3.0
    assert model.predict("a", "x") == 5.0
    model.user_bias[0] = -9.0
    assert model.predict("a", "x") == 1.0
    assert model.predict("stranger", "unknown") == 5.0


def test_fit_is_seeded():
    first = fit_triples(TRIPLES, dim=4, epochs=5, seed=1)
    second = fit_triples(TRIPLES, dim=4, epochs=5, seed=1)
    assert np.array_equal(first.user_factors, second.user_factors)
    assert first.raw("a", "x") == second.raw("a", "x")


def test_training_lowers_error():
    before = rmse_on(fit_triples(TRIPLES, dim=2, epochs=0, seed=2), TRIPLES)
    after = rmse_on(fit_triples(TRIPLES, dim=2, epochs=200, learning_rate=0.05, seed=2), TRIPLES)
    assert after < before


@pytest.mark.slow
def test_recovers_planted_structure():
    rng = np.random.default_rng(0)
    n_users, n_items = 30, 40
    user_bias = rng.normal(0, 0.5, n_users)
    item_bias = rng.normal(0, 0.5, n_items)
    p = rng.normal(0, 0.6, (n_users, 2))
    q = rng.normal(0, 0.6, (n_items, 2))
    triples = []
    for u in range(n_users):
        for i in rng.choice(n_items, size=20, replace=False):
            value = 3.0 + user_bias[u] + item_bias[i] + p[u] @ q[i]
            triples.append((f"u{u}", f"i{i}", float(np.clip(value, 1.0, 5.0))))
    mean = np.mean([t[2] for t in triples])
    baseline = float(np.sqrt(np.mean([(t[2] - mean) ** 2 for t in triples])))
    model = fit_triples(triples, dim=4, learning_rate=0.02, epochs=100, reg=0.01, seed=3)
    assert rmse_on(model, triples) < 0.5 * baseline


def test_mf_strategy_ranks_by_prediction(catalog):
    model = fit_triples([("1", "3", 5.0), ("1", "8", 1.0), ("2", "5", 3.0)], dim=2, epochs=0)
    model.item_bias[model.item_index["3"]] = 1.0
    model.item_bias[model.item_index["8"]] = -1.0
    model.user_factors[:] = 0.0
    ranking = registry.create("mf", catalog, model=model).rank("1", 0)
    assert ranking[0] == "3" and ranking[-1] == "8"
    with pytest.raises(ConfigError):
        registry.create("mf", catalog)


def test_external_strategy_lists_user_items_first(catalog, tmp_path):
    path = tmp_path / "rankings.jsonl"
    path.write_text('{"user_id": 1, "items": [12, 404, 3, 12]}\n')
    strategy = registry.create("external", catalog, rankings=load_rankings(str(path)))
    ranking = strategy.rank("1", 0)
    assert ranking[:3] == ["12", "3", "1"]
    assert sorted(ranking) == sorted(catalog)
    with pytest.raises(ConfigError):
        registry.create("unknown", catalog)
