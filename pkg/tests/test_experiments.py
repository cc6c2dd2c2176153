import json

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from phireg.bruns import build_game, enumerate_144
from phireg.dynamics import IntegratorConfig, rd_vector_field
from phireg.experiments import (
    AggregateStats,
    ExperimentConfig,
    ExperimentFailure,
    child_rng,
    equilibria_2x2,
    field_grid,
    read_csv,
    run_counterexamples,
    run_fig5b_fields,
    run_fig6,
    run_fig7_game,
    sample_interior,
    tangential_components,
    write_fig5b,
    write_fig6,
)
from phireg.game import CaseClass, ContractViolation, Game, classify_case

SHORT = IntegratorConfig(T=20.0)


def test_config_roundtrip(tmp_path):
    cfg = ExperimentConfig(experiment="fig7", trials=3, seed=11, integrator=IntegratorConfig(T=50))
    path = tmp_path / "c.json"
    path.write_text(json.dumps(cfg.to_dict()))
    assert ExperimentConfig.load(path) == cfg


def test_config_rejects_bad_input():
    with pytest.raises(ContractViolation):
        ExperimentConfig.from_dict({"experiment": "fig6", "colour": "red"})
    with pytest.raises(ContractViolation):
        ExperimentConfig.from_dict({"integrator": {"dt": 1e-3, "order": 4}})
    with pytest.raises(ContractViolation):
        ExperimentConfig(trials=0)
    with pytest.raises(ContractViolation):
        ExperimentConfig(experiment="fig9")


@given(st.integers(0, 2**32), st.integers(2, 5))
def test_interior_samples(seed, n):
    p = sample_interior(child_rng(seed, 0, 0), n)
    assert abs(p.sum() - 1) < 1e-12
    assert p.min() >= 0.01 / (1 + 0.01 * n) - 1e-15
    if n == 2:
        assert 0.01 <= p[0] <= 0.99


def test_streams_depend_only_on_key():
    a = child_rng(5, 3, 1).random(4)
    child_rng(5, 0, 0).random(100)
    assert np.array_equal(a, child_rng(5, 3, 1).random(4))
    assert not np.array_equal(a, child_rng(5, 1, 3).random(4))


def test_aggregate_half_width():
    s = np.array([[1.0, 2.0], [3.0, 2.0], [5.0, 2.0]])
    agg = AggregateStats.from_runs([1, 2], s)
    assert agg.mean.tolist() == [3.0, 2.0]
    assert agg.half_width[0] == pytest.approx(1.96 * 2.0 / np.sqrt(3))
    assert agg.half_width[1] == 0.0
    assert AggregateStats.from_runs([1, 2], s[:1]).half_width.tolist() == [0.0, 0.0]


@pytest.fixture(scope="module")
def small_fig6():
    cfg = ExperimentConfig(trials=3, integrator=SHORT, checkpoints=10)
    return cfg, run_fig6(cfg, enumerate_144()[:4])


def test_pooled_mean_is_weighted_per_game_mean(small_fig6):
    _, res = small_fig6
    per_game = res.per_game()
    weighted = sum(s.mean * s.n for s in per_game.values()) / sum(s.n for s in per_game.values())
    assert np.allclose(res.pooled.mean, weighted, rtol=1e-13, atol=0)
    assert len(res.pooled.mean) == len(next(iter(per_game.values())).mean)
    assert (res.pooled.half_width >= 0).all()


def test_fig6_outputs(small_fig6, tmp_path):
    cfg, res = small_fig6
    write_fig6(res, cfg, tmp_path)
    rows = read_csv(tmp_path / "fig6_regret.csv")
    assert len(rows) == 12
    assert list(rows[0]) == ["game_id", "trial", "T", "external", "internal", "swap", "mosaic"]
    raw = read_csv(tmp_path / "fig6_regret_raw.csv")
    assert float(raw[0]["mosaic"]) == pytest.approx(3 * float(rows[0]["mosaic"]))
    series = read_csv(tmp_path / "fig6_series.csv")
    assert len(series) == 12 * 10
    head = (tmp_path / "fig6_pooled.csv").read_text().splitlines()[:2]
    assert head[0].startswith("# config: ") and json.loads(head[0][10:])["trials"] == 3
    assert head[1].startswith("# version: phireg")


def test_fig6_aborts_fail_the_run():
    huge = Game([[1e308, -1e308], [-1e308, 1e308]], [[-1e308, 1e308], [1e308, -1e308]])
    cfg = ExperimentConfig(trials=2, integrator=IntegratorConfig(T=5.0))
    with pytest.raises(ExperimentFailure):
        run_fig6(cfg, [("Huge", huge)])


def test_worker_pool_matches_serial(monkeypatch):
    cfg = ExperimentConfig(trials=2, integrator=IntegratorConfig(T=5.0), checkpoints=5)
    games = enumerate_144()[10:13]
    monkeypatch.setenv("PHIREG_THREADS", "1")
    serial = run_fig6(cfg, games)
    monkeypatch.setenv("PHIREG_THREADS", "2")
    pooled = run_fig6(cfg, games)
    assert [r.raw for r in serial.runs] == [r.raw for r in pooled.runs]


def test_fig7_game_small():
    cfg = ExperimentConfig(experiment="fig7", integrator=IntegratorConfig(T=100.0))
    res = run_fig7_game("A2", [[0, -1, 2], [1, 0, -1], [-2, 1, 0]], cfg)
    assert np.allclose(res.y_star, [0.25, 0.5, 0.25])
    assert res.sample_count > 0 and res.eps == pytest.approx(0.02 * res.reference * 2 ** (res.attempts - 1))
    assert res.final.sum() == pytest.approx(1.0)


def test_field_grid_and_equilibria():
    g = build_game(("Ba", "As"))
    grid = field_grid(g)
    assert grid.shape == (441, 4)
    for _, x, y in equilibria_2x2(g):
        dx, dy = rd_vector_field(g, x, y)
        assert max(abs(dx).max(), abs(dy).max()) < 1e-9


def test_case_one_circulation():
    for gid, g in enumerate_144():
        if classify_case(g) != CaseClass.NO_PURE_NE:
            continue
        (_, x, y), = [e for e in equilibria_2x2(g) if e[0] == "interior"]
        tang = tangential_components(g, (x[0], y[0]), half=min(0.02, x[0] / 2, y[0] / 2, (1 - x[0]) / 2, (1 - y[0]) / 2))
        assert (tang > 0).all() or (tang < 0).all(), gid


def test_fig5b_outputs(tmp_path):
    cfg = ExperimentConfig(experiment="fig5b")
    res = run_fig5b_fields(cfg)
    paths = write_fig5b(res, cfg, tmp_path)
    assert len(read_csv(tmp_path / "fig5b_fields.csv")) == 144 * 441
    eq = read_csv(tmp_path / "fig5b_equilibria.csv")
    assert max(float(r["field_norm"]) for r in eq) < 1e-9
    assert {r["kind"] for r in eq} == {"pure", "interior"}
    svg = (tmp_path / "fig5b" / "BaxAs.svg").read_text()
    assert "<svg" in svg and 'fill="red"' in svg
    assert len([p for p in paths if p.suffix == ".svg"]) == 144


def test_counterexamples_small():
    cfg = ExperimentConfig(experiment="counterexamples", epochs=20, integrator=IntegratorConfig(T=50.0))
    res = run_counterexamples(cfg)
    assert res.mosaic_slope > 0.1
    assert res.external_slope < 0
    assert res.rps_symmetry_error == 0.0
