import json
import math

import pytest

import audit.logger as audit
import registry
from agent.bundle import build_bundle
from agent.session import run_session
from agent.simulate import effective_mask
from backend.scripted import ScriptedBackend
from domain.errors import ConfigError, IOFailure
from env.environment import RecEnv, SessionSpec
from metrics.log_parser import AuditLogParser
from metrics.report import MetricsReport, load_json, merge_reports, save_report
from metrics.runner import AblationRunner, ablation_run


def _experiment(cfg):
    return MetricsReport(experiment="temporal",
                         metrics={"factors": float(len(cfg.agent.factor_mask)),
                                  "lifesim": float(cfg.lifesim.enabled)},
                         notes=["ok"] if cfg.agent.thoughts_on else [])


def test_resolve_expands_suites(config):
    runner = AblationRunner(config)
    assert [t.name for t in runner.resolve(["components"])] == ["full", "no_lifesim", "no_thoughts"]
    assert [t.name for t in runner.resolve(["factors"])][:2] == ["none", "time_only"]
    assert [t.name for t in runner.resolve(["time_location"])] == ["time_location"]
    with pytest.raises(ConfigError, match="unknown ablation toggle"):
        runner.resolve(["no_memory"])


def test_configure_leaves_base_untouched(config):
    runner = AblationRunner(config)
    lean = runner.configure(AblationRunner.TOGGLES["no_lifesim"])
    assert not lean.lifesim.enabled and lean.agent.factor_mask == []
    quiet = runner.configure(AblationRunner.TOGGLES["no_thoughts"])
    assert not quiet.agent.thoughts_on
    assert config.lifesim.enabled and config.agent.thoughts_on


def test_run_lines_toggles_up(config):
    runner = AblationRunner(config)
    report = runner.run(["components"], _experiment)
    assert report.experiment == "ablation"
    assert report.parameters["experiment"] == "temporal"
    assert report.metrics["full.factors"] == 5.0
    assert report.metrics["no_lifesim.lifesim"] == 0.0
    assert [row["toggle"] for row in report.tables["table"]] == ["full", "no_lifesim", "no_thoughts"]
    assert report.notes == ["full: ok", "no_lifesim: ok"]
    assert len(runner.results) == 3
    assert all(r.execution_time >= 0 for r in runner.results)


def test_failing_toggle_is_logged(config, tmp_path):
    path = tmp_path / "audit.log"
    audit.configure(str(path))

    def broken(cfg):
        raise RuntimeError("backend exploded")

    with pytest.raises(RuntimeError):
        AblationRunner(config).run_toggle(AblationRunner.TOGGLES["full"], broken)
    assert 'FAIL stage=ablation_full error="backend exploded"' in path.read_text()


def test_report_checks_and_files(tmp_path):
    report = MetricsReport("rating", parameters={"seed": 1},
                           metrics={"agent_rmse": 0.5, "bad": math.nan},
                           tables={"pairs": [{"agent": "1", "prediction": 4}]})
    assert report.check(["agent_rmse", "agent_mae"]) == [
        "missing metric agent_mae", "metric bad is not finite: nan"]
    del report.metrics["bad"]
    paths = save_report(report, str(tmp_path))
    assert sorted(p.rsplit("/", 1)[-1] for p in paths) == ["rating.csv", "rating.json",
                                                           "rating_pairs.csv"]
    assert load_json(str(tmp_path / "rating.json")) == report
    assert (tmp_path / "rating.csv").read_text() == "metric,value\nagent_rmse,0.500000\n"
    with pytest.raises(IOFailure):
        load_json(str(tmp_path / "missing.json"))


def test_merge_reports():
    merged = merge_reports([MetricsReport("a", metrics={"x": 1.0}), MetricsReport("b")],
                           {"seed": 3})
    assert sorted(merged["experiments"]) == ["a", "b"]
    assert merged["experiments"]["a"]["metrics"] == {"x": 1.0}
    assert merged["seed"] == 3
    json.dumps(merged)


def test_audit_log_round_trip(tmp_path):
    path = str(tmp_path / "audit.log")
    audit.configure(path)
    with audit.AuditLog("simulate", str(tmp_path)) as run:
        audit.stage_start("simulate")
        audit.session_start("1", "1-d0-s39-0")
        audit.backend_call("scripted", "ACT", True)
        audit.backend_call("http", "ACT", False, "timeout")
        audit.retry(1, 3, "timeout")
        audit.warn("agent=2 skipped")
        audit.session_end("1", "1-d0-s39-0", "exit", 4, forced=True)
        audit.stage_end("simulate", sessions=1)
        run.success = True
    with pytest.raises(ValueError):
        with audit.AuditLog("eval", str(tmp_path)):
            raise ValueError("no trajectories")

    runs = AuditLogParser(path).parse()
    assert [(r.command, r.success) for r in runs] == [("simulate", True), ("eval", False)]
    first = runs[0]
    assert first.stages[0].stage == "simulate" and first.stages[0].counts == {"sessions": "1"}
    assert (first.sessions[0].steps, first.sessions[0].forced) == (4, True)
    assert (first.backend_ok, first.backend_failed) == (1, 1)
    assert first.retry_attempts[0].max_attempts == 3
    assert first.warnings == ["agent=2 skipped"]
    assert runs[1].errors == ["ValueError: no trajectories"]

    summary = AuditLogParser(path).get_summary()
    assert summary["total_runs"] == 2 and summary["failed_runs"] == 1
    assert summary["forced_exits"] == 1 and summary["backend_failures"] == 1
    assert AuditLogParser(str(tmp_path / "none.log")).get_summary() == {"error": "No runs found in log"}


def test_ablation_run_rejects_unknown_toggles(config):
    report = ablation_run(config, ["time_only"], _experiment)
    assert report.metrics == {"time_only.factors": 1.0, "time_only.lifesim": 1.0}
    with pytest.raises(ConfigError):
        ablation_run(config, ["no_memory"], _experiment)


class RecordingBackend(ScriptedBackend):
    def __init__(self):
        super().__init__()
        self.prompts = []

    def complete(self, request):
        self.prompts.append(request.user_text)
        return super().complete(request)


@pytest.mark.parametrize("toggle,shown", [("no_lifesim", False), ("full", True)])
def test_context_block_follows_toggle(toggle, shown, config, persona, history, catalog,
                                      evening_context):
    variant = AblationRunner(config).configure(AblationRunner.TOGGLES[toggle])
    backend = RecordingBackend()
    env = RecEnv(catalog, registry.create("popularity", catalog), page_size=4)
    spec = SessionSpec(user_id="1", seed=3, context=evening_context,
                       exclusions=frozenset(r.item_id for r in history))
    run_session(build_bundle(persona, history, catalog), env, spec, variant.agent, backend,
                "1-d0-s39-0", mask=effective_mask(variant))
    assert backend.prompts
    assert any("CONTEXT:" in prompt for prompt in backend.prompts) == shown
