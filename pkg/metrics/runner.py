#!/usr/bin/env python3
"""Ablation runner: rerun one experiment under configuration toggles."""

import time
from dataclasses import dataclass, field
from typing import Any, Callable, Dict, List, Sequence

import audit.logger as audit
from domain.errors import ConfigError
from metrics.report import MetricsReport
from settings import RunConfig, with_overrides

Experiment = Callable[[RunConfig], MetricsReport]


@dataclass
class Toggle:
    """One configuration variant of an ablation."""
    name: str
    overrides: Dict[str, Any] = field(default_factory=dict)
    description: str = ""


@dataclass
class ToggleResult:
    toggle: Toggle
    report: MetricsReport
    execution_time: float


class AblationRunner:
    """Runs an experiment once per toggle and lines the results up side by side."""

    TOGGLES = {
        "full": Toggle("full", {}, "Life simulation, every context factor, thoughts on"),
        "no_lifesim": Toggle("no_lifesim", {"lifesim.enabled": False, "agent.factor_mask": []},
                             "No life simulation: empty factor mask, uniform engagement times"),
        "no_thoughts": Toggle("no_thoughts", {"agent.thought_mode": "off"},
                              "Actions chosen without a thought"),
        "none": Toggle("none", {"agent.factor_mask": []}, "Life simulation on, no factor shown"),
        "time_only": Toggle("time_only", {"agent.factor_mask": ["c_t"]}, "Time only"),
        "time_location": Toggle("time_location", {"agent.factor_mask": ["c_t", "c_l"]},
                                "Time + Location"),
        "time_location_situation": Toggle("time_location_situation",
                                          {"agent.factor_mask": ["c_t", "c_l", "c_s"]},
                                          "Time + Location + Situation"),
    }

    TEST_SUITES = {
        # component ablation
        "components": ["full", "no_lifesim", "no_thoughts"],
        # context factors added one at a time
        "factors": ["none", "time_only", "time_location", "time_location_situation", "full"],
    }

    def __init__(self, base: RunConfig):
        self.base = base
        self.results: List[ToggleResult] = []

    def resolve(self, names: Sequence[str]) -> List[Toggle]:
        """
        Toggles by name; a suite name expands to its toggles.

        Raises:
            ConfigError: unknown toggle or suite
        """
        toggles = []
        for name in names:
            if name in self.TEST_SUITES:
                toggles += [self.TOGGLES[t] for t in self.TEST_SUITES[name]]
            elif name in self.TOGGLES:
                toggles.append(self.TOGGLES[name])
            else:
                known = sorted(set(self.TOGGLES) | set(self.TEST_SUITES))
                raise ConfigError(f"unknown ablation toggle {name!r}; known: {', '.join(known)}")
        return toggles

    def configure(self, toggle: Toggle) -> RunConfig:
        return with_overrides(self.base, toggle.overrides)

    def run_toggle(self, toggle: Toggle, experiment: Experiment) -> ToggleResult:
        audit.stage_start(f"ablation_{toggle.name}")
        started = time.time()
        try:
            report = experiment(self.configure(toggle))
        except Exception as e:
            audit.stage_end(f"ablation_{toggle.name}", success=False, error=e)
            raise
        result = ToggleResult(toggle, report, time.time() - started)
        audit.stage_end(f"ablation_{toggle.name}", metrics=len(report.metrics))
        self.results.append(result)
        return result

    def run(self, names: Sequence[str], experiment: Experiment) -> MetricsReport:
        """Run ``experiment`` under every named toggle and merge the reports."""
        toggles = self.resolve(names)
        print(f"\nRunning ablation ({len(toggles)} variants)")
        print("=" * 70)
        results = []
        for i, toggle in enumerate(toggles, 1):
            print(f"\n[{i}/{len(toggles)}] {toggle.name}: {toggle.description}")
            result = self.run_toggle(toggle, experiment)
            results.append(result)
            print(f"  done in {result.execution_time:.2f}s")
        return side_by_side(results)


def ablation_run(base: RunConfig, toggles: Sequence[str], experiment: Experiment) -> MetricsReport:
    """
    Rerun ``experiment`` under each toggle (or suite) and report side by side.

    Raises:
        ConfigError: unknown toggle or suite
    """
    return AblationRunner(base).run(toggles, experiment)


def side_by_side(results: Sequence[ToggleResult]) -> MetricsReport:
    """One row per toggle; metric keys become ``<toggle>.<metric>``."""
    experiments = sorted({r.report.experiment for r in results})
    combined = MetricsReport(experiment="ablation",
                             parameters={"toggles": [r.toggle.name for r in results],
                                         "experiment": ",".join(experiments)})
    rows = []
    for r in results:
        row = {"toggle": r.toggle.name}
        for name, value in sorted(r.report.metrics.items()):
            row[name] = value
            combined.metrics[f"{r.toggle.name}.{name}"] = value
        rows.append(row)
        combined.notes += [f"{r.toggle.name}: {note}" for note in r.report.notes]
    combined.tables["table"] = rows
    return combined
