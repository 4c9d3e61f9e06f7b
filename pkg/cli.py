#!/usr/bin/env python3
"""
Batch entry point for the user simulator.

Usage:
    python cli.py ingest --config run.yaml
    python cli.py init-personas --config run.yaml
    python cli.py simulate --config run.yaml --seed 7
    python cli.py export-thoughts --config run.yaml
    python cli.py eval temporal --config run.yaml
    python cli.py eval ablation --suite factors --config run.yaml
    python cli.py report --config run.yaml
"""

import argparse
import glob
import hashlib
import json
import os
import sys
from concurrent.futures import ThreadPoolExecutor
from typing import Dict, List, Optional

# Add project root to path
PROJECT_ROOT = os.path.dirname(os.path.abspath(__file__))
if PROJECT_ROOT not in sys.path:
    sys.path.insert(0, PROJECT_ROOT)

import registry  # noqa: E402  (strategies register before the agent imports them)
import audit.logger as audit  # noqa: E402
from agent.simulate import run_population  # noqa: E402
from agent.trajlog import read_trajectories, write_trajectories  # noqa: E402
from backend import make_backend  # noqa: E402
from domain.codec import dump_jsonl, load_jsonl  # noqa: E402
from domain.errors import ConfigError, EmptyInput, IOFailure, SimulationError  # noqa: E402
from domain.types import Item, id_sort_key  # noqa: E402
from env.environment import RecEnv  # noqa: E402
from env.ledger import InteractionLedger  # noqa: E402
from env.mf import train_mf  # noqa: E402
from ingest.loader import attach_stats, build_dataset, load_catalog, load_interactions, load_users  # noqa: E402
from ingest.sessions import load_sessions  # noqa: E402
from ingest.split import by_user, filter_min_interactions, read_split, temporal_split, write_split  # noqa: E402
from lifesim.schedule import SLOT_MINUTES  # noqa: E402
from memory.store import MemorySnapshot, save_snapshots  # noqa: E402
from metrics import experiments  # noqa: E402
from metrics.judge import KINDS, emit_judge_prompts  # noqa: E402
from metrics.log_parser import AuditLogParser, print_summary  # noqa: E402
from metrics.report import MetricsReport, load_json, merge_reports, print_report, save_report  # noqa: E402
from metrics.runner import AblationRunner, ablation_run  # noqa: E402
from persona.inference import infer_persona  # noqa: E402
from persona.store import load_personas, save_personas  # noqa: E402
from prompts.templates import configure_sampling  # noqa: E402
from settings import RunConfig, api_key, derive_seed, load_config, save_config, with_overrides  # noqa: E402
from strategies.external import load_rankings  # noqa: E402
from thoughts.build import build_id_records, build_ta_records, logged_sources, reconstruct_sources  # noqa: E402
from thoughts.export import export_jsonl  # noqa: E402

EXPERIMENTS = ("alignment", "rating", "temporal", "distribution", "ab", "matthew", "ablation",
               "actions", "judge-prompts", "context")
ABLATION_MEASURES = ("temporal", "distribution", "context")


class Workspace:
    """Paths and loaders for one run directory."""

    def __init__(self, cfg: RunConfig):
        self.cfg = cfg
        self.out = cfg.out_dir

    def path(self, *parts) -> str:
        return os.path.join(self.out, *parts)

    def _need(self, name: str, hint: str) -> str:
        path = self.path(name)
        if not os.path.exists(path):
            raise ConfigError(f"{path} not found; run `{hint}` first")
        return path

    def catalog(self) -> Dict[str, Item]:
        return {item.item_id: item for item in
                load_jsonl(Item, self._need("catalog.jsonl", "ingest"))}

    def split(self):
        self._need("split", "ingest")
        return read_split(self.out)

    def personas(self):
        return load_personas(self._need("personas.jsonl", "init-personas"))

    def trajectories(self):
        return read_trajectories(self._need("trajectories.jsonl", "simulate"))

    def engagement_hours(self) -> Optional[List[int]]:
        path = self.path("engagements.jsonl")
        if not os.path.exists(path):
            return None
        with open(path, encoding="utf-8") as f:
            return [json.loads(line)["hour"] for line in f if line.strip()]


# strategies and populations ------------------------------------------------------

def build_strategy(cfg: RunConfig, catalog: Dict[str, Item], train, ledger=None):
    name = cfg.env.strategy
    if name == "popularity":
        return registry.create(name, catalog, ledger=ledger)
    if name == "mf":
        mf = cfg.env.mf
        model = train_mf(train, d=mf.dim, learning_rate=mf.learning_rate, epochs=mf.epochs,
                         reg=mf.reg, seed=derive_seed(cfg.seed, "mf"))
        return registry.create(name, catalog, model=model)
    if name == "external":
        return registry.create(name, catalog, rankings=load_rankings(cfg.require_path("rankings")))
    return registry.create(name, catalog)


def simulate_population(cfg: RunConfig, ws: Workspace, backend, interview: bool = False):
    """Run every persona once under ``cfg``; returns (agent runs, catalog)."""
    catalog = ws.catalog()
    split = ws.split()
    personas = ws.personas()
    histories = by_user(split.train)
    ledger = InteractionLedger()
    strategy = build_strategy(cfg, catalog, split.train, ledger)

    def env_for(agent_id: str) -> RecEnv:
        return RecEnv(catalog, strategy, cfg.env.page_size, cfg.env.mode, ledger, cfg.env.like_threshold)

    runs = run_population(list(personas.values()), histories, catalog, env_for, cfg, backend, interview)
    return runs, catalog


# subcommands ------------------------------------------------------------------

def cmd_ingest(cfg: RunConfig, ws: Workspace, backend, args) -> List[str]:
    records = load_interactions(cfg.require_path("interactions"), cfg.data.delimiter)
    catalog = load_catalog(cfg.require_path("catalog"), cfg.data.catalog_delimiter)
    dataset = build_dataset(records, catalog)
    kept = filter_min_interactions(dataset.interactions, cfg.data.min_interactions)
    if not kept:
        raise EmptyInput(f"no interactions left after the k={cfg.data.min_interactions} filter")
    split = temporal_split(kept, *cfg.data.split)
    stats = write_split(split, ws.out)
    kept_items = {r.item_id for r in kept}
    with_stats = attach_stats({i: catalog[i] for i in kept_items}, split.train)
    dump_jsonl([with_stats[i] for i in sorted(with_stats, key=id_sort_key)], ws.path("catalog.jsonl"))
    counts = stats["counts"]
    print(f"Split: train={counts['train']} validation={counts['validation']} test={counts['test']} "
          f"users={stats['users']} items={stats['items']}")
    return ["split", "stats.json", "catalog.jsonl"]


def cmd_init_personas(cfg: RunConfig, ws: Workspace, backend, args) -> List[str]:
    catalog = ws.catalog()
    histories = by_user(ws.split().train)
    users = sorted(histories, key=id_sort_key)[:cfg.n_agents]
    demographics = load_users(cfg.data.users, cfg.data.delimiter) if cfg.data.users else {}

    def one(user_id: str):
        persona, _ = infer_persona(user_id, histories[user_id], catalog, backend,
                                   k=cfg.persona.candidates, sample_size=cfg.persona.history_sample,
                                   holdout=cfg.persona.holdout, demographics=demographics.get(user_id),
                                   seed=derive_seed(cfg.seed, "persona", user_id))
        return persona

    with ThreadPoolExecutor(max_workers=cfg.worker_count()) as pool:
        personas = list(pool.map(one, users))
    count = save_personas(personas, ws.path("personas.jsonl"))
    print(f"Personas: {count}")
    return ["personas.jsonl"]


def cmd_simulate(cfg: RunConfig, ws: Workspace, backend, args) -> List[str]:
    runs, _ = simulate_population(cfg, ws, backend, interview=args.interview)
    trajectories = [t for run in runs for t in run.trajectories]
    write_trajectories(trajectories, ws.path("trajectories.jsonl"))
    save_snapshots([MemorySnapshot(run.bundle.agent_id, run.bundle.episodic, run.bundle.emotional)
                    for run in runs], ws.path("memory.jsonl"))
    dump_jsonl([{"agent_id": run.bundle.agent_id, "day_index": e.day_index, "slot_index": e.slot_index,
                 "hour": e.slot_index * SLOT_MINUTES // 60} for run in runs for e in run.engagements],
               ws.path("engagements.jsonl"))
    written = ["trajectories.jsonl", "memory.jsonl", "engagements.jsonl"]
    if args.interview:
        dump_jsonl([{"agent_id": run.bundle.agent_id, "rating": rating, "reason": reason}
                    for run in runs for rating, reason in run.interviews], ws.path("interviews.jsonl"))
        written.append("interviews.jsonl")
    forced = sum(1 for t in trajectories if t.forced_exit)
    print(f"Sessions: {len(trajectories)} from {len(runs)} agents (forced exits: {forced})")
    return written


def cmd_export_thoughts(cfg: RunConfig, ws: Workspace, backend, args) -> List[str]:
    catalog = ws.catalog()
    histories = by_user(ws.split().train)
    personas = ws.personas()
    records = []
    for agent_id in sorted(personas, key=id_sort_key):
        records += build_id_records(personas[agent_id], histories.get(agent_id, []), catalog, backend,
                                    cap=cfg.thoughts.cap, seed=derive_seed(cfg.seed, "thoughts", agent_id))
    reconstructed = not cfg.data.sessions
    if reconstructed:
        sources = [s for agent_id in sorted(personas, key=id_sort_key)
                   for s in reconstruct_sources(agent_id, histories.get(agent_id, []), catalog,
                                                cfg.thoughts.ta_page_size)]
    else:
        sources = logged_sources(load_sessions(cfg.require_path("sessions")), histories)
    records += build_ta_records(sources, personas, catalog, backend, seed=derive_seed(cfg.seed, "ta"))
    count = export_jsonl(records, ws.path("thoughts.jsonl"), reconstructed=reconstructed, seed=cfg.seed)
    print(f"Thought records: {count}")
    return ["thoughts.jsonl", "thoughts.manifest.json"]


def _read_real_metric(path: str) -> Dict[str, float]:
    try:
        with open(path, encoding="utf-8") as f:
            return {str(k): float(v) for k, v in json.load(f).items()}
    except (OSError, ValueError, AttributeError) as e:
        raise IOFailure(f"cannot read real A/B metrics {path}: {e}") from e


def _measure(name: str, trajectories, catalog, cfg: RunConfig, hours=None, real_ratings=()) -> MetricsReport:
    if name == "temporal":
        return experiments.temporal_experiment(trajectories, hours)
    if name == "distribution":
        return experiments.distribution_experiment(trajectories, real_ratings)
    return experiments.context_experiment(trajectories, catalog, cfg.env.like_threshold)


def run_experiment(name: str, cfg: RunConfig, ws: Workspace, backend, args) -> List[MetricsReport]:
    """Reports produced by ``eval <name>``."""
    ex = cfg.experiments
    if name == "rating" and args.predictions:
        return [experiments.score_predictions(*experiments.load_prediction_pairs(args.predictions))]
    if name == "temporal":
        return [experiments.temporal_experiment(ws.trajectories(), ws.engagement_hours())]
    if name == "context":
        return [experiments.context_experiment(ws.trajectories(), ws.catalog(), cfg.env.like_threshold)]
    if name == "judge-prompts":
        kinds = [args.kind] if args.kind else list(KINDS)
        personas = ws.personas() if os.path.exists(ws.path("personas.jsonl")) else {}
        trajectories = ws.trajectories()
        report = MetricsReport(experiment="judge_prompts", parameters={"kinds": kinds})
        for kind in kinds:
            try:
                report.metrics[kind] = emit_judge_prompts(trajectories, kind, ws.path(f"judge_{kind}.jsonl"),
                                                          personas)
            except EmptyInput as e:
                report.metrics[kind] = 0
                report.notes.append(str(e))
        return [report]

    split = ws.split()
    if name == "distribution":
        real = [r.rating for r in split.train + split.validation + split.test if r.rating is not None]
        return [experiments.distribution_experiment(ws.trajectories(), real)]

    catalog = ws.catalog()
    personas = ws.personas()
    train = by_user(split.train)
    workers = cfg.worker_count()
    if name == "alignment":
        reports = [experiments.preference_alignment_experiment(
            list(personas.values()), train, catalog, backend, m, ex.items_per_agent,
            seed=derive_seed(cfg.seed, "alignment", m), weight=cfg.memory.retrieval_weight,
            workers=workers) for m in ex.m_values]
        return reports + [experiments.alignment_table(reports)]
    if name == "rating":
        mf = cfg.env.mf
        model = train_mf(split.train, d=mf.dim, learning_rate=mf.learning_rate, epochs=mf.epochs,
                         reg=mf.reg, seed=derive_seed(cfg.seed, "mf"))
        return [experiments.rating_experiment(list(personas.values()), train, by_user(split.test), catalog,
                                              backend, model, seed=derive_seed(cfg.seed, "rating"),
                                              weight=cfg.memory.retrieval_weight,
                                              evidence_k=cfg.memory.evidence_k, workers=workers)]
    if name == "ab":
        if not ex.ab_real:
            raise ConfigError("experiments.ab_real is not set")
        real = _read_real_metric(ex.ab_real)
        trajectories = []
        for strategy in sorted(real):
            if registry.get(strategy) is None:
                continue
            print(f"  simulating strategy {strategy}")
            runs, _ = simulate_population(with_overrides(cfg, {"env.strategy": strategy}), ws, backend)
            trajectories += [t for run in runs for t in run.trajectories]
        return [experiments.ab_correlate(experiments.ab_sim_metric(trajectories), real,
                                         ex.bootstrap, derive_seed(cfg.seed, "bootstrap"))]
    if name == "matthew":
        mode = "brand_swap" if ex.brand else "boost"
        return [experiments.matthew_experiment(
            list(personas.values()), train, catalog, cfg, backend, target=ex.target_item,
            boost_rounds=ex.boost_rounds, rounds=ex.matthew_rounds, seeds=ex.matthew_seeds, mode=mode,
            brand=ex.brand, fictitious_brand=ex.fictitious_brand)]
    if name == "actions":
        sessions = load_sessions(cfg.require_path("sessions"))
        return [experiments.action_alignment_experiment(sessions, personas, train, catalog, cfg, backend)]
    if name == "ablation":
        real = [r.rating for r in split.train if r.rating is not None]

        def measured(variant: RunConfig) -> MetricsReport:
            runs, _ = simulate_population(variant, ws, backend)
            trajectories = [t for run in runs for t in run.trajectories]
            hours = [e.slot_index * SLOT_MINUTES // 60 for run in runs for e in run.engagements]
            return _measure(args.measure, trajectories, catalog, variant, hours, real)

        return [ablation_run(cfg, [args.suite], measured)]
    raise ConfigError(f"unknown experiment {name!r}")


def cmd_eval(cfg: RunConfig, ws: Workspace, backend, args) -> List[str]:
    written = []
    for report in run_experiment(args.experiment, cfg, ws, backend, args):
        problems = report.check()
        for problem in problems:
            audit.warn(f"report {report.experiment}: {problem}")
        print_report(report)
        written += [os.path.relpath(p, ws.out) for p in save_report(report, ws.path("reports"))]
    if args.experiment == "judge-prompts":
        written += [os.path.basename(p) for p in glob.glob(ws.path("judge_*.jsonl"))]
    return written


def cmd_report(cfg: RunConfig, ws: Workspace, backend, args) -> List[str]:
    paths = sorted(glob.glob(ws.path("reports", "*.json")))
    if not paths:
        raise EmptyInput(f"no reports under {ws.path('reports')}; run `eval` first")
    reports = [load_json(p) for p in paths]
    parser = AuditLogParser(ws.path("audit.log"))
    summary = parser.get_summary()
    print_summary(summary)
    merged = merge_reports(reports, {"audit": summary})
    with open(ws.path("report.json"), "w", encoding="utf-8") as f:
        json.dump(merged, f, indent=2, sort_keys=True)
    print(f"Merged {len(reports)} reports into {ws.path('report.json')}")
    return ["report.json"]


COMMANDS = {
    "ingest": cmd_ingest,
    "init-personas": cmd_init_personas,
    "simulate": cmd_simulate,
    "export-thoughts": cmd_export_thoughts,
    "eval": cmd_eval,
    "report": cmd_report,
}


# run directory bookkeeping ------------------------------------------------------

def _sha256(path: str) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as f:
        for chunk in iter(lambda: f.read(1 << 16), b""):
            digest.update(chunk)
    return digest.hexdigest()


def write_manifest(out_dir: str) -> str:
    """Checksums of every artifact in the run directory."""
    skip = {"manifest.json", "audit.log"}
    artifacts = {}
    for root, _, files in os.walk(out_dir):
        for name in files:
            path = os.path.join(root, name)
            rel = os.path.relpath(path, out_dir)
            if rel not in skip:
                artifacts[rel.replace(os.sep, "/")] = _sha256(path)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w", encoding="utf-8") as f:
        json.dump({"artifacts": dict(sorted(artifacts.items()))}, f, indent=2)
    return path


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        description="Simulate recommender users living a daily life and evaluate them",
        formatter_class=argparse.RawDescriptionHelpFormatter,
        epilog="""
Examples:
  python cli.py ingest --config run.yaml            # filter + 80/10/10 time split
  python cli.py init-personas --config run.yaml     # infer one persona per user
  python cli.py simulate --config run.yaml --seed 7 # browse sessions, write trajectories
  python cli.py eval alignment --config run.yaml    # 1:m preference alignment
  python cli.py eval rating --predictions p.csv     # score (prediction, truth) pairs
  python cli.py report --config run.yaml            # merge reports + audit summary
        """
    )
    parser.add_argument("--config", "-c", help="YAML config layered over configs/default.yaml")
    parser.add_argument("--seed", type=int, help="Root seed (mandatory unless set in the config)")
    parser.add_argument("--workers", "-w", type=int, help="Parallel agents (default: CPU count)")
    parser.add_argument("--out", "-o", help="Run directory")
    parser.add_argument("--backend", choices=("scripted", "http"), help="Completion backend")
    parser.add_argument("--agents", type=int, help="Number of simulated agents")
    parser.add_argument("--strategy", help="Recommender strategy")
    parser.add_argument("--variant", choices=("sim", "sum"), help="Agent variant")

    sub = parser.add_subparsers(dest="command", required=True)
    sub.add_parser("ingest", help="Load, filter and split the interaction data")
    sub.add_parser("init-personas", help="Infer personas from training histories")
    simulate = sub.add_parser("simulate", help="Simulate browsing sessions")
    simulate.add_argument("--interview", action="store_true", help="Ask a post-session interview")
    sub.add_parser("export-thoughts", help="Build and export the thought corpus")
    evaluate = sub.add_parser("eval", help="Run one experiment")
    evaluate.add_argument("experiment", choices=EXPERIMENTS)
    evaluate.add_argument("--predictions", help="CSV of prediction,truth pairs (eval rating)")
    evaluate.add_argument("--suite", default="components",
                          help=f"Ablation suite or toggle ({', '.join(AblationRunner.TEST_SUITES)})")
    evaluate.add_argument("--measure", choices=ABLATION_MEASURES, default="temporal",
                          help="Experiment rerun under every ablation toggle")
    evaluate.add_argument("--kind", choices=KINDS, help="Judge prompt kind (default: all)")
    sub.add_parser("report", help="Merge experiment reports")
    return parser


def run(argv: Optional[List[str]] = None) -> int:
    """Parse ``argv``, run one subcommand and return the exit status."""
    args = build_parser().parse_args(argv)
    try:
        cfg = load_config(args.config, {
            "seed": args.seed, "workers": args.workers, "out_dir": args.out,
            "backend.kind": args.backend, "n_agents": args.agents,
            "env.strategy": args.strategy, "agent.variant": args.variant})
    except SimulationError as e:
        print(f"ERROR: {e}", file=sys.stderr)
        return 2

    ws = Workspace(cfg)
    os.makedirs(ws.out, exist_ok=True)
    audit.configure(ws.path("audit.log"))
    configure_sampling(cfg.backend.temperature, cfg.backend.max_tokens)
    label = args.command if args.command != "eval" else f"eval_{args.experiment}"

    with audit.AuditLog(label, ws.out) as log:
        try:
            backend = make_backend(cfg.backend, api_key() if cfg.backend.kind == "http" else None)
            save_config(cfg, ws.path("run_config.yaml"))
            audit.stage_start(label)
            written = COMMANDS[args.command](cfg, ws, backend, args)
            audit.stage_end(label, artifacts=len(written))
            write_manifest(ws.out)
            log.success = True
        except (SimulationError, FileNotFoundError) as e:
            audit.stage_end(label, success=False, error=e)
            print(f"ERROR: {e}", file=sys.stderr)
            return 2
    print(f"\nRun directory: {ws.out}")
    return 0


if __name__ == "__main__":
    sys.exit(run())
