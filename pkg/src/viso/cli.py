"""Command-line entry point: ``viso gen | memory | run | report | replay``.

Exit codes: 0 ok, 2 bad flags, 3 I/O failure, 4 missing train split or
memory, 5 outcome files covering different instance sets, 6 replay
mismatch.
"""

from __future__ import annotations

import argparse
import json
import logging
import os
import sys
from collections import Counter
from pathlib import Path
from typing import Any, Sequence

from . import storage
from .bench.generate import BenchmarkSpec, GenParams, generate_benchmark, manifest
from .bench.metrics import GROUPINGS, aggregate_metrics, compute_regret, failure_rows
from .bench.pipeline import train_split
from .bench.report import emit_report, text_table
from .model import Split
from .orchestrator import MethodConfig, replay, run_method
from .router import BudgetPolicy, RouterKind, RuleConfig, build_memory
from .solvers import SolverConfig

log = logging.getLogger("viso")

EXIT_USAGE = 2
EXIT_IO = 3
EXIT_MISSING = 4
EXIT_COVERAGE = 5
EXIT_REPLAY = 6

DEFAULT_SEED = 0


class CliError(Exception):
    def __init__(self, code: int, message: str):
        super().__init__(message)
        self.code = code


def _load_config(path: str | None) -> dict[str, Any]:
    if path is None:
        return {}
    try:
        cfg = json.loads(Path(path).read_text())
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read config {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise CliError(EXIT_USAGE, f"config {path} is not valid JSON: {exc}") from exc
    if not isinstance(cfg, dict):
        raise CliError(EXIT_USAGE, "config must be a JSON object")
    return cfg


def resolve_seed(flag: int | None, cfg: dict[str, Any]) -> int:
    if "seed" in cfg:
        return int(cfg["seed"])
    if flag is not None:
        return flag
    env = os.environ.get("VISO_SEED")
    if env:
        try:
            return int(env)
        except ValueError as exc:
            raise CliError(EXIT_USAGE, f"VISO_SEED must be an integer, got {env!r}") from exc
    return DEFAULT_SEED


def method_config(cfg: dict[str, Any]) -> MethodConfig:
    try:
        return MethodConfig(
            solver=SolverConfig.from_dict(cfg.get("solver")),
            tolerances=dict(cfg.get("verifier", {})),
            budget=BudgetPolicy(**cfg.get("budget", {})),
            rule=RuleConfig.from_dict(cfg["rule"]) if "rule" in cfg else None,
            k=int(cfg.get("k", 1)),
        )
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, f"bad config: {exc}") from exc


def _read_bench(path: str):
    try:
        return storage.load_benchmark(path)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot read benchmark {path}: {exc}") from exc
    except (ValueError, KeyError) as exc:
        raise CliError(EXIT_USAGE, f"malformed benchmark {path}: {exc}") from exc


def cmd_gen(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    seed = resolve_seed(args.seed, cfg)
    counts = {s: getattr(args, s.value) for s in Split}
    counts.update({Split(k): int(v) for k, v in cfg.get("counts", {}).items()})
    try:
        params = {Split(k): GenParams.from_dict(v) for k, v in cfg.get("params", {}).items()}
        spec = BenchmarkSpec(seed=seed, counts=counts, params=params)
    except (TypeError, ValueError) as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    instances = generate_benchmark(spec)
    try:
        storage.save_benchmark(args.out, instances, manifest(spec))
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    print(" ".join(f"{s.value}={spec.counts[s]}" for s in Split))
    return 0


def cmd_memory(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    mcfg = method_config(cfg)
    train = train_split(_read_bench(args.bench))
    if not train:
        raise CliError(EXIT_MISSING, f"{args.bench} has no train split")
    memory = build_memory(train, mcfg.solver, mcfg.tolerances)
    try:
        storage.save_memory(args.out, memory)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write {args.out}: {exc}") from exc
    hist = Counter(e.label.value for e in memory)
    print(f"entries={len(memory)} " + " ".join(f"{k}={hist[k]}" for k in sorted(hist)))
    return 0


def _parse_methods(raw: str | Sequence[str]) -> list[RouterKind]:
    items = raw.split(",") if isinstance(raw, str) else list(raw)
    try:
        methods = [RouterKind(m.strip()) for m in items if m.strip()]
    except ValueError as exc:
        raise CliError(EXIT_USAGE, str(exc)) from exc
    if not methods:
        raise CliError(EXIT_USAGE, "no methods selected")
    return list(dict.fromkeys(methods))


def cmd_run(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    mcfg = method_config(cfg)
    methods = _parse_methods(cfg.get("methods", args.methods))
    audit = bool(cfg.get("audit", args.audit))
    jobs = int(cfg.get("jobs", args.jobs))
    instances = _read_bench(args.bench)
    train = train_split(instances)

    if RouterKind.RULE in methods and mcfg.rule is None:
        if not train:
            raise CliError(EXIT_MISSING, "rule thresholds need a train split or a 'rule' config")
        mcfg = MethodConfig(mcfg.solver, mcfg.tolerances, mcfg.budget, RuleConfig.from_train(train), mcfg.k)

    memory = None
    if RouterKind.AGENT in methods:
        memory_path = cfg.get("memory", args.memory)
        if memory_path:
            try:
                memory = storage.load_memory(memory_path)
            except OSError as exc:
                raise CliError(EXIT_MISSING, f"cannot read memory {memory_path}: {exc}") from exc
        elif train:
            memory = build_memory(train, mcfg.solver, mcfg.tolerances)
        else:
            raise CliError(EXIT_MISSING, "agent routing needs --memory or a train split")
        if not memory:
            raise CliError(EXIT_MISSING, "agent memory is empty")

    out_dir = Path(args.out_dir)
    try:
        out_dir.mkdir(parents=True, exist_ok=True)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot create {out_dir}: {exc}") from exc
    for method in methods:
        outs = run_method(instances, method, memory, mcfg, audit=audit, jobs=jobs)
        path = out_dir / f"{method.value}.jsonl"
        try:
            storage.save_outcomes(path, outs, audit=audit)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot write {path}: {exc}") from exc
        n_ok = sum(o.resolved for o in outs)
        rate = n_ok / len(outs) if outs else 0.0
        print(f"{method.value}: accepted_rate={rate:.4f} ({n_ok}/{len(outs)})")
    return 0


def _read_outcomes(paths: Sequence[str]) -> dict[str, list]:
    by_method: dict[str, list] = {}
    for p in paths:
        try:
            outs = storage.load_outcomes(p)
        except OSError as exc:
            raise CliError(EXIT_IO, f"cannot read outcomes {p}: {exc}") from exc
        if not outs:
            raise CliError(EXIT_COVERAGE, f"{p} holds no outcomes")
        methods = {o.method.value for o in outs}
        if len(methods) != 1:
            raise CliError(EXIT_USAGE, f"{p} mixes methods {sorted(methods)}")
        name = methods.pop()
        if name in by_method:
            raise CliError(EXIT_USAGE, f"method {name} given twice")
        by_method[name] = outs
    return by_method


def cmd_report(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    lam = cfg.get("lambda", args.lam)
    grouping = [g.strip() for g in args.grouping.split(",") if g.strip()]
    if not grouping or set(grouping) - set(GROUPINGS):
        raise CliError(EXIT_USAGE, f"--grouping must be a subset of {','.join(GROUPINGS)}")
    by_method = _read_outcomes(args.outcomes)
    ref = sorted(o.instance_id for o in next(iter(by_method.values())))
    for name, outs in by_method.items():
        if sorted(o.instance_id for o in outs) != ref:
            raise CliError(EXIT_COVERAGE, f"outcomes for {name} cover a different instance set")
    regrets = compute_regret(by_method)
    rows = aggregate_metrics(by_method, regrets, grouping, lam=lam)
    fails = failure_rows(by_method, regrets, args.regret_threshold)
    try:
        emit_report(rows, fails, args.out_dir)
    except OSError as exc:
        raise CliError(EXIT_IO, f"cannot write report to {args.out_dir}: {exc}") from exc
    overall = [r for r in rows if r.group == grouping[0]]
    cols = ["method", "accepted_rate", "avg_ver_rate", "avg_cost_units", "avg_regret", "fallback_rate", "avg_attempts"]
    print(text_table(cols, [[getattr(r, c) for c in cols] for r in overall]), end="")
    return 0


def cmd_replay(args: argparse.Namespace) -> int:
    cfg = _load_config(args.config)
    mcfg = method_config(cfg)
    instances = {i.id: i for i in _read_bench(args.bench)}
    bad = 0
    checked = 0
    for name, outs in _read_outcomes(args.outcomes).items():
        for o in outs:
            inst = instances.get(o.instance_id)
            if inst is None:
                raise CliError(EXIT_COVERAGE, f"{o.instance_id} not in {args.bench}")
            try:
                problems = replay(inst, o, mcfg.tolerances)
            except ValueError as exc:
                raise CliError(EXIT_USAGE, f"{name}/{o.instance_id}: {exc}") from exc
            checked += len(o.attempts)
            for msg in problems:
                bad += 1
                print(f"MISMATCH {name} {o.instance_id}: {msg}")
    print(f"replayed {checked} attempts, {bad} mismatches")
    return EXIT_REPLAY if bad else 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="viso", description=__doc__.splitlines()[0])
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)

    g = sub.add_parser("gen", help="generate a seeded benchmark")
    g.add_argument("--seed", type=int, default=None, help="master seed (fallback: $VISO_SEED, then 0)")
    g.add_argument("--out", default="bench.json")
    defaults = BenchmarkSpec().counts
    for split in Split:
        g.add_argument(f"--{split.value}", type=int, default=defaults[split], help=f"{split.value} instances")
    g.add_argument("--config")
    g.set_defaults(func=cmd_gen)

    m = sub.add_parser("memory", help="build the oracle-labeled agent memory from the train split")
    m.add_argument("--bench", required=True)
    m.add_argument("--out", default="memory.json")
    m.add_argument("--config")
    m.set_defaults(func=cmd_memory)

    r = sub.add_parser("run", help="orchestrate every instance under each method")
    r.add_argument("--bench", required=True)
    r.add_argument("--memory")
    r.add_argument("--out-dir", default="outcomes")
    r.add_argument("--methods", default=",".join(k.value for k in RouterKind))
    r.add_argument("--audit", action="store_true", help="embed candidates for replay")
    r.add_argument("--jobs", type=int, default=1)
    r.add_argument("--config")
    r.set_defaults(func=cmd_run)

    p = sub.add_parser("report", help="regret, metric tables and failure listing")
    p.add_argument("outcomes", nargs="+")
    p.add_argument("--out-dir", default="report")
    p.add_argument("--grouping", default=",".join(GROUPINGS))
    p.add_argument("--lambda", dest="lam", type=float, default=None)
    p.add_argument("--regret-threshold", type=float, default=float("inf"))
    p.add_argument("--config")
    p.set_defaults(func=cmd_report)

    a = sub.add_parser("replay", help="re-verify audit-mode outcomes")
    a.add_argument("--bench", required=True)
    a.add_argument("outcomes", nargs="+")
    a.add_argument("--config")
    a.set_defaults(func=cmd_replay)
    return parser


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    if getattr(args, "jobs", 1) < 1:
        parser.error("--jobs must be at least 1")
    if args.command == "gen":
        for split in Split:
            if getattr(args, split.value) < 1:
                parser.error(f"--{split.value} must be at least 1")
    try:
        return args.func(args)
    except CliError as exc:
        print(f"viso: error: {exc}", file=sys.stderr)
        return exc.code


if __name__ == "__main__":
    sys.exit(main())
