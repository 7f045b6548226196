"""Reproducible experiment runner.

Configs are single JSON files; outputs are one directory per run with
`manifest.json`, `ledgers/<strategy>_<seed>.csv`,
`compare/<A>_vs_<B>_<seed>.csv` and `checks/report.json`.  Identical
(config, seeds, version) produce byte-identical data files.

Exit codes: 0 success, 1 usage/config error, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import sys
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from . import __version__
from .analytics import (
    am_gm_margins,
    checkpoints_for,
    comparison_csv_rows,
    growth_diff,
    kt_certificate,
    ledger_csv_rows,
    normalization_identity_report,
    run_strategy,
    supermartingale_estimate,
)
from .errors import ConfigError, GrowthLabError, NotApplicable
from .market import MarketSpec, sample_path, spec_from_json
from .strategies import build_strategy
from .util import canonical_json, sha256_hex

KNOWN_CHECKS = ("normalization_identity", "supermartingale", "kt_certificate", "am_gm")


@dataclass(frozen=True)
class ExperimentConfig:
    """Validated experiment description."""

    market: dict
    strategies: tuple[dict, ...]
    labels: tuple[str, ...]
    horizon: int
    seeds: tuple[int, ...]
    checkpoints: tuple[int, ...]
    output_dir: str
    checks: tuple[str, ...]
    raw: dict

    @property
    def digest(self) -> str:
        return sha256_hex(canonical_json(self.raw))

    def build_spec(self) -> MarketSpec:
        return spec_from_json(self.market)


def load_config(path) -> ExperimentConfig:
    try:
        raw = json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"config file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"config is not valid JSON: {exc}") from exc
    return parse_config(raw)


def parse_config(raw: dict) -> ExperimentConfig:
    for key in ("market", "strategies", "horizon", "seeds"):
        if key not in raw:
            raise ConfigError(f"config is missing required field {key!r}")
    strategies = tuple(raw["strategies"])
    if not strategies:
        raise ConfigError("config needs at least one strategy")
    horizon = int(raw["horizon"])
    if horizon < 1:
        raise ConfigError("horizon must be >= 1")
    seeds = tuple(int(s) for s in raw["seeds"])
    if len(set(seeds)) != len(seeds):
        raise ConfigError("seeds must be distinct")
    if not seeds:
        raise ConfigError("config needs at least one seed")
    checkpoints = tuple(int(c) for c in raw.get("checkpoints", ())) or checkpoints_for(horizon)
    if max(checkpoints) > horizon:
        raise ConfigError(
            f"horizon {horizon} is smaller than the largest checkpoint {max(checkpoints)}"
        )
    checks = tuple(raw.get("checks", KNOWN_CHECKS))
    for name in checks:
        if name not in KNOWN_CHECKS:
            raise ConfigError(f"unknown check {name!r} (known: {', '.join(KNOWN_CHECKS)})")

    try:
        spec = spec_from_json(raw["market"])
    except (KeyError, TypeError, ValueError) as exc:
        raise ConfigError(f"invalid market spec: {exc}") from exc

    labels = []
    for i, cfg in enumerate(strategies):
        if not isinstance(cfg, dict) or "name" not in cfg:
            raise ConfigError(f"strategy #{i} must be an object with a 'name'")
        build_strategy(cfg, spec, 0)  # validates the parameters
        label = cfg.get("label", cfg["name"])
        if label in labels:
            label = f"{label}{i}"
        labels.append(label)

    return ExperimentConfig(
        market=raw["market"],
        strategies=strategies,
        labels=tuple(labels),
        horizon=horizon,
        seeds=seeds,
        checkpoints=checkpoints,
        output_dir=raw.get("output_dir", "runs/experiment"),
        checks=checks,
        raw=raw,
    )


@dataclass
class RunManifest:
    """Self-describing record of one command's outputs."""

    config_digest: str
    spec_digest: str
    tool_version: str
    command: str
    files: dict = field(default_factory=dict)
    timings: dict = field(default_factory=dict)

    def to_json(self) -> dict:
        return {
            "config_digest": self.config_digest,
            "spec_digest": self.spec_digest,
            "tool_version": self.tool_version,
            "command": self.command,
            "files": dict(sorted(self.files.items())),
            "timings": self.timings,
        }


def _write_text(out_dir: Path, rel: str, text: str, manifest: RunManifest) -> None:
    target = out_dir / rel
    target.parent.mkdir(parents=True, exist_ok=True)
    target.write_text(text)
    manifest.files[rel] = sha256_hex(text)


def _write_manifest(out_dir: Path, manifest: RunManifest) -> None:
    (out_dir / "manifest.json").write_text(
        json.dumps(manifest.to_json(), indent=2, sort_keys=True) + "\n"
    )


def verify_manifest(out_dir) -> bool:
    """Recorded digests must match the files on disk."""
    out_dir = Path(out_dir)
    manifest = json.loads((out_dir / "manifest.json").read_text())
    for rel, digest in manifest["files"].items():
        target = out_dir / rel
        if not target.exists() or sha256_hex(target.read_text()) != digest:
            return False
    return True


def _resolve_seeds(config: ExperimentConfig, seed_panel) -> tuple[int, ...]:
    if seed_panel is None:
        return config.seeds
    seeds = tuple(int(s) for s in seed_panel.split(","))
    if len(set(seeds)) != len(seeds) or not seeds:
        raise ConfigError("--seed-panel needs distinct comma-separated integers")
    return seeds


def _run_one(config, spec, strategy_cfg, seed):
    path = sample_path(spec, config.horizon, seed)
    strategy = build_strategy(strategy_cfg, spec, path.mode_id)
    return run_strategy(strategy, path)


def cmd_simulate(config: ExperimentConfig, out_dir, threads: int = 1, seed_panel=None) -> RunManifest:
    spec = config.build_spec()
    seeds = _resolve_seeds(config, seed_panel)
    out = Path(out_dir)
    manifest = RunManifest(
        config_digest=config.digest,
        spec_digest=spec.digest,
        tool_version=__version__,
        command="simulate",
    )
    jobs = [
        (label, cfg, seed)
        for label, cfg in zip(config.labels, config.strategies)
        for seed in seeds
    ]

    def work(job):
        label, cfg, seed = job
        started = time.perf_counter()
        ledger = _run_one(config, spec, cfg, seed)
        return label, seed, ledger, time.perf_counter() - started

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, jobs))
    else:
        results = [work(job) for job in jobs]
    for label, seed, ledger, elapsed in results:
        rel = f"ledgers/{label}_{seed}.csv"
        _write_text(out, rel, "\n".join(ledger_csv_rows(ledger)) + "\n", manifest)
        manifest.timings[f"{label}_{seed}"] = round(elapsed, 6)
    _write_manifest(out, manifest)
    return manifest


def cmd_compare(
    config: ExperimentConfig, name_a: str, name_b: str, out_dir, threads: int = 1, seed_panel=None
) -> RunManifest:
    labels = dict(zip(config.labels, config.strategies))
    for name in (name_a, name_b):
        if name not in labels:
            raise ConfigError(
                f"unknown strategy {name!r}; config defines: {', '.join(config.labels)}"
            )
    spec = config.build_spec()
    seeds = _resolve_seeds(config, seed_panel)
    out = Path(out_dir)
    manifest = RunManifest(
        config_digest=config.digest,
        spec_digest=spec.digest,
        tool_version=__version__,
        command="compare",
    )

    def work(seed):
        started = time.perf_counter()
        led_a = _run_one(config, spec, labels[name_a], seed)
        led_b = _run_one(config, spec, labels[name_b], seed)
        series = growth_diff(led_a, led_b, config.checkpoints)
        return seed, series, time.perf_counter() - started

    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(work, seeds))
    else:
        results = [work(seed) for seed in seeds]

    diffs = []
    for seed, series, elapsed in results:
        rel = f"compare/{name_a}_vs_{name_b}_{seed}.csv"
        _write_text(out, rel, "\n".join(comparison_csv_rows(series)) + "\n", manifest)
        manifest.timings[f"{name_a}_vs_{name_b}_{seed}"] = round(elapsed, 6)
        diffs.append(series.diff)
    stacked = np.stack(diffs)
    grid = results[0][1].n_grid
    summary = {
        "a": name_a,
        "b": name_b,
        "seeds": list(seeds),
        "checkpoints": list(grid),
        "mean_diff": [float(v) for v in stacked.mean(axis=0)],
        "stderr": [
            float(v)
            for v in (
                stacked.std(axis=0, ddof=1) / np.sqrt(len(seeds))
                if len(seeds) > 1
                else np.zeros(len(grid))
            )
        ],
    }
    _write_text(out, f"compare/{name_a}_vs_{name_b}_summary.json",
                canonical_json(summary) + "\n", manifest)
    _write_manifest(out, manifest)
    return manifest


def _check_normalization_identity(config, spec, seeds):
    m = spec.m
    w1 = np.linspace(2.0, 1.0, m)
    w2 = np.linspace(1.0, 2.0, m)
    b1 = w1 / w1.sum()
    b2 = w2 / w2.sum()
    stat = 0.0
    for seed in seeds:
        path = sample_path(spec, config.horizon, seed)
        stat = max(stat, normalization_identity_report(path, b1, b2))
    return {
        "check": "normalization_identity",
        "pass": bool(stat <= 1e-7),
        "statistic": stat,
        "threshold": 1e-7,
        "seed_panel": list(seeds),
    }


def _check_supermartingale(config, spec, seeds):
    competitor = build_strategy(config.strategies[0], spec, 0)
    n = min(config.horizon, 20)
    mean, stderr = supermartingale_estimate(competitor, spec, n=n, paths=2000, seed=seeds[0])
    threshold = 1.0 + 3.0 * stderr
    return {
        "check": "supermartingale",
        "pass": bool(mean <= threshold),
        "statistic": mean,
        "threshold": threshold,
        "seed_panel": [seeds[0]],
    }


def _check_kt_certificate(config, spec, seeds):
    path = sample_path(spec, min(config.horizon, 2000), seeds[0])
    worst = 1.0
    details = []
    passed = True
    for label, cfg in zip(config.labels, config.strategies):
        strategy = build_strategy(cfg, spec, path.mode_id)
        try:
            report = kt_certificate(strategy, path)
        except NotApplicable:
            details.append({"strategy": label, "status": "not_applicable"})
            continue
        worst = max(worst, report.max_residual)
        passed = passed and report.passed
        details.append(
            {"strategy": label, "status": "checked", "max_residual": report.max_residual}
        )
    return {
        "check": "kt_certificate",
        "pass": bool(passed),
        "statistic": worst,
        "threshold": 1.0 + 1e-6,
        "seed_panel": [seeds[0]],
        "detail": details,
    }


def _check_am_gm(config, spec, seeds):
    gen = np.random.default_rng(seeds[0])
    worst = np.inf
    for _ in range(1000):
        length = int(gen.integers(32, 129))
        margins = am_gm_margins(gen.uniform(0.5, 2.0, size=length))
        worst = min(worst, margins.excess - margins.spread)
    return {
        "check": "am_gm",
        "pass": bool(worst >= 0.0),
        "statistic": float(worst),
        "threshold": 0.0,
        "seed_panel": [seeds[0]],
    }


_CHECK_RUNNERS = {
    "normalization_identity": _check_normalization_identity,
    "supermartingale": _check_supermartingale,
    "kt_certificate": _check_kt_certificate,
    "am_gm": _check_am_gm,
}


def cmd_checks(config: ExperimentConfig, out_dir, only=None, seed_panel=None) -> RunManifest:
    names = config.checks
    if only:
        names = tuple(only.split(","))
        for name in names:
            if name not in KNOWN_CHECKS:
                raise ConfigError(f"unknown check {name!r}")
    spec = config.build_spec()
    seeds = _resolve_seeds(config, seed_panel)
    out = Path(out_dir)
    manifest = RunManifest(
        config_digest=config.digest,
        spec_digest=spec.digest,
        tool_version=__version__,
        command="checks",
    )
    report = []
    for name in names:
        started = time.perf_counter()
        report.append(_CHECK_RUNNERS[name](config, spec, seeds))
        manifest.timings[name] = round(time.perf_counter() - started, 6)
    _write_text(out, "checks/report.json", canonical_json({"checks": report}) + "\n", manifest)
    _write_manifest(out, manifest)
    return manifest


# ---------------------------------------------------------------------------
# entry point


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="growthlab", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p):
        p.add_argument("config", help="experiment config JSON")
        p.add_argument("--out", help="output directory (default: config output_dir)")
        p.add_argument("--threads", type=int, default=1)
        p.add_argument("--seed-panel", help="comma-separated seed override")

    p_sim = sub.add_parser("simulate", help="run every (strategy, seed) pair and write ledgers")
    common(p_sim)
    p_cmp = sub.add_parser("compare", help="growth-rate difference between two strategies")
    common(p_cmp)
    p_cmp.add_argument("--a", required=True, help="strategy label A")
    p_cmp.add_argument("--b", required=True, help="strategy label B")
    p_chk = sub.add_parser("checks", help="run diagnostic checks and write a report")
    common(p_chk)
    p_chk.add_argument("--only", help="comma-separated subset of checks")
    return parser


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        config = load_config(args.config)
        out_dir = args.out or config.output_dir
        if args.command == "simulate":
            cmd_simulate(config, out_dir, threads=args.threads, seed_panel=args.seed_panel)
        elif args.command == "compare":
            cmd_compare(config, args.a, args.b, out_dir,
                        threads=args.threads, seed_panel=args.seed_panel)
        elif args.command == "checks":
            cmd_checks(config, out_dir, only=args.only, seed_panel=args.seed_panel)
        else:  # pragma: no cover - argparse guards this
            raise ConfigError(f"unknown command {args.command!r}")
    except ConfigError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except GrowthLabError as exc:
        print(f"runtime error: {exc}", file=sys.stderr)
        return 2
    return 0


if __name__ == "__main__":
    sys.exit(main())
