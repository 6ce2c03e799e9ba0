"""Command-line front end: ``hetcomp --config cfg.json --experiment DelaySweep --out results/``.

Exit codes: 0 ok, 1 invalid configuration, 2 runtime or I/O fault.
"""
from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import math
from dataclasses import dataclass
from enum import Enum
from pathlib import Path
from typing import Any, Optional

import numpy as np

from . import __version__
from . import analysis as an
from . import evaluate as ev
from . import overhead as oh
from .association import InsufficientCandidates
from .channel import tier_rho
from .model import (
    ConfigError,
    NetworkConfig,
    RateMapping,
    db_to_linear,
    digest,
    network_from_dict,
    network_to_dict,
    reference_network,
    validate,
)

log = logging.getLogger("hetcomp")


class Experiment(str, Enum):
    DELAY_SWEEP = "DelaySweep"
    L_SWEEP = "LSweep"
    INTRA_TIER_LOSS = "IntraTierLoss"
    BOUNDS_VALIDATION = "BoundsValidation"
    TIME_FRACTION_REPORT = "TimeFractionReport"


@dataclass(frozen=True)
class RunManifest:
    experiment: Experiment
    config_path: Optional[Path]
    seed: int = 0
    trials: int = ev.DEFAULT_TRIALS
    output_dir: Path = Path("results")
    force: bool = False


DEFAULT_EXPERIMENTS = {
    "delay_means_ms": [0, 10, 20, 40, 60, 80],
    "l_values": [0, 1, 2, 3, 4, 5],
    "l_sweep_delay_ms": 20,
    "beta_db": list(range(-10, 21, 2)),
    "renewal_blocks": 1_000_000,
}


@dataclass(frozen=True)
class RunConfig:
    """Everything a run needs, resolved from the JSON config file."""

    network: NetworkConfig
    coverage: RateMapping
    throughput: RateMapping
    coherence: oh.CoherenceModel
    delay_stages: int
    experiments: dict

    def to_dict(self) -> dict[str, Any]:
        return {
            "network": network_to_dict(self.network),
            "rates": {
                "target_sir": self.coverage.target_sir,
                "target_rate": self.coverage.target_rate,
                "shannon_gap": self.throughput.shannon_gap,
            },
            "overhead": {
                "coherence_ms": self.coherence.mean_block * 1e3,
                "coherence_shape": self.coherence.shape,
                "delay_stages": self.delay_stages,
            },
            "experiments": self.experiments,
        }


def default_config_dict() -> dict[str, Any]:
    return {
        "network": network_to_dict(reference_network(1)),
        "rates": {"target_sir_db": 3.0, "target_rate": 1.0, "shannon_gap_db": 3.0},
        "overhead": {"coherence_ms": 80.0, "coherence_shape": None, "delay_stages": 4},
        "experiments": dict(DEFAULT_EXPERIMENTS),
    }


def parse_config(d: dict[str, Any]) -> RunConfig:
    """dB entries (``*_db``) are converted to linear here and nowhere else."""
    rates = d.get("rates", {})
    over = d.get("overhead", {})
    exps = dict(DEFAULT_EXPERIMENTS)
    exps.update(d.get("experiments", {}))
    return RunConfig(
        network=network_from_dict(d["network"]),
        coverage=RateMapping.coverage(rates.get("target_sir_db", 3.0), rates.get("target_rate", 1.0)),
        throughput=RateMapping.shannon(rates.get("shannon_gap_db", 3.0)),
        coherence=oh.CoherenceModel(over.get("coherence_ms", 80.0) / 1e3, over.get("coherence_shape")),
        delay_stages=int(over.get("delay_stages", 4)),
        experiments=exps,
    )


# --- CSV helpers ----------------------------------------------------------------

def fmt(v) -> str:
    """Shortest round-trip representation for floats."""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    if isinstance(v, (np.integer,)):
        return str(int(v))
    return str(v)


def render_csv(columns: list[str], rows: list[list], config_digest: str) -> str:
    buf = io.StringIO()
    buf.write(f"# config_digest={config_digest}\n")
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(columns)
    for r in rows:
        w.writerow([fmt(v) for v in r])
    return buf.getvalue()


# --- experiments ------------------------------------------------------------------

def _delay_sweep(cfg: RunConfig, m: RunManifest) -> dict[str, str]:
    delays = [x / 1e3 for x in cfg.experiments["delay_means_ms"]]
    res = ev.delay_sweep(cfg.network, [cfg.coverage, cfg.throughput], delays, m.trials, m.seed,
                         cfg.coherence, cfg.delay_stages)
    cols = ["mean_delay_ms", "metric", "value", "std_error", "baseline_value", "baseline_std_error", "trials", "seed"]
    out = {}
    for metric, rows in res.items():
        body = [[r.x * 1e3, metric.value, r.result.mean, r.result.std_error, r.baseline.mean,
                 r.baseline.std_error, r.result.trials, m.seed] for r in rows]
        out[f"delay_sweep_{metric.value.lower()}.csv"] = (cols, body)
    return out


def _l_sweep(cfg: RunConfig, m: RunManifest) -> dict[str, str]:
    over = ev.erlang_overhead(cfg.experiments["l_sweep_delay_ms"] / 1e3, cfg.coherence, cfg.delay_stages)
    res = ev.l_sweep(cfg.network, [cfg.coverage, cfg.throughput], cfg.experiments["l_values"], m.trials, m.seed, over)
    cols = ["L", "metric", "value", "std_error", "tau", "trials", "seed"]
    out = {}
    for metric, rows in res.items():
        body = [[int(r.x), metric.value, r.result.mean, r.result.std_error, r.tau, r.result.trials, m.seed]
                for r in rows]
        out[f"l_sweep_{metric.value.lower()}.csv"] = (cols, body)
    return out


def _intratier(cfg: RunConfig, m: RunManifest) -> dict[str, str]:
    mappings = [cfg.coverage, cfg.throughput]
    delays = [x / 1e3 for x in cfg.experiments["delay_means_ms"]]
    by_delay = ev.intratier_loss(cfg.network, mappings, "delay", delays, m.trials, m.seed,
                                 cfg.coherence, cfg.delay_stages)
    by_l = ev.intratier_loss(cfg.network, mappings, "L", [L for L in cfg.experiments["l_values"] if L > 0],
                             m.trials, m.seed, cfg.coherence, cfg.delay_stages,
                             cfg.experiments["l_sweep_delay_ms"] / 1e3)
    cols = ["axis", "x", "metric", "cross_value", "cross_std_error", "intra_value", "intra_std_error",
            "loss", "loss_std_error", "trials", "seed"]
    out = {}
    for metric in by_delay:
        body = []
        for axis, rows, scale in (("mean_delay_ms", by_delay[metric], 1e3), ("L", by_l[metric], 1)):
            for r in rows:
                body.append([axis, r.x * scale, metric.value, r.cross.mean, r.cross.std_error, r.intra.mean,
                             r.intra.std_error, r.loss, r.loss_se, r.cross.trials, m.seed])
        out[f"intratier_loss_{metric.value.lower()}.csv"] = (cols, body)
    return out


def bounds_table(net: NetworkConfig, betas_db, trials: int, seed: int) -> list[list]:
    """Empirical CDF of the full-cooperation SIR against the closed-form bounds.

    For 1-tier networks the dominance columns compare P(I_B > x) and
    P(c I_(0) > x) at x = median(S_1 |X_1|^-alpha) / beta, the interference
    level at which a median-signal user sits exactly at SIR beta.
    """
    k_star = net.condition_serving_tier if net.condition_serving_tier is not None else 0
    L = net.num_coordinated
    rho_coop = tier_rho(net.tiers)
    trial_log = ev.run_trials(net, trials, seed)
    sir = trial_log.sirs[:, -1]
    dom = ev.dominance_samples(net, trials, seed) if net.num_tiers == 1 else None
    rows = []
    for b_db in betas_db:
        beta = db_to_linear(b_db)
        F = float(np.mean(sir <= beta))
        se = math.sqrt(F * (1 - F) / sir.size)
        if net.num_tiers == 1:
            q = an.BoundQuery(beta, net.tiers[0].antennas, L, net.tiers[0].pathloss, L,
                              float(rho_coop[0]) if L else 1.0, {i: float(rho_coop[0]) for i in range(2, L + 2)})
            ub = an.ub_cdf_1tier(q)
            lb_fn = lambda: an.lb_cdf_1tier(q)  # noqa: E731
        else:
            # members are random across trials; rho = 1 everywhere is valid for every B
            q = an.BoundQuery(beta, net.tiers[k_star].antennas, L, net.tiers[k_star].pathloss, L,
                              float(min(rho_coop)) if L else 1.0)
            ub = an.ub_cdf_ktier(q, net.tiers, k_star)
            lb_fn = lambda: an.lb_cdf_ktier(q, net.tiers, k_star)  # noqa: E731
        try:
            lb: Any = lb_fn()
        except an.DomainFault as e:
            lb = f"DomainFault: {e.reason}"
        if dom is not None:
            x = dom.signal_median / beta
            lhs, rhs = float(np.mean(dom.i_b > x)), float(np.mean(dom.c * dom.i_0 > x))
        else:
            lhs = rhs = float("nan")
        rows.append([b_db, F, se, ub, lb, lhs, rhs])
    return rows


def _bounds(cfg: RunConfig, m: RunManifest) -> dict[str, str]:
    rows = bounds_table(cfg.network, cfg.experiments["beta_db"], m.trials, m.seed)
    cols = ["beta", "empirical_cdf", "empirical_se", "upper_bound", "lower_bound_or_fault",
            "dominance_lhs", "dominance_rhs"]
    return {"bounds_validation.csv": (cols, rows)}


def _time_fractions(cfg: RunConfig, m: RunManifest) -> dict[str, str]:
    rng = np.random.default_rng(np.random.SeedSequence(m.seed))
    rows = []
    for d_ms in cfg.experiments["delay_means_ms"]:
        delay = oh.DelayModel.erlang(d_ms / 1e3, cfg.delay_stages)
        rows.append([
            d_ms,
            oh.joint_prob(cfg.coherence, delay, math.inf),
            oh.time_fraction_closed_form(cfg.coherence, delay),
            oh.time_fraction_renewal(cfg.coherence, delay, rng, int(cfg.experiments["renewal_blocks"])),
        ])
    cols = ["mean_delay_ms", "p_delay_within_block", "tau_closed_form", "tau_renewal"]
    return {"time_fractions.csv": (cols, rows)}


RUNNERS = {
    Experiment.DELAY_SWEEP: _delay_sweep,
    Experiment.L_SWEEP: _l_sweep,
    Experiment.INTRA_TIER_LOSS: _intratier,
    Experiment.BOUNDS_VALIDATION: _bounds,
    Experiment.TIME_FRACTION_REPORT: _time_fractions,
}


def load_config(path: Optional[Path]) -> dict[str, Any]:
    if path is None:
        return default_config_dict()
    with open(path) as f:
        return json.load(f)


def run(m: RunManifest) -> int:
    try:
        raw = load_config(m.config_path)
        cfg = parse_config(raw)
    except (OSError, json.JSONDecodeError) as e:
        log.error("cannot read config: %s", e)
        return 2
    except (KeyError, TypeError, ValueError) as e:
        log.error("invalid config: %s", e)
        return 1
    problems = validate(cfg.network)
    if problems:
        for p in problems:
            log.error("invalid config: %s", p)
        return 1

    resolved = cfg.to_dict()
    config_digest = digest(resolved)
    try:
        files = RUNNERS[m.experiment](cfg, m)
    except (InsufficientCandidates, ConfigError, RuntimeError) as e:
        log.error("run failed: %s", e)
        return 2

    manifest = {
        "experiment": m.experiment.value,
        "config": resolved,
        "seed": m.seed,
        "trials": m.trials,
        "version": __version__,
        "config_digest": config_digest,
    }
    outputs = {name: render_csv(cols, rows, config_digest) for name, (cols, rows) in files.items()}
    outputs[f"{m.experiment.value}_manifest.json"] = json.dumps(manifest, indent=2, sort_keys=True) + "\n"
    try:
        m.output_dir.mkdir(parents=True, exist_ok=True)
        clash = [n for n in outputs if (m.output_dir / n).exists()]
        if clash and not m.force:
            log.error("refusing to overwrite %s (use --force)", ", ".join(clash))
            return 2
        for name, text in outputs.items():
            (m.output_dir / name).write_text(text)
    except OSError as e:
        log.error("cannot write outputs: %s", e)
        return 2
    for name in outputs:
        log.info("wrote %s", m.output_dir / name)
    return 0


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="hetcomp", description=__doc__.splitlines()[0])
    p.add_argument("--config", type=Path, default=None, help="JSON config (default: built-in 3-tier setup)")
    p.add_argument("--experiment", choices=[e.value for e in Experiment])
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--trials", type=int, default=ev.DEFAULT_TRIALS)
    p.add_argument("--out", type=Path, default=Path("results"))
    p.add_argument("--force", action="store_true", help="overwrite existing output files")
    p.add_argument("--print-default-config", action="store_true", help="print the built-in config as JSON and exit")
    return p


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    if args.print_default_config:
        print(json.dumps(default_config_dict(), indent=2))
        return 0
    if args.experiment is None:
        parser.error("--experiment is required")
    logging.basicConfig(level=logging.INFO, format="%(levelname)s %(message)s")
    if not 0 <= args.seed < 2**64:
        log.error("seed must be an unsigned 64-bit integer")
        return 1
    manifest = RunManifest(Experiment(args.experiment), args.config, args.seed, args.trials, args.out, args.force)
    return run(manifest)


if __name__ == "__main__":
    raise SystemExit(main())
