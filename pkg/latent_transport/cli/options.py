"""Argument parsing and layered configuration for the command line.

Precedence: dataclass defaults < ``--config`` file < explicit flags.
"""

from __future__ import annotations

import argparse
import os
from dataclasses import dataclass
from pathlib import Path
from typing import Any

from latent_transport.benchsuite import DEFAULT_SEVERITIES, SUITE_CONFIG, SUITES
from latent_transport.common.config import ConfigStore, load_config_file
from latent_transport.common.errors import ConfigError
from latent_transport.trainer import TrainConfig

OUTPUT_ENV = "LT_OUTPUT_DIR"
DEFAULT_OUTPUT = "runs"

# flag name -> (TrainConfig field, type, help)
TRAIN_FLAGS: dict[str, tuple[str, type, str]] = {
    "--lr": ("lr", float, "Adam learning rate"),
    "--batch": ("batch", int, "minibatch size"),
    "--alpha": ("alpha", float, "transport weight"),
    "--beta": ("beta", float, "PAC-Bayes weight"),
    "--lambda": ("lam", float, "KL weight inside the transport loss"),
    "--epochs": ("epochs", int, "training epochs"),
    "--sinkhorn-eps": ("sinkhorn_eps", float, "entropic regularization of evaluation Sinkhorn"),
    "--sinkhorn-k": ("sinkhorn_k", int, "Sinkhorn iterations for evaluation"),
    "--posterior-var": ("posterior_var", float, "posterior variance of transport parameters"),
    "--prior-var": ("prior_var", float, "isotropic prior variance"),
    "--init-noise-var": ("init_noise_var", float, "initial transport noise variance"),
    "--eval-size": ("eval_size", int, "evaluation sample size"),
    "--eval-every": ("eval_every", int, "epochs between evaluations"),
    "--eval-seed": ("eval_seed", int, "seed of the frozen evaluation draws"),
    "--patience": ("patience", int, "epochs of plateau before stopping"),
}
SCENARIO_KEYS = {"severity": str, "dim": int, "n_s": int, "n_t": int}
SCENARIO_DEFAULTS: dict[str, Any] = {"severity": "moderate", "dim": 16, "n_s": 2000, "n_t": 2000}


@dataclass(frozen=True)
class CliConfig:
    """Resolved options of a training or benchmark command."""

    train: TrainConfig
    severity: str
    dim: int
    n_s: int
    n_t: int
    output_dir: Path

    def scenario_dict(self) -> dict[str, Any]:
        return {"severity": self.severity, "dim": self.dim, "n_s": self.n_s, "n_t": self.n_t}


def _with_default(text: str, default: Any) -> str:
    return f"{text} (default: {default})"


def _add_train_flags(parser: argparse.ArgumentParser, defaults: TrainConfig | None = None) -> None:
    defaults = defaults or TrainConfig()
    group = parser.add_argument_group("training")
    group.add_argument("--config", type=Path, default=None, help="flat 'key = value' config file (default: none)")
    group.add_argument("--seed", type=int, default=None, help=_with_default("random seed", defaults.seed))
    for flag, (name, kind, text) in TRAIN_FLAGS.items():
        group.add_argument(flag, dest=name, type=kind, default=None, help=_with_default(text, getattr(defaults, name)))
    group.add_argument(
        "--variational", action="store_true", default=None, help="train posterior variances (default: off)"
    )
    group.add_argument(
        "--freeze-noise", dest="freeze_noise", action="store_true", help="keep log noise variances fixed (default: off)"
    )


def _add_scenario_flags(parser: argparse.ArgumentParser, *, severity: bool = True) -> None:
    group = parser.add_argument_group("scenario")
    if severity:
        group.add_argument(
            "--severity", default=None, help=_with_default("shift severity", SCENARIO_DEFAULTS["severity"])
        )
    group.add_argument("--dim", type=int, default=None, help=_with_default("latent dimension", SCENARIO_DEFAULTS["dim"]))
    group.add_argument("--ns", dest="n_s", type=int, default=None, help=_with_default("source samples", SCENARIO_DEFAULTS["n_s"]))
    group.add_argument("--nt", dest="n_t", type=int, default=None, help=_with_default("target samples", SCENARIO_DEFAULTS["n_t"]))


def _add_output_flag(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "--output",
        type=Path,
        default=None,
        help=f"output directory (default: ${OUTPUT_ENV} or '{DEFAULT_OUTPUT}')",
    )


def output_root(args: argparse.Namespace) -> Path:
    if getattr(args, "output", None) is not None:
        return Path(args.output)
    return Path(os.environ.get(OUTPUT_ENV, DEFAULT_OUTPUT))


def resolve(args: argparse.Namespace, base: TrainConfig | None = None) -> CliConfig:
    """Merge defaults (``base`` or the training defaults), the optional config file and explicit flags."""
    store = ConfigStore(defaults={})
    if getattr(args, "config", None) is not None:
        store = load_config_file(args.config)
    file_values = dict(store.defaults)
    scenario_raw = {k: file_values.pop(k) for k in list(file_values) if k in SCENARIO_KEYS}
    train = TrainConfig.from_mapping(file_values, base=base)

    flags = {name: getattr(args, name, None) for name, _, _ in TRAIN_FLAGS.values()}
    flags["seed"] = getattr(args, "seed", None)
    flags["variational"] = getattr(args, "variational", None)
    if getattr(args, "freeze_noise", False):
        flags["train_noise"] = False
    try:
        train = train.with_override(**flags)
    except ValueError as exc:
        raise ConfigError(str(exc)) from exc

    scenario = dict(SCENARIO_DEFAULTS)
    for key, kind in SCENARIO_KEYS.items():
        if key in scenario_raw:
            try:
                scenario[key] = kind(scenario_raw[key])
            except ValueError as exc:
                raise ConfigError(f"option {key!r} expects {kind.__name__}, got {scenario_raw[key]!r}") from exc
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            scenario[key] = flag_value
    return CliConfig(train=train, output_dir=output_root(args), **scenario)


def _seed_list(text: str) -> list[int]:
    try:
        return [int(part) for part in text.split(",") if part.strip()]
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"seeds must be comma-separated integers, got {text!r}") from exc


def _name_list(text: str) -> list[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="latent-transport",
        description="Probabilistic latent transport: training, benchmarks and oracles.",
    )
    parser.add_argument("-v", "--verbose", action="store_true", help="log progress at INFO level (default: off)")
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="train the transport operator on one scenario")
    _add_train_flags(train)
    _add_scenario_flags(train)
    train.add_argument("--source", type=Path, default=None, help="source cloud CSV instead of a generated scenario (default: none)")
    train.add_argument("--target", type=Path, default=None, help="target cloud CSV (default: none)")
    train.add_argument("--labels", type=Path, default=None, help="source labels as a 1-D cloud CSV (default: none)")
    train.add_argument("--plot", action="store_true", help="also write training figures (default: off)")
    _add_output_flag(train)

    bench = sub.add_parser("bench", help="run a benchmark suite")
    bench.add_argument("--suite", default="default", help=f"one of {', '.join(SUITES)} (default: default)")
    bench.add_argument("--seeds", type=_seed_list, default=[1, 2, 3, 4, 5], help="comma-separated seeds (default: 1,2,3,4,5)")
    bench.add_argument(
        "--severities",
        type=_name_list,
        default=list(DEFAULT_SEVERITIES),
        help=f"default-suite severities (default: {','.join(DEFAULT_SEVERITIES)})",
    )
    bench.add_argument(
        "--methods",
        type=_name_list,
        default=None,
        help="default-suite methods (default: finetune_det,mmd_align,det_ot,proposed)",
    )
    bench.add_argument("--jobs", type=int, default=1, help="concurrent suite cells (default: 1)")
    bench.add_argument("--sizes", type=_seed_list, default=[500, 1000], help="scaling-suite cloud sizes (default: 500,1000)")
    bench.add_argument("--trials", type=int, default=5, help="scaling-suite trials per size (default: 5)")
    _add_train_flags(bench, SUITE_CONFIG)
    _add_scenario_flags(bench)
    _add_output_flag(bench)

    sink = sub.add_parser("sinkhorn", help="entropic transport cost between two cloud files")
    sink.add_argument("source", type=Path, help="first cloud CSV")
    sink.add_argument("target", type=Path, help="second cloud CSV")
    sink.add_argument("--eps", type=float, default=0.05, help="entropic regularization (default: 0.05)")
    sink.add_argument("--k", type=int, default=200, help="Sinkhorn iterations (default: 200)")
    sink.add_argument("--seed", type=int, default=0, help="accepted for interface uniformity (default: 0)")

    bound = sub.add_parser("bound", help="evaluate the PAC-Bayesian transfer bounds")
    bound.add_argument("--risk", type=float, default=0.0, help="empirical source risk (default: 0)")
    bound.add_argument("--w2", type=float, default=0.0, help="Wasserstein-2 distance of the domains (default: 0)")
    bound.add_argument("--kl", type=float, default=0.0, help="posterior-prior KL (default: 0)")
    bound.add_argument("--ns", type=int, default=100, help="number of source samples (default: 100)")
    bound.add_argument("--delta", type=float, default=0.05, help="confidence parameter (default: 0.05)")
    bound.add_argument("--epsilon", type=float, default=None, help="also report sample complexity at this accuracy (default: none)")
    bound.add_argument("--dim", type=int, default=16, help="dimension for the sample complexity (default: 16)")
    bound.add_argument("--seed", type=int, default=0, help="accepted for interface uniformity (default: 0)")

    sim = sub.add_parser("simulate", help="Euler-Maruyama run of an OU process, optionally checked against Fokker-Planck")
    sim.add_argument("--theta", type=float, default=1.0, help="mean-reversion rate (default: 1.0)")
    sim.add_argument("--mean", type=float, default=0.0, help="long-run mean (default: 0.0)")
    sim.add_argument("--sigma", type=float, default=1.0, help="diffusion scale (default: 1.0)")
    sim.add_argument("--step", type=float, default=0.01, help="time step (default: 0.01)")
    sim.add_argument("--steps", type=int, default=100, help="number of steps (default: 100)")
    sim.add_argument("--particles", type=int, default=10000, help="number of particles (default: 10000)")
    sim.add_argument("--dim", type=int, default=1, help="dimension (default: 1)")
    sim.add_argument("--init-var", type=float, default=0.25, help="variance of the initial N(mean, v) cloud (default: 0.25)")
    sim.add_argument("--model", type=Path, default=None, help="transport model JSON to simulate instead of an OU process (default: none)")
    sim.add_argument("--fokker-planck", action="store_true", help="compare with the 1-D grid solver (default: off)")
    sim.add_argument("--cells", type=int, default=400, help="grid cells for the comparison (default: 400)")
    sim.add_argument("--bins", type=int, default=50, help="histogram bins for the comparison (default: 50)")
    sim.add_argument("--trajectory", type=Path, default=None, help="write the trajectory CSV here (default: none)")
    sim.add_argument("--record-every", type=int, default=10, help="steps between recorded snapshots (default: 10)")
    sim.add_argument("--seed", type=int, default=0, help="random seed (default: 0)")

    met = sub.add_parser("metrics", help="evaluation metrics of a saved model on saved clouds")
    met.add_argument("--model", type=Path, required=True, help="model JSON written by 'train'")
    met.add_argument("--source", type=Path, required=True, help="source cloud CSV")
    met.add_argument("--target", type=Path, required=True, help="target cloud CSV")
    met.add_argument("--labels", type=Path, default=None, help="target labels as a 1-D cloud CSV (default: none)")
    met.add_argument("--eps", type=float, default=0.05, help="entropic regularization (default: 0.05)")
    met.add_argument("--k", type=int, default=20, help="Sinkhorn iterations (default: 20)")
    met.add_argument("--seed", type=int, default=0, help="seed of the transport noise (default: 0)")
    return parser


__all__ = ["OUTPUT_ENV", "CliConfig", "build_parser", "resolve", "output_root"]
