"""``latent-transport`` command line entry point."""

from __future__ import annotations

import argparse
import json
import logging
import math
import sys
from pathlib import Path
from typing import Any, Sequence

import numpy as np

from latent_transport import __version__
from latent_transport.benchsuite import (
    METHODS,
    SUITE_CONFIG,
    SUITES,
    ablation_suite,
    content_hash,
    draw_domains,
    generate_scenario,
    run_suite,
    sinkhorn_scaling,
    write_report,
)
from latent_transport.cli.options import CliConfig, build_parser, resolve
from latent_transport.common.errors import LatentTransportError, NumericalError, UnknownSuite
from latent_transport.diffusion import (
    DensityGrid,
    SdeSpec,
    fokker_planck_1d,
    histogram_tv_distance,
    simulate,
    write_trajectory,
)
from latent_transport.evalx import geometry_discrepancy, target_risk, transport_energy, variance_trace
from latent_transport.measures import ParticleCloud, gaussian_fit, read_cloud, sample
from latent_transport.measures.gaussian import GaussianMeasure
from latent_transport.numkit import make_rng
from latent_transport.pacbayes import sample_complexity, theorem3_bound, transfer_bound
from latent_transport.reporting import json_text, write_json
from latent_transport.sinkhorn import sinkhorn_cost
from latent_transport.trainer import DomainPair, LinearHead, lyapunov_trace, train
from latent_transport.transport import TransportParams, transport_cloud

logger = logging.getLogger(__name__)

STREAM_CLI_SIMULATE = 41
STREAM_CLI_METRICS = 42
EXIT_USAGE = 2
EXIT_NUMERIC = 3


def _print_json(payload: Any) -> None:
    sys.stdout.write(json_text(payload))


def _read_labels(path: Path, expected: int) -> np.ndarray:
    cloud = read_cloud(path)
    if cloud.dim != 1:
        raise ValueError(f"label file {path} must have dim=1, got dim={cloud.dim}")
    labels = cloud.points[:, 0]
    if labels.shape[0] != expected:
        raise ValueError(f"label file {path} has {labels.shape[0]} rows, expected {expected}")
    return labels


def _load_model(path: Path) -> tuple[TransportParams, LinearHead | None]:
    if not path.is_file():
        raise FileNotFoundError(f"model file not found: {path}")
    payload = json.loads(path.read_text(encoding="utf-8"))
    params = TransportParams.from_dict(payload["params"] if "params" in payload else payload)
    head = None
    if "head" in payload:
        head = LinearHead(payload["head"]["weights"], payload["head"]["intercept"])
    return params, head


def _training_domains(args: argparse.Namespace, cfg: CliConfig) -> tuple[DomainPair, dict[str, Any]]:
    if args.source is not None or args.target is not None:
        if args.source is None or args.target is None or args.labels is None:
            raise ValueError("--source, --target and --labels must be given together")
        source = read_cloud(args.source).with_tag("source")
        target = read_cloud(args.target).with_tag("target")
        labels = _read_labels(args.labels, source.n)
        origin = {"source": str(args.source), "target": str(args.target), "labels": str(args.labels)}
        return DomainPair(source, labels, target), origin
    scenario = generate_scenario(cfg.severity, cfg.dim, cfg.n_s, cfg.n_t, cfg.train.seed)
    draw = draw_domains(scenario)
    return DomainPair(draw.source, draw.source_labels, draw.target), {"scenario": cfg.scenario_dict()}


def _cmd_train(args: argparse.Namespace) -> int:
    cfg = resolve(args)
    domains, origin = _training_domains(args, cfg)
    arguments = {"command": "train", "config": cfg.train.to_dict(), **origin}
    run_dir = cfg.output_dir / f"train-{content_hash(arguments)}"
    logger.info("training on %d source / %d target points into %s", domains.source.n, domains.target.n, run_dir)
    model, trace = train(domains, cfg.train)
    run_dir.mkdir(parents=True, exist_ok=True)
    write_json(run_dir / "model.json", model.to_dict())
    (run_dir / "trace.csv").write_text(trace.steps_csv(), encoding="utf-8")
    (run_dir / "epochs.csv").write_text(trace.epochs_csv(), encoding="utf-8")
    manifest: dict[str, Any] = {"version": __version__, "arguments": arguments, "summary": model.summary.to_dict()}
    if trace.steps:
        lyap = lyapunov_trace(trace)
        manifest["lyapunov"] = {
            "verdict": lyap.verdict,
            "window": lyap.window,
            "worst_increase": lyap.worst_increase,
            "tolerance": lyap.tolerance,
        }
    write_json(run_dir / "manifest.json", manifest)
    if args.plot:
        from latent_transport.reporting.plots import plot_epoch_metrics, plot_training_curves, save_figure

        if trace.steps:
            save_figure(plot_training_curves(trace), run_dir / "training.png")
        save_figure(plot_epoch_metrics(trace), run_dir / "epochs.png")
    _print_json({"run_dir": str(run_dir), "summary": model.summary.to_dict()})
    return 0


def _cmd_bench(args: argparse.Namespace) -> int:
    if args.suite not in SUITES:
        raise UnknownSuite(f"unknown suite {args.suite!r}; expected one of {', '.join(SUITES)}")
    cfg = resolve(args, SUITE_CONFIG)
    root = cfg.output_dir
    if args.suite == "scaling":
        report = sinkhorn_scaling(
            args.sizes, args.trials, cfg.train.sinkhorn_eps, cfg.train.sinkhorn_k, seed=cfg.train.seed
        )
        arguments = {
            "suite": "scaling",
            "sizes": list(args.sizes),
            "trials": args.trials,
            "eps": cfg.train.sinkhorn_eps,
            "iterations": cfg.train.sinkhorn_k,
            "seed": cfg.train.seed,
        }
        run_dir = root / f"scaling-{content_hash(arguments)}"
        write_json(run_dir / "report.json", {"arguments": arguments, "timings": report.to_dict()})
        _print_json({"run_dir": str(run_dir), "ratios": list(report.ratios)})
        return 0
    if args.suite == "ablation":
        report = ablation_suite(
            cfg.severity, cfg.train, args.seeds, dim=cfg.dim, n_s=cfg.n_s, n_t=cfg.n_t, jobs=args.jobs
        )
    else:
        methods = args.methods or list(METHODS)
        report = run_suite(
            args.severities, methods, args.seeds, cfg.train, dim=cfg.dim, n_s=cfg.n_s, n_t=cfg.n_t, jobs=args.jobs
        )
    run_dir = write_report(report, root)
    logger.info("wrote %d records to %s", len(report.records), run_dir)
    _print_json({"run_dir": str(run_dir), "checks": report.checks})
    return 0


def _cmd_sinkhorn(args: argparse.Namespace) -> int:
    x = read_cloud(args.source)
    y = read_cloud(args.target)
    cost, plan = sinkhorn_cost(x, y, args.eps, args.k)
    _print_json({"cost": cost, "marginal_error": plan.marginal_error, "iterations_run": plan.iterations_run})
    return 0


def _cmd_bound(args: argparse.Namespace) -> int:
    payload: dict[str, Any] = {
        "transfer": transfer_bound(args.risk, args.w2, args.kl, args.ns, args.delta).to_dict(),
        "theorem3": theorem3_bound(args.risk, args.w2, args.kl, args.ns, args.delta).to_dict(),
    }
    if args.epsilon is not None:
        payload["sample_complexity"] = sample_complexity(args.dim, args.epsilon, args.kl)
    _print_json(payload)
    return 0


def _comparison_grid(theta: float, mean: float, sigma: float, offset: float, init_var: float, cells: int) -> DensityGrid:
    """Grid wide enough for the start density and the stationary law (eight standard deviations)."""
    centre = mean + (offset / theta if theta > 0.0 else 0.0)
    spread = max(math.sqrt(init_var), sigma / math.sqrt(2.0 * theta) if theta > 0.0 else sigma, 0.5)
    lo = min(mean, centre) - 8.0 * spread
    hi = max(mean, centre) + 8.0 * spread
    return DensityGrid.normal(lo, hi, cells, mean, init_var)


def _fp_substeps(theta: float, mean: float, sigma: float, offset: float, grid: DensityGrid, step: float) -> int:
    """Smallest integer split of ``step`` that satisfies both explicit-scheme limits with 10% margin."""
    dz = grid.width
    limit = math.inf
    if sigma > 0.0:
        limit = 0.4 * dz * dz / (sigma * sigma)
    speed = max(abs(-theta * (grid.lo - mean) + offset), abs(-theta * (grid.hi - mean) + offset))
    if speed > 0.0:
        limit = min(limit, 0.5 * dz / speed)
    return max(1, math.ceil(step / (0.9 * limit)))


def _cmd_simulate(args: argparse.Namespace) -> int:
    rng = make_rng(args.seed, STREAM_CLI_SIMULATE)
    if args.model is not None:
        params, _ = _load_model(args.model)
        spec = SdeSpec.from_transport(params, steps=args.steps, step=args.step)
    else:
        spec = SdeSpec([args.theta] * args.dim, [args.mean] * args.dim, args.sigma, args.step, args.steps)
    start = GaussianMeasure.isotropic(spec.dim, mean=np.asarray(spec.mean, dtype=float), variance=args.init_var)
    z0 = sample(start, args.particles, rng.child(0))
    trajectory = simulate(spec, z0, rng.child(1), record_every=args.record_every)
    final = ParticleCloud(trajectory.final, "transported")
    payload: dict[str, Any] = {
        "horizon": spec.horizon,
        "particles": final.n,
        "mean": final.points.mean(axis=0).tolist(),
        "variance": final.points.var(axis=0).tolist(),
    }
    if args.fokker_planck:
        if spec.dim != 1:
            raise ValueError("the Fokker-Planck comparison needs --dim 1")
        theta = float(spec.theta[0, 0])
        mean = float(np.asarray(spec.mean, dtype=float)[0])
        sigma = float(np.asarray(spec.sigma, dtype=float)[0])
        offset = float(spec.offset[0])
        grid = _comparison_grid(theta, mean, sigma, offset, args.init_var, args.cells)
        substeps = _fp_substeps(theta, mean, sigma, offset, grid, spec.step)
        density = fokker_planck_1d(
            theta, mean, sigma, grid, spec.step / substeps, spec.steps * substeps, offset=offset
        )
        payload["tv_distance"] = histogram_tv_distance(final, density, args.bins)
    if args.trajectory is not None:
        payload["trajectory"] = str(write_trajectory(trajectory, args.trajectory))
    _print_json(payload)
    return 0


def _cmd_metrics(args: argparse.Namespace) -> int:
    params, head = _load_model(args.model)
    source = read_cloud(args.source).with_tag("source")
    target = read_cloud(args.target).with_tag("target")
    rng = make_rng(args.seed, STREAM_CLI_METRICS)
    transported = transport_cloud(params, source, rng.child(0))
    payload: dict[str, Any] = {
        "energy": transport_energy(source, params, target, args.eps, args.k, rng.child(1)),
        "geometry": geometry_discrepancy(transported, gaussian_fit(target), gaussian_fit(transported)),
        "variance": variance_trace(params),
    }
    if args.labels is not None:
        if head is None:
            raise ValueError(f"model file {args.model} has no readout head; cannot compute risk")
        payload["risk"] = target_risk(head, target, _read_labels(args.labels, target.n))
    _print_json(payload)
    return 0


COMMANDS = {
    "train": _cmd_train,
    "bench": _cmd_bench,
    "sinkhorn": _cmd_sinkhorn,
    "bound": _cmd_bound,
    "simulate": _cmd_simulate,
    "metrics": _cmd_metrics,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(
        level=logging.INFO if args.verbose else logging.WARNING,
        format="%(asctime)s %(levelname)s %(name)s: %(message)s",
    )
    try:
        return COMMANDS[args.command](args)
    except NumericalError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    except (LatentTransportError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
