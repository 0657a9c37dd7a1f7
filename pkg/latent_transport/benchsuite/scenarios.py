"""Synthetic covariate-shift scenarios.

Both domains are images of a shared standard-normal latent ``u``: the source
is ``z_s = u`` and the target is ``z_t = m + W u`` with ``W`` the symmetric
square root of the target covariance. Labels are ``w . u + w0 + noise`` in
both domains, so the labelling rule is common and only the inputs shift.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Any

import numpy as np

from latent_transport.measures import GaussianMeasure, ParticleCloud
from latent_transport.numkit import RngStream, as_vector, frozen_array, make_rng, psd_sqrt, symmetrize
from latent_transport.utils import validate_count

STREAM_SCENARIO = 11
STREAM_TRAIN = 12
STREAM_HELDOUT = 13
LABEL_NOISE_STD = 0.1

# (mean shift magnitude, eigenvalue spread)
SEVERITIES: dict[str, tuple[float, float]] = {
    "identity": (0.0, 1.0),
    "synthetic": (0.5, 1.5),
    "moderate": (1.5, 2.5),
    "severe": (3.0, 4.0),
}
DEFAULT_SEVERITIES = ("synthetic", "moderate", "severe")


@dataclass(frozen=True, eq=False)
class Scenario:
    name: str
    dim: int
    source: GaussianMeasure
    target: GaussianMeasure
    label_weights: np.ndarray
    noise_std: float
    n_s: int
    n_t: int
    seed: int

    def __post_init__(self) -> None:
        object.__setattr__(self, "label_weights", as_vector(self.label_weights, name="label_weights", dim=self.dim + 1))

    @property
    def coupled(self) -> bool:
        """Identity scenarios reuse the source latents for the target, sample for sample."""
        return self.name == "identity"

    @property
    def warp(self) -> np.ndarray:
        return psd_sqrt(self.target.covariance)

    def label(self, latents: np.ndarray, noise: np.ndarray) -> np.ndarray:
        return latents @ self.label_weights[:-1] + self.label_weights[-1] + self.noise_std * noise

    def to_dict(self) -> dict[str, Any]:
        return {
            "name": self.name,
            "dim": self.dim,
            "source": {"mean": self.source.mean.tolist(), "covariance": self.source.covariance.tolist()},
            "target": {"mean": self.target.mean.tolist(), "covariance": self.target.covariance.tolist()},
            "label_weights": self.label_weights.tolist(),
            "noise_std": self.noise_std,
            "n_s": self.n_s,
            "n_t": self.n_t,
            "seed": self.seed,
        }


@dataclass(frozen=True, eq=False)
class ScenarioDraw:
    """Training clouds plus labelled held-out clouds for evaluation."""

    source: ParticleCloud
    source_labels: np.ndarray
    target: ParticleCloud
    heldout_source: ParticleCloud
    heldout_target: ParticleCloud
    heldout_labels: np.ndarray


def random_rotation(rng: RngStream, dim: int) -> np.ndarray:
    """Haar-distributed orthogonal matrix (QR with the diagonal sign fixed)."""
    q, r = np.linalg.qr(rng.normal((dim, dim)))
    signs = np.sign(np.diag(r))
    signs[signs == 0.0] = 1.0
    return q * signs


def generate_scenario(severity: str, dim: int, n_s: int, n_t: int, seed: int) -> Scenario:
    """Source ``N(0, I)``; target mean shifted by ``s`` along a random direction and
    covariance ``R diag(geomspace(1/k, k)) R^T``.

    Labels are ``w . u + w0`` on the shared latent ``u``. Since ``z_s = u`` this is the
    linear rule ``w . z + w0`` on source latents; on the target the same rule applies
    to ``W^{-1} (z - m)``, so a source-fitted readout only transfers through the transport.
    """
    if severity not in SEVERITIES:
        raise ValueError(f"unknown severity {severity!r}; expected one of {sorted(SEVERITIES)}")
    validate_count("dim", dim)
    validate_count("n_s", n_s, minimum=2)
    validate_count("n_t", n_t, minimum=2)
    shift, spread = SEVERITIES[severity]
    rng = make_rng(seed, STREAM_SCENARIO)
    direction = rng.child(0).normal(dim)
    direction /= np.linalg.norm(direction)
    rotation = random_rotation(rng.child(1), dim)
    eigen = np.geomspace(1.0 / spread, spread, dim)
    if severity == "identity":
        cov = np.eye(dim)
    else:
        cov = symmetrize(rotation @ np.diag(eigen) @ rotation.T)
    weights = rng.child(2).normal(dim + 1)
    weights[:-1] /= math.sqrt(dim)
    return Scenario(
        name=severity,
        dim=dim,
        source=GaussianMeasure.isotropic(dim),
        target=GaussianMeasure(shift * direction, cov),
        label_weights=weights,
        noise_std=LABEL_NOISE_STD,
        n_s=int(n_s),
        n_t=int(n_t),
        seed=int(seed),
    )


def _domains(scenario: Scenario, rng: RngStream, n_s: int, n_t: int) -> tuple[np.ndarray, np.ndarray, np.ndarray, np.ndarray]:
    u_s = rng.child(0).normal((n_s, scenario.dim))
    if scenario.coupled:
        extra = rng.child(1).normal((max(n_t - n_s, 0), scenario.dim))
        u_t = np.vstack([u_s, extra])[:n_t]
    else:
        u_t = rng.child(1).normal((n_t, scenario.dim))
    z_s = scenario.source.mean + u_s @ scenario.source.chol.T
    if scenario.coupled:
        z_t = scenario.source.mean + u_t @ scenario.source.chol.T
    else:
        z_t = scenario.target.mean + u_t @ scenario.warp
    return u_s, z_s, u_t, z_t


def draw_domains(scenario: Scenario, heldout: int | None = None) -> ScenarioDraw:
    """Sample training and held-out clouds; a pure function of the scenario seed."""
    n_h = heldout or scenario.n_t
    validate_count("heldout", n_h, minimum=2)
    train_rng = make_rng(scenario.seed, STREAM_TRAIN)
    u_s, z_s, _, z_t = _domains(scenario, train_rng, scenario.n_s, scenario.n_t)
    y_s = scenario.label(u_s, train_rng.child(2).normal(scenario.n_s))

    held_rng = make_rng(scenario.seed, STREAM_HELDOUT)
    _, h_s, u_h, h_t = _domains(scenario, held_rng, n_h, n_h)
    y_h = scenario.label(u_h, held_rng.child(2).normal(n_h))
    return ScenarioDraw(
        source=ParticleCloud(z_s, "source"),
        source_labels=frozen_array(y_s, name="source_labels"),
        target=ParticleCloud(z_t, "target"),
        heldout_source=ParticleCloud(h_s, "source"),
        heldout_target=ParticleCloud(h_t, "target"),
        heldout_labels=frozen_array(y_h, name="heldout_labels"),
    )


__all__ = [
    "SEVERITIES",
    "DEFAULT_SEVERITIES",
    "LABEL_NOISE_STD",
    "Scenario",
    "ScenarioDraw",
    "random_rotation",
    "generate_scenario",
    "draw_domains",
]
