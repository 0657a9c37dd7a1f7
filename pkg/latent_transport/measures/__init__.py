"""Probability measures on latent space."""

from .cloud import ParticleCloud, require_same_dim
from .gaussian import (
    GaussianMeasure,
    bures_w2,
    bures_w2_squared,
    gaussian_fit,
    gaussian_kl,
    gaussian_logpdf,
    gaussian_score,
    monge_map,
)
from .io import cloud_from_text, cloud_to_text, read_cloud, write_cloud
from .mixture import MixtureMeasure, mixture_logpdf, sample

__all__ = [
    "ParticleCloud",
    "require_same_dim",
    "GaussianMeasure",
    "MixtureMeasure",
    "sample",
    "gaussian_fit",
    "gaussian_logpdf",
    "gaussian_score",
    "gaussian_kl",
    "bures_w2",
    "bures_w2_squared",
    "monge_map",
    "mixture_logpdf",
    "read_cloud",
    "write_cloud",
    "cloud_to_text",
    "cloud_from_text",
]
