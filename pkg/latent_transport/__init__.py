"""Probabilistic latent transport for domain adaptation.

Affine-Gaussian transport operators trained with an entropic optimal transport
objective and a PAC-Bayesian penalty, plus the diffusion view, bounds,
metrics and benchmark suites around them.
"""

__version__ = "0.1.0"

__all__ = ["__version__"]
