import math

import numpy as np
import pytest

from latent_transport.common.errors import DimMismatch
from latent_transport.measures import GaussianMeasure, MixtureMeasure, ParticleCloud
from latent_transport.numkit import make_rng
from latent_transport.transport import (
    LOG_VAR_MAX,
    LOG_VAR_MIN,
    TransportParams,
    expected_cost,
    parameter_count,
    pushforward_gaussian,
    pushforward_mixture,
    transport_cloud,
    transport_loss,
    transport_loss_grad,
    transport_loss_mc,
    transport_mean,
    transport_sample,
)


def _random_gaussian(rng, dim):
    g = rng.normal((dim, dim))
    return GaussianMeasure(rng.normal(dim), g @ g.T / dim + 0.5 * np.eye(dim))


def _random_params(rng, dim):
    return TransportParams(np.eye(dim) + 0.3 * rng.normal((dim, dim)), rng.normal(dim), rng.uniform(dim) * 2.0 - 1.0)


def _finite_difference(params, g_s, g_t, lam, h=1e-5):
    base = params.to_vector()
    grad = np.empty_like(base)
    for i in range(base.size):
        up, down = base.copy(), base.copy()
        up[i] += h
        down[i] -= h
        f_up = transport_loss(TransportParams.from_vector(up, params.dim), g_s, g_t, lam).total
        f_down = transport_loss(TransportParams.from_vector(down, params.dim), g_s, g_t, lam).total
        grad[i] = (f_up - f_down) / (2.0 * h)
    return grad


def test_params_clip_log_variance():
    params = TransportParams(np.eye(2), np.zeros(2), [-np.inf, 100.0])
    assert params.log_d[0] == LOG_VAR_MIN
    assert params.log_d[1] == LOG_VAR_MAX


def test_params_reject_nan_and_bad_shapes():
    with pytest.raises(ValueError, match="NaN"):
        TransportParams(np.eye(1), [0.0], [np.nan])
    with pytest.raises(DimMismatch):
        TransportParams(np.ones((2, 3)), [0.0, 0.0], [0.0, 0.0])
    with pytest.raises(DimMismatch):
        TransportParams(np.eye(2), [0.0], [0.0, 0.0])


def test_params_vector_layout_and_json():
    params = TransportParams([[1.0, 2.0], [3.0, 4.0]], [5.0, 6.0], [0.0, -1.0])
    vec = params.to_vector()
    assert vec.size == parameter_count(2) == 8
    assert list(vec[:6]) == [1.0, 2.0, 3.0, 4.0, 5.0, 6.0]
    back = TransportParams.from_json(params.to_json())
    assert np.array_equal(back.to_vector(), vec)
    assert params.to_dict()["A"] == [1.0, 2.0, 3.0, 4.0]


def test_params_from_vector_length_check():
    with pytest.raises(DimMismatch):
        TransportParams.from_vector(np.zeros(7), 2)


def test_params_from_dict_missing_field():
    with pytest.raises(ValueError, match="log_d"):
        TransportParams.from_dict({"A": [1.0], "b": [0.0], "dim": 1})


def test_transport_mean_cases():
    z = np.array([1.0, 0.0])
    assert np.allclose(transport_mean(TransportParams.identity(2), z), z)
    t = np.array([4.0, -1.0])
    assert np.allclose(transport_mean(TransportParams(np.zeros((2, 2)), t, [0.0, 0.0]), z), t)
    assert np.allclose(transport_mean(TransportParams(2.0 * np.eye(2), [1.0, 1.0], [0.0, 0.0]), z), [3.0, 1.0])


def test_transport_mean_dimension_mismatch():
    with pytest.raises(DimMismatch):
        transport_mean(TransportParams.identity(2), np.zeros(3))


def test_transport_sample_vanishing_noise():
    params = TransportParams(np.eye(2), [1.0, 2.0], [-np.inf, -np.inf])
    z = np.array([0.5, -0.5])
    assert np.allclose(transport_sample(params, z, make_rng(0, 0)), transport_mean(params, z), atol=1e-5)


def test_transport_sample_unit_variance():
    params = TransportParams.identity(2, noise_var=1.0)
    draws = transport_sample(params, np.zeros((10**5, 2)), make_rng(0, 1))
    assert np.allclose(draws.var(axis=0), 1.0, rtol=0.02)


def test_transport_sample_is_deterministic():
    params = TransportParams.identity(3, noise_var=0.5)
    z = np.ones(3)
    assert np.array_equal(transport_sample(params, z, make_rng(5, 9)), transport_sample(params, z, make_rng(5, 9)))


def test_transport_cloud_tags_result():
    cloud = ParticleCloud(np.zeros((4, 2)))
    moved = transport_cloud(TransportParams.identity(2), cloud, make_rng(0, 0))
    assert moved.domain_tag == "transported"
    assert moved.n == 4


def test_pushforward_cases():
    g_s = GaussianMeasure([1.0, -1.0], [[2.0, 0.5], [0.5, 1.0]])
    same = pushforward_gaussian(TransportParams.identity(2), g_s)
    assert np.allclose(same.mean, g_s.mean)
    assert np.allclose(same.covariance, g_s.covariance, atol=1e-10)

    one_d = pushforward_gaussian(TransportParams([[2.0]], [0.0], [0.0]), GaussianMeasure([0.0], [[1.0]]))
    assert one_d.covariance[0, 0] == pytest.approx(5.0)

    t = np.array([3.0, 3.0])
    const = pushforward_gaussian(TransportParams(np.zeros((2, 2)), t, np.log([0.5, 0.5])), g_s)
    assert np.allclose(const.mean, t)
    assert np.allclose(const.covariance, 0.5 * np.eye(2))


def test_pushforward_mixture_keeps_weights():
    mixture = MixtureMeasure(((0.25, GaussianMeasure.isotropic(1, mean=-1.0)), (0.75, GaussianMeasure.isotropic(1))))
    pushed = pushforward_mixture(TransportParams([[1.0]], [2.0], [0.0]), mixture)
    assert list(pushed.weights) == [0.25, 0.75]
    assert pushed.gaussians[0].mean == pytest.approx([1.0])
    assert pushed.gaussians[1].covariance[0, 0] == pytest.approx(2.0)


def test_loss_perfect_alignment():
    g = GaussianMeasure([0.5, 0.5], [[1.0, 0.2], [0.2, 1.0]])
    value = transport_loss(TransportParams.identity(2), g, g, 20.0)
    assert value.total == pytest.approx(0.0, abs=1e-8)


def test_loss_one_dimensional_cost_term():
    params = TransportParams([[1.0]], [1.5], [math.log(0.3)])
    g_s = GaussianMeasure([0.7], [[9.0]])
    assert expected_cost(params, g_s) == pytest.approx(1.5**2 + 0.3)


def test_loss_decomposition_and_zero_lambda():
    rng = make_rng(1, 0)
    params, g_s, g_t = _random_params(rng, 3), _random_gaussian(rng, 3), _random_gaussian(rng, 3)
    value = transport_loss(params, g_s, g_t, 7.0)
    assert value.total == pytest.approx(value.cost_term + 7.0 * value.kl_term, abs=1e-12)
    assert value.kl_term >= -1e-12
    assert value.to_dict()["lambda"] == 7.0
    zero = transport_loss(params, g_s, g_t, 0.0)
    assert zero.total == zero.cost_term


def test_loss_rejects_negative_lambda_and_mismatch():
    g = GaussianMeasure.isotropic(2)
    with pytest.raises(ValueError, match="lambda"):
        transport_loss(TransportParams.identity(2), g, g, -1.0)
    with pytest.raises(DimMismatch):
        transport_loss(TransportParams.identity(3), g, g, 1.0)


def test_gradient_vanishes_at_minimum():
    g = GaussianMeasure([1.0, -2.0], [[1.5, 0.3], [0.3, 0.8]])
    grad = transport_loss_grad(TransportParams.identity(2), g, g, 20.0)
    assert np.linalg.norm(grad) <= 1e-8


def test_gradient_b_without_kl():
    rng = make_rng(2, 0)
    params, g_s, g_t = _random_params(rng, 3), _random_gaussian(rng, 3), _random_gaussian(rng, 3)
    grad = transport_loss_grad(params, g_s, g_t, 0.0)
    expected = 2.0 * ((params.A - np.eye(3)) @ g_s.mean + params.b)
    assert np.allclose(grad[9:12], expected)


@pytest.mark.parametrize("dim", [1, 2, 3, 8])
@pytest.mark.parametrize("seed", [0, 1, 2])
def test_gradient_matches_finite_differences(dim, seed):
    rng = make_rng(seed, dim)
    params, g_s, g_t = _random_params(rng, dim), _random_gaussian(rng, dim), _random_gaussian(rng, dim)
    analytic = transport_loss_grad(params, g_s, g_t, 5.0)
    numeric = _finite_difference(params, g_s, g_t, 5.0)
    assert analytic == pytest.approx(numeric, rel=1e-4, abs=1e-6)


def test_monte_carlo_agrees_with_closed_form():
    rng = make_rng(3, 0)
    params, g_s, g_t = _random_params(rng, 2), _random_gaussian(rng, 2), _random_gaussian(rng, 2)
    exact = transport_loss(params, g_s, g_t, 2.0)
    estimate = transport_loss_mc(params, g_s, g_t, 2.0, 20000, make_rng(3, 1))
    assert abs(estimate.total - exact.total) <= 3.0 * estimate.std_error
    assert estimate.n == 20000


def test_monte_carlo_handles_mixture_source():
    mixture = MixtureMeasure.equal_weights(
        [GaussianMeasure.isotropic(1, mean=-2.0), GaussianMeasure.isotropic(1, mean=2.0)]
    )
    params = TransportParams.identity(1, noise_var=0.1)
    estimate = transport_loss_mc(params, mixture, GaussianMeasure.isotropic(1), 0.0, 5000, make_rng(4, 0))
    assert estimate.cost_term == pytest.approx(0.1, rel=0.1)
    assert math.isfinite(estimate.kl_term)


def test_monte_carlo_requires_two_samples():
    g = GaussianMeasure.isotropic(1)
    with pytest.raises(ValueError, match="n"):
        transport_loss_mc(TransportParams.identity(1), g, g, 1.0, 1, make_rng(0, 0))
