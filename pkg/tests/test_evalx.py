import math

import numpy as np
import pytest

from latent_transport.common.errors import DimMismatch, ZeroVariance
from latent_transport.evalx import (
    MetricRecord,
    compare_methods,
    covariance_calibration,
    covariance_mismatch,
    geometry_discrepancy,
    target_risk,
    transport_energy,
    variance_trace,
    z_statistic,
)
from latent_transport.measures import GaussianMeasure, ParticleCloud, gaussian_fit, sample
from latent_transport.numkit import make_rng
from latent_transport.sinkhorn import sinkhorn_cost
from latent_transport.trainer import LinearHead
from latent_transport.transport import TransportParams


def _record(method, seed, risk, geometry=0.0, scenario="moderate"):
    return MetricRecord(scenario, method, seed, geometry, risk, 1.0, 1.0)


def test_geometry_identical_models_is_zero():
    g = GaussianMeasure([1.0, 2.0], [[2.0, 0.3], [0.3, 1.0]])
    cloud = ParticleCloud(make_rng(0, 0).normal((10, 2)), "transported")
    assert geometry_discrepancy(cloud, g, g) == 0.0


def test_geometry_mean_gap_with_identity_covariances():
    cloud = ParticleCloud(make_rng(0, 1).normal((10, 2)), "transported")
    value = geometry_discrepancy(cloud, GaussianMeasure.isotropic(2), GaussianMeasure.isotropic(2, mean=[0.3, 0.4]))
    assert value == pytest.approx(0.25)


def test_geometry_variance_mismatch_moment():
    transported_model = GaussianMeasure([0.0], [[2.0]])
    cloud = sample(transported_model, 10**5, make_rng(0, 2), domain_tag="transported")
    value = geometry_discrepancy(cloud, GaussianMeasure([0.0], [[1.0]]), transported_model)
    assert value == pytest.approx(0.5, rel=0.02)


def test_geometry_positive_for_different_models():
    rng = make_rng(0, 3)
    cloud = ParticleCloud(rng.normal((50, 3)), "transported")
    for _ in range(5):
        g0 = GaussianMeasure(rng.normal(3), np.eye(3))
        g1 = GaussianMeasure(rng.normal(3), 2.0 * np.eye(3))
        assert geometry_discrepancy(cloud, g0, g1) > 0.0


def test_geometry_needs_two_points_and_matching_dims():
    g = GaussianMeasure.isotropic(2)
    with pytest.raises(ValueError, match="at least 2"):
        geometry_discrepancy(ParticleCloud([[0.0, 0.0]]), g, g)
    with pytest.raises(DimMismatch):
        geometry_discrepancy(ParticleCloud(np.zeros((3, 2))), g, GaussianMeasure.isotropic(3))


def test_covariance_calibration_cases():
    g_s = GaussianMeasure.isotropic(2)
    params = TransportParams(np.eye(2), np.zeros(2), np.log([0.5, 1.5]))
    assert covariance_calibration(params, g_s, GaussianMeasure([0.0, 0.0], np.diag([0.5, 1.5]))) == pytest.approx(0.0)
    one_d = TransportParams([[1.0]], [0.0], [0.0])
    assert covariance_calibration(one_d, GaussianMeasure.isotropic(1), GaussianMeasure([0.0], [[2.0]])) == pytest.approx(1.0)


def test_covariance_mismatch_scales_quadratically():
    a = np.diag([1.0, 2.0, 3.0])
    b = np.diag([2.0, 2.0, 1.0])
    assert covariance_mismatch(3.0 * a, 3.0 * b) == pytest.approx(9.0 * covariance_mismatch(a, b))


def test_covariance_mismatch_rotation_invariant():
    rng = make_rng(1, 0)
    for _ in range(5):
        q, _ = np.linalg.qr(rng.normal((3, 3)))
        g = rng.normal((3, 3))
        sigma_t = g @ g.T
        sigma_phi = np.diag(rng.uniform(3) + 0.1)
        rotated = covariance_mismatch(q @ sigma_t @ q.T, q @ sigma_phi @ q.T)
        assert rotated == pytest.approx(covariance_mismatch(sigma_t, sigma_phi))


def test_covariance_mismatch_shape_check():
    with pytest.raises(DimMismatch):
        covariance_mismatch(np.eye(2), np.eye(3))


def test_transport_energy_matches_mean_shift_oracle():
    source = sample(GaussianMeasure.isotropic(2), 500, make_rng(2, 0))
    target = ParticleCloud(source.points + np.array([2.0, 0.0]), "target")
    identity = TransportParams.identity(2)
    energy = transport_energy(source, identity, target, 0.05, 200, make_rng(2, 1))
    assert energy == pytest.approx(4.0, rel=0.05)
    shifted = TransportParams(np.eye(2), [2.0, 0.0], identity.log_d)
    assert transport_energy(source, shifted, target, 0.05, 200, make_rng(2, 1)) < energy


def test_transport_energy_identity_matches_plain_sinkhorn():
    rng = make_rng(3, 0)
    source = ParticleCloud(rng.normal((80, 2)))
    target = ParticleCloud(rng.normal((60, 2)) + 1.0, "target")
    plain, _ = sinkhorn_cost(source, target, 0.1, 50)
    energy = transport_energy(source, TransportParams.identity(2), target, 0.1, 50, make_rng(3, 1))
    assert energy == pytest.approx(plain, rel=1e-4)


def test_variance_trace_values():
    assert variance_trace(TransportParams.identity(3, noise_var=1.0)) == pytest.approx(1.0)
    assert variance_trace(TransportParams(np.eye(3), np.zeros(3), np.log([1.0, 2.0, 3.0]))) == pytest.approx(2.0)


def test_target_risk_is_mean_squared_error():
    head = LinearHead([1.0, 0.0], 0.5)
    cloud = ParticleCloud([[1.0, 3.0], [2.0, -1.0]], "target")
    assert target_risk(head, cloud, [1.5, 3.5]) == pytest.approx(0.5)
    with pytest.raises(DimMismatch):
        target_risk(head, cloud, [1.0])


def test_metric_record_validation_and_row():
    rec = MetricRecord("moderate", "proposed", 3, 0.1, 0.2, 0.3, 0.4)
    assert MetricRecord.header() == ["scenario", "method", "seed", "geometry", "risk", "variance", "energy"]
    assert rec.to_row() == ["moderate", "proposed", 3, 0.1, 0.2, 0.3, 0.4]
    with pytest.raises(ValueError, match="risk"):
        MetricRecord("moderate", "proposed", 3, 0.1, -0.2, 0.3, 0.4)
    with pytest.raises(ValueError, match="energy"):
        MetricRecord("moderate", "proposed", 3, 0.1, 0.2, 0.3, math.nan)


def test_z_statistic_values():
    z, p = z_statistic([1.0, -1.0, 1.0, -1.0])
    assert z == 0.0
    assert p == pytest.approx(1.0)
    z, p = z_statistic([2.0, 0.0, 2.0, 0.0])
    assert z == pytest.approx(1.7321, abs=1e-4)
    assert p == pytest.approx(0.0833, abs=1e-4)


def test_z_statistic_sign_follows_mean():
    rng = make_rng(4, 0)
    for _ in range(20):
        deltas = rng.normal(6) + 0.3
        z, _ = z_statistic(deltas)
        assert math.copysign(1.0, z) == math.copysign(1.0, float(np.mean(deltas)))


def test_z_statistic_degenerate_inputs():
    with pytest.raises(ZeroVariance):
        z_statistic([0.0, 0.0, 0.0])
    with pytest.raises(ValueError, match="at least 2"):
        z_statistic([1.0])


def test_compare_methods_pairs_shared_seeds():
    records = [
        _record("det_ot", 1, 1.0),
        _record("det_ot", 2, 1.2),
        _record("det_ot", 3, 0.9),
        _record("proposed", 1, 0.8),
        _record("proposed", 2, 0.7),
        _record("proposed", 4, 0.1),
        _record("proposed", 3, 0.8, scenario="severe"),
    ]
    result = compare_methods(records, scenario="moderate", metric="risk", baseline="det_ot", candidate="proposed")
    assert result.n == 2
    assert result.mean_delta == pytest.approx(0.35)
    assert result.z > 0.0
    assert result.to_dict()["baseline"] == "det_ot"
