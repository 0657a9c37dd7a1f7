import math

import numpy as np
import pytest

from latent_transport.common.errors import DimMismatch, Divergence, NonpositiveTheta, UnstableStep
from latent_transport.diffusion import (
    DensityGrid,
    SdeSpec,
    euler_maruyama,
    fokker_planck_1d,
    histogram_tv_distance,
    ou_stationary_variance,
    simulate,
    variance_trace_series,
    write_trajectory,
)
from latent_transport.measures import GaussianMeasure, ParticleCloud, sample
from latent_transport.numkit import make_rng
from latent_transport.transport import TransportParams, transport_sample


def _normal_pdf(x, variance):
    return np.exp(-0.5 * x * x / variance) / math.sqrt(2.0 * math.pi * variance)


def test_no_dynamics_leaves_particles_unchanged():
    z0 = ParticleCloud(make_rng(0, 0).normal((20, 2)))
    spec = SdeSpec(theta=0.0 * np.eye(2), mean=0.0, sigma=0.0, step=0.1, steps=5)
    assert np.array_equal(euler_maruyama(spec, z0, make_rng(0, 1)).points, z0.points)


def test_single_explicit_euler_step():
    spec = SdeSpec(theta=1.0, mean=0.0, sigma=0.0, step=0.1, steps=1)
    out = euler_maruyama(spec, ParticleCloud([[1.0]]), make_rng(0, 0))
    assert out.points[0, 0] == pytest.approx(0.9)


def test_ou_reaches_stationary_variance():
    spec = SdeSpec(theta=1.0, mean=0.0, sigma=math.sqrt(2.0), step=0.01, steps=1000)
    z0 = ParticleCloud(np.zeros((10**4, 1)))
    out = euler_maruyama(spec, z0, make_rng(1, 0))
    assert float(out.points.var()) == pytest.approx(1.0, rel=0.05)


def test_simulate_is_reproducible():
    spec = SdeSpec(theta=0.5, mean=1.0, sigma=0.3, step=0.05, steps=10)
    z0 = ParticleCloud(np.zeros((5, 1)))
    first = simulate(spec, z0, make_rng(2, 0)).final
    second = simulate(spec, z0, make_rng(2, 0)).final
    assert np.array_equal(first, second)


def test_divergence_is_raised_for_unstable_step():
    spec = SdeSpec(theta=100.0, mean=0.0, sigma=0.0, step=1.0, steps=50)
    with pytest.raises(Divergence):
        euler_maruyama(spec, ParticleCloud([[1.0]]), make_rng(0, 0))


def test_dimension_mismatch_between_spec_and_cloud():
    spec = SdeSpec(theta=[1.0, 1.0], mean=0.0, sigma=1.0, step=0.1, steps=1)
    with pytest.raises(DimMismatch):
        simulate(spec, ParticleCloud([[0.0]]), make_rng(0, 0))


def test_spec_validation():
    with pytest.raises(ValueError, match="sigma"):
        SdeSpec(theta=1.0, mean=0.0, sigma=-1.0, step=0.1, steps=1)
    with pytest.raises(ValueError, match="step"):
        SdeSpec(theta=1.0, mean=0.0, sigma=1.0, step=0.0, steps=1)
    assert SdeSpec(theta=1.0, mean=0.0, sigma=1.0, step=0.25, steps=8).horizon == pytest.approx(2.0)


def test_unit_step_from_transport_reproduces_transport_sample():
    params = TransportParams([[0.8, 0.1], [-0.2, 1.1]], [0.5, -0.3], np.log([0.2, 0.4]))
    z0 = ParticleCloud(make_rng(3, 0).normal((7, 2)))
    spec = SdeSpec.from_transport(params)
    simulated = simulate(spec, z0, make_rng(3, 1)).final
    direct = transport_sample(params, z0.points, make_rng(3, 1))
    assert np.allclose(simulated, direct, atol=1e-12)


def test_trajectory_recording_and_export(tmp_path):
    spec = SdeSpec(theta=1.0, mean=0.0, sigma=1.0, step=0.1, steps=5)
    traj = simulate(spec, ParticleCloud(np.zeros((3, 2)), "source"), make_rng(4, 0), record_every=2)
    assert traj.times == pytest.approx((0.0, 0.2, 0.4, 0.5))
    path = write_trajectory(traj, tmp_path / "traj.csv")
    lines = path.read_text(encoding="utf-8").splitlines()
    assert lines[0] == "time,particle_id,z0,z1"
    assert len(lines) == 1 + 4 * 3


@pytest.mark.parametrize("init_var", [0.25, 4.0])
def test_variance_trace_moves_monotonically_toward_stationary(init_var):
    spec = SdeSpec(theta=1.0, mean=0.0, sigma=math.sqrt(2.0), step=0.01, steps=150)
    z0 = sample(GaussianMeasure.isotropic(1, variance=init_var), 4 * 10**4, make_rng(5, 0))
    traj = simulate(spec, z0, make_rng(5, 1), record_every=1)
    series = variance_trace_series(traj, 100)
    steps = np.diff(series[99:])
    if init_var < 1.0:
        assert np.all(steps > 0.0)
    else:
        assert np.all(steps < 0.0)


def test_ou_stationary_variance_values():
    assert ou_stationary_variance(1.0, math.sqrt(2.0)) == pytest.approx(1.0)
    assert ou_stationary_variance(2.0, 1.0) == pytest.approx(0.25)
    assert ou_stationary_variance(3.0, 0.0) == 0.0


@pytest.mark.parametrize("theta", [0.0, -1.0])
def test_ou_stationary_variance_rejects_nonpositive_theta(theta):
    with pytest.raises(NonpositiveTheta):
        ou_stationary_variance(theta, 1.0)


def test_density_grid_requires_unit_mass():
    with pytest.raises(ValueError, match="integrate"):
        DensityGrid(0.0, 1.0, 4, np.full(4, 2.0))
    grid = DensityGrid.normal(-8.0, 8.0, 320, 0.0, 1.0)
    assert grid.mass() == pytest.approx(1.0, abs=1e-12)
    assert grid.variance() == pytest.approx(1.0, rel=1e-3)


def test_fokker_planck_without_dynamics_is_static():
    grid = DensityGrid.normal(-4.0, 4.0, 100, 0.5, 0.5)
    out = fokker_planck_1d(0.0, 0.0, 0.0, grid, 0.01, 50)
    assert np.allclose(out.values, grid.values)


def test_fokker_planck_heat_kernel():
    grid = DensityGrid.normal(-8.0, 8.0, 320, 0.0, 0.25)
    out = fokker_planck_1d(0.0, 0.0, 1.0, grid, 0.0008, 1250)
    assert np.max(np.abs(out.values - _normal_pdf(out.centers, 1.25))) <= 0.01
    assert out.mass() == pytest.approx(1.0, abs=1e-6)


def test_fokker_planck_conserves_mass_with_drift():
    grid = DensityGrid.normal(-5.0, 5.0, 200, 2.0, 0.3)
    out = fokker_planck_1d(1.5, -1.0, 0.8, grid, 0.001, 1000, offset=0.2)
    assert out.mass() == pytest.approx(1.0, abs=1e-6)


def test_fokker_planck_stability_checks():
    grid = DensityGrid.normal(-4.0, 4.0, 400, 0.0, 1.0)
    with pytest.raises(UnstableStep, match="diffusive"):
        fokker_planck_1d(0.0, 0.0, 1.0, grid, 0.01, 1)
    with pytest.raises(UnstableStep, match="CFL"):
        fokker_planck_1d(50.0, 0.0, 0.0, grid, 0.01, 1)


def test_sde_and_fokker_planck_agree():
    spec = SdeSpec(theta=1.0, mean=0.0, sigma=1.0, step=0.01, steps=100)
    z0 = sample(GaussianMeasure.isotropic(1, variance=0.25), 10**5, make_rng(6, 0))
    particles = euler_maruyama(spec, z0, make_rng(6, 1))
    grid = DensityGrid.normal(-4.0, 4.0, 400, 0.0, 0.25)
    density = fokker_planck_1d(1.0, 0.0, 1.0, grid, 1e-4, 10**4)
    assert histogram_tv_distance(particles, density, 50) <= 0.05


def test_histogram_distance_requires_one_dimension():
    grid = DensityGrid.normal(-4.0, 4.0, 50)
    with pytest.raises(ValueError, match="1-D"):
        histogram_tv_distance(ParticleCloud(np.zeros((3, 2))), grid, 10)
