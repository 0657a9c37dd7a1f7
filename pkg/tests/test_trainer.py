import numpy as np
import pytest

from latent_transport.benchsuite import draw_domains, generate_scenario
from latent_transport.common.errors import ConfigError, DimMismatch, EmptyTrace
from latent_transport.measures import GaussianMeasure, ParticleCloud, gaussian_fit
from latent_transport.numkit import make_rng
from latent_transport.trainer import (
    AdamState,
    DomainPair,
    EpochRecord,
    LinearHead,
    StepRecord,
    TraceLog,
    TrainConfig,
    adam_step,
    lyapunov_trace,
    task_loss_grad,
    train,
    unified_loss_grad,
)
from latent_transport.trainer.loop import STREAM_SHUFFLE
from latent_transport.transport import TransportParams, transport_loss, transport_mean

FAST = dict(
    lr=0.01,
    batch=100,
    epochs=100,
    eval_size=300,
    eval_every=10,
    patience=1000,
    sinkhorn_eps=0.5,
    sinkhorn_k=100,
)


def _domains(severity="moderate", dim=2, n=400, seed=3):
    draw = draw_domains(generate_scenario(severity, dim, n, n, seed))
    return DomainPair(draw.source, draw.source_labels, draw.target)


def _objective_setup(dim=4, seed=0):
    rng = make_rng(seed, 0)
    points = rng.normal((30, dim))
    labels = rng.normal(30)
    g_s = GaussianMeasure.isotropic(dim)
    g = rng.normal((dim, dim))
    g_t = GaussianMeasure(rng.normal(dim), g @ g.T / dim + 0.5 * np.eye(dim))
    head = LinearHead(rng.normal(dim), 0.3)
    return rng, points, labels, g_s, g_t, head


def test_config_defaults():
    config = TrainConfig()
    assert (config.lr, config.batch, config.alpha, config.beta, config.sinkhorn_k, config.epochs) == (
        1e-3,
        256,
        0.8,
        0.2,
        20,
        200,
    )
    assert (config.lam, config.prior_var, config.eval_every) == (500.0, 0.04, 20)


@pytest.mark.parametrize(
    "overrides, match",
    [
        ({"alpha": -0.1}, "alpha"),
        ({"lr": 0.0}, "lr"),
        ({"batch": 1}, "batch"),
        ({"epochs": -1}, "epochs"),
        ({"adam_beta1": 1.0}, "adam_beta1"),
        ({"sinkhorn_k": 0}, "sinkhorn_k"),
    ],
)
def test_config_validation(overrides, match):
    with pytest.raises(ValueError, match=match):
        TrainConfig(**overrides)


def test_config_from_mapping_coerces_text():
    config = TrainConfig.from_mapping({"lambda": "5", "k": "40", "variational": "yes", "lr": "0.01"})
    assert config.lam == 5.0
    assert config.sinkhorn_k == 40
    assert config.variational is True
    assert config.lr == 0.01


def test_config_from_mapping_errors():
    with pytest.raises(ConfigError, match="unknown"):
        TrainConfig.from_mapping({"learning_rate": "0.1"})
    with pytest.raises(ConfigError, match="batch"):
        TrainConfig.from_mapping({"batch": "many"})


def test_config_override_ignores_none():
    config = TrainConfig().with_override(lr=0.5, batch=None)
    assert config.lr == 0.5 and config.batch == 256


def test_adam_zero_gradient_keeps_parameters():
    state, params = adam_step(AdamState.zeros(3), np.array([1.0, 2.0, 3.0]), np.zeros(3), 0.1)
    assert np.array_equal(params, [1.0, 2.0, 3.0])
    assert state.t == 1


def test_adam_first_step_is_sign_of_gradient():
    grad = np.array([0.5, -2.0, 1e-3])
    _, params = adam_step(AdamState.zeros(3), np.zeros(3), grad, 0.01)
    assert params == pytest.approx(-0.01 * grad / (np.abs(grad) + 1e-8))
    assert params == pytest.approx(-0.01 * np.sign(grad), rel=1e-4)


def test_adam_is_deterministic():
    def run():
        state, x = AdamState.zeros(2), np.array([1.0, -1.0])
        for k in range(5):
            state, x = adam_step(state, x, np.array([x[0] * k, 0.3]), 0.05)
        return x

    assert np.array_equal(run(), run())


def test_adam_shape_mismatch():
    with pytest.raises(DimMismatch):
        adam_step(AdamState.zeros(2), np.zeros(3), np.zeros(3), 0.1)


def test_head_fit_recovers_linear_rule():
    rng = make_rng(1, 0)
    x = rng.normal((50, 3))
    y = x @ np.array([1.0, -2.0, 0.5]) + 4.0
    head = LinearHead.fit(x, y)
    assert head.weights == pytest.approx([1.0, -2.0, 0.5])
    assert head.intercept == pytest.approx(4.0)
    assert LinearHead.from_vector(head.to_vector()).intercept == pytest.approx(4.0)


def test_unified_loss_without_regularizers_is_task_loss():
    _, points, labels, g_s, g_t, head = _objective_setup()
    config = TrainConfig(alpha=0.0, beta=0.0)
    params = TransportParams.identity(4, 0.01)
    value, _ = unified_loss_grad(params, head, points, labels, g_s, g_t, config)
    task, _, _ = task_loss_grad(params, head, points, labels)
    assert value.total == task
    assert value.transport == 0.0 and value.pac == 0.0


def test_unified_loss_perfect_head_is_zero():
    _, points, _, g_s, g_t, head = _objective_setup()
    params = TransportParams(2.0 * np.eye(4), np.ones(4), np.zeros(4))
    labels = head.predict(transport_mean(params, points))
    value, _ = unified_loss_grad(params, head, points, labels, g_s, g_t, TrainConfig(alpha=0.0, beta=0.0))
    assert value.total == pytest.approx(0.0, abs=1e-20)


def test_unified_loss_components_recombine():
    _, points, labels, g_s, g_t, head = _objective_setup()
    config = TrainConfig()
    params = TransportParams(1.1 * np.eye(4), 0.2 * np.ones(4), np.full(4, -1.0))
    value, _ = unified_loss_grad(params, head, points, labels, g_s, g_t, config)
    assert abs(value.total - (value.task + config.alpha * value.transport + config.beta * value.pac)) <= 1e-12
    assert value.transport == pytest.approx(transport_loss(params, g_s, g_t, config.lam).total)


def test_unified_loss_batch_validation():
    _, points, labels, g_s, g_t, head = _objective_setup()
    with pytest.raises(DimMismatch):
        unified_loss_grad(TransportParams.identity(4), head, points, labels[:-1], g_s, g_t, TrainConfig())


def _numeric_gradients(params, head, points, labels, g_s, g_t, config, h=1e-5):
    def total(vec, head_vec):
        value, _ = unified_loss_grad(
            TransportParams.from_vector(vec, params.dim), LinearHead.from_vector(head_vec), points, labels, g_s, g_t, config
        )
        return value.total

    vec, head_vec = params.to_vector(), head.to_vector()
    grad_params = np.empty_like(vec)
    for i in range(vec.size):
        up, down = vec.copy(), vec.copy()
        up[i] += h
        down[i] -= h
        grad_params[i] = (total(up, head_vec) - total(down, head_vec)) / (2 * h)
    grad_head = np.empty_like(head_vec)
    for i in range(head_vec.size):
        up, down = head_vec.copy(), head_vec.copy()
        up[i] += h
        down[i] -= h
        grad_head[i] = (total(vec, up) - total(vec, down)) / (2 * h)
    return grad_params, grad_head


@pytest.mark.parametrize("point", ["init"] + [f"random{i}" for i in range(10)])
def test_unified_gradient_matches_finite_differences(point):
    rng, points, labels, g_s, g_t, head = _objective_setup(seed=7)
    config = TrainConfig()
    if point == "init":
        params = TransportParams.identity(4, config.init_noise_var)
    else:
        local = make_rng(int(point[len("random") :]), 99)
        params = TransportParams(
            np.eye(4) + 0.2 * local.normal((4, 4)), 0.5 * local.normal(4), local.uniform(4) - 1.5
        )
    _, gradient = unified_loss_grad(params, head, points, labels, g_s, g_t, config)
    fd_params, fd_head = _numeric_gradients(params, head, points, labels, g_s, g_t, config)
    assert gradient.params == pytest.approx(fd_params, rel=1e-4, abs=1e-6)
    assert gradient.head == pytest.approx(fd_head, rel=1e-4, abs=1e-6)


def test_gradient_pieces_recombine():
    _, points, labels, g_s, g_t, head = _objective_setup(seed=4)
    config = TrainConfig()
    params = TransportParams(1.2 * np.eye(4), 0.3 * np.ones(4), np.full(4, -3.0))
    _, gradient = unified_loss_grad(params, head, points, labels, g_s, g_t, config)
    _, task_grad, _ = task_loss_grad(params, head, points, labels)
    assert np.array_equal(gradient.params, gradient.sampled + gradient.pac_mean)
    assert gradient.sampled - gradient.steering == pytest.approx(task_grad, abs=1e-12)
    _, no_pac = unified_loss_grad(params, head, points, labels, g_s, g_t, TrainConfig(beta=0.0))
    assert not np.any(no_pac.pac_mean) and not np.any(no_pac.pac_log_var)


def test_training_steps_record_the_objective():
    domains = _domains(n=300)
    config = TrainConfig(**{**FAST, "epochs": 1})
    _, trace = train(domains, config)
    idx = make_rng(config.seed, STREAM_SHUFFLE).permutation(domains.source.n)[: config.batch]
    value, _ = unified_loss_grad(
        TransportParams.identity(2, config.init_noise_var),
        LinearHead.fit(domains.source.points, domains.labels),
        domains.source.points[idx],
        domains.labels[idx],
        gaussian_fit(domains.source),
        gaussian_fit(domains.target),
        config,
    )
    first = trace.steps[0]
    assert first.total_loss == pytest.approx(value.total, rel=1e-12)
    assert first.transport_loss == pytest.approx(value.transport, rel=1e-12)
    assert first.pac_kl == pytest.approx(value.pac, rel=1e-12, abs=1e-12)


def test_domain_pair_validation():
    source = ParticleCloud(np.zeros((4, 2)))
    with pytest.raises(DimMismatch):
        DomainPair(source, np.zeros(3), ParticleCloud(np.zeros((4, 2)), "target"))
    with pytest.raises(DimMismatch):
        DomainPair(source, np.zeros(4), ParticleCloud(np.zeros((4, 3)), "target"))


def test_zero_epochs_returns_initialization():
    domains = _domains()
    model, trace = train(domains, TrainConfig(epochs=0, eval_size=200))
    assert np.array_equal(model.params.to_vector(), TransportParams.identity(2, 1e-2).to_vector())
    assert trace.steps == []
    assert [e.epoch for e in trace.epochs] == [0]
    assert model.summary.steps_run == 0
    head = LinearHead.fit(domains.source.points, domains.labels)
    assert np.array_equal(model.head.to_vector(), head.to_vector())


def test_training_is_deterministic():
    domains = _domains(n=300)
    config = TrainConfig(**{**FAST, "epochs": 5, "eval_every": 1})
    first_model, first = train(domains, config)
    second_model, second = train(domains, config)
    assert first.steps_csv() == second.steps_csv()
    assert first.epochs_csv() == second.epochs_csv()
    assert np.array_equal(first_model.params.to_vector(), second_model.params.to_vector())


def test_training_halves_transport_energy():
    model, trace = train(_domains(), TrainConfig(**FAST))
    summary = model.summary
    assert summary.steps_run == 100 * 4
    assert summary.final_energy <= 0.5 * summary.initial_energy
    assert summary.final_geometry < summary.initial_geometry
    assert summary.smoothness > 0.0
    assert [e.epoch for e in trace.epochs] == list(range(0, 101, 10))
    lyap = lyapunov_trace(trace)
    assert lyap.series.shape == (400,)
    assert np.all(lyap.series >= 0.0)


def test_training_logs_decomposed_steps():
    config = TrainConfig(**{**FAST, "epochs": 3})
    _, trace = train(_domains(n=300), config)
    for record in trace.steps:
        recombined = record.task_loss + config.alpha * record.transport_loss + config.beta * record.pac_kl
        assert record.total_loss == pytest.approx(recombined, abs=1e-12)


def test_removing_transport_term_hurts_geometry():
    domains = _domains()
    with_transport, _ = train(domains, TrainConfig(**FAST))
    without, _ = train(domains, TrainConfig(**{**FAST, "alpha": 0.0}))
    assert without.summary.final_geometry > with_transport.summary.final_geometry


def test_frozen_noise_keeps_log_variance():
    model, _ = train(_domains(n=200), TrainConfig(**{**FAST, "epochs": 5, "train_noise": False}))
    assert np.array_equal(model.params.log_d, model.initial_params.log_d)


def test_variational_mode_trains_posterior_variance():
    config = TrainConfig(**{**FAST, "epochs": 5, "variational": True})
    model, trace = train(_domains(n=200), config)
    assert not np.allclose(model.posterior.variance, config.posterior_var)
    assert trace.epochs[-1].param_var != config.posterior_var


def test_early_stop_on_plateau():
    domains = _domains(severity="identity", n=200)
    config = TrainConfig(**{**FAST, "patience": 2, "plateau_tol": 1e9, "epochs": 50})
    model, trace = train(domains, config)
    assert model.summary.stopped_early
    assert model.summary.epochs_run == 2
    assert trace.epochs[-1].epoch == 2


def test_trace_log_rules():
    trace = TraceLog()
    trace.add_step(StepRecord(1, 1.0, 1.0, 0.0, 0.0, 0.1))
    with pytest.raises(ValueError, match="does not follow"):
        trace.add_step(StepRecord(1, 1.0, 1.0, 0.0, 0.0, 0.1))
    with pytest.raises(ValueError, match="not finite"):
        trace.add_step(StepRecord(2, float("nan"), 1.0, 0.0, 0.0, 0.1))
    with pytest.raises(EmptyTrace):
        trace.summary()
    assert trace.steps_csv().splitlines()[0] == "step,total_loss,task_loss,transport_loss,pac_kl,grad_norm"
    assert trace.steps_csv(include_timing=True).splitlines()[0].endswith(",wall_ms")


def test_trace_summary_variance_band():
    trace = TraceLog()
    for epoch, var in enumerate([1.0, 0.8, 1.5]):
        trace.add_epoch(EpochRecord(epoch, 1.0, 2.0 - epoch * 0.5, 0.1, var, 0.01))
    summary = trace.summary(stopped_early=False, smoothness=3.0)
    assert (summary.variance_ratio_min, summary.variance_ratio_max) == (0.8, 1.5)
    assert summary.initial_energy == 2.0 and summary.final_energy == 1.0
    assert summary.to_dict()["smoothness"] == 3.0


def test_trained_model_serializes():
    model, _ = train(_domains(n=200), TrainConfig(**{**FAST, "epochs": 2}))
    payload = model.to_dict()
    assert set(payload) == {"params", "head", "config", "summary", "posterior_mean_var"}
    assert np.array_equal(TransportParams.from_dict(payload["params"]).to_vector(), model.params.to_vector())
    assert payload["params"]["dim"] == 2
    assert payload["posterior_mean_var"] == pytest.approx(model.config.posterior_var)
