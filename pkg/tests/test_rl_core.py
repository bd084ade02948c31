"""GAE, update mechanics, Polyak identity, replay-buffer properties."""

import numpy as np
import pytest
from scipy import stats

from t2r.rl import (
    Adam,
    GaussianPolicy,
    LengthMismatch,
    MlpNet,
    NonFiniteLoss,
    ReplayBuffer,
    SacNets,
    SacOptimizers,
    gae,
    get_config,
    polyak_update,
    ppo_update,
    sac_update,
)
from t2r.rl.ppo import ppo_loss_and_grads


def test_gae_suffix_sums():
    adv, ret = gae([1.0, 2.0, 3.0], [0.0, 0.0, 0.0, 0.0], [0, 0, 1], gamma=1.0, lam=1.0)
    assert np.allclose(adv, [6.0, 5.0, 3.0])
    assert np.allclose(ret, adv)


def test_gae_gamma_zero_is_reward_minus_value():
    adv, _ = gae([1.0, 2.0], [0.5, 0.5, 123.0], [0, 0], gamma=0.0, lam=0.95)
    assert np.allclose(adv, [0.5, 1.5])


def test_gae_single_nonterminal_step():
    adv, _ = gae([1.0], [0.0, 1.0], [0], gamma=0.85, lam=0.95)
    assert np.allclose(adv, [1.85])


def test_gae_lambda_zero_is_one_step_td():
    rng = np.random.default_rng(0)
    r = rng.normal(size=10)
    v = rng.normal(size=11)
    d = (rng.uniform(size=10) < 0.3).astype(float)
    adv, _ = gae(r, v, d, gamma=0.9, lam=0.0)
    td = r + 0.9 * (1 - d) * v[1:] - v[:-1]
    assert np.allclose(adv, td)


def test_gae_length_mismatch():
    with pytest.raises(LengthMismatch):
        gae([1.0, 2.0], [0.0, 0.0], [0, 0], 0.9, 0.95)
    with pytest.raises(LengthMismatch):
        gae([1.0], [0.0, 0.0], [0, 0], 0.9, 0.95)


def _sac_setup(tau=5e-3, hidden=8):
    cfg = get_config("sac", "manip", tau=tau, hidden=hidden, layers=1, batch_size=16)
    rng = np.random.default_rng(0)
    nets = SacNets.create(5, 2, cfg, rng)
    opts = SacOptimizers.create(nets, cfg)
    buf = ReplayBuffer(500, 5, 2)
    for _ in range(64):
        buf.add(rng.normal(size=5), rng.uniform(-1, 1, 2), rng.normal(),
                rng.normal(size=5), 0.0)
    return cfg, nets, opts, buf, rng


def test_polyak_identity_elementwise():
    cfg, nets, opts, buf, rng = _sac_setup(tau=5e-3)
    old_target = nets.q1_target.params.copy()
    sac_update(nets, opts, buf.sample(cfg.batch_size, rng), rng, cfg)
    expected = 0.995 * old_target + 0.005 * nets.q1.params
    assert np.allclose(nets.q1_target.params, expected, atol=1e-7)


def test_tau_one_copies_online_params():
    cfg, nets, opts, buf, rng = _sac_setup(tau=1.0)
    sac_update(nets, opts, buf.sample(cfg.batch_size, rng), rng, cfg)
    assert np.array_equal(nets.q1_target.params, nets.q1.params)
    assert np.array_equal(nets.q2_target.params, nets.q2.params)


def test_polyak_update_free_function():
    rng = np.random.default_rng(1)
    target = rng.normal(size=10)
    online = rng.normal(size=10)
    expected = 0.9 * target + 0.1 * online
    polyak_update(target, online, 0.1)
    assert np.allclose(target, expected)


def test_target_update_frequency():
    cfg, nets, opts, buf, rng = _sac_setup()
    from dataclasses import replace

    cfg = replace(cfg, target_update_freq=2)
    before = nets.q1_target.params.copy()
    sac_update(nets, opts, buf.sample(cfg.batch_size, rng), rng, cfg)
    assert np.array_equal(nets.q1_target.params, before)  # update 1: no blend
    sac_update(nets, opts, buf.sample(cfg.batch_size, rng), rng, cfg)
    assert not np.array_equal(nets.q1_target.params, before)  # update 2: blended


def test_replay_buffer_fifo_eviction():
    buf = ReplayBuffer(4, 1, 1)
    for i in range(6):
        buf.add([float(i)], [0.0], 0.0, [0.0], 0.0)
    assert buf.size == 4
    # oldest two (0, 1) were evicted
    kept = sorted(float(x) for x in buf.obs[:, 0])
    assert kept == [2.0, 3.0, 4.0, 5.0]


def test_replay_buffer_uniform_sampling_chi_square():
    buf = ReplayBuffer(64, 1, 1)
    for i in range(64):
        buf.add([float(i)], [0.0], 0.0, [0.0], 0.0)
    rng = np.random.default_rng(123)
    draws = 100_000
    counts = np.zeros(64)
    for _ in range(100):
        batch = buf.sample(1000, rng)
        idx = batch["obs"][:, 0].astype(int)
        counts += np.bincount(idx, minlength=64)
    _, p = stats.chisquare(counts)
    assert p > 0.001, f"sampling not uniform (p={p})"


def test_ppo_zero_advantage_leaves_policy_unchanged():
    cfg = get_config("ppo", "manip", hidden=8, layers=1, minibatch_size=16,
                     ent_coef=0.0, vf_coef=0.0, target_kl=None, epochs=2)
    rng = np.random.default_rng(0)
    policy = GaussianPolicy.create(4, 2, 8, 1, rng)
    value = MlpNet.create((4, 8, 1), rng)
    before = policy.params.copy()
    n = 32
    obs = rng.normal(size=(n, 4)).astype(np.float32)
    actions = rng.normal(size=(n, 2)).astype(np.float32)
    batch = {
        "obs": obs,
        "actions": actions,
        "advantages": np.zeros(n),
        "returns": rng.normal(size=n),
        "logp": policy.log_prob(obs, actions),
    }
    opt_p = Adam(policy.params.size, cfg.lr)
    opt_v = Adam(value.params.size, cfg.lr)
    ppo_update(policy, value, opt_p, opt_v, batch, cfg, rng)
    assert np.allclose(policy.params, before, atol=1e-6)


def test_ppo_target_kl_stops_epoch_loop():
    cfg = get_config("ppo", "manip", hidden=8, layers=1, minibatch_size=32,
                     epochs=15, target_kl=0.05, lr=0.05)  # large lr forces divergence
    rng = np.random.default_rng(0)
    policy = GaussianPolicy.create(4, 2, 8, 1, rng)
    value = MlpNet.create((4, 8, 1), rng)
    n = 64
    obs = rng.normal(size=(n, 4)).astype(np.float32)
    actions = rng.normal(size=(n, 2)).astype(np.float32)
    batch = {
        "obs": obs,
        "actions": actions,
        "advantages": rng.normal(size=n) * 5.0,
        "returns": rng.normal(size=n),
        "logp": policy.log_prob(obs, actions),
    }
    stats_out = ppo_update(policy, value, Adam(policy.params.size, cfg.lr),
                           Adam(value.params.size, cfg.lr), batch, cfg, rng)
    assert stats_out.epochs_run < cfg.epochs


def test_non_finite_loss_raises_with_diagnostics():
    cfg = get_config("ppo", "manip", hidden=8, layers=1, minibatch_size=16, epochs=1)
    rng = np.random.default_rng(0)
    policy = GaussianPolicy.create(4, 2, 8, 1, rng)
    value = MlpNet.create((4, 8, 1), rng)
    n = 16
    obs = rng.normal(size=(n, 4)).astype(np.float32)
    actions = rng.normal(size=(n, 2)).astype(np.float32)
    batch = {
        "obs": obs,
        "actions": actions,
        "advantages": np.full(n, np.nan),
        "returns": rng.normal(size=n),
        "logp": policy.log_prob(obs, actions),
    }
    with pytest.raises(NonFiniteLoss) as exc:
        ppo_update(policy, value, Adam(policy.params.size, cfg.lr),
                   Adam(value.params.size, cfg.lr), batch, cfg, rng)
    assert exc.value.diagnostics


def test_mlp_param_count_matches_formula():
    rng = np.random.default_rng(0)
    sizes = (7, 16, 16, 3)
    net = MlpNet.create(sizes, rng)
    expected = sum(sizes[i] * sizes[i + 1] + sizes[i + 1] for i in range(len(sizes) - 1))
    assert net.params.size == expected
    assert np.all(np.isfinite(net.params))


def test_rollout_splits_steps_across_workers():
    from t2r import envlab
    from t2r.rl.rollout import batch_hash, collect_rollout

    reward = envlab.oracle_reward("liftcube_lite")
    rng = np.random.default_rng(0)
    policy = GaussianPolicy.create(envlab.obs_dim("liftcube_lite"), 4, 8, 1, rng)
    value = MlpNet.create((envlab.obs_dim("liftcube_lite"), 8, 1), rng)

    def run(seed):
        envs = [__import__("t2r.envlab", fromlist=["make_env"]).make_env("liftcube_lite", 50)
                for _ in range(8)]
        batch, _, _ = collect_rollout(
            envs, policy, value, steps_per_update=3200, reward=reward,
            rng=np.random.default_rng(seed), env_seed_rng=np.random.default_rng(seed + 1),
        )
        return batch

    batch = run(7)
    assert batch["rewards"].shape == (400, 8)  # 3200 total -> 400 per worker
    # fixed seeds -> identical batch hash across collections
    assert batch_hash(run(7)) == batch_hash(run(7))
    assert batch_hash(run(8)) != batch_hash(run(7))


def test_rollout_constant_zero_reward():
    from t2r import envlab
    from t2r.rdsl import parse, typecheck
    from t2r.rl.rollout import collect_rollout

    schema = envlab.env_schema("liftcube_lite")
    source = "def compute_dense_reward(action):\n    return 0.0\n"
    zero = typecheck(parse(source), schema, source)
    rng = np.random.default_rng(0)
    policy = GaussianPolicy.create(envlab.obs_dim("liftcube_lite"), 4, 8, 1, rng)
    value = MlpNet.create((envlab.obs_dim("liftcube_lite"), 8, 1), rng)
    envs = [envlab.make_env("liftcube_lite", 50) for _ in range(4)]
    batch, _, incidents = collect_rollout(
        envs, policy, value, steps_per_update=400, reward=zero,
        rng=np.random.default_rng(1), env_seed_rng=np.random.default_rng(2),
    )
    assert np.all(batch["rewards"] == 0.0)
    assert incidents == 0
