"""Tanh-squashed Gaussian PPO over RIS phases and symbol counts.

The policy emits raw actions in (-1, 1): N entries mapped to discrete phase
indices, then K V2I and K V2V entries mapped to integer symbol counts. The
surrogate is the clipped-ratio objective with Monte-Carlo returns, a value
MSE term, and a Gaussian entropy bonus; all gradients are hand-derived and
cross-checked against finite differences in the tests.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .mlp import Adam, Mlp

LOG_STD_MIN = -5.0
LOG_STD_MAX = 2.0
_LOG_2PI = float(np.log(2.0 * np.pi))
_TANH_EPS = 1e-6


@dataclass
class PpoConfig:
    obs_dim: int
    act_dim: int
    hidden: int = 256
    lr_actor: float = 3e-4
    lr_critic: float = 1e-3
    clip_eps: float = 0.2
    discount: float = 0.6
    c1: float = 0.5        # value loss weight
    c2: float = 0.01       # entropy bonus weight
    t_update: int = 2048
    n_epochs: int = 10
    minibatch: int = 64
    log_std_init: float = -0.5

    def __post_init__(self) -> None:
        if self.obs_dim < 1 or self.act_dim < 1:
            raise ValueError("obs_dim and act_dim must be >= 1")
        for name in ("hidden", "t_update", "n_epochs", "minibatch"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("lr_actor", "lr_critic", "clip_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must be in [0, 1]")


class PolicyParams:
    """Actor (mean head + state-independent log-std) and critic."""

    def __init__(self, cfg: PpoConfig, rng: np.random.Generator):
        self.actor = Mlp([cfg.obs_dim, cfg.hidden, cfg.hidden, cfg.act_dim], rng, out_scale=0.01)
        self.log_std = np.full(cfg.act_dim, cfg.log_std_init, dtype=float)
        self.critic = Mlp([cfg.obs_dim, cfg.hidden, cfg.hidden, 1], rng)

    def actor_params(self) -> list[np.ndarray]:
        return self.actor.params() + [self.log_std]

    def critic_params(self) -> list[np.ndarray]:
        return self.critic.params()

    def all_params(self) -> list[np.ndarray]:
        return self.actor_params() + self.critic_params()

    def get_flat(self) -> np.ndarray:
        return np.concatenate([p.ravel() for p in self.all_params()])

    def set_flat(self, flat: np.ndarray) -> None:
        i = 0
        for p in self.all_params():
            p[:] = flat[i:i + p.size].reshape(p.shape)
            i += p.size
        if i != flat.size:
            raise ValueError("flat vector length does not match parameter count")

    def n_params(self) -> int:
        return sum(p.size for p in self.all_params())


@dataclass
class ActionSample:
    action: np.ndarray      # tanh-squashed, in (-1, 1)
    pre_squash: np.ndarray  # u = mu + sigma*z, kept so log-probs recompute exactly
    log_prob: float
    value: float


@dataclass
class Transition:
    obs: np.ndarray
    action: np.ndarray
    pre_squash: np.ndarray
    log_prob: float
    value: float
    reward: float
    done: bool


def _clipped_log_std(params: PolicyParams) -> np.ndarray:
    return np.clip(params.log_std, LOG_STD_MIN, LOG_STD_MAX)


def gaussian_log_prob(u: np.ndarray, mu: np.ndarray, log_std: np.ndarray) -> np.ndarray:
    """Row-wise diagonal Gaussian log density of pre-squash u."""
    z = (u - mu) * np.exp(-log_std)
    return np.sum(-0.5 * z * z - log_std - 0.5 * _LOG_2PI, axis=-1)


def squash_correction(u: np.ndarray) -> np.ndarray:
    """Row-wise tanh change-of-variables term sum log(1 - tanh(u)^2 + eps)."""
    a = np.tanh(u)
    return np.sum(np.log(1.0 - a * a + _TANH_EPS), axis=-1)


def sample_action(params: PolicyParams, obs: np.ndarray, rng: np.random.Generator,
                  deterministic: bool = False) -> ActionSample:
    mu, _ = params.actor.forward(obs)
    mu = mu[0]
    log_std = _clipped_log_std(params)
    if deterministic:
        u = mu.copy()
    else:
        u = mu + np.exp(log_std) * rng.standard_normal(mu.shape)
    a = np.tanh(u)
    logp = float(gaussian_log_prob(u, mu, log_std) - squash_correction(u))
    v, _ = params.critic.forward(obs)
    return ActionSample(action=a, pre_squash=u, log_prob=logp, value=float(v[0, 0]))


def map_nu(a, nu_max: int):
    """Raw [-1, 1] -> integer symbol count in [1, nu_max], half away from zero."""
    if nu_max < 1:
        raise ValueError("nu_max must be >= 1")
    arg = (np.asarray(a, dtype=float) + 1.0) / 2.0 * (nu_max - 1)
    nu = np.floor(arg + 0.5).astype(int) + 1
    nu = np.clip(nu, 1, nu_max)
    return nu if nu.ndim else int(nu)


def map_phase_index(a, phases: np.ndarray):
    """Raw [-1, 1] -> index of the nearest phase to pi*(a+1); ties go low."""
    phases = np.asarray(phases, dtype=float)
    if phases.size == 0:
        raise ValueError("phase set must be nonempty")
    target = np.pi * (np.asarray(a, dtype=float) + 1.0)
    idx = np.argmin(np.abs(phases[None, :] - np.atleast_1d(target)[:, None]), axis=1)
    return idx if np.ndim(a) else int(idx[0])


def map_phase(a, phases: np.ndarray):
    phases = np.asarray(phases, dtype=float)
    return phases[map_phase_index(a, phases)]


def rollout(env, params: PolicyParams, n_steps: int, rng: np.random.Generator) -> list[Transition]:
    """Collect n_steps transitions, resetting the env at episode ends."""
    out: list[Transition] = []
    obs = env.reset()
    while len(out) < n_steps:
        sample = sample_action(params, obs, rng)
        next_obs, reward, done, _ = env.step(sample.action)
        out.append(Transition(obs=np.asarray(obs, dtype=float), action=sample.action,
                              pre_squash=sample.pre_squash, log_prob=sample.log_prob,
                              value=sample.value, reward=float(reward), done=bool(done)))
        obs = env.reset() if done else next_obs
    return out


def returns_and_advantages(rewards: np.ndarray, values: np.ndarray, dones: np.ndarray,
                           discount: float) -> tuple[np.ndarray, np.ndarray]:
    """Monte-Carlo returns G_t and standardized advantages G_t - V(s_t)."""
    rewards = np.asarray(rewards, dtype=float)
    values = np.asarray(values, dtype=float)
    dones = np.asarray(dones, dtype=bool)
    n = rewards.size
    returns = np.zeros(n)
    running = 0.0
    for t in range(n - 1, -1, -1):
        if dones[t]:
            running = 0.0
        running = rewards[t] + discount * running
        returns[t] = running
    adv = returns - values
    adv = (adv - adv.mean()) / (adv.std() + 1e-8)
    return returns, adv


def _surrogate_forward(params: PolicyParams, batch: dict, cfg: PpoConfig):
    """Shared forward pass for the PPO loss; returns (loss, aux dict)."""
    obs = batch["obs"]
    u = batch["pre_squash"]
    old_logp = batch["old_log_prob"]
    adv = batch["advantages"]
    rets = batch["returns"]

    mu, cache_a = params.actor.forward(obs)
    log_std = _clipped_log_std(params)
    sigma = np.exp(log_std)
    z = (u - mu) / sigma
    logp = np.sum(-0.5 * z * z - log_std - 0.5 * _LOG_2PI, axis=1) - squash_correction(u)
    ratio = np.exp(logp - old_logp)
    surr1 = ratio * adv
    surr2 = np.clip(ratio, 1.0 - cfg.clip_eps, 1.0 + cfg.clip_eps) * adv
    l_clip = float(np.mean(np.minimum(surr1, surr2)))

    v, cache_c = params.critic.forward(obs)
    v = v[:, 0]
    l_vf = float(np.mean((v - rets) ** 2))

    entropy = float(np.sum(log_std + 0.5 * (1.0 + _LOG_2PI)))
    loss = -l_clip + cfg.c1 * l_vf - cfg.c2 * entropy
    aux = {"mu": mu, "cache_a": cache_a, "sigma": sigma, "z": z, "logp": logp,
           "ratio": ratio, "surr1": surr1, "surr2": surr2, "v": v, "cache_c": cache_c,
           "l_clip": l_clip, "l_vf": l_vf, "entropy": entropy}
    return loss, aux


def ppo_loss(params: PolicyParams, batch: dict, cfg: PpoConfig) -> float:
    loss, _ = _surrogate_forward(params, batch, cfg)
    return loss


def ppo_losses_and_grads(params: PolicyParams, batch: dict, cfg: PpoConfig):
    """Loss plus hand-derived gradients for every parameter array.

    Returns (stats, actor_grads, critic_grads) where actor_grads lines up
    with PolicyParams.actor_params() (log-std gradient last).
    """
    loss, aux = _surrogate_forward(params, batch, cfg)
    if not np.isfinite(loss):
        raise RuntimeError("non-finite PPO loss; aborting update")
    obs = batch["obs"]
    adv = batch["advantages"]
    rets = batch["returns"]
    n = obs.shape[0]

    # clipped surrogate: gradient flows only where min() selects the raw branch
    mask = (aux["surr1"] <= aux["surr2"]).astype(float)
    g_logp = -(adv * aux["ratio"] * mask) / n
    g_mu = g_logp[:, None] * (aux["z"] / aux["sigma"])
    grads_w, grads_b = params.actor.backward(aux["cache_a"], g_mu)

    g_log_std = np.sum(g_logp[:, None] * (aux["z"] ** 2 - 1.0), axis=0) - cfg.c2
    in_range = (params.log_std > LOG_STD_MIN) & (params.log_std < LOG_STD_MAX)
    g_log_std = np.where(in_range, g_log_std, 0.0)

    actor_grads = []
    for gw, gb in zip(grads_w, grads_b):
        actor_grads.append(gw)
        actor_grads.append(gb)
    actor_grads.append(g_log_std)

    g_v = (2.0 * cfg.c1 * (aux["v"] - rets) / n)[:, None]
    cw, cb = params.critic.backward(aux["cache_c"], g_v)
    critic_grads = []
    for gw, gb in zip(cw, cb):
        critic_grads.append(gw)
        critic_grads.append(gb)

    stats = {"loss": loss, "l_clip": aux["l_clip"], "l_vf": aux["l_vf"],
             "entropy": aux["entropy"], "mean_ratio": float(np.mean(aux["ratio"]))}
    return stats, actor_grads, critic_grads


def ppo_update(params: PolicyParams, batch: dict, cfg: PpoConfig,
               opt_actor: Adam, opt_critic: Adam) -> dict:
    """One Adam step on one minibatch; returns loss statistics."""
    stats, actor_grads, critic_grads = ppo_losses_and_grads(params, batch, cfg)
    opt_actor.step(params.actor_params(), actor_grads)
    opt_critic.step(params.critic_params(), critic_grads)
    return stats


def _update_from_buffer(params: PolicyParams, buffer: list[Transition], cfg: PpoConfig,
                        opt_actor: Adam, opt_critic: Adam, rng: np.random.Generator) -> list[dict]:
    obs = np.stack([t.obs for t in buffer])
    pre = np.stack([t.pre_squash for t in buffer])
    old_logp = np.array([t.log_prob for t in buffer])
    rewards = np.array([t.reward for t in buffer])
    values = np.array([t.value for t in buffer])
    dones = np.array([t.done for t in buffer])
    rets, advs = returns_and_advantages(rewards, values, dones, cfg.discount)
    n = len(buffer)
    stats = []
    for _ in range(cfg.n_epochs):
        order = rng.permutation(n)
        for start in range(0, n, cfg.minibatch):
            idx = order[start:start + cfg.minibatch]
            batch = {"obs": obs[idx], "pre_squash": pre[idx], "old_log_prob": old_logp[idx],
                     "returns": rets[idx], "advantages": advs[idx]}
            stats.append(ppo_update(params, batch, cfg, opt_actor, opt_critic))
    return stats


def train(env, cfg: PpoConfig, episodes: int, seed: int = 0,
          params: PolicyParams | None = None,
          opt_actor: Adam | None = None, opt_critic: Adam | None = None):
    """Train for a number of episodes; update after any episode that fills
    the step buffer, so returns are always computed on complete episodes.

    Optimizers may be passed in (resumed runs, checkpointing callers); they
    are updated in place. Returns (params, log) where log is a list of
    (episode, mean_reward).
    """
    rng = np.random.default_rng(seed)
    if params is None:
        params = PolicyParams(cfg, rng)
    if opt_actor is None:
        opt_actor = Adam(params.actor_params(), cfg.lr_actor)
    if opt_critic is None:
        opt_critic = Adam(params.critic_params(), cfg.lr_critic)
    buffer: list[Transition] = []
    log: list[tuple[int, float]] = []
    for ep in range(episodes):
        obs = env.reset()
        ep_rewards = []
        done = False
        while not done:
            sample = sample_action(params, obs, rng)
            next_obs, reward, done, _ = env.step(sample.action)
            buffer.append(Transition(obs=np.asarray(obs, dtype=float), action=sample.action,
                                     pre_squash=sample.pre_squash, log_prob=sample.log_prob,
                                     value=sample.value, reward=float(reward), done=bool(done)))
            ep_rewards.append(float(reward))
            obs = next_obs
        log.append((ep, float(np.mean(ep_rewards))))
        if len(buffer) >= cfg.t_update:
            _update_from_buffer(params, buffer, cfg, opt_actor, opt_critic, rng)
            buffer = []
    return params, log


def evaluate(params: PolicyParams, env, rounds: int) -> dict:
    """Deterministic rollouts (a = tanh(mu)); averages over all slots."""
    rng = np.random.default_rng(0)   # unused by deterministic actions
    totals = {"reward": 0.0, "total_delay": 0.0, "v2i_delay": 0.0,
              "v2v_delay": 0.0, "violations": 0.0}
    round_rewards = []
    n_slots = 0
    for _ in range(rounds):
        obs = env.reset()
        done = False
        ep_reward = 0.0
        while not done:
            sample = sample_action(params, obs, rng, deterministic=True)
            obs, reward, done, info = env.step(sample.action)
            ep_reward += float(reward)
            totals["reward"] += float(reward)
            for key in ("total_delay", "v2i_delay", "v2v_delay", "violations"):
                totals[key] += float(info.get(key, 0.0))
            n_slots += 1
        round_rewards.append(ep_reward)
    out = {f"mean_{k}": v / max(n_slots, 1) for k, v in totals.items()}
    out["round_rewards"] = round_rewards
    out["n_slots"] = n_slots
    return out
