"""Short training run on the small instance.

Trains the policy for a modest number of episodes, prints the reward
trajectory in coarse bins, and compares the untrained and trained policies
on the same held-out episodes. Expect a minute or two at the default.
"""

import sys

import numpy as np

from semvec.agent import PolicyParams, evaluate, train
from semvec.config import load_config
from semvec.harness import build_env, ppo_config_for


def main():
    episodes = int(sys.argv[1]) if len(sys.argv) > 1 else 200
    cfg = load_config("configs/small.cfg")
    env = build_env(cfg, seed=0)
    ppo_cfg = ppo_config_for(cfg, env)

    # a fresh env with the same seed replays the same episode draws, so the
    # untrained and trained policies see identical conditions
    fresh = PolicyParams(ppo_cfg, np.random.default_rng(0))
    before = evaluate(fresh, build_env(cfg, seed=123), rounds=3)

    params, log = train(env, ppo_cfg, episodes=episodes, seed=0)

    bins = max(1, episodes // 6)
    print("reward by training phase:")
    rewards = [r for _, r in log]
    for i in range(0, episodes, bins):
        chunk = rewards[i:i + bins]
        print(f"  episodes {i:3d}-{i + len(chunk) - 1:3d}: mean reward {np.mean(chunk):+.4f}")

    after = evaluate(params, build_env(cfg, seed=123), rounds=3)
    print(f"\nmean per-slot delay untrained {before['mean_total_delay']:.4f} s"
          f" -> trained {after['mean_total_delay']:.4f} s")
    print("gains at this scale are small; the presets train for hundreds to thousands of episodes")


if __name__ == "__main__":
    main()
