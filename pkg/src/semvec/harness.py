"""Experiment runner: sweep cells, frozen CSV schemas, manifest, checkpoints.

All outputs are deterministic functions of the config and seeds: float cells
are written with repr() so a rerun of the same manifest is byte-identical,
and nothing here reads the clock.
"""

from __future__ import annotations

import hashlib
import json
import os
from dataclasses import dataclass, replace

import numpy as np

from . import __version__
from .agent import Adam, PolicyParams, PpoConfig, sample_action, train
from .baselines import ga_optimize, qpso_optimize
from .config import ExperimentConfig
from .env import OffloadEnv, heuristic_decision
from .scenario import ScenarioConfig

METRICS_SCHEMA = "semvec.metrics.v1"
REWARD_SCHEMA = "semvec.reward_curve.v1"
EPISODES_SCHEMA = "semvec.episodes.v1"
SWEEP_LINE_SCHEMA = "semvec.sweep_line.v1"
CHECKPOINT_VERSION = 1

METRICS_FIELDS = ("run_id", "seed", "sweep_value", "method", "slot",
                  "total_delay", "v2i_delay", "v2v_delay", "violations", "reward")

_METHOD_CODE = {"ppo": 0, "ga": 1, "qpso": 2, "heuristic": 3}


class HarnessError(RuntimeError):
    pass


@dataclass
class MetricsRecord:
    run_id: str
    seed: int
    sweep_value: float | None   # None when no sweep axis is active
    method: str
    slot: int
    total_delay: float          # mean over task-bearing vehicles, seconds
    v2i_delay: float            # transmission component means
    v2v_delay: float
    violations: int
    reward: float


def _fmt(value) -> str:
    """One CSV cell. Floats go through repr(float(...)) so that a reread
    followed by a rewrite reproduces the bytes exactly."""
    if value is None:
        return ""
    if isinstance(value, str):
        return value
    if isinstance(value, (bool, np.bool_)):
        return "true" if value else "false"
    if isinstance(value, (int, np.integer)):
        return repr(int(value))
    return repr(float(value))


def _write_csv(path: str, schema: str, header: tuple, rows) -> None:
    with open(path, "w") as fh:
        fh.write(f"# schema={schema}\n")
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(cell) for cell in row) + "\n")


def write_metrics_csv(path: str, records: list) -> None:
    rows = ((r.run_id, r.seed, r.sweep_value, r.method, r.slot, r.total_delay,
             r.v2i_delay, r.v2v_delay, r.violations, r.reward) for r in records)
    _write_csv(path, METRICS_SCHEMA, METRICS_FIELDS, rows)


def write_reward_csv(path: str, log: list) -> None:
    """log: list of (episode, mean_reward)."""
    _write_csv(path, REWARD_SCHEMA, ("episode", "mean_reward"), log)


def write_episodes_csv(path: str, rows: list) -> None:
    """rows: (run_id, seed, sweep_value, method, episode, mean_delay) raw,
    one per evaluation episode, for distribution plots."""
    _write_csv(path, EPISODES_SCHEMA,
               ("run_id", "seed", "sweep_value", "method", "episode", "mean_delay"),
               rows)


def read_csv(path: str) -> tuple[str, list[str], list[list[str]]]:
    """Read one of our CSVs back: (schema, header, string rows)."""
    with open(path) as fh:
        first = fh.readline().strip()
        if not first.startswith("# schema="):
            raise ValueError(f"{path} is missing the schema comment line")
        schema = first[len("# schema="):]
        header = fh.readline().strip().split(",")
        rows = [line.rstrip("\n").split(",") for line in fh if line.strip()]
    return schema, header, rows


def config_hash(resolved: dict) -> str:
    """sha256 over the canonical JSON of the fully resolved key/value map.
    The output directory is excluded: it does not influence any result."""
    trimmed = {sec: {k: v for k, v in keys.items()
                     if not (sec == "run" and k == "out_dir")}
               for sec, keys in resolved.items()}
    blob = json.dumps(trimmed, sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(blob.encode()).hexdigest()


def write_manifest(out_dir: str, cfg: ExperimentConfig, outputs: list,
                   extra: dict | None = None) -> str:
    manifest = {
        "schema": "semvec.manifest.v1",
        "code_version": __version__,
        "config_hash": config_hash(cfg.resolved),
        "config": cfg.resolved,
        "seeds": list(cfg.run.seeds),
        "methods": list(cfg.run.methods),
        "sweep_axis": cfg.sweep.axis,
        "sweep_values": list(cfg.sweep.values),
        "outputs": sorted(outputs),
    }
    if extra:
        manifest.update(extra)
    path = os.path.join(out_dir, "manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, sort_keys=True, indent=2)
        fh.write("\n")
    return path


# ---------------------------------------------------------------- sweep cells

def apply_sweep(cfg: ExperimentConfig, axis: str, value: float):
    """Return (scenario, radio) with the swept quantity overridden."""
    scen, radio = cfg.scenario, cfg.radio
    if axis == "none":
        return scen, radio
    if axis == "power":
        return scen, replace(radio, tx_power=float(value))
    if axis == "vehicles":
        return replace(scen, n_vehicles=int(value), u_max=None), radio
    if axis == "ris_elements":
        return scen, replace(radio, n_elements=int(value))
    raise ValueError(f"unknown sweep axis {axis!r}")


def build_env(cfg: ExperimentConfig, seed: int,
              scen: ScenarioConfig | None = None, radio=None,
              episode_slots: int | None = None) -> OffloadEnv:
    return OffloadEnv(
        scen if scen is not None else cfg.scenario,
        radio if radio is not None else cfg.radio,
        cfg.semantic, cfg.table, cfg.compute,
        episode_slots=episode_slots or cfg.agent.episode_slots,
        seed=seed)


def ppo_config_for(cfg: ExperimentConfig, env: OffloadEnv) -> PpoConfig:
    a = cfg.agent
    return PpoConfig(obs_dim=env.obs_dim, act_dim=env.act_dim, hidden=a.hidden,
                     lr_actor=a.lr_actor, lr_critic=a.lr_critic, clip_eps=a.clip_eps,
                     discount=a.discount, c1=a.c1, c2=a.c2, t_update=a.t_update,
                     n_epochs=a.n_epochs, minibatch=a.minibatch,
                     log_std_init=a.log_std_init)


@dataclass
class CellResult:
    records: list                # MetricsRecord per slot
    episode_rows: list           # per-episode mean delays
    eval_total: int              # simulator evaluations consumed
    reward_log: list | None = None


def _finish_episode(rows, run_id, seed, sweep_value, method, episode, delays) -> None:
    rows.append((run_id, seed, sweep_value, method, episode,
                 float(np.mean(delays)) if delays else 0.0))


def _best_of_decision(env: OffloadEnv, params: PolicyParams, obs: np.ndarray,
                      budget: int, rng: np.random.Generator):
    """Budget-matched policy evaluation: score `budget` policy draws on the
    current slot (the first one deterministic) and return the best decision.
    Consumes exactly `budget` counted evaluations, like one baseline search."""
    best_val, best_dec = np.inf, None
    for i in range(budget):
        sample = sample_action(params, obs, rng, deterministic=(i == 0))
        phase_idx, nus = env.decode_action(sample.action)
        res = env.slot.eval_config(phase_idx, nus)
        if res.sum_total_delay < best_val:
            best_val, best_dec = res.sum_total_delay, (phase_idx, nus)
    return best_dec


def run_cell(cfg: ExperimentConfig, method: str, seed: int,
             sweep_value: float | None = None,
             params: PolicyParams | None = None,
             match_budget: bool = False) -> CellResult:
    """Evaluate one (method, seed, sweep value) cell over eval_rounds episodes.

    The PPO cell trains a fresh policy first unless one is passed in or a
    checkpoint path is configured. Baseline cells spend exactly the
    configured budget each slot; the heuristic spends one evaluation. With
    match_budget the policy is evaluated best-of-budget so that PPO, GA and
    QPSO consume identical evaluation counts per slot (comparison runs).
    """
    scen, radio = apply_sweep(cfg, cfg.sweep.axis, 0.0 if sweep_value is None else sweep_value)
    env = build_env(cfg, seed, scen, radio)
    run_id = cfg.run.run_id

    if method == "ppo":
        if params is None:
            if cfg.run.checkpoint:
                params, _, _, _ = load_checkpoint(cfg.run.checkpoint)
                if params.actor.sizes[0] != env.obs_dim:
                    raise HarnessError(
                        f"checkpoint expects obs_dim {params.actor.sizes[0]}, env has {env.obs_dim}")
                reward_log = None
            else:
                pcfg = ppo_config_for(cfg, env)
                params, reward_log = train(env, pcfg, cfg.agent.episodes, seed=seed)
                env = build_env(cfg, seed, scen, radio)   # fresh eval counts
        else:
            reward_log = None
    else:
        reward_log = None

    rng_eval = np.random.default_rng(0)   # deterministic actions ignore it
    records, episode_rows = [], []
    env.eval_counts.clear()
    slot_counter = 0
    for episode in range(cfg.agent.eval_rounds):
        obs = env.reset()
        done = False
        delays = []
        while not done:
            if method == "ppo" and match_budget:
                rng = np.random.default_rng([seed, _METHOD_CODE["ppo"], slot_counter])
                decision = _best_of_decision(env, params, obs, cfg.baseline.budget, rng)
                obs, reward, done, info = env.step_decision(*decision)
            elif method == "ppo":
                sample = sample_action(params, obs, rng_eval, deterministic=True)
                obs, reward, done, info = env.step(sample.action)
            elif method in ("ga", "qpso"):
                rng = np.random.default_rng([seed, _METHOD_CODE[method], slot_counter])
                opt = ga_optimize if method == "ga" else qpso_optimize
                kwargs = {"pop_size": cfg.baseline.pop_size}
                if method == "ga":
                    kwargs.update(tournament=cfg.baseline.tournament,
                                  crossover_rate=cfg.baseline.crossover_rate)
                else:
                    kwargs.update(beta_hi=cfg.baseline.beta_hi, beta_lo=cfg.baseline.beta_lo)
                best = opt(env.slot, cfg.baseline.budget, rng, **kwargs)
                k = env.scen.n_vehicles
                nus = np.stack([best.nu[:k], best.nu[k:]], axis=1)
                obs, reward, done, info = env.step_decision(best.phase_index, nus)
            elif method == "heuristic":
                phase_idx, nus = heuristic_decision(env.slot)
                obs, reward, done, info = env.step_decision(phase_idx, nus)
            else:
                raise ValueError(f"unknown method {method!r}")
            records.append(MetricsRecord(
                run_id=run_id, seed=seed, sweep_value=sweep_value, method=method,
                slot=slot_counter, total_delay=float(info["total_delay"]),
                v2i_delay=float(info["v2i_delay"]), v2v_delay=float(info["v2v_delay"]),
                violations=int(info["violations"]), reward=float(reward)))
            delays.append(float(info["total_delay"]))
            slot_counter += 1
        _finish_episode(episode_rows, run_id, seed, sweep_value, method, episode, delays)
    return CellResult(records=records, episode_rows=episode_rows,
                      eval_total=int(sum(env.eval_counts)), reward_log=reward_log)


def run_experiment(cfg: ExperimentConfig, out_dir: str) -> dict:
    """All (sweep value, seed, method) cells; writes metrics.csv, episodes.csv,
    manifest.json (plus reward_curve.csv when PPO trains in-run).

    A failing cell is recorded in the manifest and skipped; the rest proceed.
    Comparison runs assert that GA and QPSO consumed identical budgets.
    """
    os.makedirs(out_dir, exist_ok=True)
    sweep_values: list = list(cfg.sweep.values) if cfg.sweep.axis != "none" else [None]
    # a comparison run pits the policy against at least one search baseline;
    # there every method must consume identical evaluation counts per slot
    comparison = "ppo" in cfg.run.methods and ({"ga", "qpso"} & set(cfg.run.methods))
    records, episode_rows, failures, cells = [], [], [], []
    reward_logs = {}
    for sweep_value in sweep_values:
        for seed in cfg.run.seeds:
            evals = {}
            for method in cfg.run.methods:
                try:
                    cell = run_cell(cfg, method, seed, sweep_value,
                                    match_budget=bool(comparison) and method == "ppo")
                except Exception as exc:   # cell isolation: record and move on
                    failures.append({"sweep_value": sweep_value, "seed": seed,
                                     "method": method, "error": f"{type(exc).__name__}: {exc}"})
                    continue
                records.extend(cell.records)
                episode_rows.extend(cell.episode_rows)
                evals[method] = cell.eval_total
                cells.append({"sweep_value": sweep_value, "seed": seed, "method": method,
                              "eval_total": cell.eval_total})
                if cell.reward_log is not None:
                    reward_logs[(sweep_value, seed)] = cell.reward_log
            parity_methods = {"ga", "qpso"} | ({"ppo"} if comparison else set())
            matched = {m: n for m, n in evals.items() if m in parity_methods}
            if len(set(matched.values())) > 1:
                raise HarnessError(
                    f"budget parity broken: {matched} "
                    f"(sweep_value={sweep_value}, seed={seed})")
    outputs = ["metrics.csv", "episodes.csv", "manifest.json"]
    write_metrics_csv(os.path.join(out_dir, "metrics.csv"), records)
    write_episodes_csv(os.path.join(out_dir, "episodes.csv"), episode_rows)
    if cfg.sweep.axis != "none":
        # sweep contract: additionally one metrics CSV per method
        for method in cfg.run.methods:
            name = f"metrics_{method}.csv"
            write_metrics_csv(os.path.join(out_dir, name),
                              [r for r in records if r.method == method])
            outputs.append(name)
    if reward_logs:
        first_key = sorted(reward_logs, key=lambda t: (t[0] is not None, t[0], t[1]))[0]
        write_reward_csv(os.path.join(out_dir, "reward_curve.csv"), reward_logs[first_key])
        outputs.append("reward_curve.csv")
    write_manifest(out_dir, cfg, outputs,
                   extra={"cells": cells, "failures": failures,
                          "budget_parity": True})
    return {"records": len(records), "failures": failures, "out_dir": out_dir}


# ------------------------------------------------------------------ plot data

def write_sweep_line_csv(metrics_path: str, out_path: str) -> int:
    """Aggregate metrics.csv into per-(sweep value, method) means for line and
    bar figures. Returns the number of rows written."""
    schema, header, rows = read_csv(metrics_path)
    if schema != METRICS_SCHEMA:
        raise ValueError(f"expected {METRICS_SCHEMA}, got {schema}")
    idx = {name: header.index(name) for name in METRICS_FIELDS}
    groups: dict = {}
    for row in rows:
        key = (row[idx["sweep_value"]], row[idx["method"]])
        bucket = groups.setdefault(key, {"total": [], "v2i": [], "v2v": []})
        bucket["total"].append(float(row[idx["total_delay"]]))
        bucket["v2i"].append(float(row[idx["v2i_delay"]]))
        bucket["v2v"].append(float(row[idx["v2v_delay"]]))
    out_rows = []
    for (sweep_value, method) in sorted(groups, key=lambda t: (float(t[0]) if t[0] else -1.0, t[1])):
        b = groups[(sweep_value, method)]
        out_rows.append((sweep_value, method, float(np.mean(b["total"])),
                         float(np.mean(b["v2i"])), float(np.mean(b["v2v"]))))
    _write_csv(out_path, SWEEP_LINE_SCHEMA,
               ("sweep_value", "method", "total_delay", "v2i_delay", "v2v_delay"),
               out_rows)
    return len(out_rows)


def plot_data(out_dir: str) -> list:
    """Derive the figure-ready aggregates from a finished run directory."""
    metrics = os.path.join(out_dir, "metrics.csv")
    if not os.path.exists(metrics):
        raise FileNotFoundError(f"{metrics} not found; run an experiment first")
    written = []
    write_sweep_line_csv(metrics, os.path.join(out_dir, "sweep_line.csv"))
    written.append("sweep_line.csv")
    return written


# ----------------------------------------------------------------- checkpoint

def save_checkpoint(path: str, params: PolicyParams, cfg: PpoConfig,
                    opt_actor: Adam | None = None, opt_critic: Adam | None = None,
                    cfg_hash: str = "", norm: dict | None = None) -> None:
    """Self-describing npz: layer shapes come from the arrays themselves, the
    meta entry carries hyperparameters, normalization constants and the
    config hash. The version field is mandatory for forward compatibility."""
    arrays: dict = {"version": np.array(CHECKPOINT_VERSION, dtype=np.int64),
                    "log_std": params.log_std}
    for i, (w, b) in enumerate(zip(params.actor.weights, params.actor.biases)):
        arrays[f"actor_w{i}"] = w
        arrays[f"actor_b{i}"] = b
    for i, (w, b) in enumerate(zip(params.critic.weights, params.critic.biases)):
        arrays[f"critic_w{i}"] = w
        arrays[f"critic_b{i}"] = b
    for tag, opt in (("actor", opt_actor), ("critic", opt_critic)):
        if opt is None:
            continue
        arrays[f"opt_{tag}_t"] = np.array(opt.t, dtype=np.int64)
        for i, (m, v) in enumerate(zip(opt.m, opt.v)):
            arrays[f"opt_{tag}_m{i}"] = m
            arrays[f"opt_{tag}_v{i}"] = v
    meta = {
        "obs_dim": cfg.obs_dim, "act_dim": cfg.act_dim, "hidden": cfg.hidden,
        "lr_actor": cfg.lr_actor, "lr_critic": cfg.lr_critic,
        "clip_eps": cfg.clip_eps, "discount": cfg.discount,
        "c1": cfg.c1, "c2": cfg.c2, "t_update": cfg.t_update,
        "n_epochs": cfg.n_epochs, "minibatch": cfg.minibatch,
        "log_std_init": cfg.log_std_init,
        "config_hash": cfg_hash,
        "norm": norm or {},
    }
    arrays["meta"] = np.array(json.dumps(meta, sort_keys=True))
    np.savez(path, **arrays)


def load_checkpoint(path: str):
    """Returns (params, cfg, opt_actor_state, opt_critic_state); the optimizer
    states are None when the file was saved without them."""
    with np.load(path, allow_pickle=False) as data:
        if "version" not in data:
            raise ValueError("checkpoint has no version field")
        version = int(data["version"])
        if version != CHECKPOINT_VERSION:
            raise ValueError(f"unsupported checkpoint version {version}")
        meta = json.loads(str(data["meta"]))
        cfg = PpoConfig(obs_dim=int(meta["obs_dim"]), act_dim=int(meta["act_dim"]),
                        hidden=int(meta["hidden"]), lr_actor=float(meta["lr_actor"]),
                        lr_critic=float(meta["lr_critic"]), clip_eps=float(meta["clip_eps"]),
                        discount=float(meta["discount"]), c1=float(meta["c1"]),
                        c2=float(meta["c2"]), t_update=int(meta["t_update"]),
                        n_epochs=int(meta["n_epochs"]), minibatch=int(meta["minibatch"]),
                        log_std_init=float(meta["log_std_init"]))
        params = PolicyParams(cfg, np.random.default_rng(0))
        for i in range(len(params.actor.weights)):
            params.actor.weights[i][:] = data[f"actor_w{i}"]
            params.actor.biases[i][:] = data[f"actor_b{i}"]
        for i in range(len(params.critic.weights)):
            params.critic.weights[i][:] = data[f"critic_w{i}"]
            params.critic.biases[i][:] = data[f"critic_b{i}"]
        params.log_std[:] = data["log_std"]
        states = {}
        for tag, plist in (("actor", params.actor_params()), ("critic", params.critic_params())):
            if f"opt_{tag}_t" in data:
                states[tag] = {"t": int(data[f"opt_{tag}_t"]),
                               "m": [data[f"opt_{tag}_m{i}"] for i in range(len(plist))],
                               "v": [data[f"opt_{tag}_v{i}"] for i in range(len(plist))]}
            else:
                states[tag] = None
    params.meta = meta
    return params, cfg, states["actor"], states["critic"]


def norm_constants(cfg: ExperimentConfig) -> dict:
    """Observation scaling constants, recorded in checkpoints."""
    levels = max((1 << cfg.radio.phase_bits) - 1, 1)
    return {"lane_scale": 10.0, "road_length": cfg.scenario.road_length,
            "sinr_clip_db": 40.0, "phase_levels": levels}


def run_train(cfg: ExperimentConfig, seed: int, out_dir: str,
              episodes: int | None = None) -> dict:
    """Train one PPO policy; writes checkpoint.npz, reward_curve.csv, manifest."""
    os.makedirs(out_dir, exist_ok=True)
    env = build_env(cfg, seed)
    pcfg = ppo_config_for(cfg, env)
    rng = np.random.default_rng(seed)
    params = PolicyParams(pcfg, rng)
    opt_actor = Adam(params.actor_params(), pcfg.lr_actor)
    opt_critic = Adam(params.critic_params(), pcfg.lr_critic)
    params, log = train(env, pcfg, episodes if episodes is not None else cfg.agent.episodes,
                        seed=seed, params=params, opt_actor=opt_actor, opt_critic=opt_critic)
    ckpt = os.path.join(out_dir, "checkpoint.npz")
    save_checkpoint(ckpt, params, pcfg, opt_actor, opt_critic,
                    cfg_hash=config_hash(cfg.resolved), norm=norm_constants(cfg))
    write_reward_csv(os.path.join(out_dir, "reward_curve.csv"), log)
    write_manifest(out_dir, cfg, ["checkpoint.npz", "reward_curve.csv", "manifest.json"],
                   extra={"train_seed": seed})
    return {"checkpoint": ckpt, "episodes": len(log),
            "final_reward": log[-1][1] if log else float("nan")}
