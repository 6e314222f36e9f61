"""INI experiment configuration: parsing, defaulting, strict validation.

Unknown sections or keys are rejected by name; validation failures name the
field as section.key. The fully resolved key/value map (defaults included)
is kept on the config for the run manifest.
"""

from __future__ import annotations

import configparser
from dataclasses import dataclass

from .channel import RadioConfig
from .latency import ComputeParams
from .scenario import Position, ScenarioConfig
from .semantic import SemanticParams, SemanticTable


class ConfigError(ValueError):
    pass


@dataclass
class AgentSettings:
    hidden: int = 256
    lr_actor: float = 3e-4
    lr_critic: float = 1e-3
    clip_eps: float = 0.2
    discount: float = 0.6
    c1: float = 0.5
    c2: float = 0.01
    t_update: int = 2048
    n_epochs: int = 10
    minibatch: int = 64
    log_std_init: float = -0.5
    episodes: int = 5000
    episode_slots: int = 200
    eval_rounds: int = 10

    def __post_init__(self) -> None:
        for name in ("hidden", "t_update", "n_epochs", "minibatch", "episodes",
                     "episode_slots", "eval_rounds"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        for name in ("lr_actor", "lr_critic", "clip_eps"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 <= self.discount <= 1.0:
            raise ValueError("discount must be in [0, 1]")


@dataclass
class BaselineSettings:
    pop_size: int = 50
    budget: int = 2000
    tournament: int = 3
    crossover_rate: float = 0.9
    beta_hi: float = 1.0
    beta_lo: float = 0.5

    def __post_init__(self) -> None:
        for name in ("pop_size", "budget", "tournament"):
            if getattr(self, name) < 1:
                raise ValueError(f"{name} must be >= 1")
        if self.budget < self.pop_size:
            raise ValueError("budget must be >= pop_size")
        if not 0.0 <= self.crossover_rate <= 1.0:
            raise ValueError("crossover_rate must be in [0, 1]")


SWEEP_AXES = ("none", "power", "vehicles", "ris_elements")
METHODS = ("ppo", "ga", "qpso", "heuristic")


@dataclass
class SweepSettings:
    axis: str = "none"
    values: tuple = ()

    def __post_init__(self) -> None:
        if self.axis not in SWEEP_AXES:
            raise ValueError(f"axis must be one of {SWEEP_AXES}")
        if self.axis != "none" and not self.values:
            raise ValueError("values required when axis is set")
        if any(v <= 0 for v in self.values):
            raise ValueError("values must be positive")
        if self.axis in ("vehicles", "ris_elements"):
            if any(float(v) != int(v) for v in self.values):
                raise ValueError(f"values for {self.axis} must be integers")


@dataclass
class RunSettings:
    seeds: tuple = (0,)
    out_dir: str = "runs/out"
    methods: tuple = ("ppo", "ga", "qpso")
    run_id: str = "run"
    checkpoint: str = ""

    def __post_init__(self) -> None:
        if not self.seeds:
            raise ValueError("seeds must list at least one seed")
        for m in self.methods:
            if m not in METHODS:
                raise ValueError(f"methods entry {m!r} not one of {METHODS}")


@dataclass
class ExperimentConfig:
    scenario: ScenarioConfig
    radio: RadioConfig
    semantic: SemanticParams
    table: SemanticTable
    compute: ComputeParams
    agent: AgentSettings
    baseline: BaselineSettings
    sweep: SweepSettings
    run: RunSettings
    resolved: dict


def _floats(text: str) -> tuple:
    return tuple(float(tok) for tok in text.split(",") if tok.strip() != "")


def _ints(text: str) -> tuple:
    return tuple(int(tok) for tok in text.split(",") if tok.strip() != "")


def _strs(text: str) -> tuple:
    return tuple(tok.strip() for tok in text.split(",") if tok.strip() != "")


def _bool(text: str):
    lowered = text.strip().lower()
    if lowered in ("1", "true", "yes", "on"):
        return True
    if lowered in ("0", "false", "no", "off"):
        return False
    raise ValueError(f"not a boolean: {text!r}")


def _opt_int(text: str):
    return None if text.strip() == "" else int(text)


def _opt_float(text: str):
    return None if text.strip() == "" else float(text)


# key -> (converter, default-as-text); the text defaults keep the resolved
# map uniform whether a key was present or not
_SCHEMA = {
    "scenario": {
        "n_vehicles": (int, "15"),
        "n_svs": (int, "5"),
        "n_rbs": (int, "10"),
        "slot_duration": (float, "1.0"),
        "speed": (float, "20.0"),
        "road_length": (float, "300.0"),
        "lane_offsets": (_floats, "0.0,4.0"),
        "rsu_x": (float, "-10.0"),
        "rsu_y": (float, "150.0"),
        "rsu_z": (float, "25.0"),
        "ris_x": (float, "10.0"),
        "ris_y": (float, "175.0"),
        "ris_z": (float, "25.0"),
        "task_unit_bits": (float, "4.0e5"),
        "arrival_mean": (float, "1.0"),
        "u_max": (_opt_int, ""),
    },
    "radio": {
        "ref_loss": (float, "1.0e-3"),
        "path_exp_direct": (float, "3.5"),
        "path_exp_ris_edge": (float, "2.2"),
        "path_exp_user_ris": (float, "2.2"),
        "rician_kappa": (float, "3.0"),
        "carrier_hz": (float, "5.9e9"),
        "element_spacing": (_opt_float, ""),
        "n_elements": (int, "36"),
        "phase_bits": (int, "2"),
        "tx_power": (float, "0.2"),
        "noise_power": (float, "1.44e-10"),
        "bandwidth": (float, "360.0e3"),
        "nlos_enabled": (_bool, "false"),
        "ris_links": (str, "all"),
    },
    "semantic": {
        "units_per_sentence": (float, "100.0"),
        "words_per_sentence": (float, "20.0"),
        "bits_per_sentence": (float, "1200.0"),
        "delta_threshold": (float, "0.9"),
        "nu_max": (int, "20"),
        "table_csv": (str, ""),
    },
    "compute": {
        "cycles_per_bit": (float, "1000.0"),
        "f_local": (float, "2.0e9"),
        "f_rsu": (float, "6.0e9"),
        "f_sv": (float, "2.0e9"),
        "t_max": (float, "0.5"),
    },
    "agent": {
        "hidden": (int, "256"),
        "lr_actor": (float, "3.0e-4"),
        "lr_critic": (float, "1.0e-3"),
        "clip_eps": (float, "0.2"),
        "discount": (float, "0.6"),
        "c1": (float, "0.5"),
        "c2": (float, "0.01"),
        "t_update": (int, "2048"),
        "n_epochs": (int, "10"),
        "minibatch": (int, "64"),
        "log_std_init": (float, "-0.5"),
        "episodes": (int, "5000"),
        "episode_slots": (int, "200"),
        "eval_rounds": (int, "10"),
    },
    "baseline": {
        "pop_size": (int, "50"),
        "budget": (int, "2000"),
        "tournament": (int, "3"),
        "crossover_rate": (float, "0.9"),
        "beta_hi": (float, "1.0"),
        "beta_lo": (float, "0.5"),
    },
    "sweep": {
        "axis": (str, "none"),
        "values": (_floats, ""),
    },
    "run": {
        "seeds": (_ints, "0"),
        "out_dir": (str, "runs/out"),
        "methods": (_strs, "ppo,ga,qpso"),
        "run_id": (str, "run"),
        "checkpoint": (str, ""),
    },
}


def _resolve(parser: configparser.ConfigParser) -> dict:
    for section in parser.sections():
        if section not in _SCHEMA:
            raise ConfigError(f"unknown section [{section}]")
        for key in parser[section]:
            if key not in _SCHEMA[section]:
                raise ConfigError(f"unknown key {section}.{key}")
    resolved: dict = {}
    for section, keys in _SCHEMA.items():
        resolved[section] = {}
        for key, (conv, default) in keys.items():
            text = parser.get(section, key, fallback=default) if parser.has_section(section) else default
            try:
                resolved[section][key] = conv(text)
            except ValueError as exc:
                raise ConfigError(f"{section}.{key}: {exc}") from exc
    return resolved


def _build(section: str, ctor, kwargs: dict):
    try:
        return ctor(**kwargs)
    except ValueError as exc:
        raise ConfigError(f"{section}.{exc}") from exc


def config_from_resolved(resolved: dict) -> ExperimentConfig:
    s = resolved["scenario"]
    scenario = _build("scenario", ScenarioConfig, dict(
        n_vehicles=s["n_vehicles"], n_svs=s["n_svs"], n_rbs=s["n_rbs"],
        slot_duration=s["slot_duration"], speed=s["speed"], road_length=s["road_length"],
        lane_offsets=s["lane_offsets"],
        rsu_pos=Position(s["rsu_x"], s["rsu_y"], s["rsu_z"]),
        ris_pos=Position(s["ris_x"], s["ris_y"], s["ris_z"]),
        task_unit_bits=s["task_unit_bits"], arrival_mean=s["arrival_mean"],
        u_max=s["u_max"],
    ))
    radio = _build("radio", RadioConfig, dict(resolved["radio"]))
    m = resolved["semantic"]
    semantic = _build("semantic", SemanticParams, dict(
        units_per_sentence=m["units_per_sentence"], words_per_sentence=m["words_per_sentence"],
        bits_per_sentence=m["bits_per_sentence"], delta_threshold=m["delta_threshold"],
    ))
    if m["table_csv"]:
        table = SemanticTable.from_csv(m["table_csv"])
    else:
        table = SemanticTable.default(nu_max=m["nu_max"])
    compute = _build("compute", ComputeParams, dict(resolved["compute"]))
    agent = _build("agent", AgentSettings, dict(resolved["agent"]))
    baseline = _build("baseline", BaselineSettings, dict(resolved["baseline"]))
    sweep = _build("sweep", SweepSettings, dict(resolved["sweep"]))
    run = _build("run", RunSettings, dict(resolved["run"]))
    return ExperimentConfig(scenario=scenario, radio=radio, semantic=semantic, table=table,
                            compute=compute, agent=agent, baseline=baseline, sweep=sweep,
                            run=run, resolved=resolved)


def load_config(path: str) -> ExperimentConfig:
    parser = configparser.ConfigParser(inline_comment_prefixes=("#", ";"))
    try:
        with open(path) as fh:
            parser.read_file(fh)
    except OSError as exc:
        raise ConfigError(f"cannot read config {path}: {exc}") from exc
    except configparser.Error as exc:
        raise ConfigError(f"parse error in {path}: {exc}") from exc
    return config_from_resolved(_resolve(parser))
