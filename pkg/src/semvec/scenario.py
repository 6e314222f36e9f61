"""Road geometry, vehicle mobility, task arrivals, SV and resource-block assignment.

One straight road segment along the y axis with wrap-around motion keeps the
vehicle density stationary. K vehicle users generate tasks; J service vehicles
(SVs) only serve. The RSU is edge node 0, SV j is edge node j+1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np


@dataclass(frozen=True)
class Position:
    x: float
    y: float
    z: float = 0.0

    def __post_init__(self) -> None:
        if not all(math.isfinite(v) for v in (self.x, self.y, self.z)):
            raise ValueError("position coordinates must be finite")
        if self.z < 0:
            raise ValueError("z must be >= 0")

    def as_array(self) -> np.ndarray:
        return np.array([self.x, self.y, self.z], dtype=float)


@dataclass
class ScenarioConfig:
    n_vehicles: int = 15                 # K, task-generating users
    n_svs: int = 5                       # J, service vehicles
    n_rbs: int = 10                      # B, resource blocks
    slot_duration: float = 1.0           # s
    speed: float = 20.0                  # m/s, constant for all vehicles
    road_length: float = 300.0           # m
    lane_offsets: tuple[float, ...] = (0.0, 4.0)
    rsu_pos: Position = field(default_factory=lambda: Position(-10.0, 150.0, 25.0))
    ris_pos: Position = field(default_factory=lambda: Position(10.0, 175.0, 25.0))
    task_unit_bits: float = 4.0e5        # D_k, bits per task unit
    arrival_mean: float = 1.0            # Poisson mean, task units per slot
    u_max: int | None = None             # served users per SV; None -> max(1, K // J)
    seed: int = 0

    def __post_init__(self) -> None:
        if self.n_vehicles < 1:
            raise ValueError("n_vehicles must be >= 1")
        if self.n_svs < 1:
            raise ValueError("n_svs must be >= 1")
        if self.n_rbs < 1:
            raise ValueError("n_rbs must be >= 1")
        for name in ("slot_duration", "speed", "road_length", "task_unit_bits"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.arrival_mean < 0:
            raise ValueError("arrival_mean must be >= 0")
        if not self.lane_offsets:
            raise ValueError("lane_offsets must be nonempty")
        if self.u_max is None:
            self.u_max = max(1, self.n_vehicles // self.n_svs)
        if self.u_max < 1:
            raise ValueError("u_max must be >= 1")


@dataclass
class ScenarioState:
    veh_xy: np.ndarray          # (K, 2) user coordinates, z = 0
    sv_xy: np.ndarray           # (J, 2) service vehicle coordinates, z = 0
    task_bits: np.ndarray       # (K,) bits queued this slot, 0 = idle
    sv_of: np.ndarray           # (K,) chosen SV index per user
    rb_of: np.ndarray           # (K, 2) RB index, column 0 = V2I, column 1 = V2V
    slot_index: int = 0
    overflow_warning: bool = False   # set when K > J*u_max forced round-robin spill

    def copy(self) -> "ScenarioState":
        return ScenarioState(
            veh_xy=self.veh_xy.copy(),
            sv_xy=self.sv_xy.copy(),
            task_bits=self.task_bits.copy(),
            sv_of=self.sv_of.copy(),
            rb_of=self.rb_of.copy(),
            slot_index=self.slot_index,
            overflow_warning=self.overflow_warning,
        )


def init_scenario(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> ScenarioState:
    """Place users and SVs uniformly on the road at the configured lane offsets."""
    if rng is None:
        rng = np.random.default_rng(cfg.seed)
    lanes = np.asarray(cfg.lane_offsets, dtype=float)

    def draw(n: int) -> np.ndarray:
        xy = np.empty((n, 2))
        xy[:, 0] = rng.choice(lanes, size=n)
        xy[:, 1] = rng.uniform(0.0, cfg.road_length, size=n)
        return xy

    k, j = cfg.n_vehicles, cfg.n_svs
    return ScenarioState(
        veh_xy=draw(k),
        sv_xy=draw(j),
        task_bits=np.zeros(k),
        sv_of=np.zeros(k, dtype=int),
        rb_of=np.zeros((k, 2), dtype=int),
    )


def advance(state: ScenarioState, cfg: ScenarioConfig) -> ScenarioState:
    """Move every vehicle by speed*dt along y, wrapping modulo road_length."""
    step = cfg.speed * cfg.slot_duration
    out = state.copy()
    out.veh_xy[:, 1] = np.mod(out.veh_xy[:, 1] + step, cfg.road_length)
    out.sv_xy[:, 1] = np.mod(out.sv_xy[:, 1] + step, cfg.road_length)
    out.slot_index = state.slot_index + 1
    return out


def draw_tasks(state: ScenarioState, cfg: ScenarioConfig, rng: np.random.Generator) -> ScenarioState:
    """Poisson count of fixed-size task units per user: task_bits = D_k * n."""
    out = state.copy()
    counts = rng.poisson(cfg.arrival_mean, size=cfg.n_vehicles)
    out.task_bits = cfg.task_unit_bits * counts.astype(float)
    return out


def _preference_order(dist_row: np.ndarray) -> np.ndarray:
    # sort SVs by distance, ties broken by lower SV index
    j = np.arange(dist_row.size)
    return np.lexsort((j, dist_row))


def assign_svs(state: ScenarioState, cfg: ScenarioConfig) -> ScenarioState:
    """Map each user to its nearest SV, shedding overflow past u_max.

    Over-capacity SVs shed their farthest requester to the requester's
    next-nearest SV with spare capacity. If capacity runs out globally
    (K > J*u_max) the leftover users are spread round-robin over SV
    indices and the overflow_warning flag is set.
    """
    out = state.copy()
    k, j = cfg.n_vehicles, cfg.n_svs
    dist = np.linalg.norm(out.veh_xy[:, None, :] - out.sv_xy[None, :, :], axis=2)
    prefs = [_preference_order(dist[i]) for i in range(k)]
    assigned = np.array([p[0] for p in prefs], dtype=int)

    parked: list[int] = []
    while True:
        loads = np.bincount(assigned[assigned >= 0], minlength=j)
        over = np.flatnonzero(loads > cfg.u_max)
        if over.size == 0:
            break
        sv = int(over[0])
        members = np.flatnonzero(assigned == sv)
        # farthest requester sheds; distance ties resolved to the higher user index
        far = members[np.lexsort((members, dist[members, sv]))[-1]]
        moved = False
        for cand in prefs[far]:
            if cand == sv:
                continue
            if loads[cand] < cfg.u_max:
                assigned[far] = int(cand)
                moved = True
                break
        if not moved:
            assigned[far] = -1
            parked.append(int(far))

    out.overflow_warning = bool(parked)
    for i, user in enumerate(sorted(parked)):
        assigned[user] = i % j
    out.sv_of = assigned
    return out


def assign_rbs(state: ScenarioState, cfg: ScenarioConfig) -> ScenarioState:
    """Round-robin RBs over links in (vehicle index, link type) order."""
    out = state.copy()
    flat = np.arange(2 * cfg.n_vehicles) % cfg.n_rbs
    out.rb_of = flat.reshape(cfg.n_vehicles, 2)
    return out


def served_counts(state: ScenarioState, cfg: ScenarioConfig, task_bearing_only: bool = True) -> np.ndarray:
    """Users served per SV. U_j in the compute-share model counts task bearers."""
    mask = state.task_bits > 0 if task_bearing_only else np.ones(cfg.n_vehicles, dtype=bool)
    return np.bincount(state.sv_of[mask], minlength=cfg.n_svs)
