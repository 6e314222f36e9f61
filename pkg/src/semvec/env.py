"""Slot-level environment tying geometry, channels, semantics and the LP.

SlotContext freezes one slot's randomness (fading draws, tasks, assignments)
so that the learned policy, the metaheuristic baselines and the heuristic all
score decision vectors through exactly one code path, eval_config, which also
counts evaluations for the budget-parity bookkeeping.

OffloadEnv wraps SlotContext sequences into the usual reset/step interface
with tanh-ranged raw actions: [N phase slots | K V2I symbol slots | K V2V
symbol slots].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .agent import map_nu, map_phase_index
from .channel import (
    RadioConfig,
    cophase_indices,
    direct_gain,
    link_sinrs,
    phase_set,
    rician_los_gain,
    steering_vector,
    to_db,
)
from .latency import ComputeParams, path_coefficients, transmission_delay
from .offload import solve_offload
from .scenario import (
    Position,
    ScenarioConfig,
    ScenarioState,
    advance,
    assign_rbs,
    assign_svs,
    draw_tasks,
    init_scenario,
    served_counts,
)
from .semantic import SemanticParams, SemanticTable, semantic_rate, sentences

V2I, V2V = 0, 1


def _dist3(xy: np.ndarray, pos: Position) -> np.ndarray:
    """Distance from ground points (n, 2) to an elevated position."""
    xy = np.atleast_2d(xy)
    return np.sqrt((xy[:, 0] - pos.x) ** 2 + (xy[:, 1] - pos.y) ** 2 + pos.z ** 2)


def _sin_aoa(xy: np.ndarray, ris: Position) -> np.ndarray:
    """sin of the angle a ground point subtends at the RIS array axis."""
    xy = np.atleast_2d(xy)
    return (xy[:, 1] - ris.y) / np.maximum(_dist3(xy, ris), 1.0)


@dataclass
class SlotResult:
    reward: float
    sum_total_delay: float
    mean_total_delay: float
    mean_v2i_delay: float
    mean_v2v_delay: float
    violations: int
    c3_violations: int
    deadline_violations: int
    n_tasked: int
    sinr_db: np.ndarray       # (K, 2)
    delta: np.ndarray         # (K, 2)
    executed_nus: np.ndarray  # (K, 2)
    rates: np.ndarray         # (K, 2)
    rhos: np.ndarray          # (K, 3)
    t_star: np.ndarray        # (K,)
    lp_feasible: np.ndarray   # (K,) bool


class SlotContext:
    """One slot's frozen randomness plus the shared scoring function."""

    def __init__(self, state: ScenarioState, scen: ScenarioConfig, radio: RadioConfig,
                 sem: SemanticParams, table: SemanticTable, comp: ComputeParams,
                 rng: np.random.Generator):
        self.scen = scen
        self.radio = radio
        self.sem = sem
        self.table = table
        self.comp = comp
        self.state = state
        k, j, n = scen.n_vehicles, scen.n_svs, radio.n_elements

        veh, sv = state.veh_xy, state.sv_xy
        d_k_rsu = _dist3(veh, scen.rsu_pos)
        sv_xy_of = sv[state.sv_of]
        d_k_sv = np.sqrt(np.sum((veh - sv_xy_of) ** 2, axis=1))

        self.direct = np.empty((k, 2), dtype=complex)
        self.direct[:, V2I] = direct_gain(d_k_rsu, radio.path_exp_direct, radio.ref_loss, rng)
        self.direct[:, V2V] = direct_gain(d_k_sv, radio.path_exp_direct, radio.ref_loss, rng)

        self.sin_aoa = _sin_aoa(veh, scen.ris_pos)
        spacing, lam = radio.spacing, radio.wavelength
        h_kr = np.empty((k, n), dtype=complex)
        d_k_ris = _dist3(veh, scen.ris_pos)
        for i in range(k):
            steer = steering_vector(np.arcsin(self.sin_aoa[i]), n, spacing, lam)
            h_kr[i] = rician_los_gain(d_k_ris[i], radio.path_exp_user_ris, radio.ref_loss,
                                      radio.rician_kappa, steer)
        d_ris_rsu = np.sqrt((scen.ris_pos.x - scen.rsu_pos.x) ** 2
                            + (scen.ris_pos.y - scen.rsu_pos.y) ** 2
                            + (scen.ris_pos.z - scen.rsu_pos.z) ** 2)
        sin_rsu = (scen.rsu_pos.y - scen.ris_pos.y) / max(d_ris_rsu, 1.0)
        h_rj_rsu = rician_los_gain(d_ris_rsu, radio.path_exp_ris_edge, radio.ref_loss,
                                   radio.rician_kappa,
                                   steering_vector(np.arcsin(sin_rsu), n, spacing, lam))
        d_ris_sv = _dist3(sv, scen.ris_pos)
        sin_sv = _sin_aoa(sv, scen.ris_pos)
        h_rj_sv = np.empty((j, n), dtype=complex)
        for i in range(j):
            steer = steering_vector(np.arcsin(sin_sv[i]), n, spacing, lam)
            h_rj_sv[i] = rician_los_gain(d_ris_sv[i], radio.path_exp_ris_edge, radio.ref_loss,
                                         radio.rician_kappa, steer)
        self.h_kr = h_kr
        self.h_rj_rsu = h_rj_rsu
        self.h_rj_sv = h_rj_sv

        # element products: cascade(k, link) = w[k, link] @ reflection
        self.w = np.empty((k, 2, n), dtype=complex)
        self.w[:, V2I, :] = np.conj(h_rj_rsu)[None, :] * h_kr
        self.w[:, V2V, :] = np.conj(h_rj_sv[state.sv_of]) * h_kr
        if radio.ris_links == "v2i":
            self.w[:, V2V, :] = 0.0

        self.tasked = state.task_bits > 0.0
        self.n_tasked = int(self.tasked.sum())
        self.u0 = self.n_tasked
        counts = served_counts(state, scen, task_bearing_only=True)
        self.u_j_of = counts[state.sv_of]
        self.phases = phase_set(radio.phase_bits)
        self.eval_count = 0

    def sinrs(self, phase_idx: np.ndarray) -> np.ndarray:
        """Linear SINR (K, 2) for a phase configuration; not budget-counted."""
        phase_idx = np.asarray(phase_idx, dtype=int)
        if phase_idx.shape != (self.radio.n_elements,):
            raise ValueError("phase index vector must have length N")
        if phase_idx.size and (phase_idx.min() < 0 or phase_idx.max() >= self.phases.size):
            raise ValueError("phase index outside the discrete set")
        refl = np.exp(1j * self.phases[phase_idx])
        casc = self.w @ refl
        active = np.repeat(self.tasked[:, None], 2, axis=1)
        flat = link_sinrs(self.direct.ravel(), casc.ravel(),
                          self.state.rb_of.ravel(), active.ravel(),
                          self.radio.tx_power, self.radio.noise_power)
        return flat.reshape(-1, 2)

    def eval_config(self, phase_idx: np.ndarray, nus: np.ndarray) -> SlotResult:
        """Score one decision vector end to end; counts one evaluation.

        Sampled symbol counts are projected up to the minimal feasible count
        whenever the similarity threshold is reachable; otherwise the sampled
        count executes and the link is flagged as a violation.
        """
        self.eval_count += 1
        k = self.scen.n_vehicles
        nus = np.asarray(nus, dtype=int)
        if nus.shape != (k, 2):
            raise ValueError("nus must have shape (K, 2)")
        if nus.min() < 1 or nus.max() > self.table.nu_max:
            raise ValueError("symbol counts outside [1, nu_max]")

        gamma = self.sinrs(phase_idx)
        gamma_db = to_db(gamma)
        executed = nus.copy()
        delta = np.zeros((k, 2))
        rates = np.zeros((k, 2))
        c3_violations = 0
        th = self.sem.delta_threshold
        for i in np.flatnonzero(self.tasked):
            for link in (V2I, V2V):
                floor_nu = self.table.min_feasible_nu(gamma_db[i, link], th)
                if floor_nu is not None:
                    executed[i, link] = max(executed[i, link], floor_nu)
                d = float(self.table.similarity(gamma_db[i, link], executed[i, link]))
                if d < th:
                    c3_violations += 1
                delta[i, link] = d
                rates[i, link] = semantic_rate(self.sem, self.radio.bandwidth,
                                               executed[i, link], d)

        rhos = np.zeros((k, 3))
        t_star = np.zeros(k)
        feasible = np.ones(k, dtype=bool)
        v2i_tx = 0.0
        v2v_tx = 0.0
        deadline_violations = 0
        for i in np.flatnonzero(self.tasked):
            q = sentences(self.state.task_bits[i], self.sem)
            paths = path_coefficients(self.state.task_bits[i], q, self.sem.units_per_sentence,
                                      rates[i, V2I], rates[i, V2V], self.comp,
                                      self.u0, int(self.u_j_of[i]))
            split = solve_offload(paths, self.comp.t_max)
            rhos[i] = split.rhos
            t_star[i] = split.t_star
            feasible[i] = split.feasible
            if not split.feasible:
                deadline_violations += 1
            v2i_tx += transmission_delay(split.rho_rsu, q, self.sem.units_per_sentence, rates[i, V2I])
            v2v_tx += transmission_delay(split.rho_sv, q, self.sem.units_per_sentence, rates[i, V2V])

        total = float(t_star.sum())
        m = max(self.n_tasked, 1)
        return SlotResult(
            reward=-total,
            sum_total_delay=total,
            mean_total_delay=total / m,
            mean_v2i_delay=v2i_tx / m,
            mean_v2v_delay=v2v_tx / m,
            violations=c3_violations + deadline_violations,
            c3_violations=c3_violations,
            deadline_violations=deadline_violations,
            n_tasked=self.n_tasked,
            sinr_db=gamma_db,
            delta=delta,
            executed_nus=executed,
            rates=rates,
            rhos=rhos,
            t_star=t_star,
            lp_feasible=feasible,
        )


def observation_dim(scen: ScenarioConfig, radio: RadioConfig) -> int:
    k, j, n = scen.n_vehicles, scen.n_svs, radio.n_elements
    return 2 * (k + j) + k + n + 2 * k


def action_dim(scen: ScenarioConfig, radio: RadioConfig) -> int:
    return radio.n_elements + 2 * scen.n_vehicles


def build_observation(state: ScenarioState, scen: ScenarioConfig, radio: RadioConfig,
                      phase_idx: np.ndarray, sinr_db: np.ndarray) -> np.ndarray:
    """Normalized observation; every block lands in [-1, 1]."""
    def norm_xy(xy):
        out = np.empty_like(xy)
        out[:, 0] = xy[:, 0] / 10.0
        out[:, 1] = xy[:, 1] / scen.road_length * 2.0 - 1.0
        return out.ravel()

    sin_aoa = _sin_aoa(state.veh_xy, scen.ris_pos)
    levels = max(2 ** radio.phase_bits - 1, 1)
    phase_part = np.asarray(phase_idx, dtype=float) / levels * 2.0 - 1.0
    sinr_part = np.clip(np.asarray(sinr_db, dtype=float).ravel(), -40.0, 40.0) / 40.0
    obs = np.concatenate([norm_xy(state.veh_xy), norm_xy(state.sv_xy),
                          sin_aoa, phase_part, sinr_part])
    return obs


class OffloadEnv:
    """reset/step wrapper; one step = one slot = one counted evaluation."""

    def __init__(self, scen: ScenarioConfig, radio: RadioConfig, sem: SemanticParams,
                 table: SemanticTable, comp: ComputeParams, episode_slots: int = 200,
                 seed: int = 0):
        self.scen = scen
        self.radio = radio
        self.sem = sem
        self.table = table
        self.comp = comp
        self.episode_slots = int(episode_slots)
        self.obs_dim = observation_dim(scen, radio)
        self.act_dim = action_dim(scen, radio)
        self.phases = phase_set(radio.phase_bits)
        self._master = np.random.default_rng(seed)
        self.slot: SlotContext | None = None
        self.eval_counts: list[int] = []
        self._t = 0
        self._last_phase_idx = np.zeros(radio.n_elements, dtype=int)

    def _new_slot(self, state: ScenarioState) -> None:
        self.slot = SlotContext(state, self.scen, self.radio, self.sem, self.table,
                                self.comp, self._rng)

    def reset(self) -> np.ndarray:
        seed = int(self._master.integers(0, 2 ** 63 - 1))
        self._rng = np.random.default_rng(seed)
        state = init_scenario(self.scen, self._rng)
        state = draw_tasks(state, self.scen, self._rng)
        state = assign_svs(state, self.scen)
        state = assign_rbs(state, self.scen)
        self._new_slot(state)
        self._t = 0
        self._last_phase_idx = np.zeros(self.radio.n_elements, dtype=int)
        sinr_db = to_db(self.slot.sinrs(self._last_phase_idx))
        return build_observation(state, self.scen, self.radio, self._last_phase_idx, sinr_db)

    def decode_action(self, raw_action: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
        raw = np.asarray(raw_action, dtype=float)
        if raw.shape != (self.act_dim,):
            raise ValueError(f"raw action must have shape ({self.act_dim},)")
        n, k = self.radio.n_elements, self.scen.n_vehicles
        phase_idx = map_phase_index(raw[:n], self.phases)
        nus = np.empty((k, 2), dtype=int)
        nus[:, V2I] = map_nu(raw[n:n + k], self.table.nu_max)
        nus[:, V2V] = map_nu(raw[n + k:], self.table.nu_max)
        return phase_idx, nus

    def step(self, raw_action: np.ndarray):
        phase_idx, nus = self.decode_action(raw_action)
        return self.step_decision(phase_idx, nus)

    def step_decision(self, phase_idx: np.ndarray, nus: np.ndarray):
        """Execute an already-discrete decision for the current slot."""
        if self.slot is None:
            raise RuntimeError("call reset() before step()")
        result = self.slot.eval_config(phase_idx, nus)
        self.eval_counts.append(self.slot.eval_count)
        self._last_phase_idx = np.asarray(phase_idx, dtype=int).copy()
        self._t += 1
        done = self._t >= self.episode_slots

        state = advance(self.slot.state, self.scen)
        state = draw_tasks(state, self.scen, self._rng)
        state = assign_svs(state, self.scen)
        state = assign_rbs(state, self.scen)
        self._new_slot(state)

        # the state's SINR entries belong to the slot about to be decided:
        # a pilot sounding of the fresh channels under the still-applied
        # phase configuration (same construction reset() uses), not the
        # SINR realized while executing the previous decision
        sounding_db = to_db(self.slot.sinrs(self._last_phase_idx))
        obs = build_observation(state, self.scen, self.radio,
                                self._last_phase_idx, sounding_db)
        info = {
            "total_delay": result.mean_total_delay,
            "v2i_delay": result.mean_v2i_delay,
            "v2v_delay": result.mean_v2v_delay,
            "sum_total_delay": result.sum_total_delay,
            "violations": result.violations,
            "c3_violations": result.c3_violations,
            "deadline_violations": result.deadline_violations,
            "n_tasked": result.n_tasked,
            "result": result,
        }
        return obs, result.reward, done, info


def heuristic_decision(slot: SlotContext) -> tuple[np.ndarray, np.ndarray]:
    """Channel-aware one-shot rule used by the sweep studies.

    Aligns the RIS to the V2I link of the task-bearing vehicle with the
    largest task (ties to the lowest index), then picks each link's minimal
    feasible symbol count, falling back to nu_max where the threshold is
    unreachable so the rate stays continuous across the feasibility boundary.
    """
    n = slot.radio.n_elements
    k = slot.scen.n_vehicles
    nu_max = slot.table.nu_max
    nus = np.ones((k, 2), dtype=int)
    if slot.n_tasked == 0:
        return np.zeros(n, dtype=int), nus
    bits = np.where(slot.tasked, slot.state.task_bits, -1.0)
    target = int(np.argmax(bits))
    phase_idx = cophase_indices(slot.direct[target, V2I], slot.h_rj_rsu,
                                slot.h_kr[target], slot.radio.phase_bits)
    gamma_db = to_db(slot.sinrs(phase_idx))
    th = slot.sem.delta_threshold
    for i in np.flatnonzero(slot.tasked):
        for link in (V2I, V2V):
            floor_nu = slot.table.min_feasible_nu(gamma_db[i, link], th)
            nus[i, link] = floor_nu if floor_nu is not None else nu_max
    return phase_idx, nus
