"""Three-path delay model (local / V2I / V2V) and per-path LP coefficients.

Each path's unit coefficient mu is the delay a task would incur if it took
that path whole; splitting by rho scales linearly. Edge compute is an equal
share: F_RSU/U_0 at the RSU, F_SV/U_j at the serving SV. Result return
delays are neglected.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class ComputeParams:
    cycles_per_bit: float = 1000.0    # C
    f_local: float = 2.0e9            # vehicle CPU, Hz
    f_rsu: float = 6.0e9              # RSU edge server total, Hz
    f_sv: float = 2.0e9               # per service vehicle, Hz
    t_max: float = 0.5                # per-slot latency bound, s

    def __post_init__(self) -> None:
        for name in ("cycles_per_bit", "f_local", "f_rsu", "f_sv", "t_max"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")


@dataclass
class PathCoefficients:
    mu_loc: float
    mu_rsu: float
    mu_sv: float

    def as_array(self) -> np.ndarray:
        return np.array([self.mu_loc, self.mu_rsu, self.mu_sv])


def local_delay(rho: float, task_bits: float, cycles_per_bit: float, f_local: float) -> float:
    """rho * D * C / f_loc."""
    return rho * task_bits * cycles_per_bit / f_local


def v2i_delay(
    rho: float,
    q_sentences: float,
    units_per_sentence: float,
    rate: float,
    task_bits: float,
    cycles_per_bit: float,
    f_rsu: float,
    u0: int,
) -> float:
    """Transmission rho*Q*I/R plus RSU compute rho*D*C/(F_RSU/U_0)."""
    if rho == 0.0:
        return 0.0
    if rate <= 0.0:
        return np.inf
    tx = rho * q_sentences * units_per_sentence / rate
    comp = rho * task_bits * cycles_per_bit / (f_rsu / u0)
    return tx + comp


def v2v_delay(
    rho: float,
    q_sentences: float,
    units_per_sentence: float,
    rate: float,
    task_bits: float,
    cycles_per_bit: float,
    f_sv: float,
    u_j: int,
) -> float:
    """Mirror of v2i_delay with the serving SV's share F_SV/U_j."""
    return v2i_delay(rho, q_sentences, units_per_sentence, rate, task_bits, cycles_per_bit, f_sv, u_j)


def transmission_delay(rho: float, q_sentences: float, units_per_sentence: float, rate: float) -> float:
    """The communication component rho*Q*I/R alone (per-link reporting)."""
    if rho == 0.0:
        return 0.0
    if rate <= 0.0:
        return np.inf
    return rho * q_sentences * units_per_sentence / rate


def total_delay(rhos, paths: PathCoefficients) -> float:
    """The slot finishes when the slowest path finishes: max_i rho_i * mu_i."""
    r = np.asarray(rhos, dtype=float)
    mu = paths.as_array()
    prods = np.zeros_like(r)
    live = r > 0                           # 0 * inf on a disabled path is 0 work
    prods[live] = r[live] * mu[live]
    return float(np.max(prods))


def path_coefficients(
    task_bits: float,
    q_sentences: float,
    units_per_sentence: float,
    rate_v2i: float,
    rate_v2v: float,
    params: ComputeParams,
    u0: int,
    u_j: int,
) -> PathCoefficients:
    """Unit processing times mu_loc, mu_rsu, mu_sv for one vehicle's slot."""
    mu_loc = local_delay(1.0, task_bits, params.cycles_per_bit, params.f_local)
    mu_rsu = v2i_delay(1.0, q_sentences, units_per_sentence, rate_v2i,
                       task_bits, params.cycles_per_bit, params.f_rsu, u0)
    mu_sv = v2v_delay(1.0, q_sentences, units_per_sentence, rate_v2v,
                      task_bits, params.cycles_per_bit, params.f_sv, u_j)
    return PathCoefficients(mu_loc, mu_rsu, mu_sv)
