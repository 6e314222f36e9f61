"""Per-slot task splitting across local / V2I / V2V paths.

Minimizing the slot makespan max_i rho_i*mu_i subject to sum rho_i = 1 is a
small LP in x = [rho_loc, rho_rsu, rho_sv, T]:

    min T   s.t.  rho_i*mu_i <= T,  sum rho_i = 1,  0 <= rho_i <= 1,
                  0 <= T <= T_max

An unusable path (mu_i = inf) gets its upper bound forced to 0 and its row
zeroed. When T_max cuts below the achievable makespan the LP is infeasible;
we then re-solve with T unbounded and report feasible=False together with
the unconstrained optimum, so callers can still count the violation and
charge the actual delay.

closed_form_split is the water-filling solution (all usable paths finish
together): T* = (sum_i 1/mu_i)^-1, rho_i = T*/mu_i. It shares no code with
the LP path and exists to cross-check it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.optimize import linprog

from .latency import PathCoefficients


@dataclass
class LpStandardForm:
    c: np.ndarray
    a_ub: np.ndarray
    b_ub: np.ndarray
    a_eq: np.ndarray
    b_eq: np.ndarray
    bounds: list


@dataclass
class OffloadSplit:
    rho_loc: float
    rho_rsu: float
    rho_sv: float
    t_star: float
    feasible: bool

    @property
    def rhos(self) -> np.ndarray:
        return np.array([self.rho_loc, self.rho_rsu, self.rho_sv])


def build_lp(paths: PathCoefficients, t_max: float | None) -> LpStandardForm:
    """Standard-form arrays for one vehicle's split problem."""
    mu = paths.as_array()
    usable = np.isfinite(mu)
    c = np.array([0.0, 0.0, 0.0, 1.0])
    a_ub = np.zeros((3, 4))
    for i in range(3):
        if usable[i]:
            a_ub[i, i] = mu[i]
        a_ub[i, 3] = -1.0
    b_ub = np.zeros(3)
    a_eq = np.array([[1.0, 1.0, 1.0, 0.0]])
    b_eq = np.array([1.0])
    bounds = [(0.0, 1.0 if usable[i] else 0.0) for i in range(3)]
    bounds.append((0.0, t_max))
    return LpStandardForm(c, a_ub, b_ub, a_eq, b_eq, bounds)


def _polish(x: np.ndarray, mu: np.ndarray, usable: np.ndarray) -> tuple[np.ndarray, float]:
    """Clean solver output to exact invariants: rho >= 0, sum rho = 1."""
    rho = np.clip(x[:3], 0.0, None)
    rho[~usable] = 0.0
    total = rho.sum()
    if total <= 0.0:
        rho = np.zeros(3)
        rho[int(np.argmin(np.where(usable, mu, np.inf)))] = 1.0
    else:
        rho = rho / total
    t_star = 0.0
    for i in range(3):
        if rho[i] > 0.0:
            t_star = max(t_star, rho[i] * mu[i])
    return rho, float(t_star)


def solve_offload(paths: PathCoefficients, t_max: float) -> OffloadSplit:
    """LP-optimal split; feasible=False when the bound t_max cannot be met."""
    mu = paths.as_array()
    usable = np.isfinite(mu)
    if not np.any(usable):
        raise ValueError("no usable path: all coefficients are infinite")
    if np.all(mu[usable] == 0.0):
        rho = np.zeros(3)
        rho[int(np.argmax(usable))] = 1.0
        return OffloadSplit(rho[0], rho[1], rho[2], 0.0, True)

    form = build_lp(paths, t_max)
    res = linprog(form.c, A_ub=form.a_ub, b_ub=form.b_ub,
                  A_eq=form.a_eq, b_eq=form.b_eq, bounds=form.bounds,
                  method="highs")
    feasible = res.status == 0
    if not feasible:
        form = build_lp(paths, None)
        res = linprog(form.c, A_ub=form.a_ub, b_ub=form.b_ub,
                      A_eq=form.a_eq, b_eq=form.b_eq, bounds=form.bounds,
                      method="highs")
        if res.status != 0:
            raise RuntimeError(f"offload LP failed with status {res.status}: {res.message}")
    rho, t_star = _polish(res.x, mu, usable)
    return OffloadSplit(rho[0], rho[1], rho[2], t_star, feasible)


def closed_form_split(paths: PathCoefficients) -> tuple[np.ndarray, float]:
    """Water-filling optimum: every usable path finishes at the same time."""
    mu = paths.as_array()
    usable = np.isfinite(mu)
    if not np.any(usable):
        raise ValueError("no usable path: all coefficients are infinite")
    if np.any(mu[usable] == 0.0):
        rho = np.zeros(3)
        zero = np.where(usable & (mu == 0.0))[0][0]
        rho[zero] = 1.0
        return rho, 0.0
    inv = np.zeros(3)
    inv[usable] = 1.0 / mu[usable]
    t_star = 1.0 / inv.sum()
    return t_star * inv, float(t_star)
