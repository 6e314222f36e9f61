"""GA and QPSO per-slot optimizers over the same discrete decision vector.

Both metaheuristics score candidates exclusively through the slot's
eval_config, so fitness (total delay, seconds) is identical to what the
learned policy is judged on, and every call is budget-counted. Both consume
exactly `budget` evaluations: a generation or swarm iteration in flight is
truncated when the budget runs out, and the best ever-evaluated candidate is
returned.

Gene layout mirrors the action vector: [N phase indices | K V2I symbol
counts | K V2V symbol counts].
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class Candidate:
    phase_index: np.ndarray   # (N,) ints in [0, 2^q)
    nu: np.ndarray            # (2K,) ints in [1, nu_max]
    fitness: float            # seconds, lower is better


def _bounds(slot) -> tuple[np.ndarray, np.ndarray]:
    n = slot.radio.n_elements
    k = slot.scen.n_vehicles
    levels = 2 ** slot.radio.phase_bits
    lo = np.concatenate([np.zeros(n, dtype=int), np.ones(2 * k, dtype=int)])
    hi = np.concatenate([np.full(n, levels - 1, dtype=int),
                         np.full(2 * k, slot.table.nu_max, dtype=int)])
    return lo, hi


def _score(slot, genes: np.ndarray) -> float:
    n = slot.radio.n_elements
    k = slot.scen.n_vehicles
    nus = np.stack([genes[n:n + k], genes[n + k:]], axis=1)
    return float(slot.eval_config(genes[:n], nus).sum_total_delay)


def _to_candidate(slot, genes: np.ndarray, fitness: float) -> Candidate:
    n = slot.radio.n_elements
    return Candidate(phase_index=genes[:n].copy(), nu=genes[n:].copy(), fitness=fitness)


def ga_optimize(slot, budget: int, rng: np.random.Generator, pop_size: int = 50,
                tournament: int = 3, crossover_rate: float = 0.9,
                return_history: bool = False):
    """Generational GA: tournament selection, uniform crossover, per-gene
    uniform-resample mutation at rate 1/genome, elitism of one."""
    if budget < pop_size:
        raise ValueError("budget must cover at least the initial population")
    lo, hi = _bounds(slot)
    genome = lo.size
    mut_rate = 1.0 / genome

    pop = rng.integers(lo, hi, endpoint=True, size=(pop_size, genome))
    fits = np.array([_score(slot, pop[i]) for i in range(pop_size)])
    evals = pop_size
    best_i = int(np.argmin(fits))
    best_genes, best_fit = pop[best_i].copy(), float(fits[best_i])
    history = [best_fit]

    while evals < budget:
        elite_i = int(np.argmin(fits))
        new_pop = [pop[elite_i].copy()]
        new_fits = [float(fits[elite_i])]
        while len(new_pop) < pop_size and evals < budget:
            picks = rng.integers(0, len(pop), size=tournament)
            p1 = pop[picks[np.argmin(fits[picks])]]
            picks = rng.integers(0, len(pop), size=tournament)
            p2 = pop[picks[np.argmin(fits[picks])]]
            if rng.random() < crossover_rate:
                mask = rng.random(genome) < 0.5
                child = np.where(mask, p1, p2)
            else:
                child = p1.copy()
            flips = rng.random(genome) < mut_rate
            if flips.any():
                child = child.copy()
                child[flips] = rng.integers(lo[flips], hi[flips], endpoint=True)
            f = _score(slot, child)
            evals += 1
            new_pop.append(child)
            new_fits.append(f)
            if f < best_fit:
                best_genes, best_fit = child.copy(), f
        pop = np.stack(new_pop)
        fits = np.array(new_fits)
        history.append(float(fits.min()))

    best = _to_candidate(slot, best_genes, best_fit)
    return (best, history) if return_history else best


def qpso_optimize(slot, budget: int, rng: np.random.Generator, pop_size: int = 50,
                  beta_hi: float = 1.0, beta_lo: float = 0.5,
                  return_history: bool = False):
    """Canonical QPSO: x <- p +/- beta*|mbest - x|*ln(1/u) with the attractor
    p a per-dimension convex mix of personal and global best; beta anneals
    linearly beta_hi -> beta_lo over the planned iterations; positions are
    continuous and round to the nearest legal gene at evaluation time.

    Per-particle draw order is phi, u, sign (each a genome-length vector);
    the regression test replays this exact sequence.
    """
    if budget < pop_size:
        raise ValueError("budget must cover at least the initial population")
    lo, hi = _bounds(slot)
    flo, fhi = lo.astype(float), hi.astype(float)
    genome = lo.size

    def round_genes(row: np.ndarray) -> np.ndarray:
        return np.clip(np.floor(row + 0.5).astype(int), lo, hi)

    x = rng.uniform(flo, fhi, size=(pop_size, genome))
    fits = np.array([_score(slot, round_genes(x[i])) for i in range(pop_size)])
    evals = pop_size
    pbest = x.copy()
    pbest_f = fits.copy()
    g_i = int(np.argmin(pbest_f))
    gbest = pbest[g_i].copy()
    gbest_f = float(pbest_f[g_i])
    history = [gbest_f]

    n_iters = int(np.ceil((budget - pop_size) / pop_size)) if budget > pop_size else 0
    it = 0
    while evals < budget:
        if n_iters > 1:
            beta = beta_hi - (beta_hi - beta_lo) * it / (n_iters - 1)
        else:
            beta = beta_hi
        mbest = pbest.mean(axis=0)
        for i in range(pop_size):
            if evals >= budget:
                break
            phi = rng.uniform(size=genome)
            p = phi * pbest[i] + (1.0 - phi) * gbest
            u = rng.uniform(size=genome)
            sign = np.where(rng.random(genome) < 0.5, 1.0, -1.0)
            x[i] = p + sign * beta * np.abs(mbest - x[i]) * np.log(1.0 / np.maximum(u, 1e-12))
            x[i] = np.clip(x[i], flo, fhi)
            f = _score(slot, round_genes(x[i]))
            evals += 1
            if f < pbest_f[i]:
                pbest[i] = x[i].copy()
                pbest_f[i] = f
            if f < gbest_f:
                gbest = x[i].copy()
                gbest_f = f
        it += 1
        history.append(gbest_f)

    genes = round_genes(gbest)
    best = _to_candidate(slot, genes, gbest_f)
    return (best, history) if return_history else best
