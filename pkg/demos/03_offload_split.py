"""Worst-case-optimal task splitting across local, V2I, and V2V routes.

Builds a few per-route delay triples, solves the split with the LP, and
checks it against the closed form: with every route open the optimum
equalizes rho_i * mu_i and the total comes out to (sum_i 1/mu_i)^-1.
"""

import numpy as np

from semvec.latency import PathCoefficients
from semvec.offload import closed_form_split, solve_offload

T_MAX = 0.5


def show(mu, note):
    paths = PathCoefficients(*mu)
    res = solve_offload(paths, T_MAX)
    finite = np.isfinite(paths.as_array())
    per_route = np.where(finite, res.rhos * np.where(finite, paths.as_array(), 0.0), 0.0)
    print(note)
    print(f"  unit delays mu      {np.array2string(paths.as_array(), precision=4)}")
    print(f"  split rho           {np.array2string(res.rhos, precision=4)}")
    print(f"  per-route rho*mu    {np.array2string(per_route, precision=4)}")
    print(f"  total delay         {res.t_star:.6f} s  "
          f"(rho sums to {res.rhos.sum():.12f}, feasible={res.feasible})")
    return res


def main():
    rng = np.random.default_rng(3)

    res = show((0.20, 0.05, 0.08), "balanced three-route instance")
    rho_star, t_star = closed_form_split(PathCoefficients(0.20, 0.05, 0.08))
    print(f"  closed form         {t_star:.6f} s, max |rho - rho*| = "
          f"{np.abs(res.rhos - rho_star).max():.2e}\n")

    show((0.20, np.inf, 0.08), "V2I route closed (infinite unit delay)")
    print()
    show((0.20, np.inf, np.inf), "only local compute available")
    print()
    show((2.0, 3.0, 2.5), "slow everywhere: bound t_max=0.5 unreachable, split still optimal")
    print()

    # random stress: LP against closed form on fully-open triples
    worst = 0.0
    for _ in range(200):
        mu = rng.uniform(0.01, 0.5, size=3)
        res = solve_offload(PathCoefficients(*mu), T_MAX)
        _, t_star = closed_form_split(PathCoefficients(*mu))
        worst = max(worst, abs(res.t_star - t_star))
    print(f"200 random fully-open triples: worst |LP - closed form| = {worst:.2e}")


if __name__ == "__main__":
    main()
