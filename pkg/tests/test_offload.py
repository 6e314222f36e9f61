import numpy as np
import pytest

from semvec.latency import PathCoefficients
from semvec.offload import LpStandardForm, OffloadSplit, build_lp, closed_form_split, solve_offload


def _paths(mu):
    return PathCoefficients(mu[0], mu[1], mu[2])


def test_reference_split_harmonic():
    # mu = (2, 3, 6): 1/2 + 1/3 + 1/6 = 1, so T* = 1 and rho_i = 1/mu_i
    split = solve_offload(_paths([2.0, 3.0, 6.0]), t_max=5.0)
    assert split.feasible
    assert split.t_star == pytest.approx(1.0, rel=1e-9)
    assert split.rhos == pytest.approx([1 / 2, 1 / 3, 1 / 6], rel=1e-9)


def test_closed_form_reference():
    rho, t = closed_form_split(_paths([2.0, 3.0, 6.0]))
    assert t == pytest.approx(1.0, rel=1e-12)
    assert rho == pytest.approx([1 / 2, 1 / 3, 1 / 6], rel=1e-12)
    rho, t = closed_form_split(_paths([0.2, 0.4, 0.4]))
    assert t == pytest.approx(0.1, rel=1e-12)
    assert rho == pytest.approx([0.5, 0.25, 0.25], rel=1e-12)


def test_solver_matches_closed_form_randomized():
    rng = np.random.default_rng(7)
    for _ in range(300):
        mu = 10.0 ** rng.uniform(-3, 1, size=3)
        split = solve_offload(_paths(mu), t_max=np.inf)
        rho, t = closed_form_split(_paths(mu))
        assert abs(split.t_star - t) <= 1e-6 * max(1.0, t)
        np.testing.assert_allclose(split.rhos, rho, atol=1e-6)


def test_solution_equalizes_usable_paths():
    rng = np.random.default_rng(11)
    for _ in range(50):
        mu = 10.0 ** rng.uniform(-2, 1, size=3)
        split = solve_offload(_paths(mu), t_max=np.inf)
        finish = split.rhos * mu
        assert np.ptp(finish) <= 1e-6 * split.t_star


def test_invariants_after_polish():
    rng = np.random.default_rng(3)
    for _ in range(100):
        mu = 10.0 ** rng.uniform(-3, 1, size=3)
        split = solve_offload(_paths(mu), t_max=np.inf)
        assert abs(split.rhos.sum() - 1.0) <= 1e-9
        assert np.all(split.rhos >= 0.0)
        recomputed = max(r * m for r, m in zip(split.rhos, mu) if r > 0)
        assert split.t_star == pytest.approx(recomputed, abs=1e-15)


def test_disabled_path_gets_zero_share():
    split = solve_offload(_paths([2.0, np.inf, 6.0]), t_max=10.0)
    assert split.rho_rsu == 0.0
    assert split.t_star == pytest.approx(1.5, rel=1e-9)   # (1/2 + 1/6)^-1
    assert split.rhos == pytest.approx([0.75, 0.0, 0.25], rel=1e-9)
    rho, t = closed_form_split(_paths([2.0, np.inf, 6.0]))
    assert t == pytest.approx(1.5, rel=1e-12)
    assert rho[1] == 0.0


def test_only_local_usable():
    split = solve_offload(_paths([0.2, np.inf, np.inf]), t_max=0.5)
    assert split.rhos == pytest.approx([1.0, 0.0, 0.0])
    assert split.t_star == pytest.approx(0.2)
    assert split.feasible


def test_infeasible_bound_reports_unconstrained_optimum():
    split = solve_offload(_paths([2.0, 3.0, 6.0]), t_max=0.5)
    assert not split.feasible
    assert split.t_star == pytest.approx(1.0, rel=1e-6)
    assert abs(split.rhos.sum() - 1.0) <= 1e-9


def test_bound_exactly_at_optimum_is_feasible():
    split = solve_offload(_paths([2.0, 3.0, 6.0]), t_max=1.0 + 1e-9)
    assert split.feasible


def test_dominance_over_single_paths():
    rng = np.random.default_rng(23)
    for _ in range(50):
        mu = 10.0 ** rng.uniform(-2, 1, size=3)
        _, t = closed_form_split(_paths(mu))
        assert t <= mu.min() + 1e-12
        assert t >= mu.min() / 3 - 1e-12


def test_grid_search_corroboration_coarse():
    # brute force over the simplex with step 0.01 should not beat the LP by
    # more than one grid cell's worth of makespan
    rng = np.random.default_rng(5)
    step = 0.01
    grid = np.arange(0.0, 1.0 + step / 2, step)
    a, b = np.meshgrid(grid, grid, indexing="ij")
    mask = a + b <= 1.0 + 1e-12
    ra, rb = a[mask], b[mask]
    rc = 1.0 - ra - rb
    for _ in range(10):
        mu = 10.0 ** rng.uniform(-1, 1, size=3)
        best = np.min(np.maximum.reduce([ra * mu[0], rb * mu[1], rc * mu[2]]))
        split = solve_offload(_paths(mu), t_max=np.inf)
        assert split.t_star <= best + 1e-9
        assert best - split.t_star <= 2 * step * mu.max()


def test_build_lp_structure():
    form = build_lp(_paths([2.0, np.inf, 6.0]), t_max=0.5)
    assert isinstance(form, LpStandardForm)
    np.testing.assert_array_equal(form.c, [0.0, 0.0, 0.0, 1.0])
    np.testing.assert_array_equal(form.a_eq, [[1.0, 1.0, 1.0, 0.0]])
    np.testing.assert_array_equal(form.b_eq, [1.0])
    assert form.a_ub.shape == (3, 4)
    assert form.a_ub[0, 0] == 2.0 and form.a_ub[0, 3] == -1.0
    assert form.a_ub[1, 1] == 0.0            # disabled path row zeroed
    assert form.bounds[1] == (0.0, 0.0)      # and its share pinned to 0
    assert form.bounds[3] == (0.0, 0.5)


def test_degenerate_zero_work():
    split = solve_offload(_paths([0.0, 0.0, 0.0]), t_max=0.5)
    assert split.t_star == 0.0 and split.feasible
    assert split.rhos.sum() == pytest.approx(1.0)
    with pytest.raises(ValueError):
        solve_offload(_paths([np.inf, np.inf, np.inf]), t_max=0.5)
    with pytest.raises(ValueError):
        closed_form_split(_paths([np.inf, np.inf, np.inf]))
