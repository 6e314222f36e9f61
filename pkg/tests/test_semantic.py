import numpy as np
import pytest

from semvec.semantic import SemanticParams, SemanticTable, semantic_rate, sentences


@pytest.fixture(scope="module")
def table():
    return SemanticTable.default()


def test_grid_point_returns_stored_entry(table):
    i, j = 25, 4  # gamma = 5 dB, nu = 5
    got = table.similarity(table.snr_grid_db[i], int(table.nu_grid[j]))
    assert got == pytest.approx(table.delta[i, j], abs=0)


def test_infinite_snr_clamps_to_top_row(table):
    got = table.similarity(1e9, table.nu_max)
    assert got == pytest.approx(table.delta[-1, -1])
    low = table.similarity(-1e9, 1)
    assert low == pytest.approx(table.delta[0, 0])


def test_snr_midpoint_is_arithmetic_mean(table):
    g0, g1 = table.snr_grid_db[10], table.snr_grid_db[11]
    mid = table.similarity((g0 + g1) / 2, 7)
    assert mid == pytest.approx((table.delta[10, 6] + table.delta[11, 6]) / 2)


def test_nu_out_of_range_raises(table):
    with pytest.raises(ValueError):
        table.similarity(0.0, 0)
    with pytest.raises(ValueError):
        table.similarity(0.0, table.nu_max + 1)


def test_sparse_nu_grid_interpolates():
    snr = np.array([0.0, 10.0])
    nu = np.array([1, 5])
    delta = np.array([[0.2, 0.6], [0.4, 0.8]])
    t = SemanticTable(snr, nu, delta)
    got = t.similarity(0.0, 3)  # halfway between nu=1 and nu=5
    assert got == pytest.approx(0.2 + (0.6 - 0.2) * 0.5)


def test_min_feasible_trivial_threshold(table):
    assert table.min_feasible_nu(0.0, 0.0) == 1


def test_min_feasible_infeasible_returns_none(table):
    assert table.min_feasible_nu(-20.0, 0.99) is None


def test_min_feasible_matches_linear_scan_oracle(table):
    # brute-force scan over every integer nu
    def scan(gamma_db, th):
        for nu in range(1, table.nu_max + 1):
            if table.similarity(gamma_db, nu) >= th:
                return nu
        return None

    assert table.min_feasible_nu(10.0, 0.9) == scan(10.0, 0.9)
    rng = np.random.default_rng(0)
    for _ in range(200):
        g = rng.uniform(-25.0, 35.0)
        th = rng.uniform(0.0, 1.0)
        assert table.min_feasible_nu(g, th) == scan(g, th)


def test_default_table_spot_value_at_10db(table):
    # (1 - e^{-0.3 nu}) * sigmoid(0.5 * 8) >= 0.9 first holds at nu = 9
    assert table.min_feasible_nu(10.0, 0.9) == 9


def test_semantic_rate_spot_value():
    p = SemanticParams()
    r = semantic_rate(p, 360.0e3, 4, 0.9)
    assert r == pytest.approx(405_000.0)


def test_semantic_rate_halves_with_doubled_nu():
    p = SemanticParams()
    assert semantic_rate(p, 1e6, 8, 0.5) == pytest.approx(semantic_rate(p, 1e6, 4, 0.5) / 2)


def test_semantic_rate_envelope():
    p = SemanticParams()
    assert semantic_rate(p, 360.0e3, 1, 1.0) == pytest.approx(360.0e3 * 100 / 20)


def test_rate_monotone_in_delta_and_nu():
    p = SemanticParams()
    rates_nu = [semantic_rate(p, 1e6, nu, 0.7) for nu in range(1, 10)]
    assert all(a > b for a, b in zip(rates_nu, rates_nu[1:]))
    rates_d = [semantic_rate(p, 1e6, 3, d) for d in (0.1, 0.5, 0.9)]
    assert rates_d[0] < rates_d[1] < rates_d[2]


def test_sentences_conversion():
    p = SemanticParams()
    assert sentences(4.0e5, p) == pytest.approx(4.0e5 / 1200.0)


def test_monotonicity_violations_rejected():
    snr = np.array([0.0, 10.0])
    nu = np.array([1, 2])
    bad_snr = np.array([[0.5, 0.6], [0.4, 0.7]])  # decreasing along snr
    with pytest.raises(ValueError):
        SemanticTable(snr, nu, bad_snr)
    bad_nu = np.array([[0.5, 0.4], [0.6, 0.7]])  # decreasing along nu
    with pytest.raises(ValueError):
        SemanticTable(snr, nu, bad_nu)
    out_of_range = np.array([[0.5, 0.6], [0.7, 1.2]])
    with pytest.raises(ValueError):
        SemanticTable(snr, nu, out_of_range)


def test_csv_round_trip(tmp_path, table):
    path = tmp_path / "table.csv"
    table.to_csv(str(path))
    loaded = SemanticTable.from_csv(str(path))
    np.testing.assert_array_equal(loaded.snr_grid_db, table.snr_grid_db)
    np.testing.assert_array_equal(loaded.nu_grid, table.nu_grid)
    np.testing.assert_array_equal(loaded.delta, table.delta)


def test_csv_rejects_bad_header_and_holes(tmp_path):
    p = tmp_path / "bad_header.csv"
    p.write_text("a,b,c\n0,1,0.5\n")
    with pytest.raises(ValueError):
        SemanticTable.from_csv(str(p))
    p2 = tmp_path / "holes.csv"
    p2.write_text("gamma_db,nu,delta\n0,1,0.5\n0,2,0.6\n10,1,0.7\n")
    with pytest.raises(ValueError):
        SemanticTable.from_csv(str(p2))


def test_params_validation():
    with pytest.raises(ValueError):
        SemanticParams(delta_threshold=0.0)
    with pytest.raises(ValueError):
        SemanticParams(bits_per_sentence=-1.0)
