"""Semantic similarity table delta = f(nu, gamma) and the semantic rate.

The transceiver itself is out of scope; the similarity surface is an input
artifact. A synthetic default with the right monotone shape ships with the
package, and any measured table can be substituted through a CSV file.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass
class SemanticParams:
    units_per_sentence: float = 100.0    # I_k, semantic units per sentence
    words_per_sentence: float = 20.0     # L_k
    bits_per_sentence: float = 1200.0    # H, source coding conversion factor
    delta_threshold: float = 0.9         # delta_th

    def __post_init__(self) -> None:
        for name in ("units_per_sentence", "words_per_sentence", "bits_per_sentence"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if not 0.0 < self.delta_threshold <= 1.0:
            raise ValueError("delta_threshold must be in (0, 1]")


class SemanticTable:
    """Dense similarity grid over (SNR dB, symbol count nu).

    delta must be nondecreasing along both axes and inside [0, 1]; violating
    tables are rejected at construction. Queries off the SNR grid clamp to
    the edge rows (never extrapolate), queries between grid points
    interpolate bilinearly.
    """

    def __init__(self, snr_grid_db: np.ndarray, nu_grid: np.ndarray, delta: np.ndarray):
        self.snr_grid_db = np.asarray(snr_grid_db, dtype=float)
        self.nu_grid = np.asarray(nu_grid, dtype=int)
        self.delta = np.asarray(delta, dtype=float)
        if self.snr_grid_db.ndim != 1 or self.nu_grid.ndim != 1:
            raise ValueError("grids must be one-dimensional")
        if self.delta.shape != (self.snr_grid_db.size, self.nu_grid.size):
            raise ValueError("delta must be shaped (len(snr_grid), len(nu_grid))")
        if np.any(np.diff(self.snr_grid_db) <= 0):
            raise ValueError("snr_grid_db must be strictly ascending")
        if np.any(np.diff(self.nu_grid) <= 0):
            raise ValueError("nu_grid must be strictly ascending")
        if self.nu_grid[0] < 1:
            raise ValueError("nu values start at 1")
        if np.any(self.delta < 0) or np.any(self.delta > 1):
            raise ValueError("delta entries must lie in [0, 1]")
        if np.any(np.diff(self.delta, axis=0) < 0):
            raise ValueError("delta must be nondecreasing along the SNR axis")
        if np.any(np.diff(self.delta, axis=1) < 0):
            raise ValueError("delta must be nondecreasing along the nu axis")

    @property
    def nu_max(self) -> int:
        return int(self.nu_grid[-1])

    @classmethod
    def default(cls, nu_max: int = 20, a: float = 0.3, b: float = 0.5, c: float = 2.0) -> "SemanticTable":
        """Synthetic surface (1 - exp(-a*nu)) * sigmoid(b*(gamma_db - c))."""
        snr = np.arange(-20.0, 31.0, 1.0)
        nu = np.arange(1, nu_max + 1)
        sat = 1.0 - np.exp(-a * nu)
        sig = 1.0 / (1.0 + np.exp(-b * (snr - c)))
        return cls(snr, nu, sig[:, None] * sat[None, :])

    @classmethod
    def from_csv(cls, path: str) -> "SemanticTable":
        """Load `gamma_db,nu,delta` triples; the grid must be rectangular."""
        with open(path, "r", encoding="utf-8") as fh:
            header = fh.readline().strip()
            if [c.strip() for c in header.split(",")] != ["gamma_db", "nu", "delta"]:
                raise ValueError(f"expected header 'gamma_db,nu,delta', got '{header}'")
            rows = np.loadtxt(fh, delimiter=",", ndmin=2)
        if rows.shape[1] != 3:
            raise ValueError("each line must hold gamma_db,nu,delta")
        gammas = np.unique(rows[:, 0])
        nus = np.unique(rows[:, 1]).astype(int)
        if rows.shape[0] != gammas.size * nus.size:
            raise ValueError("table is not a full rectangular grid")
        delta = np.full((gammas.size, nus.size), np.nan)
        gi = np.searchsorted(gammas, rows[:, 0])
        ni = np.searchsorted(nus, rows[:, 1].astype(int))
        delta[gi, ni] = rows[:, 2]
        if np.any(np.isnan(delta)):
            raise ValueError("table is missing grid entries")
        return cls(gammas, nus, delta)

    def to_csv(self, path: str) -> None:
        with open(path, "w", encoding="utf-8") as fh:
            fh.write("gamma_db,nu,delta\n")
            for i, g in enumerate(self.snr_grid_db):
                for j, n in enumerate(self.nu_grid):
                    fh.write(f"{float(g)!r},{int(n)},{float(self.delta[i, j])!r}\n")

    def similarity(self, gamma_db, nu: int):
        """Bilinear interpolation; SNR clamps to the grid edges."""
        nu = int(nu)
        if nu < 1 or nu > self.nu_max:
            raise ValueError(f"nu={nu} outside [1, {self.nu_max}]")
        g = np.clip(np.asarray(gamma_db, dtype=float), self.snr_grid_db[0], self.snr_grid_db[-1])
        j = int(np.searchsorted(self.nu_grid, nu))
        if j < self.nu_grid.size and self.nu_grid[j] == nu:
            return np.interp(g, self.snr_grid_db, self.delta[:, j])
        lo, hi = j - 1, j
        w = (nu - self.nu_grid[lo]) / (self.nu_grid[hi] - self.nu_grid[lo])
        row_lo = np.interp(g, self.snr_grid_db, self.delta[:, lo])
        row_hi = np.interp(g, self.snr_grid_db, self.delta[:, hi])
        return (1.0 - w) * row_lo + w * row_hi

    def min_feasible_nu(self, gamma_db: float, delta_th: float) -> int | None:
        """Smallest integer nu with similarity >= delta_th, or None.

        delta is nondecreasing in nu, so bisection over [1, nu_max] applies.
        """
        if self.similarity(gamma_db, self.nu_max) < delta_th:
            return None
        lo, hi = 1, self.nu_max
        while lo < hi:
            mid = (lo + hi) // 2
            if self.similarity(gamma_db, mid) >= delta_th:
                hi = mid
            else:
                lo = mid + 1
        return lo


def semantic_rate(params: SemanticParams, bandwidth: float, nu: int, delta: float) -> float:
    """R = W * I_k / (L_k * nu) * delta, in semantic units per second."""
    if nu < 1:
        raise ValueError("nu must be >= 1")
    if not 0.0 <= delta <= 1.0:
        raise ValueError("delta must lie in [0, 1]")
    return bandwidth * params.units_per_sentence / (params.words_per_sentence * nu) * delta


def sentences(task_bits: float, params: SemanticParams) -> float:
    """Q_k: sentences contained in a task of task_bits bits."""
    return task_bits / params.bits_per_sentence
