"""Direct and RIS-cascaded channel gains and per-link SINR.

Direct links are Rayleigh: h = sqrt(l * d^-eta) * g, g ~ CN(0, 1). The two
RIS-adjacent links are static Rician LoS terms built on a ULA steering vector.
Interference under RB reuse uses direct gains only (the cascade enters the
signal term, not the denominator).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

C_LIGHT = 299_792_458.0
TWO_PI = 2.0 * np.pi


@dataclass
class RadioConfig:
    ref_loss: float = 1.0e-3          # l, linear power gain at d0 = 1 m (-30 dB)
    path_exp_direct: float = 3.5      # eta_kj, user -> edge node
    path_exp_ris_edge: float = 2.2    # eta_rj, RIS -> edge node
    path_exp_user_ris: float = 2.2    # eta_kr, user -> RIS
    rician_kappa: float = 3.0         # LoS-to-scatter ratio of RIS-adjacent links
    carrier_hz: float = 5.9e9         # V2X band
    element_spacing: float | None = None  # D_r; None -> wavelength / 2
    n_elements: int = 36              # N
    phase_bits: int = 2               # q, phase set size 2^q
    tx_power: float = 0.2             # W, per link
    noise_power: float = 1.44e-10     # W
    bandwidth: float = 360.0e3        # Hz
    nlos_enabled: bool = False        # add sqrt(1/(1+kappa)) * CN(0,1) scatter term
    ris_links: str = "all"            # cascade serves: all | v2i | v2v | none

    def __post_init__(self) -> None:
        if not 0.0 < self.ref_loss <= 1.0:
            raise ValueError("ref_loss must be in (0, 1]")
        for name in ("path_exp_direct", "path_exp_ris_edge", "path_exp_user_ris"):
            if getattr(self, name) < 2.0:
                raise ValueError(f"{name} must be >= 2")
        if self.rician_kappa < 0:
            raise ValueError("rician_kappa must be >= 0")
        if self.n_elements < 1:
            raise ValueError("n_elements must be >= 1")
        if self.phase_bits < 1:
            raise ValueError("phase_bits must be >= 1")
        for name in ("tx_power", "noise_power", "bandwidth", "carrier_hz"):
            if getattr(self, name) <= 0:
                raise ValueError(f"{name} must be > 0")
        if self.ris_links not in ("all", "v2i", "v2v", "none"):
            raise ValueError("ris_links must be one of all|v2i|v2v|none")

    @property
    def wavelength(self) -> float:
        return C_LIGHT / self.carrier_hz

    @property
    def spacing(self) -> float:
        return self.wavelength / 2.0 if self.element_spacing is None else self.element_spacing


def phase_set(q: int) -> np.ndarray:
    """The feasible discrete phases Phi = {2*pi*i / 2^q}, i = 0..2^q-1."""
    m = 1 << q
    return TWO_PI * np.arange(m) / m


@dataclass
class RisPhaseConfig:
    phase_index: np.ndarray   # (N,) ints in [0, 2^q)
    amplitude: np.ndarray     # (N,) reals in [0, 1]
    phase_bits: int

    def __post_init__(self) -> None:
        self.phase_index = np.asarray(self.phase_index, dtype=int)
        self.amplitude = np.asarray(self.amplitude, dtype=float)
        m = 1 << self.phase_bits
        if self.phase_index.shape != self.amplitude.shape:
            raise ValueError("phase_index and amplitude must have equal length")
        if np.any(self.phase_index < 0) or np.any(self.phase_index >= m):
            raise ValueError(f"phase indices must lie in [0, {m})")
        if np.any(self.amplitude < 0) or np.any(self.amplitude > 1):
            raise ValueError("amplitudes must lie in [0, 1]")

    @classmethod
    def zeros(cls, n: int, q: int) -> "RisPhaseConfig":
        return cls(np.zeros(n, dtype=int), np.ones(n), q)

    @property
    def phases(self) -> np.ndarray:
        return phase_set(self.phase_bits)[self.phase_index]

    @property
    def reflection(self) -> np.ndarray:
        """Per-element reflection coefficients mu_n * exp(j*theta_n)."""
        return self.amplitude * np.exp(1j * self.phases)


@dataclass
class ChannelReport:
    direct: np.ndarray    # (K, 2) complex, columns (V2I, V2V)
    cascade: np.ndarray   # (K, 2) complex
    sinr: np.ndarray      # (K, 2) linear
    sinr_db: np.ndarray   # (K, 2)


def steering_vector(angle: float, n: int, spacing: float, wavelength: float) -> np.ndarray:
    """ULA response: element i = exp(-j * 2pi/lambda * i * D_r * sin(angle))."""
    i = np.arange(n)
    return np.exp(-1j * TWO_PI / wavelength * i * spacing * np.sin(angle))


def direct_gain(dist, eta: float, ref_loss: float, rng: np.random.Generator):
    """Rayleigh-faded direct gain; distances below 1 m clamp to 1 m."""
    d = np.maximum(np.asarray(dist, dtype=float), 1.0)
    g = (rng.standard_normal(d.shape) + 1j * rng.standard_normal(d.shape)) / np.sqrt(2.0)
    return np.sqrt(ref_loss * d ** (-eta)) * g


def rician_los_gain(
    dist: float,
    eta: float,
    ref_loss: float,
    kappa: float,
    steering: np.ndarray,
    rng: np.random.Generator | None = None,
    nlos: bool = False,
) -> np.ndarray:
    """LoS Rician gain vector; optional CN(0,1) scatter term (off by default)."""
    d = max(float(dist), 1.0)
    amp = np.sqrt(ref_loss * d ** (-eta))
    los = np.sqrt(kappa / (1.0 + kappa)) * steering
    if not nlos:
        return amp * los
    if rng is None:
        raise ValueError("nlos term requires an rng")
    scatter = (rng.standard_normal(steering.shape) + 1j * rng.standard_normal(steering.shape)) / np.sqrt(2.0)
    return amp * (los + np.sqrt(1.0 / (1.0 + kappa)) * scatter)


def cascade(h_rj: np.ndarray, phases: RisPhaseConfig, h_kr: np.ndarray) -> complex:
    """RIS-reflected component (h_rj)^H diag(mu_n e^{j theta_n}) h_kr."""
    if h_rj.shape != h_kr.shape or h_rj.shape != phases.phase_index.shape:
        raise ValueError("h_rj, h_kr and phase config must share length N")
    return complex(np.sum(np.conj(h_rj) * phases.reflection * h_kr))


def sinr_value(tx_power: float, composite: complex, interferer_directs, noise_power: float) -> float:
    """gamma = p|direct+cascade|^2 / (sum p|direct'|^2 + sigma^2) for one link."""
    interf = tx_power * np.sum(np.abs(np.asarray(interferer_directs)) ** 2)
    return tx_power * abs(composite) ** 2 / (interf + noise_power)


def link_sinrs(
    direct: np.ndarray,
    cascade_terms: np.ndarray,
    rb_of: np.ndarray,
    active: np.ndarray,
    tx_power: float,
    noise_power: float,
) -> np.ndarray:
    """Vectorized SINR for every link; only active links radiate interference."""
    sig = tx_power * np.abs(direct + cascade_terms) ** 2
    own = tx_power * np.abs(direct) ** 2
    n_rb = int(rb_of.max()) + 1 if rb_of.size else 1
    per_rb = np.zeros(n_rb)
    np.add.at(per_rb, rb_of[active], own[active])
    interf = per_rb[rb_of] - np.where(active, own, 0.0)
    # guard tiny negative residue from the subtraction
    interf = np.maximum(interf, 0.0)
    return sig / (interf + noise_power)


def to_db(x) -> np.ndarray:
    return 10.0 * np.log10(np.maximum(np.asarray(x, dtype=float), 1e-300))


def _align_to(reference: complex, terms: np.ndarray, phi: np.ndarray) -> np.ndarray:
    """Nearest discrete phase rotating each term onto the reference's angle.

    Circular distance, ties to the smaller phase value (argmin takes the
    first, and phi is ascending).
    """
    target = np.mod(np.angle(reference) - np.angle(terms), TWO_PI)
    gap = np.abs(target[:, None] - phi[None, :])
    gap = np.minimum(gap, TWO_PI - gap)
    return np.argmin(gap, axis=1)


def cophase_indices(
    direct: complex,
    h_rj: np.ndarray,
    h_kr: np.ndarray,
    q: int,
    amplitude: np.ndarray | None = None,
    refine: bool = True,
) -> np.ndarray:
    """Discrete co-phasing of the cascade against the direct gain.

    Start from per-element alignment: element n's continuous optimum is
    arg(direct) - arg(conj(h_rj_n) * h_kr_n), rounded to the circularly
    nearest member of Phi (ties to the smaller phase). When the direct gain
    dominates the cascade this is already optimal; cyclic best-response
    sweeps (each element re-aligned against direct + the rest of the
    cascade, run from every global phase offset) then repair the boundary
    cases, monotonically increasing |direct + cascade|^2. A converged sweep
    can still sit one global rotation away from the optimum when the direct
    gain is weak (the rotation moves all elements at once, which single
    element moves cannot), so each fixed point is also tested under every
    global offset and re-ascended while that helps. No enumeration of the
    2^(qN) space takes place.
    """
    phi = phase_set(q)
    m = phi.size
    amp = np.ones(h_rj.size) if amplitude is None else np.asarray(amplitude, dtype=float)
    c = np.conj(h_rj) * h_kr * amp
    base = _align_to(direct, c, phi)
    if not refine:
        return base

    e = np.exp(1j * phi)

    def ascend(idx: np.ndarray) -> tuple[np.ndarray, float]:
        idx = idx.copy()
        for _ in range(16):
            changed = False
            total = direct + np.sum(c * e[idx])
            for n in range(idx.size):
                rest = total - c[n] * e[idx[n]]
                vals = np.abs(rest + c[n] * e) ** 2
                best = int(np.argmax(vals))
                if vals[best] > vals[idx[n]]:
                    total = rest + c[n] * e[best]
                    idx[n] = best
                    changed = True
            if not changed:
                break
        return idx, float(abs(direct + np.sum(c * e[idx])) ** 2)

    def value(idx: np.ndarray) -> float:
        return float(abs(direct + np.sum(c * e[idx])) ** 2)

    def ascend_with_rotations(start: np.ndarray) -> tuple[np.ndarray, float]:
        idx, val = ascend(start)
        for _ in range(16):
            rotated = [((idx + off) % m) for off in range(1, m)]
            vals = [value(r) for r in rotated]
            best = int(np.argmax(vals))
            if vals[best] <= val:
                return idx, val
            idx, val = ascend(rotated[best])
        return idx, val

    best_idx, best_val = ascend_with_rotations(base)
    for off in range(1, m):
        cand_idx, cand_val = ascend_with_rotations((base + off) % m)
        if cand_val > best_val:
            best_idx, best_val = cand_idx, cand_val
    return best_idx
