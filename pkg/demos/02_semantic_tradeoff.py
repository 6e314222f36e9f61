"""Symbol count versus similarity and effective transmission rate.

Sweeps the per-word symbol count at a few SNR points and prints the
similarity surface alongside the resulting semantic rate, then locates the
smallest symbol count that clears the similarity threshold at each SNR.
"""

import numpy as np

from semvec.channel import RadioConfig
from semvec.semantic import SemanticParams, SemanticTable, semantic_rate


def main():
    sem = SemanticParams()
    table = SemanticTable.default()
    bandwidth = RadioConfig().bandwidth

    print(f"similarity threshold {sem.delta_threshold}, bandwidth {bandwidth/1e3:.0f} kHz, "
          f"{sem.units_per_sentence:.0f} units and {sem.words_per_sentence:.0f} words per sentence\n")

    snrs = [-5.0, 5.0, 10.0, 20.0]
    print("nu  " + "".join(f"   snr={s:+5.1f} dB (delta/ksuts)" for s in snrs))
    for nu in (1, 2, 4, 6, 9, 12, 16, 20):
        cells = []
        for snr in snrs:
            delta = float(table.similarity(snr, nu))
            rate = semantic_rate(sem, bandwidth, nu, delta)
            cells.append(f"        {delta:5.3f} / {rate/1e3:8.1f}")
        print(f"{nu:2d}  " + "".join(cells))

    print("\nsmallest feasible symbol count per SNR:")
    for snr in snrs:
        nu = table.min_feasible_nu(snr, sem.delta_threshold)
        if nu is None:
            print(f"  snr={snr:+5.1f} dB: threshold unreachable at any nu")
        else:
            delta = float(table.similarity(snr, nu))
            rate = semantic_rate(sem, bandwidth, nu, delta)
            print(f"  snr={snr:+5.1f} dB: nu={nu:2d}  delta={delta:.3f}  rate={rate/1e3:.1f} ksuts/s")

    # the tension: more symbols lift similarity but divide the rate
    snr = 10.0
    nus = np.arange(1, table.nu_max + 1)
    deltas = np.array([float(table.similarity(snr, int(n))) for n in nus])
    rates = np.array([semantic_rate(sem, bandwidth, int(n), d) for n, d in zip(nus, deltas)])
    feas = deltas >= sem.delta_threshold
    best = int(nus[feas][np.argmax(rates[feas])])
    print(f"\nat {snr:.0f} dB the best feasible rate sits at nu={best} "
          f"({rates[best - 1]/1e3:.1f} ksuts/s): past the threshold, extra symbols only cost rate")


if __name__ == "__main__":
    main()
