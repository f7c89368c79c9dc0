"""Link-level BER comparison of the three receiver configurations.

Runs short Monte Carlo sweeps at matched noise (the all-N spectral
efficiency convention keeps sigma_v2 identical across configurations) and
prints BER for:

  * perfect CSI (genie channel knowledge),
  * aligned superimposed pilot + MMSE channel estimation + iterative
    projector detection,
  * conventional superimposed pilot without alignment (LS estimation,
    direct slicing).

Run:  python3 demos/ber_sweep.py [n_trials]
"""

import sys
from dataclasses import replace

from ftnsim.config import FtnConfig
from ftnsim.harness import build_scenario, ebn0_to_sigma_v2, run_trial


def ber(cfg, sigma_v2, n_trials):
    scenario = build_scenario(cfg)
    errors = sum(run_trial(scenario, sigma_v2, i).bit_errors
                 for i in range(n_trials))
    return errors / (n_trials * cfg.N * 2)


def main():
    n_trials = int(sys.argv[1]) if len(sys.argv) > 1 else 500
    base = FtnConfig(se_convention="paper_all_n")
    configs = [
        ("perfect CSI", replace(base, csi="perfect")),
        ("aligned + MMSE CE", base),
        ("superimposed, no alignment", replace(base, sia=False,
                                               ce_criterion="ls")),
    ]
    grid = (4.0, 6.0, 8.0, 10.0)
    print(f"tau = {base.tau}, {n_trials} trials per point\n")
    print(f"{'Eb/N0':>6} | " + " | ".join(f"{name:>26}" for name, _ in configs))
    for ebn0 in grid:
        sv2 = ebn0_to_sigma_v2(base, ebn0)
        row = " | ".join(f"{ber(cfg, sv2, n_trials):26.5f}"
                         for _, cfg in configs)
        print(f"{ebn0:6.1f} | {row}")
    print("\nPerfect CSI lower-bounds the aligned receiver; skipping the")
    print("alignment step costs roughly half a decade of BER at high SNR.")


if __name__ == "__main__":
    main()
