"""RIS-assisted semantic vehicular edge computing: simulator and optimizers.

Layers:
  scenario  - road geometry, mobility, task arrivals, SV/RB assignment
  channel   - direct + RIS-cascaded gains, SINR with RB-reuse interference
  semantic  - similarity table, semantic rate
  latency   - three-path delay model and LP coefficients
  offload   - per-vehicle min-max split LP and closed-form oracle
  env       - per-slot simulation tying the layers together
  agent     - tanh-Gaussian PPO with manual backpropagation
  baselines - GA and QPSO per-slot search over the same decision vector
  harness   - config files, experiment runner, CSV metrics, CLI
"""

__version__ = "0.1.0"
