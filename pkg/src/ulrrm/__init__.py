"""Uplink radio resource management simulator for a single-cell
codebook-based hybrid-beamforming OFDMA system."""

__version__ = "0.1.0"

from .config import (McsTable, SweepPlan, SystemConfig, desk_scale_config,
                     full_scale_config)
from .harness import (RealizationResult, SweepResult, geometric_mean,
                      run_realization, run_sweep)

__all__ = [
    "McsTable",
    "RealizationResult",
    "SweepPlan",
    "SweepResult",
    "SystemConfig",
    "__version__",
    "desk_scale_config",
    "full_scale_config",
    "geometric_mean",
    "run_realization",
    "run_sweep",
]
