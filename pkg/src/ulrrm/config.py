"""System parameters, the MCS rate table, and sweep plans.

Single source of truth for every numeric default. All values are plain
linear/SI units except where a field name says dBm or dB; conversions to
linear happen at module boundaries via the helpers below.
"""

from __future__ import annotations

import dataclasses
import math
from dataclasses import dataclass, field
from typing import Sequence

SOLUTIONS = ("B", "S0", "S1", "S2", "S2WF")
SWEEP_AXES = ("K", "U")

# 15 CQI spectral efficiencies in bps/Hz (3GPP TS 38.214, table 5.2.2.1-3).
CQI_SPECTRAL_EFFICIENCIES = (
    0.1523, 0.3770, 0.8770, 1.4766, 1.9141, 2.4063, 2.7305, 3.3223,
    3.9023, 4.5234, 5.1152, 5.5547, 6.2266, 6.9141, 7.4063,
)


def dbm_to_mw(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0)


def mw_to_dbm(mw: float) -> float:
    return 10.0 * math.log10(mw)


@dataclass(frozen=True)
class McsTable:
    """Staircase rate table: SINR decoding thresholds and spectral efficiencies.

    ``thresholds`` are linear SINR values, strictly increasing; a SINR below
    the first threshold decodes nothing (zero rate). ``spectral_efficiencies``
    are in bps/Hz, strictly increasing, one per threshold.
    """

    thresholds: tuple[float, ...]
    spectral_efficiencies: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.thresholds) != len(self.spectral_efficiencies):
            raise ValueError("thresholds and spectral efficiencies differ in length")
        if not self.thresholds:
            raise ValueError("MCS table is empty")
        if self.thresholds[0] <= 0.0:
            raise ValueError("first SINR threshold must be positive")
        for name, seq in (("thresholds", self.thresholds),
                          ("spectral_efficiencies", self.spectral_efficiencies)):
            if any(b <= a for a, b in zip(seq, seq[1:])):
                raise ValueError(f"{name} must be strictly increasing")

    @property
    def num_levels(self) -> int:
        return len(self.thresholds)

    @classmethod
    def from_spectral_efficiencies(cls, efficiencies: Sequence[float],
                                   margin_db: float = 2.0) -> "McsTable":
        """Derive thresholds from the Shannon inverse plus an implementation margin.

        Threshold for efficiency s is (2^s - 1) * 10^(margin_db/10).
        """
        margin = 10.0 ** (margin_db / 10.0)
        thresholds = tuple((2.0 ** s - 1.0) * margin for s in efficiencies)
        return cls(thresholds=thresholds, spectral_efficiencies=tuple(efficiencies))


def default_mcs_table() -> McsTable:
    return McsTable.from_spectral_efficiencies(CQI_SPECTRAL_EFFICIENCIES, margin_db=2.0)


@dataclass(frozen=True)
class SystemConfig:
    """All fixed parameters of one simulated cell.

    Immutable after construction; safe to share across parallel workers.
    """

    # population / hardware
    num_ues: int = 10                 # U
    num_rf_chains: int = 6            # K, BS side; each UE has one RF chain
    bs_antennas: int = 128            # N_b
    ue_antennas: int = 16             # N_u
    bs_codebook_size: int = 32        # B_b
    ue_codebook_size: int = 4         # B_u

    # spectrum / time grid
    num_subchannels: int = 132        # C
    num_blocks: int = 22              # Q, must divide C
    num_slots: int = 100              # N_T
    prb_bandwidth: float = 720e3      # B_c, Hz
    carrier_freq: float = 28e9        # Hz
    total_bandwidth: float = 95.04e6  # Hz, must equal C * B_c

    # powers
    ue_power_dbm: float = 7.0         # per-UE per-slot budget
    noise_psd_dbm_hz: float = -174.0

    # geometry
    cell_radius: float = 75.0         # m
    exclusion_radius: float = 6.0     # m
    bs_height: float = 10.0           # m

    # scheduler knobs
    pf_window: int = 10               # W
    pf_initial_rate: float = 2.0      # R_init, same units as slot throughput
    pbs_plus_patience: int = 6        # X
    pbs_plus_step: int = 6            # channels granted per accepted iteration
    idd_threshold: float = 1.0        # linear interference-to-signal ratio

    # small-scale channel statistics (defaults; see channel module)
    num_clusters: int = 5
    paths_per_cluster: int = 10
    path_loss_exponent: float = 2.0
    cluster_decay_db: float = 3.0     # per-cluster power decay
    angle_spread_deg: float = 5.0     # per-path Laplacian angle offset std
    cluster_delay_max_s: float = 100e-9
    path_delay_mean_s: float = 5e-9

    rng_seed: int = 1

    mcs: McsTable = field(default_factory=default_mcs_table)

    @property
    def ue_power_mw(self) -> float:
        return dbm_to_mw(self.ue_power_dbm)

    @property
    def prbs_per_block(self) -> int:
        return self.num_subchannels // self.num_blocks


def full_scale_config(**overrides) -> SystemConfig:
    """Full-scale mmWave cell profile (28 GHz, 132 PRBs, 128-antenna BS)."""
    return dataclasses.replace(SystemConfig(), **overrides)


def desk_scale_config(**overrides) -> SystemConfig:
    """Reduced profile for CI and quick experiments.

    Only the runtime drivers shrink: band (24 PRBs instead of 132) and
    horizon (50 slots instead of 100). Arrays and codebooks stay at full
    size: they cost almost nothing at runtime, and the 4x-undersampled
    beam grid they produce sets the whole interference regime. Shrinking
    the arrays would put adjacent codebook beams ~4 dB apart instead of
    deep in each other's nulls and change scheduler behaviour
    qualitatively.
    """
    base = SystemConfig(
        num_subchannels=24,
        num_blocks=4,
        num_slots=50,
        total_bandwidth=24 * 720e3,
    )
    return dataclasses.replace(base, **overrides)


def noise_power_per_prb(cfg: SystemConfig) -> float:
    """Noise power on one PRB in linear mW: N0 integrated over the PRB bandwidth."""
    return dbm_to_mw(cfg.noise_psd_dbm_hz + 10.0 * math.log10(cfg.prb_bandwidth))


def validate(cfg: SystemConfig) -> list[str]:
    """Return every violated invariant with field names; empty list means ok."""
    v: list[str] = []
    for name in ("num_ues", "num_rf_chains", "num_subchannels", "num_blocks",
                 "num_slots", "bs_antennas", "ue_antennas", "bs_codebook_size",
                 "ue_codebook_size", "pf_window", "pbs_plus_step",
                 "num_clusters", "paths_per_cluster"):
        if getattr(cfg, name) < 1:
            v.append(f"{name} must be >= 1")
    if cfg.num_blocks >= 1 and cfg.num_subchannels % cfg.num_blocks != 0:
        v.append("num_subchannels mod num_blocks != 0")
    if cfg.exclusion_radius >= cfg.cell_radius:
        v.append("exclusion_radius must be < cell_radius")
    if cfg.bs_antennas < cfg.num_rf_chains:
        v.append("bs_antennas must be >= num_rf_chains")
    expected_bw = cfg.num_subchannels * cfg.prb_bandwidth
    if not math.isclose(cfg.total_bandwidth, expected_bw, rel_tol=1e-9):
        v.append("total_bandwidth != num_subchannels * prb_bandwidth")
    if cfg.prb_bandwidth <= 0:
        v.append("prb_bandwidth must be positive")
    if cfg.pf_initial_rate <= 0:
        v.append("pf_initial_rate must be positive")
    if cfg.pbs_plus_patience < 0:
        v.append("pbs_plus_patience must be >= 0")
    if cfg.idd_threshold <= 0:
        v.append("idd_threshold must be positive")
    if cfg.exclusion_radius < 0:
        v.append("exclusion_radius must be >= 0")
    return v


@dataclass(frozen=True)
class SweepPlan:
    """One experiment: sweep K or U over axis_values, averaging realizations."""

    sweep_axis: str                       # "K" or "U"
    axis_values: tuple[int, ...]
    num_realizations: int
    base_config: SystemConfig
    solutions: tuple[str, ...] = SOLUTIONS

    def __post_init__(self) -> None:
        if self.sweep_axis not in SWEEP_AXES:
            raise ValueError(f"sweep_axis must be one of {SWEEP_AXES}")
        if not self.axis_values:
            raise ValueError("axis_values must be nonempty")
        if any(x < 1 for x in self.axis_values):
            raise ValueError("axis_values must be positive")
        if self.num_realizations < 1:
            raise ValueError("num_realizations must be >= 1")
        unknown = [s for s in self.solutions if s not in SOLUTIONS]
        if unknown:
            raise ValueError(f"unknown solutions: {unknown}")
        if not self.solutions:
            raise ValueError("solutions must be nonempty")


def config_at_axis_value(cfg: SystemConfig, axis: str, value: int) -> SystemConfig:
    if axis == "K":
        return dataclasses.replace(cfg, num_rf_chains=value)
    if axis == "U":
        return dataclasses.replace(cfg, num_ues=value)
    raise ValueError(f"unknown sweep axis {axis!r}")


# ---------------------------------------------------------------------------
# Config file format: flat "key = value" lines, '#' comments, keys matching
# SystemConfig field names. Two extra keys configure the MCS table:
#   mcs_spectral_efficiencies = 0.1523, 0.3770, ...   (bps/Hz, increasing)
#   mcs_margin_db = 2.0                               (threshold margin)
# Explicit thresholds may be given instead of a margin:
#   mcs_sinr_thresholds_db = -7.5, -5.0, ...
# ---------------------------------------------------------------------------

_INT_FIELDS = {f.name for f in dataclasses.fields(SystemConfig)
               if f.type in ("int",)}
_FLOAT_FIELDS = {f.name for f in dataclasses.fields(SystemConfig)
                 if f.type in ("float",)}


def _parse_float_list(text: str) -> tuple[float, ...]:
    return tuple(float(tok) for tok in text.split(",") if tok.strip())


def load_config_file(path: str, base: SystemConfig | None = None) -> SystemConfig:
    """Apply overrides from a key-value file on top of ``base`` (full scale by default)."""
    cfg = base if base is not None else full_scale_config()
    overrides: dict[str, object] = {}
    mcs_se: tuple[float, ...] | None = None
    mcs_margin_db = 2.0
    mcs_thresholds_db: tuple[float, ...] | None = None

    with open(path, "r", encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ValueError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = line.partition("=")
            key, value = key.strip(), value.strip()
            if key == "mcs_spectral_efficiencies":
                mcs_se = _parse_float_list(value)
            elif key == "mcs_margin_db":
                mcs_margin_db = float(value)
            elif key == "mcs_sinr_thresholds_db":
                mcs_thresholds_db = _parse_float_list(value)
            elif key in _INT_FIELDS:
                overrides[key] = int(value)
            elif key in _FLOAT_FIELDS:
                overrides[key] = float(value)
            else:
                raise ValueError(f"{path}:{lineno}: unknown config key {key!r}")

    if mcs_thresholds_db is not None:
        se = mcs_se if mcs_se is not None else cfg.mcs.spectral_efficiencies
        thresholds = tuple(10.0 ** (t / 10.0) for t in mcs_thresholds_db)
        overrides["mcs"] = McsTable(thresholds=thresholds, spectral_efficiencies=se)
    elif mcs_se is not None:
        overrides["mcs"] = McsTable.from_spectral_efficiencies(mcs_se, mcs_margin_db)

    return dataclasses.replace(cfg, **overrides)


def config_snapshot(cfg: SystemConfig) -> dict:
    """JSON-friendly dict of every parameter, for run metadata files."""
    out = {}
    for f in dataclasses.fields(cfg):
        value = getattr(cfg, f.name)
        if isinstance(value, McsTable):
            out["mcs_thresholds"] = list(value.thresholds)
            out["mcs_spectral_efficiencies"] = list(value.spectral_efficiencies)
        else:
            out[f.name] = value
    return out
