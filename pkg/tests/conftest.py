"""Shared fixtures: small fast configs and prebuilt realization contexts."""

from __future__ import annotations

import numpy as np
import pytest

from ulrrm.beams import beam_alignment, build_codebook, effective_channels
from ulrrm.channel import build_realization_channels
from ulrrm.config import SystemConfig
from ulrrm.schedulers import RealizationContext


def tiny_config(**overrides) -> SystemConfig:
    """Smallest config that still exercises every code path quickly."""
    base = dict(
        num_ues=4,
        num_rf_chains=2,
        bs_antennas=8,
        ue_antennas=2,
        bs_codebook_size=4,
        ue_codebook_size=2,
        num_subchannels=8,
        num_blocks=2,
        num_slots=5,
        total_bandwidth=8 * 720e3,
    )
    base.update(overrides)
    return SystemConfig(**base)


def build_context(cfg: SystemConfig, seed: int = 1, realization: int = 0):
    """Full channel -> alignment -> context pipeline for one realization."""
    rng = np.random.default_rng([seed, realization])
    _, _, channels = build_realization_channels(cfg, rng)
    bs_cb = build_codebook("bs", cfg.bs_antennas, cfg.bs_codebook_size)
    ue_cb = build_codebook("ue", cfg.ue_antennas, cfg.ue_codebook_size)
    assignment = beam_alignment(channels, bs_cb, ue_cb)
    eff = effective_channels(channels, assignment, bs_cb, ue_cb)
    return RealizationContext.build(cfg, assignment, eff)


@pytest.fixture
def tiny_cfg() -> SystemConfig:
    return tiny_config()


@pytest.fixture
def tiny_ctx(tiny_cfg) -> RealizationContext:
    return build_context(tiny_cfg)
