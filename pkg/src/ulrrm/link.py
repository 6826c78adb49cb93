"""SINR, the staircase rate function, and per-UE power allocation.

All math here is linear (mW, linear SINR); dB conversions happen in the
config module. Functions are stateless and safe to call from anywhere.
"""

from __future__ import annotations

from collections.abc import Iterable, Mapping, Sequence

import numpy as np

from .config import McsTable


def sinr(prb: int, ue: int, prb_users: Sequence[int], powers: np.ndarray,
         abs2_eff: np.ndarray, prb_block: np.ndarray, noise_power: float) -> float:
    """SINR of ``ue`` on one PRB given the co-scheduled user set.

    ``powers`` is the (C, U) allocation, ``abs2_eff`` the (Q, U, U) squared
    effective channel magnitudes with [block, victim, transmitter] axes.
    """
    if ue not in prb_users:
        raise ValueError(f"ue {ue} is not scheduled on prb {prb}")
    q = prb_block[prb]
    signal = abs2_eff[q, ue, ue] * powers[prb, ue]
    interference = 0.0
    for n in prb_users:
        if n != ue:
            interference += abs2_eff[q, ue, n] * powers[prb, n]
    return float(signal / (interference + noise_power))


def rate(gamma: float, mcs: McsTable, prb_bandwidth: float) -> float:
    """Staircase rate in bps: bandwidth times the highest decodable efficiency.

    Thresholds are closed on the left: gamma equal to a threshold decodes
    that level; anything below the first threshold yields zero.
    """
    level = int(np.searchsorted(mcs.thresholds, gamma, side="right"))
    if level == 0:
        return 0.0
    return prb_bandwidth * mcs.spectral_efficiencies[level - 1]


def rate_array(gammas: np.ndarray, thresholds: np.ndarray,
               efficiencies_padded: np.ndarray, prb_bandwidth: float) -> np.ndarray:
    """Vectorized staircase; ``efficiencies_padded`` has a leading 0 entry."""
    idx = np.searchsorted(thresholds, gammas, side="right")
    return prb_bandwidth * efficiencies_padded[idx]


def epa(prbs_per_ue: Mapping[int, Iterable[int]], ue_power: float,
        num_subchannels: int, num_ues: int) -> np.ndarray:
    """Equal split of each UE's budget over its allocated PRBs.

    Returns the (C, U) linear power matrix; UEs with empty sets get a zero
    column and their budget stays unused.
    """
    powers = np.zeros((num_subchannels, num_ues))
    for ue, prbs in prbs_per_ue.items():
        prbs = list(prbs)
        if prbs:
            powers[prbs, ue] = ue_power / len(prbs)
    return powers


def waterfill(gains: np.ndarray, noise_power: float, ue_power: float) -> np.ndarray:
    """Water-filling over parallel channels with squared gains ``gains``.

    Maximizes sum log(1 + g_c p_c / noise) subject to sum p_c = ue_power:
    p_c = max(0, level - noise/g_c), with the level solved exactly on the
    active set. Channels with zero gain get zero power.
    """
    gains = np.asarray(gains, dtype=float)
    if gains.size == 0:
        raise ValueError("waterfill needs at least one channel")
    if not np.any(gains > 0.0):
        raise ValueError("waterfill needs at least one positive gain")

    floors = np.full(gains.shape, np.inf)
    positive = gains > 0.0
    floors[positive] = noise_power / gains[positive]

    order = np.argsort(floors, kind="stable")
    sorted_floors = floors[order]
    # largest active set whose water level clears every included floor
    n_active = int(np.sum(positive))
    while n_active > 1:
        level = (ue_power + sorted_floors[:n_active].sum()) / n_active
        if level > sorted_floors[n_active - 1]:
            break
        n_active -= 1
    level = (ue_power + sorted_floors[:n_active].sum()) / n_active

    powers = np.zeros_like(gains)
    active = order[:n_active]
    powers[active] = level - floors[active]
    return powers


def realized_rates(prb_users: Sequence[Sequence[int]], powers: np.ndarray,
                   abs2_eff: np.ndarray, prb_block: np.ndarray, mcs: McsTable,
                   prb_bandwidth: float, noise_power: float) -> np.ndarray:
    """Per-UE slot throughput with full inter-beam interference.

    Sums the staircase rate over every PRB each UE is scheduled on.
    """
    num_ues = abs2_eff.shape[1]
    thresholds = np.asarray(mcs.thresholds)
    eff_padded = np.concatenate(([0.0], mcs.spectral_efficiencies))
    lam = np.zeros(num_ues)
    for c, users in enumerate(prb_users):
        if not users:
            continue
        z = np.asarray(users, dtype=np.int64)
        cross = abs2_eff[prb_block[c]][np.ix_(z, z)]        # victim x transmitter
        p = powers[c, z]
        received = cross * p[None, :]
        signal = np.diag(received)
        interference = received.sum(axis=1) - signal
        gammas = signal / (interference + noise_power)
        lam[z] += rate_array(gammas, thresholds, eff_padded, prb_bandwidth)
    return lam


def slot_throughput(ue: int, prb_users: Sequence[Sequence[int]], powers: np.ndarray,
                    abs2_eff: np.ndarray, prb_block: np.ndarray, mcs: McsTable,
                    prb_bandwidth: float, noise_power: float) -> float:
    """Slot throughput of one UE; zero if it is scheduled nowhere."""
    total = 0.0
    for c, users in enumerate(prb_users):
        if ue in users:
            gamma = sinr(c, ue, users, powers, abs2_eff, prb_block, noise_power)
            total += rate(gamma, mcs, prb_bandwidth)
    return total
