"""Scheduling building blocks and the five per-slot pipelines.

Five solution tags are supported:

  B    round-robin beam choice, greedy per-beam user selection with zero
       patience and single-channel steps, equal power split.
  S0   same pipeline but the per-beam selection keeps trying a UE for up
       to `patience` non-improving rounds and grants `step` channels at
       a time.
  S1   runs the per-beam selection on every preferred beam first, then
       keeps the beams with the highest weighted sum rates.
  S2   S1 followed by interference down dropping on every PRB, then a
       fresh equal power split over each UE's surviving channels.
  S2WF S2 with a final water-filling pass per UE.

Realized throughputs always include full inter-beam interference; the
per-beam selection itself is deliberately interference-unaware.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .beams import BeamAssignment, EffectiveChannelSet, prb_block_index
from .config import SOLUTIONS, SystemConfig, noise_power_per_prb
from .link import epa, rate_array, realized_rates, waterfill

PF_RATE_FLOOR = 1e-12


@dataclass(frozen=True)
class PfState:
    """Moving-average throughput per UE and the derived scheduling weights."""

    avg_rate: np.ndarray       # (U,) > 0
    window: int

    @classmethod
    def initial(cls, num_ues: int, initial_rate: float, window: int) -> "PfState":
        if initial_rate <= 0.0:
            raise ValueError("initial_rate must be positive")
        return cls(avg_rate=np.full(num_ues, float(initial_rate)), window=window)

    @property
    def weights(self) -> np.ndarray:
        return 1.0 / self.avg_rate


def pf_update(state: PfState, slot_rates: np.ndarray) -> PfState:
    """Exponential moving average update R' = (1 - 1/W) R + lambda / W.

    The result is floored at a tiny positive value so weights stay finite.
    """
    if np.any(slot_rates < 0.0):
        raise ValueError("slot rates must be nonnegative")
    w = state.window
    new_rate = (1.0 - 1.0 / w) * state.avg_rate + np.asarray(slot_rates, float) / w
    return replace(state, avg_rate=np.maximum(new_rate, PF_RATE_FLOOR))


@dataclass
class PerBeamOutcome:
    """Result of per-beam user selection on one beam, interference-unaware."""

    beam: int
    prb_owner: np.ndarray                  # (C,) int, -1 where unallocated
    ue_prbs: dict[int, list[int]]          # only UEs that received channels
    sum_rate: dict[int, float]             # SR(u) under equal power split
    weighted_sum_rate: float
    candidate_evals: int


@dataclass
class SlotStats:
    """Instrumentation counters for one scheduled slot."""

    pbs_evals_max_beam: int = 0            # max candidate evaluations over beams
    pbs_evals_total: int = 0
    wsrb_comparisons: int = 0
    idd_checks_max_prb: int = 0
    idd_checks_total: int = 0
    idd_dropped_ues: int = 0


@dataclass
class SlotSchedule:
    """Final decision for one slot: beams, per-PRB user sets, powers, rates."""

    solution: str
    slot_index: int
    selected_beams: tuple[int, ...]
    prb_users: tuple[tuple[int, ...], ...]   # length C, sorted UE ids
    powers: np.ndarray                       # (C, U) linear mW
    slot_rates: np.ndarray                   # (U,) bps
    stats: SlotStats = field(default_factory=SlotStats)

    def same_allocation(self, other: "SlotSchedule") -> bool:
        """Bit-exact schedule comparison, ignoring instrumentation."""
        return (self.selected_beams == other.selected_beams
                and self.prb_users == other.prb_users
                and np.array_equal(self.powers, other.powers)
                and np.array_equal(self.slot_rates, other.slot_rates))


def rr_beam_select(preferred_beams: tuple[int, ...], slot_index: int,
                   max_beams: int) -> tuple[int, ...]:
    """Cyclic window over the ascending preferred-beam list.

    Slot i takes the max_beams consecutive entries starting at offset
    (i * max_beams) mod |preferred|, wrapping around.
    """
    if not preferred_beams:
        raise ValueError("preferred_beams must be nonempty")
    n = len(preferred_beams)
    if max_beams >= n:
        return tuple(preferred_beams)
    start = (slot_index * max_beams) % n
    picked = [preferred_beams[(start + k) % n] for k in range(max_beams)]
    return tuple(sorted(picked))


def wsrb_beam_select(outcomes: dict[int, PerBeamOutcome],
                     max_beams: int) -> tuple[int, ...]:
    """Keep the beams with the largest weighted sum rates; ties favor the
    lower beam index."""
    beams = sorted(outcomes)
    ranked = sorted(beams, key=lambda b: (-outcomes[b].weighted_sum_rate, b))
    return tuple(sorted(ranked[:max_beams]))


def idd(prb_users: tuple[int, ...], prb_powers: np.ndarray, abs2_block: np.ndarray,
        threshold: float) -> tuple[tuple[int, ...], int]:
    """Interference down dropping for one PRB.

    Computes, for every ordered pair (victim n, transmitter u), the ratio
    of u's interference at n's receive beam to n's own signal power; every
    UE whose transmission exceeds ``threshold`` toward anyone is dropped,
    all drops applied simultaneously. Returns (survivors, pair checks).
    """
    z = list(prb_users)
    if len(z) < 2:
        return tuple(z), 0
    p = prb_powers[z]
    if np.any(p <= 0.0):
        raise ValueError("scheduled UE with zero power on this PRB")
    cross = abs2_block[np.ix_(z, z)]                 # victim x transmitter
    signal = np.diag(cross) * p                      # per victim
    interference = cross * p[None, :]                # [victim, transmitter]
    ratios = interference / signal[:, None]
    np.fill_diagonal(ratios, 0.0)
    dropped = ratios.max(axis=0) > threshold         # per transmitter column
    survivors = tuple(ue for ue, d in zip(z, dropped) if not d)
    return survivors, len(z) * (len(z) - 1)


def pbs_plus(candidates: tuple[int, ...], signal_gain: np.ndarray,
             weights: np.ndarray, thresholds: np.ndarray,
             efficiencies_padded: np.ndarray, prb_bandwidth: float,
             noise_power: float, ue_power: float, patience: int,
             step: int, beam: int = -1) -> PerBeamOutcome:
    """Greedy per-beam user selection with persistence.

    Each round, every UE still within patience tentatively takes its
    ``step`` best remaining channels (by signal gain) and re-evaluates its
    sum rate under an equal power split over owned plus tentative channels,
    ignoring other beams. A UE whose sum rate fails to grow gets its stop
    flag bumped; flags accumulate and a UE past ``patience`` leaves the
    race. The still-eligible UE with the largest weighted sum-rate gain
    wins its tentative channels, even when that gain is negative: carrying
    a few losing channels can pay off once later grants thicken the split.
    With patience 0 and step 1 this is the classic greedy that stops a UE
    at its first non-improving round.

    Ties break toward the lowest UE id and lowest channel index. Channels
    with zero signal gain are never taken; they cannot carry rate.
    """
    if step < 1:
        raise ValueError("step must be >= 1")
    if patience < 0:
        raise ValueError("patience must be >= 0")
    num_channels = signal_gain.shape[0]
    cands = sorted(candidates)

    remaining = np.ones(num_channels, dtype=bool)
    order = {u: np.argsort(-signal_gain[:, u], kind="stable") for u in cands}
    cursor = {u: 0 for u in cands}
    owned: dict[int, list[int]] = {u: [] for u in cands}
    sum_rate = {u: 0.0 for u in cands}
    flags = {u: 0 for u in cands}
    evals = 0

    def epa_sum_rate(u: int, channels: list[int]) -> float:
        p = ue_power / len(channels)
        gammas = signal_gain[channels, u] * (p / noise_power)
        return float(rate_array(gammas, thresholds, efficiencies_padded,
                                prb_bandwidth).sum())

    def best_remaining(u: int) -> list[int]:
        taken: list[int] = []
        pos = cursor[u]
        seq = order[u]
        while pos < num_channels and len(taken) < step:
            c = int(seq[pos])
            if not remaining[c]:
                pos += 1
                if not taken:
                    cursor[u] = pos       # skip permanently exhausted prefix
                continue
            if signal_gain[c, u] <= 0.0:
                break                     # descending order: rest are useless
            taken.append(c)
            pos += 1
        return taken

    while remaining.any() and any(f <= patience for f in flags.values()):
        winner = None
        winner_gain = -math.inf
        winner_channels: list[int] = []
        winner_rate = 0.0
        for u in cands:
            if flags[u] > patience:
                continue
            tentative = best_remaining(u)
            if not tentative:
                flags[u] += 1
                continue
            evals += 1
            new_rate = epa_sum_rate(u, owned[u] + tentative)
            if new_rate <= sum_rate[u]:
                flags[u] += 1
            if flags[u] > patience:
                continue                  # just ran out of patience; cannot win
            gain = weights[u] * (new_rate - sum_rate[u])
            if gain > winner_gain:        # strict: ties keep the lowest UE id
                winner, winner_gain = u, gain
                winner_channels, winner_rate = tentative, new_rate
        if winner is None:
            break
        owned[winner].extend(winner_channels)
        sum_rate[winner] = winner_rate
        remaining[winner_channels] = False

    prb_owner = np.full(num_channels, -1, dtype=np.int64)
    ue_prbs: dict[int, list[int]] = {}
    for u in cands:
        if owned[u]:
            ue_prbs[u] = owned[u]
            prb_owner[owned[u]] = u
    weighted = float(sum(weights[u] * sum_rate[u] for u in cands))
    return PerBeamOutcome(beam=beam, prb_owner=prb_owner, ue_prbs=ue_prbs,
                          sum_rate=sum_rate, weighted_sum_rate=weighted,
                          candidate_evals=evals)


@dataclass(frozen=True)
class RealizationContext:
    """Everything a slot scheduler needs, precomputed once per realization."""

    cfg: SystemConfig
    assignment: BeamAssignment
    abs2_eff: np.ndarray          # (Q, U, U) squared magnitudes
    signal_gain: np.ndarray       # (C, U) per-PRB squared signal gains
    prb_block: np.ndarray         # (C,) block index per PRB
    noise_power: float
    ue_power: float
    thresholds: np.ndarray
    efficiencies_padded: np.ndarray

    @classmethod
    def build(cls, cfg: SystemConfig, assignment: BeamAssignment,
              eff: EffectiveChannelSet) -> "RealizationContext":
        abs2 = np.abs(eff.g_eff) ** 2
        prb_block = prb_block_index(cfg.num_subchannels, cfg.num_blocks)
        diag = np.einsum("quu->qu", abs2)          # (Q, U) signal gains per block
        signal_gain = diag[prb_block]              # (C, U)
        return cls(cfg=cfg, assignment=assignment, abs2_eff=abs2,
                   signal_gain=signal_gain, prb_block=prb_block,
                   noise_power=noise_power_per_prb(cfg),
                   ue_power=cfg.ue_power_mw,
                   thresholds=np.asarray(cfg.mcs.thresholds),
                   efficiencies_padded=np.concatenate(
                       ([0.0], cfg.mcs.spectral_efficiencies)))

    @property
    def max_beams(self) -> int:
        return min(len(self.assignment.preferred_beams), self.cfg.num_rf_chains)


def _run_beam_selection(ctx: RealizationContext, beams: tuple[int, ...],
                        weights: np.ndarray, patience: int, step: int
                        ) -> dict[int, PerBeamOutcome]:
    return {
        b: pbs_plus(ctx.assignment.users_by_beam[b], ctx.signal_gain, weights,
                    ctx.thresholds, ctx.efficiencies_padded,
                    ctx.cfg.prb_bandwidth, ctx.noise_power, ctx.ue_power,
                    patience, step, beam=b)
        for b in beams
    }


def _combine_allocations(outcomes: dict[int, PerBeamOutcome],
                         selected: tuple[int, ...], num_subchannels: int
                         ) -> tuple[dict[int, list[int]], list[list[int]]]:
    ue_prbs: dict[int, list[int]] = {}
    prb_users: list[list[int]] = [[] for _ in range(num_subchannels)]
    for b in selected:
        for u, prbs in outcomes[b].ue_prbs.items():
            ue_prbs[u] = list(prbs)
            for c in prbs:
                prb_users[c].append(u)
    for users in prb_users:
        users.sort()
    return ue_prbs, prb_users


def run_slot(ctx: RealizationContext, solution: str, slot_index: int,
             pf_state: PfState) -> SlotSchedule:
    """Schedule one slot under the given solution tag.

    Weights are frozen at their slot-start values throughout; the caller
    applies the PF update with the realized rates afterwards.
    """
    if solution not in SOLUTIONS:
        raise ValueError(f"unknown solution {solution!r}")
    cfg = ctx.cfg
    weights = pf_state.weights
    stats = SlotStats()
    preferred = ctx.assignment.preferred_beams

    if solution in ("B", "S0"):
        patience, step = ((0, 1) if solution == "B"
                          else (cfg.pbs_plus_patience, cfg.pbs_plus_step))
        selected = rr_beam_select(preferred, slot_index, ctx.max_beams)
        outcomes = _run_beam_selection(ctx, selected, weights, patience, step)
    else:
        outcomes = _run_beam_selection(ctx, preferred, weights,
                                       cfg.pbs_plus_patience, cfg.pbs_plus_step)
        selected = wsrb_beam_select(outcomes, ctx.max_beams)
        stats.wsrb_comparisons = len(outcomes)

    evals = [outcomes[b].candidate_evals for b in outcomes]
    stats.pbs_evals_max_beam = max(evals) if evals else 0
    stats.pbs_evals_total = sum(evals)

    ue_prbs, prb_users = _combine_allocations(outcomes, selected,
                                              cfg.num_subchannels)
    powers = epa(ue_prbs, ctx.ue_power, cfg.num_subchannels, cfg.num_ues)

    if solution in ("S2", "S2WF"):
        scheduled_before = {u for users in prb_users for u in users}
        survivors_per_prb: list[list[int]] = []
        for c, users in enumerate(prb_users):
            survivors, checks = idd(tuple(users), powers[c],
                                    ctx.abs2_eff[ctx.prb_block[c]],
                                    cfg.idd_threshold)
            stats.idd_checks_total += checks
            stats.idd_checks_max_prb = max(stats.idd_checks_max_prb, checks)
            survivors_per_prb.append(list(survivors))
        prb_users = survivors_per_prb
        ue_prbs = {}
        for c, users in enumerate(prb_users):
            for u in users:
                ue_prbs.setdefault(u, []).append(c)
        stats.idd_dropped_ues = len(scheduled_before - set(ue_prbs))
        powers = epa(ue_prbs, ctx.ue_power, cfg.num_subchannels, cfg.num_ues)

    if solution == "S2WF":
        for u, prbs in ue_prbs.items():
            gains = ctx.signal_gain[prbs, u]
            powers[prbs, u] = waterfill(gains, ctx.noise_power, ctx.ue_power)

    prb_users_t = tuple(tuple(users) for users in prb_users)
    slot_rates = realized_rates(prb_users_t, powers, ctx.abs2_eff, ctx.prb_block,
                                cfg.mcs, cfg.prb_bandwidth, ctx.noise_power)
    return SlotSchedule(solution=solution, slot_index=slot_index,
                        selected_beams=tuple(selected), prb_users=prb_users_t,
                        powers=powers, slot_rates=slot_rates, stats=stats)
