"""Analog codebooks, beam alignment, and effective channel coefficients.

Alignment runs once per realization: each UE gets the (BS beam, UE beam)
pair with the highest block-averaged gain, and the resulting per-block
scalar channels v^H G w are what every scheduler consumes afterwards.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class Codebook:
    """A bank of unit-norm analog beamforming vectors, rows = beams."""

    side: str                 # "BS" or "UE"
    beams: np.ndarray         # (n_beams, n_antennas) complex

    @property
    def size(self) -> int:
        return self.beams.shape[0]

    @property
    def n_antennas(self) -> int:
        return self.beams.shape[1]


@dataclass(frozen=True)
class BeamAssignment:
    """Preferred beam pair per UE plus the beam->UEs reverse map.

    users_by_beam partitions the UE set: every UE appears under exactly its
    own preferred BS beam.
    """

    ue_bs_beam: np.ndarray                 # (U,) int, b(u)
    ue_ue_beam: np.ndarray                 # (U,) int
    preferred_beams: tuple[int, ...]       # sorted distinct BS beam indices
    users_by_beam: dict[int, tuple[int, ...]]


@dataclass(frozen=True)
class EffectiveChannelSet:
    """Scalar channels after both ends apply their aligned beams.

    g_eff[q, n, u] is UE u's transmission received on UE n's preferred BS
    beam in block q; the diagonal n == u is the signal channel. Values are
    constant across the PRBs of one block.
    """

    g_eff: np.ndarray          # (Q, U, U) complex

    @property
    def num_blocks(self) -> int:
        return self.g_eff.shape[0]

    @property
    def num_ues(self) -> int:
        return self.g_eff.shape[1]


def build_codebook(side: str, n_antennas: int, n_beams: int) -> Codebook:
    """Steering-vector codebook on a uniform sine grid.

    Beam j points at sin(theta_j) = -1 + (2j+1)/n_beams, so the beams tile
    the front hemisphere evenly in sine space.
    """
    if n_beams < 1:
        raise ValueError("n_beams must be >= 1")
    j = np.arange(n_beams)
    sin_grid = -1.0 + (2.0 * j + 1.0) / n_beams
    m = np.arange(n_antennas)
    beams = np.exp(1j * math.pi * np.outer(sin_grid, m)) / math.sqrt(n_antennas)
    return Codebook(side=side, beams=beams)


def beam_alignment(channels: np.ndarray, bs_codebook: Codebook,
                   ue_codebook: Codebook) -> BeamAssignment:
    """Pick, per UE, the beam pair maximizing the block-averaged gain
    (1/Q) sum_q |v^H G_q w|^2; ties go to the lowest (BS index, UE index)."""
    q_blocks, num_ues = channels.shape[0], channels.shape[1]
    v_conj = ue_codebook.beams.conj()          # (B_u, N_u)
    w = bs_codebook.beams                      # (B_b, N_b)

    ue_bs = np.zeros(num_ues, dtype=np.int64)
    ue_ue = np.zeros(num_ues, dtype=np.int64)
    for u in range(num_ues):
        avg = np.zeros((ue_codebook.size, bs_codebook.size))
        for q in range(q_blocks):
            t = v_conj @ channels[q, u] @ w.T   # t[i, j] = v_i^H G w_j
            avg += np.abs(t) ** 2
        flat = np.argmax(avg.T)                 # BS-major flattening for tie order
        bs_idx, ue_idx = divmod(int(flat), ue_codebook.size)
        ue_bs[u], ue_ue[u] = bs_idx, ue_idx

    preferred = tuple(sorted(set(int(b) for b in ue_bs)))
    users_by_beam = {
        b: tuple(int(u) for u in np.flatnonzero(ue_bs == b)) for b in preferred
    }
    return BeamAssignment(ue_bs_beam=ue_bs, ue_ue_beam=ue_ue,
                          preferred_beams=preferred, users_by_beam=users_by_beam)


def effective_channels(channels: np.ndarray, assignment: BeamAssignment,
                       bs_codebook: Codebook, ue_codebook: Codebook
                       ) -> EffectiveChannelSet:
    """Full (Q, U, U) tensor of v_u^H G_{q,u} w_{b(n)} coefficients."""
    num_ues = channels.shape[1]
    v_sel = ue_codebook.beams[assignment.ue_ue_beam]       # (U, N_u)
    w_sel = bs_codebook.beams[assignment.ue_bs_beam]       # (U, N_b)
    # rx[q, u, :] = v_u^H G[q, u]; then contract with each listening beam
    rx = np.einsum("ua,quab->qub", v_sel.conj(), channels, optimize=True)
    g_eff = np.einsum("qub,nb->qnu", rx, w_sel, optimize=True)
    return EffectiveChannelSet(g_eff=g_eff)


def prb_block_index(num_subchannels: int, num_blocks: int) -> np.ndarray:
    """Map each PRB index to its block index (contiguous groups of C/Q)."""
    if num_subchannels % num_blocks != 0:
        raise ValueError("num_subchannels must be a multiple of num_blocks")
    return np.repeat(np.arange(num_blocks), num_subchannels // num_blocks)


def dump_magnitude_csv(path: str, eff: EffectiveChannelSet) -> None:
    """Debug dump of |g_eff| as CSV rows (block, listen_ue, transmit_ue, magnitude)."""
    with open(path, "w", encoding="utf-8") as fh:
        fh.write("block,listen_ue,transmit_ue,magnitude\n")
        q_blocks, num_ues = eff.num_blocks, eff.num_ues
        for q in range(q_blocks):
            for n in range(num_ues):
                for u in range(num_ues):
                    fh.write(f"{q},{n},{u},{float(abs(eff.g_eff[q, n, u]))!r}\n")
