"""UE placement, path loss, and wideband multi-cluster channel generation.

Each realization draws U placements on an annulus, a fixed cluster/path
geometry per UE, and one N_u x N_b channel matrix per UE per frequency
block. Large-scale loss, angles, and delays stay fixed over the whole slot
horizon; only the scheduler state evolves in time.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .config import SystemConfig, validate


@dataclass(frozen=True)
class UePlacement:
    """One UE position relative to a BS at the origin (antenna at bs_height)."""

    ue_id: int
    distance_2d: float
    azimuth: float
    position_3d: tuple[float, float, float]   # UE at ground level

    def distance_3d(self, bs_height: float) -> float:
        return math.hypot(self.distance_2d, bs_height)


@dataclass(frozen=True)
class ClusterGeometry:
    """Per-UE scattering geometry, fixed for the whole horizon.

    Arrays are (num_clusters, paths_per_cluster). Complex path gains carry
    the large-scale loss; delays combine the cluster group delay and the
    per-path relative delay.
    """

    ue_id: int
    gains: np.ndarray       # complex
    delays_s: np.ndarray    # seconds, >= 0
    aod_rad: np.ndarray     # departure angle at the BS array
    aoa_rad: np.ndarray     # arrival angle at the UE array


def place_ues(cfg: SystemConfig, rng: np.random.Generator) -> list[UePlacement]:
    """Draw U placements uniform over the annulus area between the exclusion
    radius and the cell radius; deterministic given the generator state."""
    r2 = rng.uniform(cfg.exclusion_radius ** 2, cfg.cell_radius ** 2, cfg.num_ues)
    azimuth = rng.uniform(0.0, 2.0 * math.pi, cfg.num_ues)
    out = []
    for u in range(cfg.num_ues):
        d = math.sqrt(r2[u])
        pos = (d * math.cos(azimuth[u]), d * math.sin(azimuth[u]), 0.0)
        out.append(UePlacement(ue_id=u, distance_2d=d, azimuth=float(azimuth[u]),
                               position_3d=pos))
    return out


def array_response(angle_rad: float, n_elements: int) -> np.ndarray:
    """Unit-norm steering vector of a half-wavelength ULA.

    Element m is exp(j*pi*m*sin(angle)) / sqrt(n).
    """
    if n_elements < 1:
        raise ValueError("n_elements must be >= 1")
    m = np.arange(n_elements)
    return np.exp(1j * math.pi * m * math.sin(angle_rad)) / math.sqrt(n_elements)


def path_loss_db(distance_m: float, cfg: SystemConfig) -> float:
    """Close-in reference path loss: 32.4 + 20 log10(f_GHz) + 10 n log10(d_m)."""
    if distance_m < cfg.exclusion_radius:
        raise ValueError(
            f"distance {distance_m} m inside exclusion zone ({cfg.exclusion_radius} m)")
    f_ghz = cfg.carrier_freq / 1e9
    return (32.4 + 20.0 * math.log10(f_ghz)
            + 10.0 * cfg.path_loss_exponent * math.log10(distance_m))


def generate_geometry(placements: list[UePlacement], cfg: SystemConfig,
                      rng: np.random.Generator) -> list[ClusterGeometry]:
    """Draw cluster means, path offsets, delays, and complex gains per UE.

    Per-cluster powers follow an exponential decay profile; the total path
    power equals the linear large-scale gain 10^(-PL/10), so generated
    channels already include distance loss.
    """
    d, l = cfg.num_clusters, cfg.paths_per_cluster
    spread = math.radians(cfg.angle_spread_deg)
    laplace_scale = spread / math.sqrt(2.0)
    cluster_weights = 10.0 ** (-cfg.cluster_decay_db * np.arange(d) / 10.0)
    cluster_weights = cluster_weights / cluster_weights.sum()

    out = []
    for p in placements:
        mean_aod = rng.uniform(-math.pi / 2, math.pi / 2, d)
        mean_aoa = rng.uniform(-math.pi / 2, math.pi / 2, d)
        aod = mean_aod[:, None] + rng.laplace(0.0, laplace_scale, (d, l))
        aoa = mean_aoa[:, None] + rng.laplace(0.0, laplace_scale, (d, l))
        tau0 = rng.uniform(0.0, cfg.cluster_delay_max_s, d)
        tau1 = rng.exponential(cfg.path_delay_mean_s, (d, l))
        delays = tau0[:, None] + tau1

        loss_linear = 10.0 ** (-path_loss_db(p.distance_3d(cfg.bs_height), cfg) / 10.0)
        path_var = loss_linear * cluster_weights / l          # per-path E|g|^2, per cluster
        sigma = np.sqrt(path_var / 2.0)[:, None]
        gains = sigma * (rng.standard_normal((d, l)) + 1j * rng.standard_normal((d, l)))
        out.append(ClusterGeometry(ue_id=p.ue_id, gains=gains, delays_s=delays,
                                   aod_rad=aod, aoa_rad=aoa))
    return out


def block_center_frequencies(cfg: SystemConfig) -> np.ndarray:
    """Center frequency of each of the Q blocks across the occupied band."""
    q = np.arange(cfg.num_blocks)
    return (cfg.carrier_freq - cfg.total_bandwidth / 2.0
            + (q + 0.5) * cfg.total_bandwidth / cfg.num_blocks)


def generate_channels(geometry: list[ClusterGeometry], cfg: SystemConfig) -> np.ndarray:
    """Build the (Q, U, N_u, N_b) channel tensor from the fixed geometry.

    Block q of UE u sums path outer products a_rx(aoa) a_bs(aod)^H weighted
    by gain * exp(-j 2 pi tau f_q), scaled by 1/sqrt(paths_per_cluster);
    blocks differ only through the delay phasors. The sqrt(N_u N_b) front
    factor carries the aggregate array gain, since the per-path steering
    vectors are unit norm: E[||G||_F^2] = N_u N_b (sum E|g|^2) / N_path.
    """
    freqs = block_center_frequencies(cfg)
    n_u, n_b, q_blocks = cfg.ue_antennas, cfg.bs_antennas, cfg.num_blocks
    g = np.zeros((q_blocks, len(geometry), n_u, n_b), dtype=np.complex128)
    scale = math.sqrt(n_u * n_b / cfg.paths_per_cluster)

    for idx, geo in enumerate(geometry):
        gains = geo.gains.ravel()
        delays = geo.delays_s.ravel()
        aod = geo.aod_rad.ravel()
        aoa = geo.aoa_rad.ravel()
        a_rx = np.exp(1j * math.pi * np.outer(np.arange(n_u), np.sin(aoa)))
        a_rx /= math.sqrt(n_u)
        a_tx = np.exp(1j * math.pi * np.outer(np.arange(n_b), np.sin(aod)))
        a_tx /= math.sqrt(n_b)
        # (Q, P) per-path coefficients, then one matmul per block
        coeff = scale * gains[None, :] * np.exp(-2j * math.pi * np.outer(freqs, delays))
        g[:, idx] = np.einsum("ip,qp,jp->qij", a_rx, coeff, a_tx.conj(), optimize=True)
    return g


# --- test-fixture serialization ---------------------------------------------
# Textual tensor format: header "U Q NU NB", then UE-major, block-major
# matrices, one row of the N_u x N_b matrix per line as "re im" pairs.

def save_channels(path: str, channels: np.ndarray) -> None:
    q_blocks, num_ues, n_u, n_b = channels.shape
    with open(path, "w", encoding="utf-8") as fh:
        fh.write(f"{num_ues} {q_blocks} {n_u} {n_b}\n")
        for u in range(num_ues):
            for q in range(q_blocks):
                for row in channels[q, u]:
                    fh.write(" ".join(f"{float(c.real)!r} {float(c.imag)!r}"
                                      for c in row))
                    fh.write("\n")


def load_channels(path: str) -> np.ndarray:
    with open(path, "r", encoding="utf-8") as fh:
        num_ues, q_blocks, n_u, n_b = (int(tok) for tok in fh.readline().split())
        out = np.zeros((q_blocks, num_ues, n_u, n_b), dtype=np.complex128)
        for u in range(num_ues):
            for q in range(q_blocks):
                for i in range(n_u):
                    vals = [float(tok) for tok in fh.readline().split()]
                    if len(vals) != 2 * n_b:
                        raise ValueError(f"{path}: malformed row for ue={u} block={q}")
                    row = np.array(vals[::2]) + 1j * np.array(vals[1::2])
                    out[q, u, i] = row
    return out


def build_realization_channels(cfg: SystemConfig, rng: np.random.Generator
                               ) -> tuple[list[UePlacement], list[ClusterGeometry], np.ndarray]:
    """Placement + geometry + channel tensor in one deterministic pass."""
    problems = validate(cfg)
    if problems:
        raise ValueError("invalid config: " + "; ".join(problems))
    placements = place_ues(cfg, rng)
    geometry = generate_geometry(placements, cfg, rng)
    return placements, geometry, generate_channels(geometry, cfg)
