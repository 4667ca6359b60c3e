"""
THz link math: distances, channel gains, interference, SINR and rates.

All functions are pure. Link-level vectors are indexed by GU: since every GU
is served by exactly one UAV, link m means (assign[m], m).
"""

import math
from typing import Optional, Sequence, Tuple, Union

import numpy as np

from .config import NetworkConfig
from .errors import DomainError
from .model import Association, PowerAllocation, Topology

ArrayLike = Union[float, np.ndarray]


def link_distance(uav: Sequence[float], gu: Sequence[float], altitude: Optional[float] = None) -> float:
    """Euclidean UAV-GU distance with the GU at height 0.

    A 2-D `uav` coordinate is lifted to `altitude`; a 3-D one uses its own z.
    """
    uav = np.asarray(uav, dtype=float).reshape(-1)
    gu = np.asarray(gu, dtype=float).reshape(-1)
    z = uav[2] if uav.shape[0] >= 3 else float(altitude or 0.0)
    dx, dy = uav[0] - gu[0], uav[1] - gu[1]
    return math.sqrt(dx * dx + dy * dy + z * z)


def distance_matrix(topology: Topology) -> np.ndarray:
    """K x M matrix of UAV-GU distances."""
    horiz = topology.uav_pos[:, None, :2] - topology.gu_pos[None, :, :]
    z = topology.uav_pos[:, 2][:, None]
    return np.sqrt(np.sum(horiz ** 2, axis=-1) + z ** 2)


def channel_gain(d: ArrayLike, a: float) -> ArrayLike:
    """Spreading plus molecular absorption loss: d^-2 * exp(-a d)."""
    d_arr = np.asarray(d, dtype=float)
    if np.any(d_arr <= 0):
        raise DomainError(f"channel_gain needs d > 0, got {d}")
    if a < 0:
        raise DomainError(f"channel_gain needs a >= 0, got {a}")
    g = d_arr ** -2.0 * np.exp(-a * d_arr)
    return float(g) if g.ndim == 0 else g


def gain_matrix(topology: Topology, config: NetworkConfig) -> np.ndarray:
    """K x M matrix h[k, m] = channel_gain(d[k, m], a)."""
    return channel_gain(distance_matrix(topology), config.carrier_absorption)


def bandwidth_shares(association: Association, config: NetworkConfig) -> np.ndarray:
    """M-vector of per-link bandwidth: B / |cluster of the serving UAV|."""
    sizes = association.cluster_sizes()
    return config.bandwidth_total / sizes[association.assign]


def noise_terms(topology: Topology, association: Association, config: NetworkConfig,
                distances: Optional[np.ndarray] = None) -> np.ndarray:
    """M-vector of bw_share * d^2 * e^(a d) * sigma^2 on each associated link."""
    d = distances if distances is not None else distance_matrix(topology)
    d_link = d[association.assign, np.arange(association.n_gus)]
    bw = bandwidth_shares(association, config)
    return bw * d_link ** 2 * np.exp(config.carrier_absorption * d_link) * config.noise_psd_w_hz


def coupling_matrix(topology: Topology, association: Association, config: NetworkConfig,
                    gains: Optional[np.ndarray] = None) -> np.ndarray:
    """M x M matrix Phi with psi = Phi @ p_link.

    literal:  Phi[i, j] = h[k_j, m_j]  when k_j != k_i (other UAVs' own links)
    physical: Phi[i, j] = h[k_j, m_i]  when k_j != k_i (other UAVs towards GU i)
    """
    h = gains if gains is not None else gain_matrix(topology, config)
    assign = association.assign
    other_uav = assign[None, :] != assign[:, None]
    if config.interference_mode == "literal":
        own = h[assign, np.arange(association.n_gus)]
        phi = np.broadcast_to(own[None, :], other_uav.shape).copy()
    else:
        # h[assign[j], i] for row i, column j
        phi = h[assign[None, :], np.arange(association.n_gus)[:, None]]
    return np.where(other_uav, phi, 0.0)


def interference(link: Tuple[int, int], topology: Topology, association: Association,
                 powers: PowerAllocation, config: NetworkConfig,
                 gains: Optional[np.ndarray] = None) -> float:
    """Interference power psi at link (k, m).

    literal:  sum over k' != k, m' != m of p[k', m'] * h[k', m']
    physical: sum over k' != k of (sum_m' p[k', m']) * h[k', m]
    """
    k, m = link
    n_uavs, n_gus = powers.p.shape
    if not (0 <= k < n_uavs and 0 <= m < n_gus):
        raise IndexError(f"link {link} out of range for {n_uavs} UAVs and {n_gus} GUs")
    h = gains if gains is not None else gain_matrix(topology, config)
    mask = np.ones(n_uavs, dtype=bool)
    mask[k] = False
    if config.interference_mode == "literal":
        cols = np.ones(n_gus, dtype=bool)
        cols[m] = False
        return float(np.sum(powers.p[np.ix_(mask, cols)] * h[np.ix_(mask, cols)]))
    return float(np.sum(powers.p[mask].sum(axis=1) * h[mask, m]))


def interference_vector(topology: Topology, association: Association, powers: PowerAllocation,
                        config: NetworkConfig, gains: Optional[np.ndarray] = None) -> np.ndarray:
    """M-vector of psi on every associated link."""
    phi = coupling_matrix(topology, association, config, gains=gains)
    return phi @ powers.links(association)


def sinr(p_km: ArrayLike, interference_w: ArrayLike, bw_share: ArrayLike, d: ArrayLike,
         config: NetworkConfig) -> ArrayLike:
    """(p * h0) / (psi + bw_share * d^2 * e^(a d) * sigma^2)."""
    p_km = np.asarray(p_km, dtype=float)
    noise = np.asarray(bw_share, dtype=float) * np.asarray(d, dtype=float) ** 2 \
        * np.exp(config.carrier_absorption * np.asarray(d, dtype=float)) * config.noise_psd_w_hz
    gamma = p_km * config.ref_gain_linear / (np.asarray(interference_w, dtype=float) + noise)
    return float(gamma) if gamma.ndim == 0 else gamma


def link_rate(bw_share: ArrayLike, sinr_value: ArrayLike) -> ArrayLike:
    """Shannon rate bw_share * log2(1 + sinr) in bit/s."""
    rate = np.asarray(bw_share, dtype=float) * np.log2(1.0 + np.asarray(sinr_value, dtype=float))
    return float(rate) if rate.ndim == 0 else rate


def link_sinrs(topology: Topology, association: Association, powers: PowerAllocation,
               config: NetworkConfig) -> np.ndarray:
    d = distance_matrix(topology)
    h = channel_gain(d, config.carrier_absorption)
    psi = interference_vector(topology, association, powers, config, gains=h)
    idx = np.arange(association.n_gus)
    return sinr(powers.links(association), psi, bandwidth_shares(association, config),
                d[association.assign, idx], config)


def link_rates(topology: Topology, association: Association, powers: PowerAllocation,
               config: NetworkConfig) -> np.ndarray:
    """M-vector of achievable rates (bit/s), one per GU."""
    gamma = link_sinrs(topology, association, powers, config)
    return np.asarray(link_rate(bandwidth_shares(association, config), gamma), dtype=float)


def uav_slot_rates(topology: Topology, association: Association, powers: PowerAllocation,
                   config: NetworkConfig) -> np.ndarray:
    """K-vector of per-UAV sum rates R^lo_k(n)."""
    rates = link_rates(topology, association, powers, config)
    return np.bincount(association.assign, weights=rates, minlength=association.n_uavs)


def uav_slot_rate(k: int, topology: Topology, association: Association, powers: PowerAllocation,
                  config: NetworkConfig) -> float:
    """Sum rate of UAV k over its cluster; 0 for an empty cluster."""
    return float(uav_slot_rates(topology, association, powers, config)[k])


def mean_gu_rate(topology: Topology, association: Association, powers: PowerAllocation,
                 config: NetworkConfig) -> float:
    return float(np.mean(link_rates(topology, association, powers, config)))
