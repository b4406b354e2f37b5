"""RF and VLC channel power gains.

RF links use 3GPP-style distance pathloss plus indoor penetration loss,
log-normal shadowing and Rayleigh power fading. VLC links are line-of-sight
only: Lambertian emission, optical filter and concentrator gains, scaled by
the probability that the LoS path is unobstructed.
"""

from __future__ import annotations

import csv
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

from .scenario import ScenarioConfig, Topology, scenario_rngs

MIN_RF_DISTANCE_KM = 0.01
MAX_PENETRATION_PARAM_M = 25.0

_PATHLOSS = {"macro": (128.1, 37.6), "pico": (140.7, 36.7)}
_PENETRATION_BASE_DB = {"macro": 20.0, "pico": 23.0}


def _pathloss(kind: str, distance_km):
    d = np.asarray(distance_km, dtype=float)
    if np.any(d <= 0):
        raise ValueError("pathloss distance must be strictly positive")
    a, b = _PATHLOSS[kind]
    out = a + b * np.log10(d)
    return float(out) if out.ndim == 0 else out


def rf_pathloss_macro(distance_km):
    """Macrocell pathloss in dB, distance in km."""
    return _pathloss("macro", distance_km)


def rf_pathloss_pico(distance_km):
    """Picocell pathloss in dB, distance in km."""
    return _pathloss("pico", distance_km)


def penetration_loss_db(ap_kind: str, indoor: bool, distance_param_m: float) -> float:
    if not indoor:
        return 0.0
    return _PENETRATION_BASE_DB[ap_kind] + 0.5 * distance_param_m


def rf_gain(ap_kind: str, distance_km: float, indoor: bool,
            rng: np.random.Generator | None = None, *, n_subchannels: int = 1,
            shadowing_sigma: float = 10.0) -> np.ndarray:
    """Channel power gain of one (AP, user) pair on ``n_subchannels`` subchannels.

    With ``rng=None`` every random term (penetration distance parameter,
    shadowing, fading) is pinned at zero dB, which gives the deterministic
    pathloss-plus-fixed-penetration gain.
    """
    if ap_kind not in _PATHLOSS:
        raise ValueError(f"unknown RF AP kind {ap_kind!r}")
    loss = _pathloss(ap_kind, distance_km)
    if rng is None:
        psi = penetration_loss_db(ap_kind, indoor, 0.0)
        return np.full(n_subchannels, 10.0 ** (-(loss + psi) / 10.0))
    dmax = min(MAX_PENETRATION_PARAM_M, distance_km * 1000.0)
    psi = penetration_loss_db(ap_kind, indoor, rng.uniform(0.0, dmax))
    shadow = rng.normal(0.0, shadowing_sigma)
    fade = rng.exponential(1.0, n_subchannels)  # Gamma = -10 log10(fade)
    return 10.0 ** (-(loss + psi + shadow) / 10.0) * fade


def lambertian_order(semi_angle_deg: float) -> float:
    return -1.0 / math.log2(math.cos(math.radians(semi_angle_deg)))


def concentrator_gain(refractive_index: float, fov_deg: float) -> float:
    return refractive_index ** 2 / math.sin(math.radians(fov_deg)) ** 2


def vlc_gain(ap_pos, user_pos, rho: float, config: ScenarioConfig) -> float:
    """LoS optical gain between a downward-facing AP and an upward-facing PD."""
    ap = np.asarray(ap_pos, dtype=float)
    ue = np.asarray(user_pos, dtype=float)
    return float(_vlc_gain_array(ap[None, None, :], ue[None, None, :], config)[0, 0] * rho)


def _vlc_gain_array(ap: np.ndarray, ue: np.ndarray, config: ScenarioConfig) -> np.ndarray:
    diff = ap - ue
    d2 = np.sum(diff ** 2, axis=-1)
    if np.any(d2 <= 0):
        raise ValueError("AP and user positions coincide")
    cos_angle = diff[..., 2] / np.sqrt(d2)  # irradiance angle == incidence angle
    m1 = lambertian_order(config.semi_angle_half_power)
    g_conc = concentrator_gain(config.refractive_index, config.pd_fov)
    gain = (config.pd_area * (m1 + 1.0) / (2.0 * np.pi * d2) * np.clip(cos_angle, 0.0, None) ** m1
            * config.optical_filter_gain * g_conc * cos_angle)
    incidence = np.degrees(np.arccos(np.clip(cos_angle, -1.0, 1.0)))
    return np.where((incidence <= config.pd_fov) & (cos_angle > 0), gain, 0.0)


@dataclass(frozen=True)
class ChannelState:
    g_macro: np.ndarray      # (J, N)
    g_pico: np.ndarray       # (K-1, J, M)
    g_vlc: np.ndarray        # (V, J, Q), LoS probability already applied
    rho: np.ndarray          # (V, J, Q)
    pico_coverage: np.ndarray  # (K-1, J) bool: user inside the pico's coverage radius

    @property
    def n_users(self) -> int:
        return self.g_macro.shape[0]

    @property
    def n_pico(self) -> int:
        return self.g_pico.shape[0]

    @property
    def n_vlc(self) -> int:
        return self.g_vlc.shape[0]

    @property
    def n_sub(self) -> int:
        return self.g_macro.shape[1]

    def mean_gain_rf(self) -> np.ndarray:
        """Average gain over subchannels, shape (K, J) with row 0 the macro AP."""
        return np.vstack([self.g_macro.mean(axis=1)[None, :], self.g_pico.mean(axis=2)])

    def mean_gain_vlc(self) -> np.ndarray:
        return self.g_vlc.mean(axis=2) if self.n_vlc else np.zeros((0, self.n_users))

    def mean_rho(self) -> np.ndarray:
        return self.rho.mean(axis=2) if self.n_vlc else np.zeros((0, self.n_users))

    def rf_eligible(self) -> np.ndarray:
        """(K, J): macro covers everyone, picos only users within their radius."""
        return np.vstack([np.ones((1, self.n_users), bool), self.pico_coverage])

    def vlc_eligible(self) -> np.ndarray:
        return self.g_vlc.max(axis=2) > 0 if self.n_vlc else np.zeros((0, self.n_users), bool)


def build_channel_state(topology: Topology, config: ScenarioConfig,
                        seed: int | None = None) -> ChannelState:
    """Draw all gains for the scenario. Deterministic for a given seed."""
    rngs = scenario_rngs(config.seed if seed is None else seed)
    rng_rf, rng_los = rngs["rf"], rngs["los"]
    J = topology.n_users
    N = config.subchannels_per_ap
    indoor = topology.user_is_indoor
    ue_xy = topology.user_positions[:, :2]

    def ground_km(ap_xy):
        d = np.hypot(*(ue_xy - ap_xy).T) / 1000.0 if J else np.zeros(0)
        return np.maximum(d, MIN_RF_DISTANCE_KM)

    d_macro = ground_km(topology.macro_position)
    g_macro = np.zeros((J, N))
    for j in range(J):
        g_macro[j] = rf_gain("macro", d_macro[j], bool(indoor[j]), rng_rf,
                             n_subchannels=N, shadowing_sigma=config.shadowing_sigma)

    n_pico = len(topology.pico_positions)
    g_pico = np.zeros((n_pico, J, N))
    coverage = np.zeros((n_pico, J), bool)
    for k in range(n_pico):
        d = ground_km(topology.pico_positions[k])
        coverage[k] = d * 1000.0 <= config.pico_radius
        for j in range(J):
            g_pico[k, j] = rf_gain("pico", d[j], bool(indoor[j]), rng_rf,
                                   n_subchannels=N, shadowing_sigma=config.shadowing_sigma)

    V = len(topology.vlc_ap_positions)
    lo, hi = config.los_prob_range
    # one uniform draw per triple, mapped onto the band so that bands are coupled
    u = rng_los.random((V, J, N))
    rho = lo + (hi - lo) * u
    if V and J:
        base = _vlc_gain_array(topology.vlc_ap_positions[:, None, :],
                               topology.user_positions[None, :, :], config)
        same_room = topology.vlc_ap_room[:, None] == topology.user_room[None, :]
        base = np.where(same_room, base, 0.0)
        g_vlc = base[:, :, None] * rho
    else:
        g_vlc = np.zeros((V, J, N))
    return ChannelState(g_macro=g_macro, g_pico=g_pico, g_vlc=g_vlc, rho=rho,
                        pico_coverage=coverage)


def dump_channels(state: ChannelState, path: str | Path) -> None:
    """Write every gain as a CSV row (ap_kind, ap_idx, user_idx, subch_idx, gain, rho)."""
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["ap_kind", "ap_idx", "user_idx", "subch_idx", "gain", "rho"])
        for (j, n), g in np.ndenumerate(state.g_macro):
            w.writerow(["macro", 0, j, n, repr(float(g)), ""])
        for (k, j, n), g in np.ndenumerate(state.g_pico):
            w.writerow(["pico", k + 1, j, n, repr(float(g)), ""])
        for (v, j, q), g in np.ndenumerate(state.g_vlc):
            w.writerow(["vlc", v, j, q, repr(float(g)), repr(float(state.rho[v, j, q]))])
