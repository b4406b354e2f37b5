"""Energy-efficient AP assignment by deferred acceptance with power quotas.

Each AP's quota is its transmit-power budget; every user it holds reserves a
predetermined power (budget / subchannels by default). The RF and VLC games are
independent and run one after the other.
"""

from __future__ import annotations

import csv
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

from .channel import ChannelState
from .rates import VLC_SNR_FACTOR, rf_coef, vlc_coef
from .scenario import ScenarioConfig

_QUOTA_RTOL = 1e-9


@dataclass(frozen=True)
class PreferenceTables:
    ee_rf: np.ndarray            # (K, J) potential EE of user j on RF AP k, 0 = unacceptable
    ee_vlc: np.ndarray           # (V, J)
    rf_demand: np.ndarray        # (K,) power reserved per matched user
    vlc_demand: np.ndarray       # (V,)
    rf_ap_prefs: list[np.ndarray] = field(default_factory=list)
    vlc_ap_prefs: list[np.ndarray] = field(default_factory=list)
    rf_user_prefs: list[np.ndarray] = field(default_factory=list)
    vlc_user_prefs: list[np.ndarray] = field(default_factory=list)

    @classmethod
    def from_metrics(cls, ee_rf, ee_vlc, rf_demand, vlc_demand) -> "PreferenceTables":
        ee_rf = np.asarray(ee_rf, float)
        ee_vlc = np.asarray(ee_vlc, float)
        return cls(ee_rf=ee_rf, ee_vlc=ee_vlc,
                   rf_demand=np.asarray(rf_demand, float), vlc_demand=np.asarray(vlc_demand, float),
                   rf_ap_prefs=_sorted_lists(ee_rf), vlc_ap_prefs=_sorted_lists(ee_vlc),
                   rf_user_prefs=_sorted_lists(ee_rf.T), vlc_user_prefs=_sorted_lists(ee_vlc.T))


def _sorted_lists(metric: np.ndarray) -> list[np.ndarray]:
    """Per row: acceptable column indices by descending metric, ties to lower index."""
    out = []
    for row in metric:
        order = np.argsort(-row, kind="stable")
        out.append(order[row[order] > 0])
    return out


@dataclass(frozen=True)
class Quotas:
    rf: np.ndarray   # (K,) W
    vlc: np.ndarray  # (V,) W

    @classmethod
    def from_config(cls, config: ScenarioConfig, n_pico: int, n_vlc: int) -> "Quotas":
        return cls(rf=np.concatenate([[config.p_macro_budget], np.full(n_pico, config.p_pico_budget)]),
                   vlc=np.full(n_vlc, config.p_vlc_budget))


def build_preferences(state: ChannelState, config: ScenarioConfig,
                      rf_power: np.ndarray | None = None,
                      vlc_power: np.ndarray | None = None) -> PreferenceTables:
    """Potential-EE metrics and both sides' preference lists.

    ``rf_power``/``vlc_power`` override the per-user reserved power of each AP
    (default: budget / subchannels). Interference is the worst case where every
    other co-tier AP transmits at its reserved power.
    """
    n_sub = state.n_sub
    quotas = Quotas.from_config(config, state.n_pico, state.n_vlc)
    p_rf = quotas.rf / n_sub if rf_power is None else np.asarray(rf_power, float)
    p_vlc = quotas.vlc / n_sub if vlc_power is None else np.asarray(vlc_power, float)

    g_rf = rf_coef(state.mean_gain_rf(), config)        # (K, J)
    rx = p_rf[:, None] * g_rf
    interf = np.zeros_like(rx)
    if state.n_pico:
        pico_total = rx[1:].sum(axis=0)
        interf[1:] = pico_total[None, :] - rx[1:]
    rate_rf = config.bandwidth_rf * np.log2(1.0 + rx / (interf + config.noise_rf))
    circuit = np.concatenate([[config.circuit_macro], np.full(state.n_pico, config.circuit_pico)])
    ee_rf = rate_rf / (circuit + quotas.rf)[:, None]
    ee_rf = np.where(state.rf_eligible(), ee_rf, 0.0)

    if state.n_vlc:
        g_v = vlc_coef(state.mean_gain_vlc(), config)
        rx_v = p_vlc[:, None] * g_v
        interf_v = rx_v.sum(axis=0)[None, :] - rx_v
        rate_v = state.mean_rho() * config.bandwidth_vlc * np.log2(
            1.0 + VLC_SNR_FACTOR * rx_v / (interf_v + config.noise_vlc))
        ee_vlc = rate_v / (config.circuit_vlc + quotas.vlc)[:, None]
    else:
        ee_vlc = np.zeros((0, state.n_users))
    return PreferenceTables.from_metrics(ee_rf, ee_vlc, p_rf, p_vlc)


@dataclass
class GameResult:
    """Outcome of one deferred-acceptance game."""

    match: np.ndarray             # (J,) AP index or -1
    waitlists: list[list[int]]
    used: np.ndarray              # reserved power per AP
    proposals: int
    rounds: int
    proposals_per_user: np.ndarray


@dataclass
class MatchingState:
    rf: GameResult
    vlc: GameResult
    rf_fallback: np.ndarray       # (J,) users rejected by every RF AP, parked on the macro

    @property
    def proposals(self) -> int:
        return self.rf.proposals + self.vlc.proposals

    def rf_assignment(self) -> np.ndarray:
        return np.where(self.rf_fallback, 0, self.rf.match)


def deferred_acceptance(user_prefs: list[np.ndarray], ap_metric: np.ndarray,
                        quota: np.ndarray, demand: np.ndarray) -> GameResult:
    """User-proposing deferred acceptance where APs hold users up to a power quota.

    ``ap_metric[a, j]`` ranks users at AP ``a`` (higher is better). Each round
    every free user with a non-empty list proposes to its best remaining AP;
    each AP keeps the best prefix of (waitlist + applicants) whose cumulative
    reserved power fits its quota and rejects the rest.
    """
    n_ap, n_users = ap_metric.shape if ap_metric.ndim == 2 else (0, len(user_prefs))
    match = np.full(n_users, -1, dtype=int)
    nxt = np.zeros(n_users, dtype=int)
    waitlists: list[list[int]] = [[] for _ in range(n_ap)]
    used = np.zeros(n_ap)
    proposals = 0
    rounds = 0
    while True:
        free = [j for j in range(n_users) if match[j] < 0 and nxt[j] < len(user_prefs[j])]
        if not free:
            break
        rounds += 1
        applicants: dict[int, list[int]] = {}
        for j in free:
            ap = int(user_prefs[j][nxt[j]])
            nxt[j] += 1
            proposals += 1
            applicants.setdefault(ap, []).append(j)
        for ap, new in applicants.items():
            pool = waitlists[ap] + new
            pool.sort(key=lambda j: (-ap_metric[ap, j], j))
            keep: list[int] = []
            total = 0.0
            limit = quota[ap] * (1.0 + _QUOTA_RTOL)
            for j in pool:
                if ap_metric[ap, j] <= 0 or total + demand[ap] > limit:
                    break
                keep.append(j)
                total += demand[ap]
            for j in pool[len(keep):]:
                match[j] = -1
            for j in keep:
                match[j] = ap
            waitlists[ap] = keep
            used[ap] = total
    return GameResult(match=match, waitlists=waitlists, used=used, proposals=proposals,
                      rounds=rounds, proposals_per_user=nxt.copy())


def run_matching(prefs: PreferenceTables, quotas: Quotas) -> MatchingState:
    rf = deferred_acceptance(prefs.rf_user_prefs, prefs.ee_rf, quotas.rf, prefs.rf_demand)
    vlc = deferred_acceptance(prefs.vlc_user_prefs, prefs.ee_vlc, quotas.vlc, prefs.vlc_demand)
    return MatchingState(rf=rf, vlc=vlc, rf_fallback=rf.match < 0)


def extract_assignment(matching: MatchingState, n_rf: int | None = None,
                       n_vlc: int | None = None) -> tuple[np.ndarray, np.ndarray]:
    """Binary AP-assignment matrices (K x J, V x J) from a final matching.

    RF-unmatched users land on the macro AP so that every user has exactly one
    RF AP.
    """
    n_users = len(matching.rf.match)
    n_rf = len(matching.rf.waitlists) if n_rf is None else n_rf
    n_vlc = len(matching.vlc.waitlists) if n_vlc is None else n_vlc
    x_rf = np.zeros((max(n_rf, 1), n_users), int)
    x_vlc = np.zeros((n_vlc, n_users), int)
    users = np.arange(n_users)
    x_rf[matching.rf_assignment(), users] = 1
    m = matching.vlc.match >= 0
    x_vlc[matching.vlc.match[m], users[m]] = 1
    return x_rf, x_vlc


def hybrid_assignment(matching: MatchingState, prefs: PreferenceTables,
                      n_rf: int, n_vlc: int) -> tuple[np.ndarray, np.ndarray]:
    """Single-tier assignment: each user keeps whichever of its RF/VLC matches has
    the higher potential EE."""
    x_rf, x_vlc = extract_assignment(matching, n_rf, n_vlc)
    for j in range(x_rf.shape[1]):
        v = matching.vlc.match[j]
        if v < 0:
            continue
        k = matching.rf.match[j]
        rf_metric = prefs.ee_rf[k, j] if k >= 0 else 0.0
        if prefs.ee_vlc[v, j] > rf_metric:
            x_rf[:, j] = 0
        else:
            x_vlc[:, j] = 0
    return x_rf, x_vlc


def _blocking_pair(game: GameResult, user_prefs, ap_metric, quota, demand):
    for j, prefs_j in enumerate(user_prefs):
        current = game.match[j]
        for ap in prefs_j:
            ap = int(ap)
            if ap == current:
                break  # everything further down is worse than the current partner
            if ap_metric[ap, j] <= 0:
                continue
            worse = [i for i in game.waitlists[ap]
                     if (ap_metric[ap, i], -i) < (ap_metric[ap, j], -j)]
            freed = demand[ap] * len(worse)
            if game.used[ap] - freed + demand[ap] <= quota[ap] * (1.0 + _QUOTA_RTOL):
                return j, ap
    return None


def certify_stability(matching: MatchingState, prefs: PreferenceTables,
                      quotas: Quotas) -> tuple[bool, tuple | None]:
    """Exhaustively look for a blocking (user, AP) pair in both games.

    Returns ``(True, None)`` or ``(False, (system, user, ap))``.
    """
    games = (("rf", matching.rf, prefs.rf_user_prefs, prefs.ee_rf, quotas.rf, prefs.rf_demand),
             ("vlc", matching.vlc, prefs.vlc_user_prefs, prefs.ee_vlc, quotas.vlc, prefs.vlc_demand))
    for name, game, up, metric, quota, demand in games:
        hit = _blocking_pair(game, up, metric, quota, demand)
        if hit is not None:
            return False, (name, *hit)
    return True, None


def dump_matching(matching: MatchingState, prefs: PreferenceTables, path: str | Path) -> None:
    """CSV rows (user, rf_ap, vlc_ap_or_none, ee_rf_metric, ee_vlc_metric)."""
    rf = matching.rf_assignment()
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["user", "rf_ap", "vlc_ap", "ee_rf_metric", "ee_vlc_metric"])
        for j in range(len(rf)):
            v = int(matching.vlc.match[j])
            w.writerow([j, int(rf[j]), v if v >= 0 else "none", repr(float(prefs.ee_rf[rf[j], j])),
                        repr(float(prefs.ee_vlc[v, j])) if v >= 0 else ""])
