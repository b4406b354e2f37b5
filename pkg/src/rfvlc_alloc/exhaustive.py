"""Exhaustive search over subchannel grants and quantized powers on tiny instances.

The search space is split into independent clusters: the macro AP, the group
of picocell APs (coupled by co-channel interference and the single-RF-AP
rule) and each room's VLC APs. Every cluster is enumerated in full, options
that are dominated (no better rate for any user, no lower power, no smaller
set of served users) are dropped, and the surviving options are combined to
find the maximum-EE feasible allocation. AP assignment follows from the
grants: a user is assigned to the AP that serves it, or to the macro AP when
no RF AP does.
"""

from __future__ import annotations

import itertools
import time
from dataclasses import dataclass

import numpy as np

from .channel import ChannelState
from .rates import (VLC_SNR_FACTOR, Allocation, evaluate, qos_failures, rf_coef,
                    vlc_coef)
from .scenario import ScenarioConfig

MAX_USERS = 4
MAX_APS = 3
MAX_SUBCHANNELS = 3


class OracleRefusal(ValueError):
    """Instance too large for exhaustive search."""


@dataclass
class _Cluster:
    kind: str                  # "macro", "pico" or "vlc"
    aps: list[int]             # local AP indices within the tier
    rates: np.ndarray          # (n_opt, J)
    power: np.ndarray          # (n_opt,)
    holders: np.ndarray        # (n_opt, J) bool: user holds a subchannel in this cluster
    users: np.ndarray          # (n_opt, n_aps, N) user per subchannel, -1 if idle
    levels: np.ndarray         # (n_opt, n_aps, N) power level index


def _ap_options(eligible_users, n_sub, n_levels):
    """All (user, level) grant patterns of one AP whose level sum fits the budget."""
    choices = [(-1, 0)] + [(u, l) for u in eligible_users for l in range(1, n_levels)]
    users, levels = [], []
    for combo in itertools.product(choices, repeat=n_sub):
        if sum(l for _, l in combo) <= n_levels - 1:
            users.append([u for u, _ in combo])
            levels.append([l for _, l in combo])
    return np.array(users, int).reshape(-1, n_sub), np.array(levels, int).reshape(-1, n_sub)


def _enumerate_cluster(kind, aps, coef, w, c, noise, budget, eligible, n_users, n_sub, n_levels):
    """Enumerate a cluster; ``coef[a, j, n]`` is the power coefficient from AP ``a``."""
    per_ap = [_ap_options(np.nonzero(eligible[i])[0], n_sub, n_levels) for i in range(len(aps))]
    grids = np.meshgrid(*[np.arange(len(u)) for u, _ in per_ap], indexing="ij")
    idx = [g.ravel() for g in grids]
    users = np.stack([per_ap[i][0][idx[i]] for i in range(len(aps))], axis=1)   # (O, A, N)
    levels = np.stack([per_ap[i][1][idx[i]] for i in range(len(aps))], axis=1)
    power = levels * (budget / (n_levels - 1))                                 # (O, A, N)

    holds = np.zeros((len(users), len(aps), n_users), bool)
    for a in range(len(aps)):
        for n in range(n_sub):
            u = users[:, a, n]
            m = u >= 0
            holds[np.nonzero(m)[0], a, u[m]] = True
    # a user may hold subchannels of at most one AP in the cluster
    ok = holds.sum(axis=1).max(axis=1) <= 1
    users, levels, power, holds = users[ok], levels[ok], power[ok], holds[ok]

    rates = np.zeros((len(users), n_users))
    for a in range(len(aps)):
        for n in range(n_sub):
            u = users[:, a, n]
            m = u >= 0
            if not np.any(m):
                continue
            uu = u[m]
            sig = power[m, a, n] * coef[a, uu, n]
            interf = np.zeros(len(uu))
            for b in range(len(aps)):
                if b != a:
                    active = users[m, b, n] >= 0
                    interf += active * power[m, b, n] * coef[b, uu, n]
            r = w[a, uu, n] * np.log2(1.0 + c * sig / (interf + noise))
            np.add.at(rates, (np.nonzero(m)[0], uu), r)
    cl = _Cluster(kind=kind, aps=list(aps), rates=rates, power=power.sum(axis=(1, 2)),
                  holders=holds.any(axis=1), users=users, levels=levels)
    return _prune(cl)


def _prune(cl: _Cluster) -> _Cluster:
    """Drop options dominated by another with holders subset, rates >= and power <=."""
    order = np.lexsort((-cl.rates.sum(axis=1), cl.power))
    keep: list[int] = []
    for i in order:
        dominated = False
        for k in keep:
            if (cl.power[k] <= cl.power[i] and np.all(cl.rates[k] >= cl.rates[i])
                    and np.all(cl.holders[k] <= cl.holders[i])):
                dominated = True
                break
        if not dominated:
            keep.append(i)
    keep_arr = np.array(keep, int)
    return _Cluster(cl.kind, cl.aps, cl.rates[keep_arr], cl.power[keep_arr], cl.holders[keep_arr],
                    cl.users[keep_arr], cl.levels[keep_arr])


def check_oracle_size(config: ScenarioConfig, state: ChannelState) -> None:
    n_aps = 1 + state.n_pico + state.n_vlc
    if state.n_users > MAX_USERS or n_aps > MAX_APS or state.n_sub > MAX_SUBCHANNELS:
        raise OracleRefusal(
            f"exhaustive search limited to {MAX_USERS} users, {MAX_APS} APs and "
            f"{MAX_SUBCHANNELS} subchannels; got {state.n_users} users, {n_aps} APs, "
            f"{state.n_sub} subchannels")


def _clusters(config: ScenarioConfig, state: ChannelState, n_levels: int,
              vlc_rooms: np.ndarray | None):
    J, N = state.n_users, state.n_sub
    out = []
    g = rf_coef(state.g_macro[None], config)                         # (1, J, N)
    w = np.full_like(g, config.bandwidth_rf)
    out.append(_enumerate_cluster("macro", [0], g, w, 1.0, config.noise_rf, config.p_macro_budget,
                                  np.ones((1, J), bool), J, N, n_levels))
    if state.n_pico:
        g = rf_coef(state.g_pico, config)
        w = np.full_like(g, config.bandwidth_rf)
        out.append(_enumerate_cluster("pico", list(range(state.n_pico)), g, w, 1.0,
                                      config.noise_rf, config.p_pico_budget, state.pico_coverage,
                                      J, N, n_levels))
    if state.n_vlc:
        rooms = np.zeros(state.n_vlc, int) if vlc_rooms is None else vlc_rooms
        for r in np.unique(rooms):
            aps = list(np.nonzero(rooms == r)[0])
            g = vlc_coef(state.g_vlc[aps], config)
            w = state.rho[aps] * config.bandwidth_vlc
            out.append(_enumerate_cluster("vlc", aps, g, w, VLC_SNR_FACTOR, config.noise_vlc,
                                          config.p_vlc_budget, state.vlc_eligible()[aps],
                                          J, N, n_levels))
    return out


def _best_combination(clusters, config: ScenarioConfig, enforce_qos: bool):
    """Index of the max-EE feasible option in every cluster."""
    sizes = [len(c.power) for c in clusters]
    grids = np.meshgrid(*[np.arange(s) for s in sizes], indexing="ij")
    idx = [g.ravel() for g in grids]
    rates = sum(c.rates[i] for c, i in zip(clusters, idx))
    power = sum(c.power[i] for c, i in zip(clusters, idx))
    holders = np.zeros_like(rates, dtype=bool)
    for c, i in zip(clusters, idx):
        holders |= c.holders[i]
    ok = np.ones(len(power), bool)
    macro = next(k for k, c in enumerate(clusters) if c.kind == "macro")
    for k, c in enumerate(clusters):
        if c.kind == "pico":
            ok &= ~np.any(clusters[macro].holders[idx[macro]] & c.holders[idx[k]], axis=1)
    if enforce_qos:
        ok &= np.all(~holders | (rates >= config.r_min * (1.0 - 1e-9)), axis=1)
    if not np.any(ok):
        return None
    total = config.circuit_power_total + power
    ee = np.where(ok, rates.sum(axis=1) / total, -np.inf)
    best = int(np.argmax(ee))
    return [int(i[best]) for i in idx]


def _to_allocation(clusters, choice, state: ChannelState, config: ScenarioConfig, n_levels):
    J, N = state.n_users, state.n_sub
    alloc = Allocation.empty(state.n_pico, state.n_vlc, J, N)
    for cl, o in zip(clusters, choice):
        budget = {"macro": config.p_macro_budget, "pico": config.p_pico_budget,
                  "vlc": config.p_vlc_budget}[cl.kind]
        for a_local, ap in enumerate(cl.aps):
            for n in range(N):
                u = cl.users[o, a_local, n]
                if u < 0:
                    continue
                p = cl.levels[o, a_local, n] * budget / (n_levels - 1)
                if cl.kind == "macro":
                    alloc.s_macro[u, n], alloc.p_macro[u, n] = 1, p
                    alloc.x_rf[0, u] = 1
                elif cl.kind == "pico":
                    alloc.s_pico[ap, u, n], alloc.p_pico[ap, u, n] = 1, p
                    alloc.x_rf[1 + ap, u] = 1
                else:
                    alloc.s_vlc[ap, u, n], alloc.p_vlc[ap, u, n] = 1, p
                    alloc.x_vlc[ap, u] = 1
    unassigned = alloc.x_rf.sum(axis=0) == 0
    alloc.x_rf[0, unassigned] = 1
    alloc.a = (alloc.subchannel_counts() > 0).astype(int)
    return alloc


def run_exhaustive(config: ScenarioConfig, state: ChannelState, power_levels: int, *,
                   seed: int | None = None, enforce_qos: bool = True,
                   vlc_rooms: np.ndarray | None = None):
    """Maximum-EE allocation over all grants and ``power_levels`` powers per subchannel.

    Power level ``i`` on an AP is ``i / (power_levels - 1)`` of its budget, so
    the grid includes 0 and the full budget. With ``enforce_qos`` every user
    holding a subchannel must reach R_min. ``vlc_rooms`` gives the room of each
    VLC AP (APs of different rooms do not interfere); by default all VLC APs
    form one cluster.
    """
    from .schemes import RunResult, SchemeId

    if power_levels < 2:
        raise ValueError("power_levels must be at least 2 (zero and full budget)")
    check_oracle_size(config, state)
    t0 = time.perf_counter()
    clusters = _clusters(config, state, power_levels, vlc_rooms)
    choice = _best_combination(clusters, config, enforce_qos)
    if choice is None:
        # the all-idle option always satisfies QoS, so this only happens without users
        choice = [int(np.argmin(c.power)) for c in clusters]
    alloc = _to_allocation(clusters, choice, state, config, power_levels)
    ev = evaluate(alloc, state, config)
    return RunResult(scheme=SchemeId.EXHAUSTIVE_ORACLE.value,
                     seed=config.seed if seed is None else seed, evaluated=ev,
                     outage_count=qos_failures(ev, config), iterations_used=1,
                     wall_time=time.perf_counter() - t0, allocation=alloc, ee_trace=[ev.ee])
