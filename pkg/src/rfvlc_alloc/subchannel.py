"""Subchannel allocation for a fixed AP assignment.

``allocate_scg`` grants every subchannel of an AP to the assigned user with the
strongest gain on it. ``allocate_qos_first`` approximates a QoS-driven
baseline: users are first served in lowest-rate-first order until their
estimated rate reaches R_min, then leftovers follow the SCG rule.
"""

from __future__ import annotations

import numpy as np

from .channel import ChannelState
from .rates import (VLC_SNR_FACTOR, Allocation, ConstraintViolation, rf_coef,
                    vlc_coef)
from .scenario import ScenarioConfig


def _tier_gains(state: ChannelState):
    """(K+V) per-AP gain tables of shape (J, N) with the AP's assignment row index."""
    tables = [("macro", 0, state.g_macro)]
    tables += [("pico", k, state.g_pico[k]) for k in range(state.n_pico)]
    tables += [("vlc", v, state.g_vlc[v]) for v in range(state.n_vlc)]
    return tables


def _assigned(x_rf, x_vlc, tier: str, idx: int) -> np.ndarray:
    if tier == "macro":
        return np.nonzero(x_rf[0])[0]
    if tier == "pico":
        return np.nonzero(x_rf[1 + idx])[0]
    return np.nonzero(x_vlc[idx])[0]


def _grant(s_macro, s_pico, s_vlc, tier, idx, user, sub):
    if tier == "macro":
        s_macro[user, sub] = 1
    elif tier == "pico":
        s_pico[idx, user, sub] = 1
    else:
        s_vlc[idx, user, sub] = 1


def _empty_grants(state: ChannelState):
    J, N = state.n_users, state.n_sub
    return (np.zeros((J, N), int), np.zeros((state.n_pico, J, N), int),
            np.zeros((state.n_vlc, J, N), int))


def _outage_flags(s_macro, s_pico, s_vlc) -> np.ndarray:
    held = s_macro.sum(axis=1) + s_pico.sum(axis=(0, 2)) + s_vlc.sum(axis=(0, 2))
    return (held > 0).astype(int)


def allocate_scg(x_rf: np.ndarray, x_vlc: np.ndarray, state: ChannelState):
    """Per AP and subchannel, grant to the assigned user with the largest gain.

    Returns ``((s_macro, s_pico, s_vlc), a)`` where ``a[j] = 0`` flags outage
    (no subchannel on any tier).
    """
    s_macro, s_pico, s_vlc = _empty_grants(state)
    for tier, idx, gains in _tier_gains(state):
        users = _assigned(x_rf, x_vlc, tier, idx)
        if len(users) == 0:
            continue
        # argmax returns the first maximum, i.e. the lowest user index on ties
        winners = users[np.argmax(gains[users], axis=0)]
        for sub, user in enumerate(winners):
            _grant(s_macro, s_pico, s_vlc, tier, idx, user, sub)
    return (s_macro, s_pico, s_vlc), _outage_flags(s_macro, s_pico, s_vlc)


def allocate_qos_first(x_rf: np.ndarray, x_vlc: np.ndarray, state: ChannelState,
                       config: ScenarioConfig):
    """QoS-first allocation followed by SCG on the leftover subchannels.

    Subchannel rates are estimated at equal power split without interference.
    """
    s_macro, s_pico, s_vlc = _empty_grants(state)
    J, N = state.n_users, state.n_sub
    budgets = {"macro": config.p_macro_budget, "pico": config.p_pico_budget,
               "vlc": config.p_vlc_budget}

    # estimated rate of every (AP, user, subchannel) option at equal power
    options: list[list[tuple[float, str, int, int]]] = [[] for _ in range(J)]
    tables = _tier_gains(state)
    for tier, idx, gains in tables:
        p = budgets[tier] / N
        if tier == "vlc":
            rate = (state.rho[idx] * config.bandwidth_vlc
                    * np.log2(1.0 + VLC_SNR_FACTOR * p * vlc_coef(gains, config) / config.noise_vlc))
        else:
            rate = config.bandwidth_rf * np.log2(1.0 + p * rf_coef(gains, config) / config.noise_rf)
        for j in _assigned(x_rf, x_vlc, tier, idx):
            for n in range(N):
                options[j].append((float(rate[j, n]), tier, idx, n))
    for opts in options:
        opts.sort(key=lambda o: -o[0])  # stable: ties keep tier/AP/subchannel order

    taken: set[tuple[str, int, int]] = set()
    est = np.zeros(J)
    pointer = np.zeros(J, int)

    def next_free(j):
        while pointer[j] < len(options[j]):
            _, tier, idx, n = options[j][pointer[j]]
            if (tier, idx, n) not in taken:
                return options[j][pointer[j]]
            pointer[j] += 1
        return None

    while True:
        hungry = [j for j in range(J) if est[j] < config.r_min and next_free(j) is not None]
        if not hungry:
            break
        j = min(hungry, key=lambda u: (est[u], u))
        rate, tier, idx, n = next_free(j)
        taken.add((tier, idx, n))
        _grant(s_macro, s_pico, s_vlc, tier, idx, j, n)
        est[j] += rate

    for tier, idx, gains in tables:
        users = _assigned(x_rf, x_vlc, tier, idx)
        if len(users) == 0:
            continue
        winners = users[np.argmax(gains[users], axis=0)]
        for n, user in enumerate(winners):
            if (tier, idx, n) not in taken:
                _grant(s_macro, s_pico, s_vlc, tier, idx, user, n)
    return (s_macro, s_pico, s_vlc), _outage_flags(s_macro, s_pico, s_vlc)


def validate_sa(s, x_rf: np.ndarray, x_vlc: np.ndarray) -> None:
    """Check C1 (grants only from assigned APs), C4 (one user per subchannel)
    and C5 (outage consistency is implied by deriving ``a`` from ``s``).

    Raises :class:`ConstraintViolation` naming the constraint and indices.
    """
    s_macro, s_pico, s_vlc = s
    checks = (("macro", s_macro[None], x_rf[:1]), ("pico", s_pico, x_rf[1:]),
              ("vlc", s_vlc, x_vlc))
    for tier, grants, x in checks:
        if grants.size == 0:
            continue
        if np.any((grants != 0) & (grants != 1)):
            idx = tuple(int(i) for i in np.argwhere((grants != 0) & (grants != 1))[0])
            raise ConstraintViolation("C10", f"{tier} grant not binary at {idx}", idx)
        bad = grants > x[:, :, None]
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise ConstraintViolation("C1", f"{tier} subchannel granted to unassigned user at {idx}", idx)
        shared = grants.sum(axis=1) > 1
        if np.any(shared):
            ap, sub = (int(i) for i in np.argwhere(shared)[0])
            raise ConstraintViolation("C4", f"{tier} AP {ap} subchannel {sub} granted twice", (ap, sub))


def build_allocation(x_rf, x_vlc, s, a, hybrid: bool = False) -> Allocation:
    """Allocation with zero power from an assignment and subchannel grants."""
    s_macro, s_pico, s_vlc = s
    z = np.zeros
    return Allocation(x_rf=np.asarray(x_rf, int), x_vlc=np.asarray(x_vlc, int),
                      s_macro=s_macro, s_pico=s_pico, s_vlc=s_vlc,
                      p_macro=z(s_macro.shape), p_pico=z(s_pico.shape), p_vlc=z(s_vlc.shape),
                      a=np.asarray(a, int), hybrid=hybrid)
