"""Achievable rates, power consumption and energy efficiency of an allocation.

Also holds the structural feasibility checks (C1-C7, C9-C12) and ``LinkSet``,
a flat view of the active (AP, user, subchannel) links that the power
optimizer works on.

Constraint labels used in :class:`ConstraintViolation`:

    C1   subchannels only from an assigned AP
    C2   0 <= p <= s * budget per subchannel (C9: p >= 0)
    C3   per-AP power within budget
    C4   at most one user per subchannel of an AP
    C5   outage users hold no subchannel
    C6   exactly one RF AP per user (hybrid: exactly one AP of any tier)
    C7   at most one VLC AP per user
    C8   minimum rate R_min for served users
    C10-C12  s, x and a are binary
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Iterable, Sequence

import numpy as np

from .channel import ChannelState
from .scenario import ScenarioConfig

VLC_SNR_FACTOR = math.e / (2.0 * math.pi)
TIER_MACRO, TIER_PICO, TIER_VLC = 0, 1, 2
_REL_TOL = 1e-9
QOS_RTOL = 1e-6


class ConstraintViolation(ValueError):
    """An allocation breaks one of the structural constraints of the EE problem."""

    def __init__(self, constraint: str, message: str, indices: tuple = ()):
        super().__init__(f"{constraint}: {message}")
        self.constraint = constraint
        self.indices = indices


def rf_coef(gain, config: ScenarioConfig):
    """Power coefficient entering the RF SINR for a channel gain."""
    g = np.asarray(gain, dtype=float)
    return g * g if config.square_rf_gain else g


def vlc_coef(gain, config: ScenarioConfig):
    g = config.pd_responsivity * np.asarray(gain, dtype=float)
    return g * g


def _interference(terms: Iterable[tuple[float, float]], coef) -> float:
    return float(sum(p * coef(g) for p, g in terms))


def rate_macro(p: float, gain: float, config: ScenarioConfig) -> float:
    """Shannon rate on one macro subchannel (bit/s)."""
    if p < 0:
        raise ValueError("power must be non-negative")
    snr = p * rf_coef(gain, config) / config.noise_rf
    return float(config.bandwidth_rf * np.log2(1.0 + snr))


def rate_pico(p: float, gain: float, interference_terms: Sequence[tuple[float, float]],
              config: ScenarioConfig) -> float:
    """Rate on one picocell subchannel; ``interference_terms`` are (power, gain)
    pairs of co-channel picocell transmissions towards this user."""
    if p < 0:
        raise ValueError("power must be non-negative")
    interf = _interference(interference_terms, lambda g: rf_coef(g, config))
    sinr = p * rf_coef(gain, config) / (interf + config.noise_rf)
    return float(config.bandwidth_rf * np.log2(1.0 + sinr))


def rate_vlc(p: float, gain: float, rho: float, interference_terms: Sequence[tuple[float, float]],
             config: ScenarioConfig) -> float:
    """Lower bound on the VLC rate of one subchannel."""
    if p < 0:
        raise ValueError("power must be non-negative")
    interf = _interference(interference_terms, lambda g: vlc_coef(g, config))
    sinr = p * vlc_coef(gain, config) / (interf + config.noise_vlc)
    return float(rho * config.bandwidth_vlc * np.log2(1.0 + VLC_SNR_FACTOR * sinr))


@dataclass
class Allocation:
    x_rf: np.ndarray      # (K, J) AP assignment, row 0 = macro
    x_vlc: np.ndarray     # (V, J)
    s_macro: np.ndarray   # (J, N)
    s_pico: np.ndarray    # (K-1, J, M)
    s_vlc: np.ndarray     # (V, J, Q)
    p_macro: np.ndarray
    p_pico: np.ndarray
    p_vlc: np.ndarray
    a: np.ndarray         # (J,) 1 = served, 0 = outage
    hybrid: bool = False

    @classmethod
    def empty(cls, n_pico: int, n_vlc: int, n_users: int, n_sub: int, hybrid: bool = False):
        z = np.zeros
        return cls(
            x_rf=z((1 + n_pico, n_users), int), x_vlc=z((n_vlc, n_users), int),
            s_macro=z((n_users, n_sub), int), s_pico=z((n_pico, n_users, n_sub), int),
            s_vlc=z((n_vlc, n_users, n_sub), int),
            p_macro=z((n_users, n_sub)), p_pico=z((n_pico, n_users, n_sub)),
            p_vlc=z((n_vlc, n_users, n_sub)), a=z(n_users, int), hybrid=hybrid,
        )

    @property
    def n_users(self) -> int:
        return self.x_rf.shape[1]

    def subchannel_counts(self) -> np.ndarray:
        return (self.s_macro.sum(axis=1) + self.s_pico.sum(axis=(0, 2))
                + self.s_vlc.sum(axis=(0, 2)))

    def with_powers(self, p_macro, p_pico, p_vlc) -> "Allocation":
        return replace(self, p_macro=np.asarray(p_macro, float), p_pico=np.asarray(p_pico, float),
                       p_vlc=np.asarray(p_vlc, float))

    def equal_power(self, config: ScenarioConfig) -> "Allocation":
        """EPA: every granted subchannel gets budget / number of subchannels."""
        n = self.s_macro.shape[1]
        return self.with_powers(self.s_macro * config.p_macro_budget / n,
                                self.s_pico * config.p_pico_budget / n,
                                self.s_vlc * config.p_vlc_budget / n)

    def copy(self) -> "Allocation":
        return replace(self, **{f: getattr(self, f).copy() for f in
                                ("x_rf", "x_vlc", "s_macro", "s_pico", "s_vlc",
                                 "p_macro", "p_pico", "p_vlc", "a")})


@dataclass(frozen=True)
class EvaluatedAllocation:
    per_user_rate: np.ndarray
    sum_rate: float
    total_power: float
    ee: float
    transmit_power: float = 0.0


def _check_binary(name: str, arr: np.ndarray, constraint: str) -> None:
    if not np.all((arr == 0) | (arr == 1)):
        idx = tuple(np.argwhere((arr != 0) & (arr != 1))[0])
        raise ConstraintViolation(constraint, f"{name} is not binary at {idx}", idx)


def check_allocation(alloc: Allocation, config: ScenarioConfig) -> None:
    """Raise :class:`ConstraintViolation` if any structural constraint fails.

    Covers C1-C7 and C9-C12; QoS (C8) is reported separately by
    :func:`check_qos`. In hybrid mode C6/C7 are replaced by the single-AP rule
    sum(x_rf) + sum(x_vlc) == 1.
    """
    for name in ("s_macro", "s_pico", "s_vlc"):
        _check_binary(name, getattr(alloc, name), "C10")
    _check_binary("x_rf", alloc.x_rf, "C11")
    _check_binary("x_vlc", alloc.x_vlc, "C11")
    _check_binary("a", alloc.a, "C12")

    # C1: subchannel only from an assigned AP
    pairs = (
        ("macro", alloc.s_macro, alloc.x_rf[0][:, None]),
        ("pico", alloc.s_pico, alloc.x_rf[1:][:, :, None]),
        ("vlc", alloc.s_vlc, alloc.x_vlc[:, :, None]),
    )
    for tier, s, x in pairs:
        bad = s > x
        if np.any(bad):
            idx = tuple(int(i) for i in np.argwhere(bad)[0])
            raise ConstraintViolation("C1", f"{tier} subchannel granted to unassigned user at {idx}", idx)

    budgets = (("macro", alloc.p_macro, alloc.s_macro, config.p_macro_budget),
               ("pico", alloc.p_pico, alloc.s_pico, config.p_pico_budget),
               ("vlc", alloc.p_vlc, alloc.s_vlc, config.p_vlc_budget))
    for tier, p, s, budget in budgets:
        if np.any(p < 0):
            idx = tuple(int(i) for i in np.argwhere(p < 0)[0])
            raise ConstraintViolation("C9", f"negative {tier} power at {idx}", idx)
        over = p > s * budget * (1 + _REL_TOL) + 1e-15
        if np.any(over):
            idx = tuple(int(i) for i in np.argwhere(over)[0])
            raise ConstraintViolation("C2", f"{tier} power exceeds s*budget at {idx}", idx)
        per_ap = p.sum() if tier == "macro" else p.sum(axis=(1, 2))
        per_ap = np.atleast_1d(per_ap)
        if np.any(per_ap > budget * (1 + _REL_TOL)):
            idx = (int(np.argmax(per_ap)),)
            raise ConstraintViolation("C3", f"{tier} AP {idx[0]} exceeds its power budget", idx)

    # C4: one user per subchannel per AP
    if np.any(alloc.s_macro.sum(axis=0) > 1):
        n = int(np.argmax(alloc.s_macro.sum(axis=0)))
        raise ConstraintViolation("C4", f"macro subchannel {n} shared", (0, n))
    for tier, s in (("pico", alloc.s_pico), ("vlc", alloc.s_vlc)):
        shared = s.sum(axis=1) > 1
        if np.any(shared):
            idx = tuple(int(i) for i in np.argwhere(shared)[0])
            raise ConstraintViolation("C4", f"{tier} subchannel shared at {idx}", idx)

    # C5 (with C12): outage users hold nothing
    held = alloc.subchannel_counts()
    bad = (alloc.a == 0) & (held > 0)
    if np.any(bad):
        j = int(np.argmax(bad))
        raise ConstraintViolation("C5", f"user {j} flagged in outage but holds subchannels", (j,))

    rf = alloc.x_rf.sum(axis=0)
    vlc = alloc.x_vlc.sum(axis=0)
    if alloc.hybrid:
        bad = rf + vlc != 1
        if np.any(bad):
            j = int(np.argmax(bad))
            raise ConstraintViolation("C6", f"hybrid user {j} must have exactly one AP", (j,))
    else:
        if np.any(rf != 1):
            j = int(np.argmax(rf != 1))
            raise ConstraintViolation("C6", f"user {j} has {rf[j]} RF APs", (j,))
        if np.any(vlc > 1):
            j = int(np.argmax(vlc > 1))
            raise ConstraintViolation("C7", f"user {j} has {vlc[j]} VLC APs", (j,))


@dataclass
class LinkSet:
    """Active links of an allocation in flat form.

    For link ``l`` the rate is ``w[l] * log2(1 + c[l] * sinr[l])`` with
    ``sinr = a * p / (n + B @ p)``. ``group`` maps each link to its AP
    (0 = macro, 1..P = picos, P+1.. = VLC APs); ``budget[group]`` is that
    AP's power budget.
    """

    tier: np.ndarray
    ap: np.ndarray          # local AP index within the tier
    user: np.ndarray
    sub: np.ndarray
    group: np.ndarray
    a: np.ndarray
    w: np.ndarray
    c: np.ndarray
    n: np.ndarray
    B: np.ndarray
    budget: np.ndarray      # per group (all APs, including idle ones)
    n_users: int
    shapes: tuple = field(default=())

    @property
    def size(self) -> int:
        return len(self.a)

    @classmethod
    def from_allocation(cls, alloc: Allocation, state: ChannelState,
                        config: ScenarioConfig) -> "LinkSet":
        n_pico, n_vlc = state.n_pico, state.n_vlc
        rows = []  # (tier, ap, user, sub)
        for j, n in np.argwhere(alloc.s_macro == 1):
            rows.append((TIER_MACRO, 0, j, n))
        for k, j, m in np.argwhere(alloc.s_pico == 1):
            rows.append((TIER_PICO, k, j, m))
        for v, j, q in np.argwhere(alloc.s_vlc == 1):
            rows.append((TIER_VLC, v, j, q))
        arr = np.array(rows, dtype=int).reshape(-1, 4)
        tier, ap, user, sub = arr.T
        L = len(arr)
        a = np.zeros(L)
        w = np.zeros(L)
        c = np.ones(L)
        noise = np.zeros(L)
        group = np.zeros(L, int)
        B = np.zeros((L, L))
        for i in range(L):
            t, k, j, q = arr[i]
            if t == TIER_MACRO:
                a[i] = rf_coef(state.g_macro[j, q], config)
                w[i], noise[i] = config.bandwidth_rf, config.noise_rf
            elif t == TIER_PICO:
                a[i] = rf_coef(state.g_pico[k, j, q], config)
                w[i], noise[i] = config.bandwidth_rf, config.noise_rf
                group[i] = 1 + k
            else:
                a[i] = vlc_coef(state.g_vlc[k, j, q], config)
                w[i] = state.rho[k, j, q] * config.bandwidth_vlc
                c[i] = VLC_SNR_FACTOR
                noise[i] = config.noise_vlc
                group[i] = 1 + n_pico + k
        # co-channel interference within the pico tier and within the VLC tier
        for i in range(L):
            t, k, j, q = arr[i]
            if t == TIER_MACRO:
                continue
            others = np.nonzero((tier == t) & (sub == q) & (ap != k))[0]
            for o in others:
                if t == TIER_PICO:
                    B[i, o] = rf_coef(state.g_pico[ap[o], j, q], config)
                else:
                    B[i, o] = vlc_coef(state.g_vlc[ap[o], j, q], config)
        budget = np.concatenate([[config.p_macro_budget], np.full(n_pico, config.p_pico_budget),
                                 np.full(n_vlc, config.p_vlc_budget)])
        shapes = (alloc.p_macro.shape, alloc.p_pico.shape, alloc.p_vlc.shape)
        return cls(tier=tier, ap=ap, user=user, sub=sub, group=group, a=a, w=w, c=c, n=noise,
                   B=B, budget=budget, n_users=alloc.n_users, shapes=shapes)

    # power vector <-> allocation arrays ---------------------------------
    def powers_from(self, alloc: Allocation) -> np.ndarray:
        p = np.empty(self.size)
        for i in range(self.size):
            t, k, j, q = self.tier[i], self.ap[i], self.user[i], self.sub[i]
            if t == TIER_MACRO:
                p[i] = alloc.p_macro[j, q]
            elif t == TIER_PICO:
                p[i] = alloc.p_pico[k, j, q]
            else:
                p[i] = alloc.p_vlc[k, j, q]
        return p

    def power_arrays(self, p: np.ndarray):
        pm, pp, pv = (np.zeros(s) for s in self.shapes)
        m = self.tier == TIER_MACRO
        pm[self.user[m], self.sub[m]] = p[m]
        m = self.tier == TIER_PICO
        pp[self.ap[m], self.user[m], self.sub[m]] = p[m]
        m = self.tier == TIER_VLC
        pv[self.ap[m], self.user[m], self.sub[m]] = p[m]
        return pm, pp, pv

    def equal_power(self) -> np.ndarray:
        n_sub = self.shapes[0][1] if self.shapes else 1
        return self.budget[self.group] / n_sub

    # rates ----------------------------------------------------------------
    def interference(self, p: np.ndarray) -> np.ndarray:
        return self.B @ p

    def sinr(self, p: np.ndarray) -> np.ndarray:
        return self.a * p / (self.n + self.B @ p)

    def rates(self, p: np.ndarray) -> np.ndarray:
        return self.w * np.log2(1.0 + self.c * self.sinr(p))

    def user_rates(self, p: np.ndarray) -> np.ndarray:
        return np.bincount(self.user, weights=self.rates(p), minlength=self.n_users)

    def group_power(self, p: np.ndarray) -> np.ndarray:
        return np.bincount(self.group, weights=p, minlength=len(self.budget))


def evaluate(alloc: Allocation, state: ChannelState, config: ScenarioConfig,
             links: LinkSet | None = None) -> EvaluatedAllocation:
    """Rates, total consumed power and EE of a structurally valid allocation."""
    check_allocation(alloc, config)
    links = links or LinkSet.from_allocation(alloc, state, config)
    p = links.powers_from(alloc)
    per_user = links.user_rates(p) if links.size else np.zeros(alloc.n_users)
    sum_rate = float(per_user.sum())
    transmit = float(alloc.p_macro.sum() + alloc.p_pico.sum() + alloc.p_vlc.sum())
    total = config.circuit_power_total + transmit
    ee = sum_rate / total if total > 0 else 0.0
    return EvaluatedAllocation(per_user_rate=per_user, sum_rate=sum_rate, total_power=total,
                               ee=ee, transmit_power=transmit)


def check_qos(evaluated: EvaluatedAllocation, alloc: Allocation,
              config: ScenarioConfig) -> np.ndarray:
    """Per-user C8 status: R_j >= R_min * a_j."""
    return evaluated.per_user_rate >= config.r_min * alloc.a


def qos_failures(evaluated: EvaluatedAllocation, config: ScenarioConfig) -> int:
    """Users whose minimum rate is not met, outage users included."""
    return int(np.sum(evaluated.per_user_rate < config.r_min * (1.0 - QOS_RTOL)))
