"""Joint allocation schemes: proposed (alternating and one-shot), benchmarks, hybrid.

Every scheme goes AP assignment -> subchannel allocation -> power allocation
and returns a :class:`RunResult` holding the evaluated allocation.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from .channel import ChannelState
from .matching import (MatchingState, PreferenceTables, Quotas, build_preferences,
                       extract_assignment, hybrid_assignment, run_matching)
from .power import ParetoFrontier, sweep_pareto
from .rates import Allocation, EvaluatedAllocation, LinkSet, evaluate, qos_failures, rf_coef
from .scenario import ScenarioConfig
from .subchannel import allocate_qos_first, allocate_scg, build_allocation, validate_sa

EE_REL_TOL = 1e-3
MIN_FEEDBACK_FRACTION = 1e-3


class SchemeId(str, Enum):
    PROPOSED_ITERATIVE = "proposed-iterative"
    PROPOSED_ONESHOT = "proposed-oneshot"
    SCG_SCG_EPA = "scg-scg-epa"
    BASELINE_APPROX = "baseline-approx"
    HYBRID_ITERATIVE = "hybrid-iterative"
    EXHAUSTIVE_ORACLE = "exhaustive-oracle"


@dataclass
class RunResult:
    scheme: str
    seed: int
    evaluated: EvaluatedAllocation
    outage_count: int
    iterations_used: int
    wall_time: float
    allocation: Allocation
    ee_trace: list[float] = field(default_factory=list)
    frontier: ParetoFrontier | None = None
    matching: MatchingState | None = None
    preferences: PreferenceTables | None = None
    notes: list[str] = field(default_factory=list)

    @property
    def ee(self) -> float:
        return self.evaluated.ee


def optimize_power(alloc: Allocation, state: ChannelState, config: ScenarioConfig):
    """Best-EE point of the epsilon-constraint sweep for fixed (x, s)."""
    links = LinkSet.from_allocation(alloc, state, config)
    frontier = sweep_pareto(links, config)
    if frontier.best is None:
        out = alloc.with_powers(*links.power_arrays(np.zeros(links.size)))
    else:
        out = alloc.with_powers(*links.power_arrays(frontier.best.p))
    return out, frontier, links


def _pipeline(x_rf, x_vlc, state, config, *, sa: str, pa: str, hybrid: bool = False):
    if sa == "scg":
        s, a = allocate_scg(x_rf, x_vlc, state)
    else:
        s, a = allocate_qos_first(x_rf, x_vlc, state, config)
    validate_sa(s, x_rf, x_vlc)
    alloc = build_allocation(x_rf, x_vlc, s, a, hybrid=hybrid)
    if pa == "epa":
        alloc = alloc.equal_power(config)
        links = LinkSet.from_allocation(alloc, state, config)
        frontier = None
    else:
        alloc, frontier, links = optimize_power(alloc, state, config)
    return alloc, evaluate(alloc, state, config, links), frontier


def _feedback_powers(alloc: Allocation, config: ScenarioConfig, n_sub: int):
    """Average optimized power per served user of each AP, used as the next
    pass's reserved power. Idle APs fall back to budget / subchannels."""
    def per_ap(power, users, budget):
        default = budget / n_sub
        busy = (users > 0) & (power > 0)
        avg = power / np.maximum(users, 1)
        return np.where(busy, np.maximum(avg, MIN_FEEDBACK_FRACTION * default), default)

    n_pico = alloc.p_pico.shape[0]
    rf_power = np.concatenate([[alloc.p_macro.sum()], alloc.p_pico.sum(axis=(1, 2))])
    rf_budget = np.concatenate([[config.p_macro_budget], np.full(n_pico, config.p_pico_budget)])
    rf = per_ap(rf_power, alloc.x_rf.sum(axis=1), rf_budget)
    vlc = per_ap(alloc.p_vlc.sum(axis=(1, 2)), alloc.x_vlc.sum(axis=1), config.p_vlc_budget)
    return rf, vlc


def run_alternating(config: ScenarioConfig, state: ChannelState, *, seed: int | None = None,
                    max_outer: int | None = None, hybrid: bool = False,
                    scheme: str = SchemeId.PROPOSED_ITERATIVE.value) -> RunResult:
    """Matching -> SCG subchannels -> EE power allocation, repeated with the
    optimized powers fed back into the matching preferences.

    Stops when EE improves by at most ``EE_REL_TOL`` (relative) or after
    ``max_outer`` passes. The incumbent with the best EE is kept, so the
    reported EE trace is non-decreasing.
    """
    t0 = time.perf_counter()
    max_outer = config.max_outer_iterations if max_outer is None else max_outer
    quotas = Quotas.from_config(config, state.n_pico, state.n_vlc)
    rf_power = vlc_power = None
    best = None
    trace: list[float] = []
    notes: list[str] = []
    passes = 0
    for passes in range(1, max_outer + 1):
        prefs = build_preferences(state, config, rf_power, vlc_power)
        matching = run_matching(prefs, quotas)
        if hybrid:
            x_rf, x_vlc = hybrid_assignment(matching, prefs, 1 + state.n_pico, state.n_vlc)
        else:
            x_rf, x_vlc = extract_assignment(matching, 1 + state.n_pico, state.n_vlc)
        alloc, ev, frontier = _pipeline(x_rf, x_vlc, state, config, sa="scg", pa="pareto",
                                        hybrid=hybrid)
        if best is not None and ev.ee <= best[1].ee:
            notes.append(f"pass {passes} did not improve EE; keeping incumbent")
            break
        improved = best is None or ev.ee - best[1].ee > EE_REL_TOL * best[1].ee
        best = (alloc, ev, frontier, matching, prefs)
        trace.append(ev.ee)
        if not improved:
            break
        rf_power, vlc_power = _feedback_powers(alloc, config, state.n_sub)
    alloc, ev, frontier, matching, prefs = best
    if frontier is not None:
        notes.extend(frontier.notes)
    return RunResult(scheme=scheme, seed=config.seed if seed is None else seed, evaluated=ev,
                     outage_count=qos_failures(ev, config), iterations_used=passes,
                     wall_time=time.perf_counter() - t0, allocation=alloc, ee_trace=trace,
                     frontier=frontier, matching=matching, preferences=prefs, notes=notes)


def run_oneshot(config: ScenarioConfig, state: ChannelState, *, seed: int | None = None) -> RunResult:
    """A single matching -> SA -> PA pass (the first pass of the alternating loop)."""
    return run_alternating(config, state, seed=seed, max_outer=1,
                           scheme=SchemeId.PROPOSED_ONESHOT.value)


def run_hybrid(config: ScenarioConfig, state: ChannelState, *, seed: int | None = None) -> RunResult:
    """Alternating scheme where every user is served by exactly one AP of any tier."""
    return run_alternating(config, state, seed=seed, hybrid=True,
                           scheme=SchemeId.HYBRID_ITERATIVE.value)


def scg_assignment(state: ChannelState, config: ScenarioConfig):
    """Strongest-average-gain AP per user: an RF AP always, a VLC AP when one is visible."""
    n_rf = 1 + state.n_pico
    gains = np.where(state.rf_eligible(), rf_coef(state.mean_gain_rf(), config), -np.inf)
    x_rf = np.zeros((n_rf, state.n_users), int)
    x_rf[np.argmax(gains, axis=0), np.arange(state.n_users)] = 1
    x_vlc = np.zeros((state.n_vlc, state.n_users), int)
    if state.n_vlc:
        g = state.mean_gain_vlc()
        best = np.argmax(g, axis=0)
        seen = g[best, np.arange(state.n_users)] > 0
        x_vlc[best[seen], np.arange(state.n_users)[seen]] = 1
    return x_rf, x_vlc


def _single_pass(config, state, seed, scheme, sa, pa) -> RunResult:
    t0 = time.perf_counter()
    x_rf, x_vlc = scg_assignment(state, config)
    alloc, ev, frontier = _pipeline(x_rf, x_vlc, state, config, sa=sa, pa=pa)
    return RunResult(scheme=scheme, seed=config.seed if seed is None else seed, evaluated=ev,
                     outage_count=qos_failures(ev, config), iterations_used=1,
                     wall_time=time.perf_counter() - t0, allocation=alloc, ee_trace=[ev.ee],
                     frontier=frontier, notes=list(frontier.notes) if frontier else [])


def run_scg_scg_epa(config: ScenarioConfig, state: ChannelState, *,
                    seed: int | None = None) -> RunResult:
    """SCG AP assignment, SCG subchannels, equal power on every granted subchannel."""
    return _single_pass(config, state, seed, SchemeId.SCG_SCG_EPA.value, "scg", "epa")


def run_baseline(config: ScenarioConfig, state: ChannelState, *,
                 seed: int | None = None) -> RunResult:
    """SCG AP assignment, QoS-first subchannels, EE power allocation."""
    return _single_pass(config, state, seed, SchemeId.BASELINE_APPROX.value, "qos", "pareto")


def run_scheme(scheme: str, config: ScenarioConfig, state: ChannelState, *,
               seed: int | None = None, power_levels: int = 3) -> RunResult:
    scheme = SchemeId(scheme).value
    if scheme == SchemeId.EXHAUSTIVE_ORACLE.value:
        from .exhaustive import run_exhaustive
        return run_exhaustive(config, state, power_levels, seed=seed)
    runners = {
        SchemeId.PROPOSED_ITERATIVE.value: run_alternating,
        SchemeId.PROPOSED_ONESHOT.value: run_oneshot,
        SchemeId.SCG_SCG_EPA.value: run_scg_scg_epa,
        SchemeId.BASELINE_APPROX.value: run_baseline,
        SchemeId.HYBRID_ITERATIVE.value: run_hybrid,
    }
    return runners[scheme](config, state, seed=seed)
