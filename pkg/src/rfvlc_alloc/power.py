"""Energy-efficient power allocation for fixed AP assignment and subchannels.

Every SINR is replaced by its quadratic transform ``2 y sqrt(a p) - y^2 (I + n)``,
which is tight at ``y* = sqrt(a p) / (I + n)``. For fixed ``y`` the transformed
rates are concave, so the problems solved here alternate closed-form ``y``
updates with a concave maximization:

* ``solve_rmax``: maximize the sum-rate under the AP budgets and per-user QoS;
* ``solve_min_power``: minimize transmit power subject to sum-rate >= eps;
* ``sweep_pareto``: eps = lambda * R_max for lambda on a grid, then pick the
  entry with the best energy efficiency.

The concave subproblems are solved in amplitude space ``q = sqrt(p)``, where
the transformed rates are smooth and each AP's budget set
``{q >= 0, sum q^2 <= P}`` has an exact clip-then-scale projection.
"""

from __future__ import annotations

import csv
import logging
import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable

import numpy as np

from ._kernels import solve_subproblem
from .rates import LinkSet
from .scenario import ScenarioConfig

log = logging.getLogger(__name__)

_LN2 = math.log(2.0)
FEAS_RTOL = 1e-5      # relative slack accepted on rate constraints
_ACCEPT_RTOL = 1e-5   # slack used when comparing candidate solutions
_ORTHOGONAL_RESIDUAL = 1e-3


# --------------------------------------------------------------------------
# quadratic transform
# --------------------------------------------------------------------------
def sinr_ratio(p, gain, interference, noise):
    """Plain SINR ``p g / (I + n)`` with ``gain`` the power coefficient."""
    return np.asarray(p) * np.asarray(gain) / (np.asarray(interference) + np.asarray(noise))


def quad_sinr(p, gain, interference, noise, y):
    """Quadratic transform of the SINR: ``2 y sqrt(p g) - y^2 (I + n)``.

    ``gain`` is the power coefficient of the link (``|G|^2`` for RF or
    ``(R_PD G)^2`` for VLC) and ``interference`` the already summed
    ``sum p' g'``. Works elementwise on arrays.
    """
    p = np.asarray(p, float)
    if np.any(p < 0) or np.any(np.asarray(noise) < 0):
        raise ValueError("power and noise must be non-negative")
    y = np.asarray(y, float)
    return 2.0 * y * np.sqrt(p * gain) - y * y * (np.asarray(interference) + noise)


def optimal_y(p, gain, interference, noise):
    """Maximizer of :func:`quad_sinr` over ``y``: ``sqrt(p g) / (I + n)``."""
    p = np.asarray(p, float)
    return np.sqrt(p * gain) / (np.asarray(interference) + np.asarray(noise))


def link_optimal_y(links: LinkSet, p: np.ndarray) -> np.ndarray:
    return optimal_y(p, links.a, links.interference(p), links.n)


def transformed_rates(links: LinkSet, p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Per-link transformed rate ``w log2(1 + c * quad_sinr)``; -inf where undefined."""
    arg = 1.0 + links.c * quad_sinr(p, links.a, links.interference(p), links.n, y)
    with np.errstate(divide="ignore", invalid="ignore"):
        return np.where(arg > 0, links.w * np.log2(np.where(arg > 0, arg, 1.0)), -np.inf)


def transformed_sum_rate(links: LinkSet, p: np.ndarray, y: np.ndarray) -> float:
    return float(transformed_rates(links, p, y).sum())


def transformed_sum_rate_grad(links: LinkSet, p: np.ndarray, y: np.ndarray) -> np.ndarray:
    """Gradient in ``p`` of :func:`transformed_sum_rate` (requires ``p > 0``)."""
    p = np.asarray(p, float)
    arg = 1.0 + links.c * quad_sinr(p, links.a, links.interference(p), links.n, y)
    d = links.w * links.c / (arg * _LN2)
    own = d * y * np.sqrt(links.a / p)
    return own - links.B.T @ (d * y * y)


# --------------------------------------------------------------------------
# feasible sets and the concave maximizer
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class BallProduct:
    """``{q >= 0, sum_{l in g} q_l^2 <= budget_g}`` per group ``g``."""

    group: np.ndarray
    budget: np.ndarray

    def project(self, q):
        q = np.maximum(q, 0.0)
        sq = np.bincount(self.group, weights=q * q, minlength=len(self.budget))
        scale = np.where(sq > self.budget, np.sqrt(self.budget / np.where(sq > 0, sq, 1.0)), 1.0)
        return q * scale[self.group]

    def contains(self, q, rtol=1e-9):
        sq = np.bincount(self.group, weights=q * q, minlength=len(self.budget))
        return bool(np.all(q >= 0) and np.all(sq <= self.budget * (1 + rtol)))


@dataclass(frozen=True)
class CappedSimplexProduct:
    """``{0 <= x <= caps, sum_{l in g} x_l <= budget_g}``; Euclidean projection is exact."""

    group: np.ndarray
    budget: np.ndarray
    caps: np.ndarray | None = None

    def project(self, x):
        x = np.asarray(x, float)
        caps = np.full(len(x), np.inf) if self.caps is None else self.caps
        out = np.clip(x, 0.0, caps)
        for g in range(len(self.budget)):
            idx = np.nonzero(self.group == g)[0]
            if len(idx) == 0 or out[idx].sum() <= self.budget[g]:
                continue
            out[idx] = _project_capped_simplex(x[idx], caps[idx], self.budget[g])
        return out

    def contains(self, x, rtol=1e-9):
        sums = np.bincount(self.group, weights=x, minlength=len(self.budget))
        caps = np.inf if self.caps is None else self.caps
        return bool(np.all(x >= 0) and np.all(x <= caps) and np.all(sums <= self.budget * (1 + rtol)))


def _project_capped_simplex(v, caps, total):
    """Project ``v`` onto ``{0 <= x <= caps, sum x = total}`` by bisection on the shift."""
    lo = np.min(v - np.minimum(caps, total)) - 1.0
    hi = np.max(v)
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if np.clip(v - mid, 0.0, caps).sum() > total:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-15 * max(1.0, abs(hi)):
            break
    x = np.clip(v - hi, 0.0, caps)
    # put the last rounding error on a free coordinate so the sum is exact
    free = np.nonzero((x > 0) & (x < caps))[0]
    if len(free):
        x[free[0]] += total - x.sum()
    return x


@dataclass
class MaximizeResult:
    x: np.ndarray
    fun: float
    iterations: int
    converged: bool
    residual: float

    @property
    def degraded(self) -> bool:
        return not self.converged


def maximize_concave(fun: Callable, grad: Callable, feasible_set, x0, *,
                     tol: float = 1e-6, max_iter: int = 500) -> MaximizeResult:
    """Spectral projected-gradient ascent with Armijo backtracking.

    ``fun`` may return ``-inf`` (or ``nan``) outside its domain; such points are
    rejected by the line search. Stops when the projected-gradient residual
    ``max|P(x + g) - x|`` drops to ``tol``. Otherwise returns the best iterate
    with ``converged=False``.
    """
    x = feasible_set.project(np.asarray(x0, float))
    f = fun(x)
    if not np.isfinite(f):
        raise ValueError("starting point outside the objective's domain")
    g = grad(x)
    alpha = 1.0
    residual = float(np.max(np.abs(feasible_set.project(x + g) - x), initial=0.0))
    it = 0
    while residual > tol and it < max_iter:
        it += 1
        d = feasible_set.project(x + alpha * g) - x
        slope = float(g @ d)
        if slope <= 0:
            d = feasible_set.project(x + g) - x
            slope = float(g @ d)
            if slope <= 0:
                break
        t = 1.0
        while True:
            xn = x + t * d
            fn = fun(xn)
            if fn >= f + 1e-4 * t * slope:
                break
            t *= 0.5
            if t < 1e-14:
                xn = None
                break
        if xn is None:
            break
        gn = grad(xn)
        s = xn - x
        yv = g - gn
        sy = float(s @ yv)
        alpha = float(np.clip((s @ s) / sy, 1e-12, 1e12)) if sy > 0 else 1e12
        x, f, g = xn, fn, gn
        residual = float(np.max(np.abs(feasible_set.project(x + g) - x), initial=0.0))
    return MaximizeResult(x=x, fun=float(f), iterations=it, converged=residual <= tol,
                          residual=residual)


class _SubProblem:
    """Augmented-Lagrangian objective of one fixed-``y`` power subproblem in ``q``.

    Maximizes ``alpha * sum_rate / scale - beta * sum(q^2)`` subject to the
    normalized margins ``sum_rate / eps - 1 >= 0`` (when ``eps > 0``) and
    ``R_u / t_u - 1 >= 0`` for every user with a floor ``t_u > 0``. The
    inequalities enter as ``-sum(max(0, m - r h)^2 - m^2) / (2 r)``, which keeps
    the objective concave. Values are cached for the last evaluated point so
    the gradient reuses them.
    """

    def __init__(self, links: LinkSet, y, *, alpha, beta, scale, eps, targets):
        self.links = links
        self.ys = y * np.sqrt(links.a)
        self.y2 = y * y
        self.c = links.c
        self.cw = links.c * links.w / _LN2
        self.noise = links.n
        self.B = links.B
        self.BT = np.ascontiguousarray(links.B.T)
        self.has_interference = bool(np.any(links.B))
        self.alpha, self.beta, self.scale = alpha, beta, scale
        self.eps = eps
        self.active = np.nonzero(targets > 0)[0]
        self.inv_t = np.zeros(links.n_users)
        self.inv_t[self.active] = 1.0 / targets[self.active]
        self.n_cons = (1 if eps > 0 else 0) + len(self.active)
        self.mult = np.zeros(self.n_cons)
        self.rho = 10.0
        self._key = None

    def _args(self, q):
        interf = self.B @ (q * q) if self.has_interference else 0.0
        return 1.0 + self.c * (2.0 * self.ys * q - self.y2 * (self.noise + interf))

    def margins(self, rates):
        L = self.links
        parts = []
        if self.eps > 0:
            parts.append([rates.sum() / self.eps - 1.0])
        if len(self.active):
            per_user = np.bincount(L.user, weights=rates, minlength=L.n_users)
            parts.append(per_user[self.active] * self.inv_t[self.active] - 1.0)
        return np.concatenate(parts) if parts else np.zeros(0)

    def evaluate(self, q):
        arg = self._args(q)
        if np.any(arg <= 0):
            self._key = None
            return -np.inf
        rates = self.links.w * np.log2(arg)
        value = self.alpha * rates.sum() / self.scale - self.beta * float(q @ q)
        weights = np.full(len(q), self.alpha / self.scale)
        if self.n_cons:
            h = self.margins(rates)
            v = np.maximum(0.0, self.mult - self.rho * h)
            value -= float(np.sum(v * v - self.mult * self.mult)) / (2.0 * self.rho)
            k = 0
            if self.eps > 0:
                weights = weights + v[0] / self.eps
                k = 1
            if len(self.active):
                per_user = np.zeros(self.links.n_users)
                per_user[self.active] = v[k:] * self.inv_t[self.active]
                weights = weights + per_user[self.links.user]
        self._key = q
        self._cache = (arg, weights)
        return value

    def gradient(self, q):
        if self._key is not q:
            self.evaluate(q)
        arg, weights = self._cache
        d = weights * self.cw / arg
        g = 2.0 * d * self.ys - 2.0 * self.beta * q
        if self.has_interference:
            g -= 2.0 * q * (self.BT @ (d * self.y2))
        return g

    def violation(self, q):
        arg = self._args(q)
        if np.any(arg <= 0):
            return np.inf, None
        h = self.margins(self.links.w * np.log2(arg))
        return float(np.max(np.maximum(-h, 0.0), initial=0.0)), h

    def solve(self, fset, q0, *, tol, feas_tol, max_outer=25, max_iter=2000):
        """Multiplier loop around the projected-gradient ascent (compiled)."""
        L = self.links
        inv_scale = 1.0 / self.scale
        q, mult, rho, iters = solve_subproblem(
            np.ascontiguousarray(q0, dtype=float), self.ys, self.y2, self.c, L.w, self.cw,
            self.noise, np.ascontiguousarray(self.B), self.has_interference,
            L.user.astype(np.int64), self.active.astype(np.int64), self.inv_t, L.n_users,
            L.group.astype(np.int64), np.asarray(fset.budget, float), self.alpha, self.beta,
            inv_scale, float(self.eps), self.mult.copy(), self.rho, tol, feas_tol,
            max_iter, max_outer)
        self.mult, self.rho, self.iterations = mult, rho, iters
        return q

    def solve_reference(self, fset, q0, *, tol, feas_tol, max_outer=25):
        """Same loop driven by :func:`maximize_concave`; slow, kept for cross-checks."""
        q = q0
        prev = np.inf
        for _ in range(max_outer if self.n_cons else 1):
            q = maximize_concave(self.evaluate, self.gradient, fset, q, tol=tol).x
            if not self.n_cons:
                break
            viol, h = self.violation(q)
            if h is None:
                break
            self.mult = np.maximum(0.0, self.mult - self.rho * h)
            if viol <= feas_tol:
                break
            if viol > 0.25 * prev:
                self.rho *= 10.0
            prev = viol
        return q


# --------------------------------------------------------------------------
# power problems
# --------------------------------------------------------------------------
@dataclass
class PowerSolution:
    p: np.ndarray
    y: np.ndarray
    sum_rate: float
    transmit_power: float
    iterations: int
    trace: list[float] = field(default_factory=list)
    notes: list[str] = field(default_factory=list)
    feasible: bool = True


def qos_targets(links: LinkSet, config: ScenarioConfig, p_ref: np.ndarray | None = None):
    """Per-user rate floors used inside the power problems.

    The floor is ``min(R_min, rate at p_ref)`` (EPA by default) for users that
    hold at least one link, so that ``p_ref`` itself is always feasible. Users
    whose floor falls below ``R_min`` are returned as relaxed.
    """
    p_ref = links.equal_power() if p_ref is None else p_ref
    served = np.bincount(links.user, minlength=links.n_users) > 0
    ref = links.user_rates(p_ref) if links.size else np.zeros(links.n_users)
    targets = np.where(served, np.minimum(config.r_min, ref), 0.0)
    relaxed = np.nonzero(served & (ref < config.r_min))[0]
    return targets, relaxed


def _meets(rates_user, targets, rtol=_ACCEPT_RTOL):
    return bool(np.all(rates_user >= targets * (1.0 - rtol)))


def _carry_multipliers(prev: _SubProblem | None, new: _SubProblem) -> None:
    if prev is not None and prev.n_cons == new.n_cons:
        new.mult = prev.mult.copy()
        new.rho = prev.rho


def orthogonal_start(links: LinkSet, p: np.ndarray | None = None,
                     targets: np.ndarray | None = None) -> np.ndarray:
    """``p`` (EPA by default) with every group of mutually interfering co-channel
    links reduced to its single link of highest interference-free rate (the
    others keep a residual fraction of their power). With ``targets``, users
    whose rate floor the reduced start would break keep their original powers.

    For two interfering links the sum-rate optimum is binary, so this start and
    EPA between them reach it.
    """
    p = links.equal_power() if p is None else np.asarray(p, float)
    out = p.copy()
    adj = (links.B != 0) | (links.B.T != 0)
    alone = links.w * np.log2(1.0 + links.c * links.a * p / links.n)
    seen = np.zeros(links.size, bool)
    for start in range(links.size):
        if seen[start] or not adj[start].any():
            continue
        comp, stack = [], [start]
        seen[start] = True
        while stack:
            i = stack.pop()
            comp.append(i)
            for o in np.nonzero(adj[i] & ~seen)[0]:
                seen[o] = True
                stack.append(o)
        comp = np.array(comp)
        keep = comp[np.argmax(alone[comp])]
        # a small positive power keeps y* > 0 so the link can still grow back
        out[comp[comp != keep]] *= _ORTHOGONAL_RESIDUAL
    if targets is not None:
        short = links.user_rates(out) < targets * (1.0 - _ACCEPT_RTOL)
        restore = short[links.user]
        out[restore] = p[restore]
    return out


def _rmax_run(links, config, targets, p, fset):
    """Alternating y / concave-maximization run from ``p``.

    Returns ``(p, sum_rate, trace, iterations, feasible)``. An infeasible start
    is replaced by the first iterate meeting the floors; after that the sum-rate
    never decreases.
    """
    feasible = _meets(links.user_rates(p), targets)
    best = float(links.rates(p).sum()) if feasible else -np.inf
    trace = [best] if feasible else []
    sub = None
    it = 0
    for it in range(1, config.max_inner_iterations + 1):
        nxt = _SubProblem(links, link_optimal_y(links, p), alpha=1.0, beta=0.0,
                          scale=config.bandwidth_rf, eps=0.0, targets=targets)
        _carry_multipliers(sub, nxt)
        sub = nxt
        q = sub.solve(fset, np.sqrt(p), tol=config.solver_tolerance, feas_tol=FEAS_RTOL)
        p_new = q * q
        rate = float(links.rates(p_new).sum())
        if rate < best or not _meets(links.user_rates(p_new), targets):
            if feasible:
                break
            p = p_new  # keep pushing towards the floors from the new point
            continue
        improvement = rate - best
        p, best, feasible = p_new, rate, True
        trace.append(rate)
        if improvement <= config.solver_tolerance * max(rate, 1.0):
            break
    return p, best, trace, it, feasible


def solve_rmax(links: LinkSet, config: ScenarioConfig, *, targets: np.ndarray | None = None,
               p0: np.ndarray | None = None) -> PowerSolution:
    """Sum-rate maximization under budgets and per-user rate floors.

    Alternates y updates with the concave subproblem from EPA (or ``p0``, which
    must satisfy the floors). Without ``p0`` a second run starts from
    :func:`orthogonal_start` and the better feasible result is kept. Within a
    run the true sum-rate of the trace is non-decreasing: an iteration that
    would lower it, or break a floor, ends the run with the incumbent.
    """
    if links.size == 0:
        return PowerSolution(p=np.zeros(0), y=np.zeros(0), sum_rate=0.0, transmit_power=0.0,
                             iterations=1, trace=[0.0])
    notes: list[str] = []
    if targets is None:
        targets, relaxed = qos_targets(links, config)
        notes = [f"C8 relaxed for user {j}" for j in relaxed]
    for msg in notes:
        log.info(msg)
    fset = BallProduct(links.group, links.budget)
    start = links.equal_power() if p0 is None else np.asarray(p0, float)
    p, best, trace, it, _ = _rmax_run(links, config, targets, start, fset)
    if p0 is None:
        alt = orthogonal_start(links, start, targets)
        if not np.array_equal(alt, start):
            p2, best2, trace2, it2, ok2 = _rmax_run(links, config, targets, alt, fset)
            it += it2
            if ok2 and best2 > best:
                p, best, trace = p2, best2, trace2
                notes.append("orthogonal start kept")
    return PowerSolution(p=p, y=link_optimal_y(links, p), sum_rate=best,
                         transmit_power=float(p.sum()), iterations=it, trace=trace, notes=notes)


def solve_min_power(epsilon: float, links: LinkSet, config: ScenarioConfig, *,
                    targets: np.ndarray | None = None, p0: np.ndarray | None = None) -> PowerSolution:
    """Minimize transmit power subject to sum-rate >= ``epsilon`` and rate floors.

    ``p0`` must be feasible (the R_max solution is). Without ``p0`` the start
    is the sum-rate maximizer. Returns ``feasible=False`` when the start does
    not meet ``epsilon``. Transmit power along the trace is non-increasing.
    """
    if links.size == 0:
        return PowerSolution(p=np.zeros(0), y=np.zeros(0), sum_rate=0.0, transmit_power=0.0,
                             iterations=1, trace=[0.0], feasible=epsilon <= 0)
    notes: list[str] = []
    if targets is None:
        targets, relaxed = qos_targets(links, config)
        notes = [f"C8 relaxed for user {j}" for j in relaxed]
    if p0 is None:
        p0 = solve_rmax(links, config, targets=targets).p
    p = np.asarray(p0, float)
    eps = max(float(epsilon), 0.0)
    rate = float(links.rates(p).sum())
    if rate < eps * (1.0 - _ACCEPT_RTOL) or not _meets(links.user_rates(p), targets):
        log.warning("min-power start infeasible for epsilon=%g", epsilon)
        return PowerSolution(p=p, y=link_optimal_y(links, p), sum_rate=rate,
                             transmit_power=float(p.sum()), iterations=1, trace=[float(p.sum())],
                             notes=notes + ["infeasible start"], feasible=False)

    fset = BallProduct(links.group, links.budget)
    best = float(p.sum())
    trace = [best]
    sub = None
    it = 0
    for it in range(1, config.max_inner_iterations + 1):
        nxt = _SubProblem(links, link_optimal_y(links, p), alpha=0.0, beta=1.0,
                          scale=config.bandwidth_rf, eps=eps, targets=targets)
        _carry_multipliers(sub, nxt)
        sub = nxt
        if sub.n_cons:
            q = sub.solve(fset, np.sqrt(p), tol=config.solver_tolerance, feas_tol=FEAS_RTOL)
        else:
            q = np.zeros_like(p)
        p_new = q * q
        power = float(p_new.sum())
        ok = (float(links.rates(p_new).sum()) >= eps * (1.0 - _ACCEPT_RTOL)
              and _meets(links.user_rates(p_new), targets))
        if not ok or power > best:
            break
        drop = best - power
        p, best = p_new, power
        trace.append(power)
        if drop <= config.solver_tolerance * max(power, 1e-12):
            break
    return PowerSolution(p=p, y=link_optimal_y(links, p), sum_rate=float(links.rates(p).sum()),
                         transmit_power=best, iterations=it, trace=trace, notes=notes)



# --------------------------------------------------------------------------
# epsilon-constraint sweep
# --------------------------------------------------------------------------
@dataclass(frozen=True)
class ParetoEntry:
    lam: float
    epsilon: float
    p: np.ndarray
    y: np.ndarray
    sum_rate: float
    total_power: float
    ee: float


@dataclass
class ParetoFrontier:
    entries: list[ParetoEntry]
    r_max: float
    best: ParetoEntry | None
    notes: list[str] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.entries)

    def is_non_dominated(self) -> bool:
        for a in self.entries:
            for b in self.entries:
                if (b.sum_rate >= a.sum_rate and b.total_power <= a.total_power
                        and (b.sum_rate > a.sum_rate or b.total_power < a.total_power)):
                    return False
        return True


def lambda_grid(step: float) -> np.ndarray:
    n = math.ceil(1.0 / step - 1e-9)
    return np.minimum(step * np.arange(1, n + 1), 1.0)


def sweep_pareto(links: LinkSet, config: ScenarioConfig) -> ParetoFrontier:
    """Trace the rate/power frontier with eps = lambda * R_max and keep the best EE.

    Subproblems are warm-started from the next larger lambda. Each reported
    entry is the lowest-power solution found (ties: highest rate) among all
    solved points whose sum-rate meets that entry's eps, which makes the
    frontier monotone and mutually non-dominated.
    """
    circuit = config.circuit_power_total
    targets, relaxed = qos_targets(links, config)
    notes = [f"C8 relaxed for user {j}" for j in relaxed]
    rmax = solve_rmax(links, config, targets=targets)
    lams = lambda_grid(config.lambda_step)
    candidates = [(rmax.p, rmax.sum_rate, rmax.transmit_power)]
    p_start = rmax.p
    for lam in lams[::-1]:
        eps = float(lam * rmax.sum_rate)
        if links.size == 0:
            break
        sol = solve_min_power(eps, links, config, targets=targets, p0=p_start)
        if not sol.feasible:
            notes.append(f"lambda={lam:.3g} infeasible")
            log.warning("lambda=%g infeasible, skipped", lam)
            continue
        candidates.append((sol.p, sol.sum_rate, sol.transmit_power))
        p_start = sol.p

    entries = []
    for lam in lams:
        eps = float(lam * rmax.sum_rate)
        ok = [c for c in candidates if c[1] >= eps * (1.0 - _ACCEPT_RTOL)]
        if not ok:
            continue
        p, rate, tx = min(ok, key=lambda c: (c[2], -c[1]))
        total = circuit + tx
        entries.append(ParetoEntry(lam=float(lam), epsilon=eps, p=p,
                                   y=link_optimal_y(links, p) if links.size else p,
                                   sum_rate=rate, total_power=total,
                                   ee=rate / total if total > 0 else 0.0))
    best = max(entries, key=lambda e: (e.ee, e.lam)) if entries else None
    return ParetoFrontier(entries=entries, r_max=rmax.sum_rate, best=best, notes=notes)


def dump_pareto(frontier: ParetoFrontier, path: str | Path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["lambda", "epsilon_bps", "sum_rate_bps", "total_power_w", "ee"])
        for e in frontier.entries:
            w.writerow([repr(e.lam), repr(e.epsilon), repr(e.sum_rate), repr(e.total_power), repr(e.ee)])
