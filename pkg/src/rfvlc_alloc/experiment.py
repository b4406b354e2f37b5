"""Monte-Carlo sweeps: one RunResult per (sweep value, scheme, seed) and per-cell statistics.

Sweepable parameters:

* ``users``   - number of users
* ``rmin``    - minimum rate in Mbit/s
* ``los``     - LoS-probability band name (see :data:`LOS_BANDS`)
* ``circuit`` - multiplicative factor on every circuit power
"""

from __future__ import annotations

import csv
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from .channel import build_channel_state
from .scenario import ScenarioConfig, generate_topology
from .schemes import RunResult, run_scheme

log = logging.getLogger(__name__)

LOS_BANDS = {
    "very-low": (0.0, 0.3),
    "low": (0.3, 0.5),
    "medium": (0.5, 0.8),
    "high": (0.8, 1.0),
}
SWEEP_PARAMS = ("users", "rmin", "los", "circuit")
CSV_COLUMNS = ("sweep_param", "sweep_value", "scheme", "seed", "sum_rate_bps", "total_power_w",
               "ee", "outage_count", "iterations", "wall_time_s")
METRICS = ("sum_rate_bps", "total_power_w", "ee", "outage_count", "iterations", "wall_time_s")


def apply_sweep(config: ScenarioConfig, param: str, value) -> ScenarioConfig:
    """Config with the swept parameter set to ``value``."""
    if param == "users":
        return config.replace(user_count=int(value))
    if param == "rmin":
        return config.replace(r_min=float(value) * 1e6)
    if param == "los":
        key = str(value).lower().replace(" ", "-").replace("_", "-")
        if key not in LOS_BANDS:
            raise ValueError(f"unknown LoS band {value!r}; expected one of {sorted(LOS_BANDS)}")
        return config.replace(los_prob_range=LOS_BANDS[key])
    if param == "circuit":
        f = float(value)
        return config.replace(circuit_macro=config.circuit_macro * f,
                              circuit_pico=config.circuit_pico * f,
                              circuit_vlc=config.circuit_vlc * f)
    raise ValueError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")


def result_row(param: str, value, result: RunResult) -> dict:
    ev = result.evaluated
    return {"sweep_param": param, "sweep_value": value, "scheme": result.scheme,
            "seed": int(result.seed), "sum_rate_bps": float(ev.sum_rate),
            "total_power_w": float(ev.total_power), "ee": float(ev.ee),
            "outage_count": int(result.outage_count), "iterations": int(result.iterations_used),
            "wall_time_s": float(result.wall_time)}


@dataclass
class ExperimentTable:
    rows: list[dict] = field(default_factory=list)

    def __len__(self) -> int:
        return len(self.rows)

    def select(self, scheme: str | None = None, value=None) -> list[dict]:
        return [r for r in self.rows
                if (scheme is None or r["scheme"] == scheme)
                and (value is None or r["sweep_value"] == value)]

    def summary(self) -> list[dict]:
        """Mean and standard error of every metric per (sweep value, scheme) cell."""
        cells: dict[tuple, list[dict]] = {}
        for r in self.rows:
            cells.setdefault((r["sweep_param"], r["sweep_value"], r["scheme"]), []).append(r)
        out = []
        for (param, value, scheme), rows in cells.items():
            entry = {"sweep_param": param, "sweep_value": value, "scheme": scheme, "n": len(rows)}
            for m in METRICS:
                x = np.array([r[m] for r in rows], float)
                entry[f"{m}_mean"] = float(x.mean())
                entry[f"{m}_se"] = float(x.std(ddof=1) / np.sqrt(len(x))) if len(x) > 1 else 0.0
            out.append(entry)
        return out

    def mean(self, metric: str, scheme: str, value) -> float:
        rows = self.select(scheme, value)
        if not rows:
            raise KeyError(f"no rows for scheme={scheme!r}, value={value!r}")
        return float(np.mean([r[metric] for r in rows]))

    def to_csv(self, path: str | Path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=CSV_COLUMNS)
            writer.writeheader()
            writer.writerows(self.rows)

    def summary_to_csv(self, path: str | Path) -> None:
        summary = self.summary()
        if not summary:
            Path(path).write_text("")
            return
        with open(path, "w", newline="") as fh:
            writer = csv.DictWriter(fh, fieldnames=list(summary[0]))
            writer.writeheader()
            writer.writerows(summary)


def run_experiment(config: ScenarioConfig, param: str, values: Sequence, schemes: Sequence[str],
                   seeds: Iterable[int], *, power_levels: int = 3) -> ExperimentTable:
    """Run every scheme on every (sweep value, seed) scenario.

    All schemes of a cell share the same topology and channel realization.
    """
    if param not in SWEEP_PARAMS:
        raise ValueError(f"unknown sweep parameter {param!r}; expected one of {SWEEP_PARAMS}")
    seeds = list(seeds)
    table = ExperimentTable()
    for value in values:
        base = apply_sweep(config, param, value)
        for seed in seeds:
            cfg = base.replace(seed=int(seed))
            state = build_channel_state(generate_topology(cfg), cfg)
            for scheme in schemes:
                res = run_scheme(scheme, cfg, state, seed=int(seed), power_levels=power_levels)
                table.rows.append(result_row(param, value, res))
                log.info("%s=%s seed=%d %s ee=%.4g", param, value, seed, scheme, res.ee)
    return table
