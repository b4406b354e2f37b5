"""Scenario configuration and seed-driven topology generation.

Geometry of the three-tier network: one macrocell AP at the origin, picocell
APs and indoor rooms (each holding a few ceiling-mounted VLC APs) scattered
uniformly over the macro disk, and users dropped over the disk or inside rooms.
"""

from __future__ import annotations

import dataclasses
import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

import numpy as np


def dbm_to_watts(dbm: float) -> float:
    return 10.0 ** (dbm / 10.0) / 1000.0


@dataclass(frozen=True)
class ScenarioConfig:
    """Static parameters of one scenario.

    Defaults describe the desk-scale scenario (1 macro, 2 picos, 2 rooms with
    2 VLC APs each, 20 users, 10 subchannels per AP). Use
    :func:`full_scale_config` for the full-size parameter set.
    """

    seed: int = 0
    # geometry (meters)
    macro_radius: float = 500.0
    pico_count: int = 2
    pico_radius: float = 100.0
    room_count: int = 2
    room_side: float = 5.0
    vlc_aps_per_room: int = 2
    vlc_ap_height: float = 2.15
    receiver_height: float = 0.85
    user_count: int = 20
    indoor_user_fraction: float = 0.3
    # spectrum
    subchannels_per_ap: int = 10
    bandwidth_rf: float = 10e6
    bandwidth_vlc: float = 20e6
    # power (W)
    p_macro_budget: float = dbm_to_watts(46.0)
    p_pico_budget: float = dbm_to_watts(30.0)
    p_vlc_budget: float = dbm_to_watts(30.0)
    circuit_macro: float = 130.0
    circuit_pico: float = 6.8
    circuit_vlc: float = 4.0
    # noise
    noise_psd_rf: float = dbm_to_watts(-174.0)  # W/Hz
    noise_psd_vlc: float = 1e-21  # A^2/Hz
    r_min: float = 50e6
    # optics
    pd_area: float = 1e-4
    semi_angle_half_power: float = 60.0
    optical_filter_gain: float = 1.0
    refractive_index: float = 1.5
    pd_fov: float = 70.0
    pd_responsivity: float = 0.53
    # randomness
    shadowing_sigma: float = 10.0
    los_prob_range: tuple[float, float] = (0.5, 1.0)
    # square the RF power gain in the rate formulas (off: gain used as-is)
    square_rf_gain: bool = False
    # solvers
    lambda_step: float = 0.1
    solver_tolerance: float = 1e-4
    max_outer_iterations: int = 10
    max_inner_iterations: int = 50

    def __post_init__(self) -> None:
        object.__setattr__(self, "los_prob_range", tuple(float(v) for v in self.los_prob_range))
        self.validate()

    def validate(self) -> None:
        positive = (
            "macro_radius", "pico_radius", "room_side", "vlc_ap_height",
            "bandwidth_rf", "bandwidth_vlc", "p_macro_budget", "p_pico_budget",
            "p_vlc_budget", "noise_psd_rf", "noise_psd_vlc", "pd_area",
            "subchannels_per_ap", "vlc_aps_per_room", "max_outer_iterations",
            "max_inner_iterations", "solver_tolerance",
        )
        for name in positive:
            if not getattr(self, name) > 0:
                raise ValueError(f"{name} must be strictly positive, got {getattr(self, name)!r}")
        for name in ("pico_count", "room_count", "user_count", "r_min",
                     "circuit_macro", "circuit_pico", "circuit_vlc"):
            if getattr(self, name) < 0:
                raise ValueError(f"{name} must be non-negative, got {getattr(self, name)!r}")
        lo, hi = self.los_prob_range
        if not (0.0 <= lo <= hi <= 1.0):
            raise ValueError(f"los_prob_range must satisfy 0 <= low <= high <= 1, got {self.los_prob_range}")
        if not (0.0 < self.lambda_step <= 1.0):
            raise ValueError(f"lambda_step must lie in (0, 1], got {self.lambda_step}")
        if not (0.0 <= self.indoor_user_fraction <= 1.0):
            raise ValueError("indoor_user_fraction must lie in [0, 1]")
        if not (0.0 < self.semi_angle_half_power < 90.0 and 0.0 < self.pd_fov < 90.0):
            raise ValueError("optical angles must lie in (0, 90) degrees")
        if self.receiver_height >= self.vlc_ap_height:
            raise ValueError("receiver must sit below the VLC APs")

    # derived quantities -------------------------------------------------
    @property
    def rf_ap_count(self) -> int:
        return 1 + self.pico_count

    @property
    def vlc_ap_count(self) -> int:
        return self.room_count * self.vlc_aps_per_room

    @property
    def noise_rf(self) -> float:
        """Per-subchannel RF noise power N_RF * B_RF (W)."""
        return self.noise_psd_rf * self.bandwidth_rf

    @property
    def noise_vlc(self) -> float:
        """Per-subchannel VLC noise power N_VLC * B_VLC (A^2)."""
        return self.noise_psd_vlc * self.bandwidth_vlc

    @property
    def circuit_power_total(self) -> float:
        return (self.circuit_macro + self.pico_count * self.circuit_pico
                + self.vlc_ap_count * self.circuit_vlc)

    def replace(self, **changes: Any) -> "ScenarioConfig":
        return dataclasses.replace(self, **changes)

    def to_dict(self) -> dict[str, Any]:
        d = dataclasses.asdict(self)
        d["los_prob_range"] = list(self.los_prob_range)
        return d

    @classmethod
    def from_dict(cls, data: dict[str, Any]) -> "ScenarioConfig":
        known = {f.name for f in dataclasses.fields(cls)}
        unknown = set(data) - known
        if unknown:
            raise ValueError(f"unknown scenario keys: {sorted(unknown)}")
        return cls(**data)


def full_scale_config(**overrides: Any) -> ScenarioConfig:
    """Full-size parameter set (50 subchannels per AP, 180 users)."""
    base = dict(pico_count=4, room_count=4, user_count=180, subchannels_per_ap=50)
    base.update(overrides)
    return ScenarioConfig(**base)


def load_scenario(path: str | Path, seed: int | None = None) -> ScenarioConfig:
    """Read a JSON scenario file; ``seed`` (if given) overrides the file's seed."""
    data = json.loads(Path(path).read_text())
    if seed is not None:
        data["seed"] = int(seed)
    return ScenarioConfig.from_dict(data)


def save_scenario(config: ScenarioConfig, path: str | Path) -> None:
    Path(path).write_text(json.dumps(config.to_dict(), indent=2, sort_keys=True))


def scenario_rngs(seed: int) -> dict[str, np.random.Generator]:
    """Independent named streams so that changing one model part (e.g. LoS
    band) leaves every other random draw untouched."""
    names = ("topology", "users", "rf", "los")
    children = np.random.SeedSequence(seed).spawn(len(names))
    return {n: np.random.default_rng(s) for n, s in zip(names, children)}


@dataclass(frozen=True)
class Topology:
    macro_position: np.ndarray           # (2,)
    pico_positions: np.ndarray           # (n_pico, 2)
    room_origins: np.ndarray             # (n_room, 2) lower-left corner
    vlc_ap_positions: np.ndarray         # (n_vlc, 3)
    vlc_ap_room: np.ndarray              # (n_vlc,) room index of each VLC AP
    user_positions: np.ndarray           # (n_user, 3)
    user_room: np.ndarray                # (n_user,) room index or -1 outdoors
    room_side: float = field(default=5.0)

    @property
    def user_is_indoor(self) -> np.ndarray:
        return self.user_room >= 0

    @property
    def n_users(self) -> int:
        return len(self.user_positions)

    def rooms(self) -> list[tuple[np.ndarray, np.ndarray]]:
        """(origin, VLC AP positions) per room."""
        return [(self.room_origins[r], self.vlc_ap_positions[self.vlc_ap_room == r])
                for r in range(len(self.room_origins))]

    def tobytes(self) -> bytes:
        parts = (self.macro_position, self.pico_positions, self.room_origins,
                 self.vlc_ap_positions, self.vlc_ap_room, self.user_positions, self.user_room)
        return b"".join(np.ascontiguousarray(p).tobytes() for p in parts)


def _uniform_disk(rng: np.random.Generator, n: int, radius: float) -> np.ndarray:
    r = radius * np.sqrt(rng.random(n))
    theta = 2.0 * np.pi * rng.random(n)
    return np.column_stack([r * np.cos(theta), r * np.sin(theta)])


def room_index_of(points: np.ndarray, room_origins: np.ndarray, side: float) -> np.ndarray:
    """Room containing each 2D point (first match), -1 when outdoors."""
    out = np.full(len(points), -1, dtype=int)
    for r in range(len(room_origins) - 1, -1, -1):
        rel = points - room_origins[r]
        inside = np.all((rel >= 0.0) & (rel <= side), axis=1)
        out[inside] = r
    return out


def generate_topology(config: ScenarioConfig, seed: int | None = None) -> Topology:
    """Drop APs, rooms and users for ``config`` (seeded by ``seed`` or config.seed)."""
    if config.room_side > config.macro_radius:
        raise ValueError("room_side larger than macro_radius: degenerate geometry")
    rngs = scenario_rngs(config.seed if seed is None else seed)
    rng = rngs["topology"]
    side = config.room_side

    pico = _uniform_disk(rng, config.pico_count, config.macro_radius)

    # room origins uniform over the disk, re-drawn until the whole room fits
    origins = np.empty((config.room_count, 2))
    for r in range(config.room_count):
        while True:
            o = _uniform_disk(rng, 1, config.macro_radius)[0]
            corners = o + np.array([[0, 0], [side, 0], [0, side], [side, side]])
            if np.all(np.hypot(corners[:, 0], corners[:, 1]) <= config.macro_radius):
                origins[r] = o
                break

    n_ap = config.vlc_aps_per_room
    local_x = side * (np.arange(n_ap) + 0.5) / n_ap
    vlc = np.empty((config.room_count * n_ap, 3))
    vlc_room = np.repeat(np.arange(config.room_count), n_ap)
    for r in range(config.room_count):
        vlc[r * n_ap:(r + 1) * n_ap, 0] = origins[r, 0] + local_x
        vlc[r * n_ap:(r + 1) * n_ap, 1] = origins[r, 1] + side / 2.0
        vlc[r * n_ap:(r + 1) * n_ap, 2] = config.vlc_ap_height

    urng = rngs["users"]
    n_users = config.user_count
    n_indoor = int(round(config.indoor_user_fraction * n_users)) if config.room_count else 0
    xy = _uniform_disk(urng, n_users, config.macro_radius)
    if n_indoor:
        rooms = urng.integers(0, config.room_count, n_indoor)
        xy[:n_indoor] = origins[rooms] + side * urng.random((n_indoor, 2))
    users = np.column_stack([xy, np.full(n_users, config.receiver_height)])
    user_room = room_index_of(xy, origins, side)

    return Topology(
        macro_position=np.zeros(2),
        pico_positions=pico,
        room_origins=origins,
        vlc_ap_positions=vlc,
        vlc_ap_room=vlc_room,
        user_positions=users,
        user_room=user_room,
        room_side=side,
    )
