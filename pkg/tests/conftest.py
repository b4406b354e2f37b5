import numpy as np
import pytest

from rfvlc_alloc.channel import build_channel_state
from rfvlc_alloc.rates import TIER_MACRO, TIER_PICO, TIER_VLC, LinkSet
from rfvlc_alloc.scenario import ScenarioConfig, generate_topology


def make_links(a, *, w=10e6, c=1.0, noise=1e-13, B=None, group=None, budget=(1.0,),
               user=None, n_users=None, tier=None):
    """Hand-built LinkSet for solver tests."""
    a = np.asarray(a, float)
    L = len(a)
    group = np.zeros(L, int) if group is None else np.asarray(group, int)
    user = np.arange(L) if user is None else np.asarray(user, int)
    tier = np.full(L, TIER_PICO) if tier is None else np.asarray(tier, int)
    return LinkSet(tier=tier, ap=group.copy(), user=user, sub=np.zeros(L, int), group=group,
                   a=a, w=np.broadcast_to(np.asarray(w, float), (L,)).copy(),
                   c=np.broadcast_to(np.asarray(c, float), (L,)).copy(),
                   n=np.broadcast_to(np.asarray(noise, float), (L,)).copy(),
                   B=np.zeros((L, L)) if B is None else np.asarray(B, float),
                   budget=np.asarray(budget, float),
                   n_users=int(user.max() + 1) if n_users is None else n_users,
                   shapes=((max(L, 1), 1), (0, max(L, 1), 1), (0, max(L, 1), 1)))


def desk_instance(seed=0, **overrides):
    cfg = ScenarioConfig(seed=seed, **overrides)
    return cfg, build_channel_state(generate_topology(cfg), cfg)


def tiny_config(seed):
    """Tiny instances used for oracle comparisons (<= 3 users, APs, subchannels)."""
    rng = np.random.default_rng(seed)
    pico, rooms, vpr = [(2, 0, 1), (1, 1, 1), (0, 1, 2), (0, 2, 1), (1, 0, 1)][seed % 5]
    return ScenarioConfig(seed=seed, user_count=int(rng.integers(1, 4)),
                          subchannels_per_ap=int(rng.integers(1, 4)), pico_count=pico,
                          room_count=rooms, vlc_aps_per_room=vpr, macro_radius=150.0,
                          pico_radius=100.0, indoor_user_fraction=0.5)


_ACCEPTANCE = pytest.StashKey[list]()


@pytest.fixture
def acceptance(request):
    """Record one PASS/FAIL line per acceptance criterion for the terminal summary."""
    lines = request.config.stash.setdefault(_ACCEPTANCE, [])

    def report(name, ok, detail):
        line = f"[{'PASS' if ok else 'FAIL'}] {name}: {detail}"
        lines.append(line)
        print(line)
        return ok
    return report


def pytest_terminal_summary(terminalreporter, exitstatus, config):
    lines = config.stash.get(_ACCEPTANCE, [])
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)


@pytest.fixture
def desk():
    return desk_instance(0)


__all__ = ["make_links", "desk_instance", "tiny_config", "TIER_MACRO", "TIER_VLC"]
