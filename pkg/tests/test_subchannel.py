import itertools

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import desk_instance
from rfvlc_alloc.channel import ChannelState
from rfvlc_alloc.rates import ConstraintViolation
from rfvlc_alloc.scenario import ScenarioConfig
from rfvlc_alloc.schemes import scg_assignment
from rfvlc_alloc.subchannel import allocate_qos_first, allocate_scg, build_allocation, validate_sa


def _state(g_macro, g_pico=None, g_vlc=None, rho=None):
    g_macro = np.asarray(g_macro, float)
    J, N = g_macro.shape
    g_pico = np.zeros((0, J, N)) if g_pico is None else np.asarray(g_pico, float)
    g_vlc = np.zeros((0, J, N)) if g_vlc is None else np.asarray(g_vlc, float)
    rho = np.ones_like(g_vlc) if rho is None else np.asarray(rho, float)
    return ChannelState(g_macro=g_macro, g_pico=g_pico, g_vlc=g_vlc, rho=rho,
                        pico_coverage=np.ones(g_pico.shape[:2], bool))


def test_one_user_gets_everything():
    st_ = _state([[1e-9, 2e-9, 3e-9]])
    (sm, sp, sv), a = allocate_scg(np.ones((1, 1), int), np.zeros((0, 1), int), st_)
    assert sm.tolist() == [[1, 1, 1]] and a.tolist() == [1]


def test_per_subchannel_argmax_and_ties():
    g = np.array([[3.0, 1.0, 2.0], [1.0, 4.0, 2.0]]) * 1e-10
    (sm, _, _), a = allocate_scg(np.ones((1, 2), int), np.zeros((0, 2), int), _state(g))
    assert sm.tolist() == [[1, 0, 1], [0, 1, 0]]  # tie on subchannel 2 -> lower index


def test_tiers_independent():
    g_vlc = np.zeros((1, 1, 2))
    st_ = _state([[1e-9, 1e-9]], g_vlc=g_vlc, rho=np.zeros((1, 1, 2)))
    (sm, _, sv), a = allocate_scg(np.ones((1, 1), int), np.ones((1, 1), int), st_)
    assert sm.sum() == 2 and a[0] == 1


def test_qos_first_serves_weak_user():
    g = np.array([[1e-8, 1e-8], [1e-13, 1e-13]])
    cfg = ScenarioConfig(r_min=50e6)
    x = np.ones((1, 2), int)
    (sm, _, _), a = allocate_qos_first(x, np.zeros((0, 2), int), _state(g), cfg)
    assert sm[1].sum() >= 1 and a.tolist() == [1, 1]
    (scg, _, _), _ = allocate_scg(x, np.zeros((0, 2), int), _state(g))
    assert scg[1].sum() == 0


def test_qos_first_zero_rmin_equals_scg():
    cfg, st_ = desk_instance(3, r_min=0.0)
    x_rf, x_vlc = scg_assignment(st_, cfg)
    s1, a1 = allocate_qos_first(x_rf, x_vlc, st_, cfg)
    s2, a2 = allocate_scg(x_rf, x_vlc, st_)
    for u, v in zip(s1, s2):
        np.testing.assert_array_equal(u, v)


def test_qos_first_postcondition():
    cfg, st_ = desk_instance(4, user_count=6)
    x_rf, x_vlc = scg_assignment(st_, cfg)
    s, a = allocate_qos_first(x_rf, x_vlc, st_, cfg)
    validate_sa(s, x_rf, x_vlc)
    # every AP with assigned users hands out every subchannel
    sm, sp, sv = s
    if x_rf[0].any():
        assert np.all(sm.sum(axis=0) == 1)


def test_validate_sa_errors():
    cfg, st_ = desk_instance(2)
    x_rf, x_vlc = scg_assignment(st_, cfg)
    s, a = allocate_scg(x_rf, x_vlc, st_)
    validate_sa(s, x_rf, x_vlc)
    sm, sp, sv = (t.copy() for t in s)
    n = 0
    holder = int(np.argmax(sm[:, n]))
    other = [j for j in np.nonzero(x_rf[0])[0] if j != holder][0]
    sm[other, n] = 1
    with pytest.raises(ConstraintViolation, match="C4"):
        validate_sa((sm, sp, sv), x_rf, x_vlc)
    moved = x_rf.copy()
    moved[:, holder] = 0
    moved[1, holder] = 1
    with pytest.raises(ConstraintViolation, match="C1"):
        validate_sa(s, moved, x_vlc)


def test_build_allocation_zero_power():
    cfg, st_ = desk_instance(2)
    x_rf, x_vlc = scg_assignment(st_, cfg)
    s, a = allocate_scg(x_rf, x_vlc, st_)
    al = build_allocation(x_rf, x_vlc, s, a)
    assert al.p_macro.sum() == 0 and np.array_equal(al.a, (al.subchannel_counts() > 0).astype(int))


@settings(max_examples=60, deadline=None)
@given(J=st.integers(1, 3), N=st.integers(1, 4), data=st.data())
def test_scg_maximizes_total_gain(J, N, data):
    g = np.array(data.draw(st.lists(st.lists(st.floats(1e-12, 1e-8), min_size=N, max_size=N),
                                    min_size=J, max_size=J)))
    x = np.ones((1, J), int)
    (sm, _, _), a = allocate_scg(x, np.zeros((0, J), int), _state(g))
    got = float((sm * g).sum())
    best = max(sum(g[u, n] for n, u in enumerate(choice))
               for choice in itertools.product(range(J), repeat=N))
    assert got == pytest.approx(best, rel=1e-12)
    assert np.all(sm.sum(axis=0) == 1)
    assert np.array_equal(a == 0, sm.sum(axis=1) == 0)
