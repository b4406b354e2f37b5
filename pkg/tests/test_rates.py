import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from conftest import desk_instance
from rfvlc_alloc.rates import (VLC_SNR_FACTOR, Allocation, ConstraintViolation, LinkSet,
                               check_allocation, check_qos, evaluate, rate_macro, rate_pico,
                               rate_vlc)
from rfvlc_alloc.scenario import ScenarioConfig
from rfvlc_alloc.schemes import run_scg_scg_epa

CFG = ScenarioConfig()


def test_rate_macro_zero_power():
    assert rate_macro(0.0, 1e-9, CFG) == 0.0


def test_rate_macro_matches_formula():
    g = 3.7e-11
    expected = CFG.bandwidth_rf * math.log2(1 + 0.796 * g / (CFG.noise_psd_rf * CFG.bandwidth_rf))
    assert rate_macro(0.796, g, CFG) == pytest.approx(expected, rel=1e-12)


def test_bandwidth_scaling_high_snr():
    g = 1e3 * CFG.noise_rf  # SNR = 1e3 at p = 1
    cfg2 = CFG.replace(bandwidth_rf=2 * CFG.bandwidth_rf)
    # noise scales with bandwidth, so keep SNR by doubling the power too
    assert rate_macro(2.0, g, cfg2) > 1.9 * rate_macro(1.0, g, CFG)


def test_rate_pico_interference():
    g = 1e-10
    free = rate_pico(0.5, g, [], CFG)
    assert free == pytest.approx(rate_macro(0.5, g, CFG))
    assert rate_pico(0.5, g, [(0.5, 1e-11)], CFG) < free
    # symmetric two-cell case
    r1 = rate_pico(0.3, 2e-10, [(0.3, 5e-11)], CFG)
    r2 = rate_pico(0.3, 2e-10, [(0.3, 5e-11)], CFG)
    assert r1 == r2


def test_rate_vlc():
    g = 4.8e-5
    assert rate_vlc(0.02, g, 0.0, [], CFG) == 0.0
    assert rate_vlc(0.0, g, 1.0, [], CFG) == 0.0
    assert VLC_SNR_FACTOR == pytest.approx(0.4326, abs=1e-4)
    snr = 0.02 * (CFG.pd_responsivity * g) ** 2 / CFG.noise_vlc
    shannon = CFG.bandwidth_vlc * math.log2(1 + snr)
    assert rate_vlc(0.02, g, 1.0, [], CFG) < shannon
    assert rate_vlc(0.02, g, 1.0, [], CFG) == pytest.approx(
        CFG.bandwidth_vlc * math.log2(1 + VLC_SNR_FACTOR * snr), rel=1e-12)


def test_negative_power_rejected():
    with pytest.raises(ValueError):
        rate_macro(-1.0, 1e-9, CFG)


def _empty_desk():
    cfg, st_ = desk_instance(0, pico_count=2, room_count=1, vlc_aps_per_room=2)
    alloc = Allocation.empty(st_.n_pico, st_.n_vlc, st_.n_users, st_.n_sub)
    alloc.x_rf[0] = 1
    return cfg, st_, alloc


def test_zero_power_total_is_circuit_floor():
    cfg, st_, alloc = _empty_desk()
    ev = evaluate(alloc, st_, cfg)
    assert ev.total_power == pytest.approx(130 + 2 * 6.8 + 2 * 4)
    assert ev.sum_rate == 0.0 and ev.ee == 0.0


def test_single_macro_link_rate():
    cfg, st_, alloc = _empty_desk()
    alloc.s_macro[3, 2] = 1
    alloc.p_macro[3, 2] = 0.5
    alloc.a[3] = 1
    ev = evaluate(alloc, st_, cfg)
    assert ev.sum_rate == pytest.approx(rate_macro(0.5, st_.g_macro[3, 2], cfg), rel=1e-12)
    assert ev.ee == pytest.approx(ev.sum_rate / ev.total_power)


def test_evaluate_matches_scalar_rates():
    cfg, st_ = desk_instance(5)
    res = run_scg_scg_epa(cfg, st_)
    al = res.allocation
    total = 0.0
    for j, n in np.argwhere(al.s_macro):
        total += rate_macro(al.p_macro[j, n], st_.g_macro[j, n], cfg)
    for k, j, m in np.argwhere(al.s_pico):
        terms = [(al.p_pico[o, :, m].sum(), st_.g_pico[o, j, m])
                 for o in range(st_.n_pico) if o != k and al.s_pico[o, :, m].any()]
        total += rate_pico(al.p_pico[k, j, m], st_.g_pico[k, j, m], terms, cfg)
    for v, j, q in np.argwhere(al.s_vlc):
        terms = [(al.p_vlc[o, :, q].sum(), st_.g_vlc[o, j, q])
                 for o in range(st_.n_vlc) if o != v and al.s_vlc[o, :, q].any()]
        total += rate_vlc(al.p_vlc[v, j, q], st_.g_vlc[v, j, q], st_.rho[v, j, q], terms, cfg)
    assert res.evaluated.sum_rate == pytest.approx(total, rel=1e-10)


def test_evaluate_pure():
    cfg, st_ = desk_instance(6)
    al = run_scg_scg_epa(cfg, st_).allocation
    a, b = evaluate(al, st_, cfg), evaluate(al, st_, cfg)
    assert a.sum_rate == b.sum_rate and np.array_equal(a.per_user_rate, b.per_user_rate)


def test_cross_tier_isolation():
    cfg, st_ = desk_instance(7)
    al = run_scg_scg_epa(cfg, st_).allocation
    links = LinkSet.from_allocation(al, st_, cfg)
    p = links.powers_from(al)
    base = links.rates(p)
    p2 = p.copy()
    macro = links.tier == 0
    p2[macro] *= 0.1
    other = ~macro
    np.testing.assert_array_equal(links.rates(p2)[other], base[other])


@settings(max_examples=30, deadline=None)
@given(seed=st.integers(0, 500), scale=st.floats(1.01, 3.0), idx=st.integers(0, 10_000))
def test_rate_monotonicity(seed, scale, idx):
    cfg, st_ = desk_instance(seed % 7, user_count=8)
    al = run_scg_scg_epa(cfg, st_).allocation
    links = LinkSet.from_allocation(al, st_, cfg)
    if links.size == 0:
        return
    p = links.powers_from(al) * 0.5
    l = idx % links.size
    up = p.copy()
    up[l] *= scale
    r0, r1 = links.rates(p), links.rates(up)
    assert np.all(r0 >= 0)
    assert r1[l] > r0[l]
    others = np.arange(links.size) != l
    assert np.all(r1[others] <= r0[others] + 1e-6)


def _valid():
    cfg, st_ = desk_instance(1)
    return cfg, run_scg_scg_epa(cfg, st_).allocation


@pytest.mark.parametrize("mutate,code", [
    (lambda al: al.s_macro.__setitem__((0, 0), 2), "C10"),
    (lambda al: al.x_rf.__setitem__((slice(None), 0), 0), "C6"),
    (lambda al: al.p_macro.__setitem__(np.nonzero(al.s_macro), 0.9 * CFG.p_macro_budget), "C3"),
    (lambda al: al.p_macro.__setitem__(np.nonzero(al.s_macro == 0), 0.01), "C2"),
])
def test_constraint_violations(mutate, code):
    cfg, al = _valid()
    al = al.copy()
    mutate(al)
    with pytest.raises(ConstraintViolation) as exc:
        check_allocation(al, cfg)
    assert exc.value.constraint == code


def test_c4_c5_c1_c7():
    cfg, al = _valid()
    b = al.copy()
    n = int(np.argmax(b.s_macro.sum(axis=0)))
    holder = int(np.argmax(b.s_macro[:, n]))
    other = [j for j in range(b.n_users) if j != holder and b.x_rf[0, j]][0]
    b.s_macro[other, n] = 1
    b.a[other] = 1
    with pytest.raises(ConstraintViolation, match="C4"):
        check_allocation(b, cfg)

    c = al.copy()
    c.a[holder] = 0
    with pytest.raises(ConstraintViolation, match="C5"):
        check_allocation(c, cfg)

    d = al.copy()
    d.x_rf[0, holder] = 0
    d.x_rf[1, holder] = 1
    with pytest.raises(ConstraintViolation, match="C1"):
        check_allocation(d, cfg)

    e = al.copy()
    e.x_vlc[:, 0] = 1
    with pytest.raises(ConstraintViolation, match="C7"):
        check_allocation(e, cfg)


def test_check_qos():
    from rfvlc_alloc.rates import EvaluatedAllocation
    cfg = CFG
    alloc = Allocation.empty(0, 0, 3, 1)
    alloc.a[:] = [0, 1, 1]
    ev = EvaluatedAllocation(per_user_rate=np.array([0.0, cfg.r_min, cfg.r_min - 1]),
                             sum_rate=0.0, total_power=1.0, ee=0.0)
    assert check_qos(ev, alloc, cfg).tolist() == [True, True, False]
